import logging
import os

from dotenv import load_dotenv
from flask import Flask, jsonify, request
from werkzeug.middleware.proxy_fix import ProxyFix

from utils.config import env_flag, env_int
from utils.logging_setup import configure_logging

# Load environment variables from .env file
load_dotenv()

configure_logging()
logger = logging.getLogger(__name__)

# Create Flask app
app = Flask(__name__)
app.json.sort_keys = False

# Trust forwarded headers only when explicitly configured behind a reverse proxy.
TRUSTED_PROXY_HOPS = env_int("TRUSTED_PROXY_HOPS", 0, minimum=0)
app.config["TRUSTED_PROXY_HOPS"] = TRUSTED_PROXY_HOPS

if TRUSTED_PROXY_HOPS > 0:
    app.wsgi_app = ProxyFix(
        app.wsgi_app,
        x_for=TRUSTED_PROXY_HOPS,
        x_proto=TRUSTED_PROXY_HOPS,
        x_host=TRUSTED_PROXY_HOPS,
        x_port=TRUSTED_PROXY_HOPS,
    )
    logger.info(f"ProxyFix enabled with TRUSTED_PROXY_HOPS={TRUSTED_PROXY_HOPS}")

FLASK_ENV = os.environ.get("FLASK_ENV", "development")
APP_DEBUG = env_flag("APP_DEBUG", FLASK_ENV == "development" and TRUSTED_PROXY_HOPS == 0)


# API: GET "/health"
# Used by: deployment health checks and quick connectivity tests
@app.route("/health", methods=["GET"])
def health():
    logger.info(f"Request received: {request.method} {request.path}")
    return jsonify({"status": "ok"})


from blueprints.query_routes import query_bp

app.register_blueprint(query_bp)


if __name__ == "__main__":
    logger.info("Application startup initiated")
    logger.info(f"Runtime debug mode: {'enabled' if APP_DEBUG else 'disabled'}")
    app.run(host="127.0.0.1", port=5000, debug=APP_DEBUG)
