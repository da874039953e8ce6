"""
Passenger WSGI entry point for shared hosting (cPanel "Setup Python App").
"""

import logging
import os
import sys

from dotenv import load_dotenv

BASE_DIR = os.path.dirname(os.path.abspath(__file__))
load_dotenv(os.path.join(BASE_DIR, ".env"))

# Interpreter of the hosting virtualenv, e.g. ~/virtualenv/torus/3.11/bin/python3
INTERP = os.path.expanduser(os.environ.get("TORUS_PASSENGER_PYTHON", ""))
if INTERP and sys.executable != INTERP and os.path.exists(INTERP):
    os.execl(INTERP, INTERP, *sys.argv)

if BASE_DIR not in sys.path:
    sys.path.insert(0, BASE_DIR)

# The 'application' variable name is required by Passenger
from app import app as application
from utils.logging_setup import configure_logging

configure_logging(log_path=os.environ.get("TORUS_LOG_FILE") or None)

logger = logging.getLogger(__name__)
logger.info(f"Passenger WSGI application started on Python {sys.version.split()[0]}")
logger.info(f"API routes: {sorted(r.rule for r in application.url_map.iter_rules() if r.rule.startswith('/api'))}")
