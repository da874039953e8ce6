import logging
import os
from fractions import Fraction

from flask import Blueprint, current_app, jsonify, request, send_from_directory
from werkzeug.exceptions import HTTPException

from utils import reports
from utils.approx import certify, find_periodic_basis
from utils.circle import RotationNumber, ergodization_steps, theorem2_check
from utils.ergodization import constructive_hit, ergodization_time_bracket
from utils.errors import HypothesisError, SpecParseError, TorusError
from utils.resonance import analyze, psi
from utils.vector_spec import BUILTIN_ROTATIONS, BUILTIN_VECTORS, resolve_rotation, resolve_vector

logger = logging.getLogger(__name__)

query_bp = Blueprint("query", __name__, url_prefix="/api")

SCHEMAS = {"vector": "vector_spec_schema.json", "sweep": "sweep_spec_schema.json"}


def _payload() -> dict:
    data = request.get_json(silent=True)
    if not isinstance(data, dict):
        raise SpecParseError("request body must be a JSON object")
    return data


def _rational(data: dict, key: str, required: bool = True) -> Fraction | None:
    raw = data.get(key)
    if raw is None:
        if required:
            raise SpecParseError(f"'{key}' is required")
        return None
    try:
        return Fraction(str(raw))
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecParseError(f"'{key}' must be a rational such as \"3/4\"") from exc


def _resonance(data: dict):
    """Expected shape: {"vector": "<built-in name>" | {inline vector spec}, ...}"""
    if "vector" not in data:
        raise SpecParseError("'vector' is required")
    vector = resolve_vector(data["vector"])
    return vector, analyze(vector.vector())


@query_bp.errorhandler(TorusError)
def _torus_error(exc: TorusError):
    hypothesis = exc.hypothesis if isinstance(exc, HypothesisError) else None
    logger.info(f"Rejected {request.path}: {exc}")
    return jsonify({"error": str(exc), "hypothesis": hypothesis}), 400


@query_bp.errorhandler(Exception)
def _unexpected_error(exc: Exception):
    if isinstance(exc, HTTPException):
        return exc
    logger.exception(f"Unhandled error on {request.path}")
    return jsonify({"error": "failed_to_compute", "message": str(exc)}), 500


# API: GET "/api/vectors"
# Purpose: names accepted wherever a vector or rotation is expected
@query_bp.route("/vectors", methods=["GET"])
def api_vectors():
    return jsonify(
        {
            "vectors": {name: spec.to_json() for name, spec in BUILTIN_VECTORS.items()},
            "rotations": sorted(BUILTIN_ROTATIONS),
        }
    )


# API: GET "/api/schemas/<kind>"
# Purpose: JSON Schema (draft-07) of the vector-spec and sweep files
@query_bp.route("/schemas/<kind>", methods=["GET"])
def api_schema(kind):
    if kind not in SCHEMAS:
        return jsonify({"error": f"unknown schema {kind!r}", "known": sorted(SCHEMAS)}), 404
    return send_from_directory(os.path.join(current_app.static_folder, "json"), SCHEMAS[kind], mimetype="application/json")


@query_bp.route("/analyze", methods=["POST"])
def api_analyze():
    vector, R = _resonance(_payload())
    return jsonify({"vector": vector.name, "resonance": reports.resonance_json(R)})


@query_bp.route("/psi", methods=["POST"])
def api_psi():
    """
    Expected JSON shape:
    { "vector": "sqrt2", "Q": "5" }
    """
    data = _payload()
    vector, R = _resonance(data)
    return jsonify({"vector": vector.name, "psi": reports.psi_json(psi(R, _rational(data, "Q")))})


@query_bp.route("/approx", methods=["POST"])
def api_approx():
    data = _payload()
    vector, R = _resonance(data)
    approximation = find_periodic_basis(R, _rational(data, "Q"))
    report = certify(R, approximation)
    return jsonify({"vector": vector.name, "approximation": reports.approximation_json(approximation, report)})


@query_bp.route("/ergodize", methods=["POST"])
def api_ergodize():
    """
    Expected JSON shape:
    { "vector": "sqrt2", "delta": "1/2", "tol": "1/10", "epsilon": "1/16", "theta": ["1/2", "1/2"] }

    tol, epsilon and theta are optional; theta adds the constructive hit.
    """
    data = _payload()
    vector, R = _resonance(data)
    delta = _rational(data, "delta")
    bracket = ergodization_time_bracket(
        R, delta, _rational(data, "tol", required=False), _rational(data, "epsilon", required=False)
    )
    payload = {"vector": vector.name, "bracket": reports.bracket_json(bracket)}
    theta = data.get("theta")
    if theta is not None:
        if not isinstance(theta, list):
            raise SpecParseError("'theta' must be a list of rationals")
        target = [_rational({"theta": x}, "theta") for x in theta]
        payload["hit"] = reports.hit_json(constructive_hit(R, delta, target))
    return jsonify(payload)


@query_bp.route("/circle", methods=["POST"])
def api_circle():
    """
    Expected JSON shape:
    { "alpha": "golden" | "1/3", "delta": "1/4" }
    """
    data = _payload()
    name, value = resolve_rotation(str(data.get("alpha") or ""))
    alpha = RotationNumber.from_scalar(value, name)
    delta = _rational(data, "delta")
    if alpha.is_rational:
        return jsonify({"alpha": name, "delta": str(delta), "N": ergodization_steps(alpha, delta), "bound": None, "pass": None})
    return jsonify(reports.theorem2_json(theorem2_check(alpha, delta)))
