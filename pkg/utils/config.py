import logging
import os

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

load_dotenv()


def env_flag(name: str, default: bool) -> bool:
    raw = (os.environ.get(name) or "").strip().lower()
    if not raw:
        return default
    return raw in {"1", "true", "yes", "on"}


def env_int(name: str, default: int, minimum: int = 1) -> int:
    """Read a positive integer setting from the environment with sane bounds."""
    raw = (os.environ.get(name) or "").strip().replace("_", "")
    if not raw:
        return default
    try:
        value = int(raw)
    except Exception:
        logger.warning(f"Invalid {name} value: {raw!r}. Using default {default}.")
        return default
    if value < minimum:
        logger.warning(f"{name}={value} is below {minimum}. Using {minimum}.")
        return minimum
    return value


def precision_bits() -> int:
    # Starting bit-width of every enclosure; refinement doubles from here.
    return env_int("TORUS_PRECISION_BITS", 64, minimum=8)


def sign_step_cap() -> int:
    return env_int("TORUS_SIGN_STEP_CAP", 1_000_000, minimum=64)


def subset_cap() -> int:
    return env_int("TORUS_SUBSET_CAP", 1_000_000)


def circle_step_cap() -> int:
    return env_int("TORUS_CIRCLE_STEP_CAP", 10_000_000)


def diophantine_radius() -> int:
    return env_int("TORUS_DIOPHANTINE_RADIUS", 32)


def max_samples() -> int:
    return env_int("TORUS_MAX_SAMPLES", 2_000_000, minimum=16)
