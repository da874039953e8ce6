import logging
import os

from utils.config import env_flag

_MANAGED = "_torus_managed"
_COLORS = {
    logging.DEBUG: "\033[37m",
    logging.INFO: "\033[36m",
    logging.WARNING: "\033[33m",
    logging.ERROR: "\033[31m",
    logging.CRITICAL: "\033[41m\033[37m",
}


class _ConsoleFormatter(logging.Formatter):
    """One line per record, tinted by level when the terminal allows it."""

    def __init__(self, use_color: bool):
        super().__init__("[%(asctime)s] [%(levelname)-8s] [%(name)-20.20s] %(message)s", datefmt="%H:%M:%S")
        self.use_color = use_color

    def format(self, record: logging.LogRecord) -> str:
        line = super().format(record)
        color = _COLORS.get(record.levelno) if self.use_color else None
        return f"{color}{line}\033[0m" if color else line


def _level(default: int) -> int:
    level = logging.getLevelName((os.environ.get("LOG_LEVEL") or "").strip().upper())
    return level if isinstance(level, int) else default


def _managed(handler: logging.Handler) -> bool:
    return getattr(handler, _MANAGED, False)


def configure_logging(default_level: int = logging.INFO, log_path: str | None = None):
    """Install the console handler once, plus a file handler when a path or LOG_TO_FILE asks for one.

    LOG_LEVEL overrides default_level; LOG_COLOR=0 turns the tint off.
    """
    root = logging.getLogger()
    root.setLevel(_level(default_level))

    consoles = [h for h in root.handlers if type(h) is logging.StreamHandler]
    for handler in consoles:
        if not _managed(handler):
            root.removeHandler(handler)
    if not any(_managed(h) for h in consoles):
        console = logging.StreamHandler()
        setattr(console, _MANAGED, True)
        console.setFormatter(_ConsoleFormatter(env_flag("LOG_COLOR", True)))
        root.addHandler(console)

    if log_path is None:
        if not env_flag("LOG_TO_FILE", False):
            return
        log_path = os.path.join(os.getcwd(), "torus.log")
    target = os.path.abspath(log_path)
    if any(getattr(h, "baseFilename", None) == target for h in root.handlers):
        return
    try:
        file_handler = logging.FileHandler(target, encoding="utf-8")
    except OSError as exc:
        root.warning(f"Could not initialize file logging: {exc}")
        return
    file_handler.setFormatter(
        logging.Formatter("%(asctime)s | %(levelname)-8s | %(name)s | %(message)s", datefmt="%Y-%m-%d %H:%M:%S")
    )
    root.addHandler(file_handler)
    root.info(f"File logging initialized: {target}")
