import logging
import sys
from typing import Optional, Union

ROOT_LOGGER_NAME = "cliqueann"
DEFAULT_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

_HANDLER_ATTR = "_cliqueann_handler"


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """Logger under the ``cliqueann`` namespace."""
    if not name or name == ROOT_LOGGER_NAME:
        return logging.getLogger(ROOT_LOGGER_NAME)
    if name.startswith(ROOT_LOGGER_NAME + "."):
        return logging.getLogger(name)
    return logging.getLogger(f"{ROOT_LOGGER_NAME}.{name}")


def configure_logging(level: Union[int, str] = logging.INFO,
                      fmt: str = DEFAULT_FORMAT,
                      stream=None) -> logging.Logger:
    """Attach a single stream handler to the package logger.

    Calling it again only updates the level and format.
    """
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO

    root = logging.getLogger(ROOT_LOGGER_NAME)
    root.setLevel(level)

    handler = None
    for h in root.handlers:
        if getattr(h, _HANDLER_ATTR, False):
            handler = h
            break
    if handler is None:
        handler = logging.StreamHandler(stream or sys.stderr)
        setattr(handler, _HANDLER_ATTR, True)
        root.addHandler(handler)
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(fmt))
    return root


def verbosity_to_level(verbose: int) -> int:
    if verbose <= 0:
        return logging.WARNING
    if verbose == 1:
        return logging.INFO
    return logging.DEBUG
