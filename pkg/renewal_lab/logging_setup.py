"""
Logging configuration for the command-line entry points
"""

import logging
import sys
from typing import Optional

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

PACKAGE_LOGGER = "renewal_lab"


class _StderrHandler(logging.StreamHandler):
    """Writes to whatever sys.stderr currently is"""

    def __init__(self, level=logging.NOTSET):
        logging.Handler.__init__(self, level)

    @property
    def stream(self):
        return sys.stderr


def configure_logging(level: str = "WARNING", log_file: Optional[str] = None) -> None:
    """
    Console handler on stderr plus an optional append-mode file handler

    Standard output is left to the one-line result summary. Calling it
    again replaces the handlers installed by the previous call.

    Args:
        level: Level name for the renewal_lab loggers
        log_file: Optional path of a log file
    """
    package_logger = logging.getLogger(PACKAGE_LOGGER)
    for handler in list(package_logger.handlers):
        if getattr(handler, "_renewal_lab", False):
            package_logger.removeHandler(handler)
            handler.close()

    handlers = [_StderrHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file, mode="a"))

    formatter = logging.Formatter(LOG_FORMAT)
    for handler in handlers:
        handler.setFormatter(formatter)
        handler._renewal_lab = True
        package_logger.addHandler(handler)

    package_logger.setLevel(level.upper())

    # matplotlib is chatty at DEBUG
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
