"""
Logger
Colored console logging for the attraction-games tools.
"""

import logging
import sys

from colorama import Fore, Style, init as colorama_init

from config.settings import settings

colorama_init()

_LEVEL_COLORS = {
    logging.DEBUG: Fore.CYAN,
    logging.INFO: Fore.GREEN,
    logging.WARNING: Fore.YELLOW,
    logging.ERROR: Fore.RED,
    logging.CRITICAL: Fore.RED + Style.BRIGHT,
}


class ColorFormatter(logging.Formatter):
    """Prefix each record with its level name in the level's color."""

    def format(self, record: logging.LogRecord) -> str:
        color = _LEVEL_COLORS.get(record.levelno, "")
        level = f"{color}{record.levelname:<8}{Style.RESET_ALL}"
        return f"{level} {super().format(record)}"


def _build_logger() -> logging.Logger:
    log = logging.getLogger("attraction_games")
    if not log.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(ColorFormatter("%(message)s"))
        log.addHandler(handler)
    log.setLevel(getattr(logging, settings.log_level, logging.WARNING))
    log.propagate = False
    return log


logger = _build_logger()
