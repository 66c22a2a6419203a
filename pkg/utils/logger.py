"""
Logging utility for galband
One console handler (stderr) and one rotating log file shared by every galband logger
"""

import os
import sys
import time
import logging
import logging.handlers
from functools import lru_cache, wraps
from typing import List, Optional

import psutil

from config import Config

LOG_FILE_BYTES = 10 * 1024 * 1024
LOG_FILE_BACKUPS = 5


def _level(name: Optional[str]) -> int:
    return getattr(logging, (name or Config.LOG_LEVEL).upper(), logging.INFO)


@lru_cache(maxsize=None)
def _shared_handlers() -> List[logging.Handler]:
    """stderr handler plus the rotating file handler, created on first use"""
    formatter = logging.Formatter(Config.LOG_FORMAT)
    handlers: List[logging.Handler] = []

    # stdout is reserved for CSV/JSON data
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    handlers.append(console_handler)

    try:
        os.makedirs(Config.LOGS_DIR, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            Config.LOG_FILE, maxBytes=LOG_FILE_BYTES, backupCount=LOG_FILE_BACKUPS, encoding="utf-8"
        )
        file_handler.setFormatter(formatter)
        handlers.append(file_handler)
    except OSError as e:
        console_handler.handle(logging.makeLogRecord({
            "name": "galband", "levelno": logging.WARNING, "levelname": "WARNING",
            "msg": f"File logging disabled for {Config.LOG_FILE}: {str(e)}",
        }))

    for handler in handlers:
        handler.setLevel(_level(None))
    return handlers


def setup_logger(name: str, level: Optional[str] = None) -> logging.Logger:
    """
    Logger attached to the shared galband handlers

    Args:
        name: Logger name
        level: Log level (default: Config.LOG_LEVEL)

    Returns:
        Configured logger; repeated calls return it unchanged
    """
    logger = logging.getLogger(name)
    if logger.handlers:
        return logger

    logger.setLevel(_level(level))
    logger.propagate = False
    for handler in _shared_handlers():
        logger.addHandler(handler)
    return logger


def set_log_level(level: str) -> None:
    """Change the level of the shared handlers and of every galband logger created so far"""
    log_level = _level(level)
    shared = _shared_handlers()
    for handler in shared:
        handler.setLevel(log_level)
    for logger in logging.Logger.manager.loggerDict.values():
        if isinstance(logger, logging.Logger) and any(h in shared for h in logger.handlers):
            logger.setLevel(log_level)


def log_execution_time(func):
    """
    Decorator logging the wall time of func at DEBUG, and at ERROR when it raises

    Args:
        func: Function to decorate

    Returns:
        Decorated function
    """
    @wraps(func)
    def wrapper(*args, **kwargs):
        logger = setup_logger(f"{func.__module__}.{func.__qualname__}")
        start = time.perf_counter()
        try:
            result = func(*args, **kwargs)
        except Exception as e:
            logger.error(f"{func.__qualname__} failed after {time.perf_counter() - start:.3f} s: {str(e)}")
            raise
        logger.debug(f"{func.__qualname__} took {time.perf_counter() - start:.3f} s")
        return result

    return wrapper


def log_memory_usage(tag: str = "") -> float:
    """Log the resident set size and return it in MB"""
    rss_mb = psutil.Process().memory_info().rss / (1024 * 1024)
    setup_logger('memory_monitor').debug(f"Memory usage{f' ({tag})' if tag else ''}: {rss_mb:.2f} MB")
    return rss_mb
