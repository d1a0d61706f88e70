# src/utils/logger.py
import logging
import sys

from config.settings import LOG_LEVEL

def setup_logger(name, level=None):
    logger = logging.getLogger(name)
    if not logger.handlers:
        formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
        # stdout carries the key=value results, so logs go to stderr
        ch = logging.StreamHandler(sys.stderr)
        ch.setFormatter(formatter)
        logger.addHandler(ch)
        logger.setLevel(level if level is not None else LOG_LEVEL)
        logger.propagate = False
    return logger

def set_global_level(level):
    """Apply a level to every logger created through setup_logger."""
    for logger in logging.Logger.manager.loggerDict.values():
        if isinstance(logger, logging.Logger) and logger.handlers:
            logger.setLevel(level)
