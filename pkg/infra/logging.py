# infra/logging.py
"""
Logging infrastructure for EC2 Factor Lab.
Logs key events only: startup, worker start/finish/errors, one line per trial.
Library modules log through child loggers ("EC2FactorLab.core.*") and never
attach handlers themselves.
"""
from __future__ import annotations

import logging
import sys
from datetime import datetime
from logging.handlers import RotatingFileHandler
from typing import Mapping

from infra.paths import get_logs_dir

LOGGER_NAME = "EC2FactorLab"
_FORMAT = '%(asctime)s | %(levelname)-8s | %(message)s'
_DATEFMT = '%Y-%m-%d %H:%M:%S'


def _formatter() -> logging.Formatter:
    return logging.Formatter(_FORMAT, datefmt=_DATEFMT)


def _monthly_file_handler() -> RotatingFileHandler:
    """<data root>/logs/ec2factor_YYYY-MM.log, 5 MB per file, 3 backups."""
    path = get_logs_dir() / f"ec2factor_{datetime.now():%Y-%m}.log"
    handler = RotatingFileHandler(path, maxBytes=5 << 20, backupCount=3, encoding="utf-8")
    handler.setFormatter(_formatter())
    return handler


def get_logger(name: str = LOGGER_NAME) -> logging.Logger:
    """Application logger; the file handler is attached on first use only."""
    logger = logging.getLogger(name)
    if not logger.handlers:
        logger.setLevel(logging.INFO)
        logger.addHandler(_monthly_file_handler())
    return logger


def enable_console(level: int = logging.INFO) -> logging.Logger:
    """Mirror the application log to stderr (CLI --verbose)."""
    logger = get_logger()
    if any(getattr(h, "stream", None) is sys.stderr for h in logger.handlers):
        return logger
    console = logging.StreamHandler(sys.stderr)
    console.setFormatter(_formatter())
    console.setLevel(level)
    logger.addHandler(console)
    logger.setLevel(min(logger.level, level))
    return logger


def log_startup(version: str, gmpy2_version: str, sympy_version: str):
    logger = get_logger()
    logger.info("=" * 60)
    logger.info(f"EC2 Factor Lab {version} started")
    logger.info(f"gmpy2: {gmpy2_version}")
    logger.info(f"sympy: {sympy_version}")


def log_worker_event(worker_type: str, event: str, details: str = ""):
    """
    Log worker lifecycle events.

    Args:
        worker_type: Type of worker (Factor/SmoothLab/CLI)
        event: Event type (started/finished/error/cancelled)
        details: Additional details (trial counts, error messages)
    """
    logger = get_logger()
    if details:
        logger.info(f"{worker_type} {event}: {details}")
    else:
        logger.info(f"{worker_type} {event}")


def log_trial_event(record: Mapping[str, object]):
    """One line per finished trial (the JSON form of a TrialRecord)."""
    logger = get_logger()
    logger.info(
        f"trial {record.get('trial')} B={record.get('b')} {record.get('outcome')} "
        f"t_min={record.get('t_min')} d={record.get('d')} ms={record.get('ms')}"
    )
