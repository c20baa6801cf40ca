"""Logarithm base used for every entropy-like quantity.

Bits by default. The base is a process-wide flag so the CLI's ``--nats``
switch reaches every module without threading a parameter through.
"""
import logging
import math

import numpy as np

from config import LOG_BASE
from .exceptions import ParameterError

logger = logging.getLogger(__name__)

_BASES = {"2": 2.0, "e": math.e}
_base_key: str = LOG_BASE if LOG_BASE in _BASES else "2"


def set_log_base(key: str) -> None:
    """Switch the global base: ``"2"`` (bits) or ``"e"`` (nats)."""
    global _base_key
    if key not in _BASES:
        raise ParameterError(f"Unknown log base {key!r}; expected one of {sorted(_BASES)}")
    _base_key = key
    logger.debug(f"Log base set to {key}")


def log_base() -> float:
    return _BASES[_base_key]


def unit_name() -> str:
    return "bits" if _base_key == "2" else "nats"


def log(x):
    """Logarithm in the configured base; ``log(0) = -inf``."""
    with np.errstate(divide="ignore"):
        if _base_key == "2":
            return np.log2(x)
        return np.log(x)


def power(x):
    """Inverse of :func:`log`: ``base ** x``."""
    return np.power(log_base(), x)
