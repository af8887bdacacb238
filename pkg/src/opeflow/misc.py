# -*- coding=utf-8 -*-
import hashlib
import json
import logging
import sys

from fractions import Fraction
from typing import Any, Optional, Union

import numpy as np

__all__ = [
    "as_fraction",
    "canonical_json",
    "content_digest",
    "fraction_to_json",
    "fraction_to_ratio",
    "set_verbosity",
    "to_text",
]

LOG_FORMAT = "%(levelname)s %(asctime)s %(module)s %(process)d %(thread)d %(message)s"


def _get_logger(name=None, level="ERROR"):
    # type: (Optional[str], Union[str, int]) -> logging.Logger
    if not name:
        name = __name__
    if isinstance(level, str):
        level = getattr(logging, level.upper())
    logger = logging.getLogger(name)
    logger.setLevel(level)
    if not any(getattr(h, "_opeflow_handler", False) for h in logger.handlers):
        formatter = logging.Formatter(LOG_FORMAT)
        handler = logging.StreamHandler(stream=sys.stderr)
        handler.setFormatter(formatter)
        handler._opeflow_handler = True
        logger.addHandler(handler)
    return logger


def set_verbosity(verbosity, default="WARNING"):
    # type: (int, Union[str, int]) -> int
    """Map a ``-v`` count onto the level of every ``opeflow`` logger.

    :param int verbosity: Number of ``-v`` flags seen on the command line
    :param default: Level used when no flag was given
    :return: The logging level that was applied
    :rtype: int
    """

    if verbosity:
        level = logging.INFO if verbosity == 1 else logging.DEBUG
    elif isinstance(default, str):
        level = getattr(logging, default.upper())
    else:
        level = default
    for name in list(logging.Logger.manager.loggerDict):
        if name == "opeflow" or name.startswith("opeflow."):
            logging.getLogger(name).setLevel(level)
    return level


def to_text(string, encoding="utf-8", errors="strict"):
    """Force a value to a text-type.

    :param string: Some input that can be converted to a unicode representation.
    :type string: str or bytes
    :return: The unicode representation of the string
    :rtype: str
    """

    if isinstance(string, str):
        return string
    if isinstance(string, bytes):
        return string.decode(encoding, errors)
    return str(string)


def as_fraction(value):
    # type: (Any) -> Fraction
    """Coerce ints, strings like ``"3/2"`` and floats with short decimal
    expansions to an exact :class:`~fractions.Fraction`."""

    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value).limit_denominator(1000)
    return Fraction(value)


def fraction_to_json(value):
    # type: (Fraction) -> Union[int, str]
    value = as_fraction(value)
    if value.denominator == 1:
        return value.numerator
    return "{0}/{1}".format(value.numerator, value.denominator)


def fraction_to_ratio(value):
    # type: (Fraction) -> str
    """Always ``"p/q"``, also for integers."""
    value = as_fraction(value)
    return "{0}/{1}".format(value.numerator, value.denominator)


def canonical_json(payload):
    # type: (Any) -> str
    """Serialize *payload* with sorted keys and no insignificant whitespace."""

    return json.dumps(payload, sort_keys=True, separators=(",", ":"), default=_json_default)


def _json_default(value):
    if isinstance(value, Fraction):
        return fraction_to_json(value)
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError("Object of type {0} is not JSON serializable".format(type(value)))


def content_digest(payload):
    # type: (Any) -> str
    """Return the sha256 hex digest of the canonical JSON form of *payload*."""

    if isinstance(payload, bytes):
        data = payload
    elif isinstance(payload, str):
        data = payload.encode("utf-8")
    else:
        data = canonical_json(payload).encode("utf-8")
    return hashlib.sha256(data).hexdigest()
