# -*- coding=utf-8 -*-
import json
import os

from typing import Any, Dict, Optional, Sequence, Tuple

from .contextmanagers import atomic_open_for_write
from .expressions import SymbolicCoefficient
from .misc import _get_logger, canonical_json, content_digest
from .operators import CompositeOperator
from .path import mkdir_p, shard_path
from .wick import free_ope_coefficient

__all__ = ["CoefficientCache", "coefficient_key"]

logger = _get_logger(__name__)


def coefficient_key(theory, A, B, order=(0, 0), mu=1.0):
    # type: (str, Sequence[CompositeOperator], CompositeOperator, Tuple[int, int], float) -> Dict[str, Any]
    return {
        "theory": str(theory),
        "A": [str(op) for op in A],
        "B": str(B),
        "order": list(order),
        "mu": float(mu),
    }


class CoefficientCache(object):
    """JSON records under ``root/<hh>/<hh>/<sha256>.json``.

    The file name is the digest of the canonical JSON key, and the key is
    stored next to the payload so that a digest collision reads as a miss.
    """

    def __init__(self, root):
        # type: (os.PathLike) -> None
        self.root = str(root)
        self.hits = 0
        self.misses = 0

    def path_for(self, key):
        # type: (Dict[str, Any]) -> str
        return shard_path(self.root, content_digest(key))

    def get(self, key):
        # type: (Dict[str, Any]) -> Optional[Any]
        path = self.path_for(key)
        try:
            with open(path, encoding="utf-8") as fh:
                record = json.load(fh)
        except (OSError, ValueError):
            self.misses += 1
            return None
        if record.get("key") != json.loads(canonical_json(key)):
            logger.warning("cache record %s does not match its key", path)
            self.misses += 1
            return None
        self.hits += 1
        return record["payload"]

    def put(self, key, payload):
        # type: (Dict[str, Any], Any) -> str
        path = self.path_for(key)
        mkdir_p(os.path.dirname(path))
        with atomic_open_for_write(path) as fh:
            fh.write(canonical_json({"key": key, "payload": payload}))
        return path

    def free_coefficient(self, theory, A, B, mu=1.0, graph_limit=None):
        """:func:`~opeflow.wick.free_ope_coefficient` through the cache."""
        key = coefficient_key(theory.name, A, B, (0, 0), mu)
        cached = self.get(key)
        if cached is not None:
            return SymbolicCoefficient.from_dict(cached)
        kwargs = {} if graph_limit is None else {"graph_limit": graph_limit}
        coefficient = free_ope_coefficient(tuple(A), B, mu, theory, **kwargs)
        self.put(key, coefficient.as_dict())
        return coefficient

    def stats(self):
        # type: () -> Dict[str, Any]
        return {"root": self.root, "hits": self.hits, "misses": self.misses}
