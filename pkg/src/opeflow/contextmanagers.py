# -*- coding=utf-8 -*-
import io
import os
import sys
import tempfile
import time

from contextlib import contextmanager, suppress
from typing import IO, Dict, Iterator, MutableMapping, Optional, Text, Tuple

import numpy as np

__all__ = [
    "temp_environ",
    "captured_output",
    "atomic_open_for_write",
    "seeded_rng",
    "timed",
]


@contextmanager
def temp_environ(**overrides):
    # type: (Optional[str]) -> Iterator[MutableMapping[str, str]]
    """Apply *overrides* to ``os.environ`` for the duration of the block.

    A value of ``None`` unsets the variable.  Every change made while the block
    runs is rolled back on exit, not only the overrides.

    >>> with temp_environ(OPEFLOW_CACHE_DIR="/tmp/ope-cache") as env:
    ...     assert env["OPEFLOW_CACHE_DIR"] == "/tmp/ope-cache"
    """
    saved = os.environ.copy()
    for name, value in overrides.items():
        if value is None:
            os.environ.pop(name, None)
        else:
            os.environ[name] = str(value)
    try:
        yield os.environ
    finally:
        os.environ.clear()
        os.environ.update(saved)


@contextmanager
def captured_output():
    # type: () -> Iterator[Tuple[IO[Text], IO[Text]]]
    """Route ``sys.stdout`` and ``sys.stderr`` into string buffers.

    :returns: *(stdout, stderr)* buffers, restored on exit
    """
    buffers = (io.StringIO(), io.StringIO())
    saved = (sys.stdout, sys.stderr)
    sys.stdout, sys.stderr = buffers
    try:
        yield buffers
    finally:
        sys.stdout, sys.stderr = saved


@contextmanager
def atomic_open_for_write(target, binary=False, newline=None, encoding="utf-8"):
    # type: (str, bool, Optional[str], str) -> Iterator[IO]
    """Open a staging file next to *target* and move it into place on success.

    Artifacts and cache records are only ever seen complete.  When the block
    raises, the staging file is removed and *target* keeps its old contents.

    :param str target: Final path of the artifact
    :param bool binary: Write bytes instead of text
    :param Optional[str] newline: Newline translation for text mode
    :param str encoding: Text encoding, ignored in binary mode
    """
    fd, staging = tempfile.mkstemp(
        dir=os.path.dirname(os.path.abspath(target)), prefix=".opeflow-", suffix=".part"
    )
    if binary:
        handle = os.fdopen(fd, "wb")
    else:
        handle = os.fdopen(fd, "w", encoding=encoding, newline=newline)
    try:
        with handle:
            yield handle
            handle.flush()
            os.fsync(handle.fileno())
        # mkstemp creates 0600 files
        with suppress(OSError):
            os.chmod(staging, 0o644)
        os.replace(staging, target)
    except BaseException:
        with suppress(OSError):
            os.remove(staging)
        raise


@contextmanager
def seeded_rng(seed=None):
    # type: (Optional[int]) -> Iterator[np.random.Generator]
    """Yield a :func:`numpy.random.default_rng` generator seeded with *seed*.

    Every stochastic component takes its generator from here so that a run is
    reproducible from the seed recorded in its manifest.
    """

    yield np.random.default_rng(seed)


@contextmanager
def timed(timings, label):
    # type: (Dict[str, float], str) -> Iterator[None]
    """Accumulate the wall time spent inside the block into ``timings[label]``."""

    start = time.perf_counter()
    try:
        yield
    finally:
        timings[label] = timings.get(label, 0.0) + (time.perf_counter() - start)
