# -*- coding=utf-8 -*-
import os

from typing import Text

__all__ = ["normalize_path", "mkdir_p", "shard_path"]


def normalize_path(path):
    # type: (os.PathLike) -> Text
    """Return a case-normalized absolute variable-expanded path.

    :param str path: The non-normalized path
    :return: A normalized, expanded, case-normalized path
    :rtype: str
    """

    path = os.path.abspath(os.path.expandvars(os.path.expanduser(str(path))))
    return os.path.normpath(os.path.normcase(path))


def mkdir_p(newdir, mode=0o777):
    # type: (os.PathLike, int) -> Text
    """Recursively creates the target directory and all of its parents if they
    do not already exist.  Fails silently if they do.

    :param str newdir: The directory path to ensure
    :raises: OSError if a file is encountered along the way
    :return: The normalized directory path
    """
    newdir = normalize_path(newdir)
    if os.path.exists(newdir):
        if not os.path.isdir(newdir):
            raise OSError(
                "a file with the same name as the desired dir, '{}', already exists.".format(
                    newdir
                )
            )
        return newdir
    os.makedirs(newdir, mode)
    return newdir


def shard_path(root, digest, suffix=".json"):
    # type: (os.PathLike, str, str) -> Text
    """Map a hex digest onto ``root/ab/cd/<digest><suffix>``."""

    if len(digest) < 4:
        raise ValueError("digest too short to shard: {0!r}".format(digest))
    return os.path.join(str(root), digest[:2], digest[2:4], digest + suffix)
