# -*- coding=utf-8 -*-
import os

import pytest
from hypothesis import given, strategies as st

from opeflow import contextmanagers, path


def test_normalize_path(tmp_path, monkeypatch):
    (tmp_path / "new_dir").mkdir()
    monkeypatch.chdir(tmp_path)
    assert path.normalize_path("new_dir") == os.path.normcase(str(tmp_path / "new_dir"))


def test_normalize_path_expands_variables(tmp_path):
    with contextmanagers.temp_environ(OPEFLOW_ROOT=str(tmp_path)):
        assert path.normalize_path("$OPEFLOW_ROOT/cache/../runs") == os.path.normcase(
            str(tmp_path / "runs")
        )


def test_mkdir_p(tmp_path):
    target = tmp_path / "a" / "b" / "c"
    assert path.mkdir_p(str(target)) == path.normalize_path(str(target))
    assert target.is_dir()
    # a second call is a no-op
    assert path.mkdir_p(str(target)) == path.normalize_path(str(target))


def test_mkdir_p_fails_when_path_exists(tmp_path):
    myfile = tmp_path / "myfile"
    myfile.write_text("some text", encoding="utf-8")
    with pytest.raises(OSError):
        path.mkdir_p(str(myfile))


@given(st.text(alphabet="0123456789abcdef", min_size=4, max_size=64))
def test_shard_path(digest):
    sharded = path.shard_path("/cache", digest)
    assert sharded == os.path.join("/cache", digest[:2], digest[2:4], digest + ".json")


def test_shard_path_needs_a_digest():
    with pytest.raises(ValueError):
        path.shard_path("/cache", "abc")
