# -*- coding=utf-8 -*-
from fractions import Fraction

import pytest

from opeflow.config import RunConfig, load_config, parse_config
from opeflow.exceptions import ConfigError, ConfigNotFoundError
from opeflow.path import normalize_path
from opeflow.quadrature import LEVELS

FULL = """
[opeflow]
schema_version = 1
output_format = csv
seed = 11
log_level = info

[theory]
name = scalar
mu = 2.0
d_max = 7/2
lagrangian =
    1/24 phi^4 1
    1/2 phi^2 2

[numerics]
tol = 1e-5
max_level = 16
samples = 500
"""


def test_defaults_are_explicit(cache_dir):
    config = RunConfig()
    assert config.schema_version == 1
    assert config.theory == "scalar"
    assert config.d_max == Fraction(4)
    assert config.levels == LEVELS
    assert config.cache_dir == normalize_path(cache_dir)
    payload = config.as_dict()
    assert payload["d_max"] == 4
    assert payload["lagrangian"] is None


def test_full_file(cache_dir):
    config = parse_config(FULL)
    assert config.output_format == "csv"
    assert config.seed == 11
    assert config.mu == 2.0
    assert config.d_max == Fraction(7, 2)
    assert config.tol == 1e-5
    assert config.levels == (8, 12, 16)
    assert config.samples == 500
    assert config.lagrangian == ((Fraction(1, 24), "phi^4", 1), (Fraction(1, 2), "phi^2", 2))
    assert config.as_dict()["d_max"] == "7/2"
    theory = config.build_theory()
    assert theory.name == "scalar"
    assert [term.g_power for term in theory.lagrangian] == [1, 2]


def test_cache_dir_comes_from_the_environment(cache_dir):
    config = parse_config("[opeflow]\nschema_version = 1\ncache_dir = /somewhere/else\n")
    assert config.cache_dir == normalize_path(cache_dir)


@pytest.mark.parametrize(
    "text",
    [
        "[opeflow]\nschema_version = 2\n",
        "[theory]\nname = scalar\n",
        "[opeflow]\nschema_version = 1\n[extras]\nkey = 1\n",
        "[opeflow]\nschema_version = 1\ncolour = yes\n",
        "[opeflow]\nschema_version = 1\n[numerics]\ntol = small\n",
        "[opeflow]\nschema_version = 1\n[numerics]\ntol = -1\n",
        "[opeflow]\nschema_version = 1\n[numerics]\nmax_level = 10\n",
        "[opeflow]\nschema_version = 1\n[theory]\nname = yang-mills\n",
        "[opeflow]\nschema_version = 1\n[theory]\nlagrangian = phi^4\n",
        "[opeflow]\nschema_version = 1\noutput_format = xml\n",
        "not an ini file",
    ],
)
def test_invalid_files(text):
    with pytest.raises(ConfigError) as excinfo:
        parse_config(text)
    assert excinfo.value.code == "CONFIG_INVALID"
    assert excinfo.value.exit_status == 2


def test_missing_file(tmp_path):
    with pytest.raises(ConfigNotFoundError) as excinfo:
        load_config(tmp_path / "missing.ini")
    assert excinfo.value.as_dict()["error"]["code"] == "CONFIG_NOT_FOUND"
    assert excinfo.value.exit_status == 2


def test_load_from_disk(tmp_path, cache_dir):
    path = tmp_path / "run.ini"
    path.write_text(FULL)
    assert load_config(path) == parse_config(FULL)
    assert load_config() == RunConfig()


def test_replace_overrides(cache_dir):
    config = RunConfig()
    changed = config.replace(tol=1e-4, seed=None, d_max=Fraction(3))
    assert changed.tol == 1e-4
    assert changed.seed == config.seed
    assert changed.d_max == 3
    with pytest.raises(ConfigError):
        config.replace(colour="red")
    with pytest.raises(ConfigError):
        config.replace(tol=0.0)


def test_content_hash(cache_dir, tmp_path):
    config = RunConfig()
    assert config.content_hash() == RunConfig().content_hash()
    assert config.content_hash() != config.replace(seed=1).content_hash()
    assert config.content_hash() == config.replace(cache_dir=str(tmp_path)).content_hash()
