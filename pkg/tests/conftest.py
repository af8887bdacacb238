# -*- coding=utf-8 -*-

import pytest

from opeflow.contextmanagers import captured_output, temp_environ
from opeflow.theories import maxwell_theory, scalar_theory
from opeflow.wick import clear_coefficient_cache


@pytest.fixture(scope="function")
def capture_streams():
    with captured_output() as streams:
        yield streams


@pytest.fixture(scope="session")
def scalar():
    return scalar_theory()


@pytest.fixture(scope="session")
def maxwell():
    return maxwell_theory()


@pytest.fixture(scope="session")
def maxwell_bv():
    return maxwell_theory(with_antifields=True)


@pytest.fixture(scope="function")
def cache_dir(tmp_path):
    with temp_environ(OPEFLOW_CACHE_DIR=str(tmp_path / "cache")):
        yield tmp_path / "cache"


@pytest.fixture(scope="function")
def fresh_coefficients():
    clear_coefficient_cache()
    yield
    clear_coefficient_cache()
