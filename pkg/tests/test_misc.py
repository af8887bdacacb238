# -*- coding=utf-8 -*-
import hashlib
import logging

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from opeflow import misc


def test_get_logger():
    logger = misc._get_logger(name="opeflow.test_logger", level="DEBUG")
    assert isinstance(logger, logging.Logger)
    assert logger.level == logging.DEBUG
    again = misc._get_logger(name="opeflow.test_logger")
    assert len([h for h in again.handlers if getattr(h, "_opeflow_handler", False)]) == 1


def test_set_verbosity():
    logger = misc._get_logger(name="opeflow.verbosity_probe")
    assert misc.set_verbosity(0) == logging.WARNING
    assert logger.level == logging.WARNING
    assert misc.set_verbosity(1) == logging.INFO
    assert misc.set_verbosity(3) == logging.DEBUG
    assert logger.level == logging.DEBUG
    assert misc.set_verbosity(0, "error") == logging.ERROR
    assert logger.level == logging.ERROR


@pytest.mark.parametrize(
    "value, expected",
    [(2, Fraction(2)), ("3/2", Fraction(3, 2)), (0.5, Fraction(1, 2)), (Fraction(7, 3), Fraction(7, 3))],
)
def test_as_fraction(value, expected):
    assert misc.as_fraction(value) == expected


def test_fraction_to_json():
    assert misc.fraction_to_json(Fraction(4)) == 4
    assert misc.fraction_to_json(Fraction(-3, 2)) == "-3/2"
    assert misc.fraction_to_json("7/2") == "7/2"


def test_canonical_json():
    payload = {"b": [Fraction(1, 24), np.float64(0.5)], "a": np.arange(2)}
    assert misc.canonical_json(payload) == '{"a":[0,1],"b":["1/24",0.5]}'
    with pytest.raises(TypeError):
        misc.canonical_json({"a": object()})


def test_content_digest():
    text = misc.canonical_json({"x": 1})
    expected = hashlib.sha256(text.encode("utf-8")).hexdigest()
    assert misc.content_digest({"x": 1}) == expected
    assert misc.content_digest(text) == expected
    assert misc.content_digest(text.encode("utf-8")) == expected


@given(st.text())
def test_to_text(text):
    assert misc.to_text(text) == text
    assert misc.to_text(text.encode("utf-8")) == text


def test_to_text_of_other_objects():
    assert misc.to_text(Fraction(1, 2)) == "1/2"
