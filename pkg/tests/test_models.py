from fractions import Fraction

import pytest

from pdtl import ParseError, parse_state_formula
from pdtl.models import corpus_model, corpus_names, corpus_scripts, parse_model, resolve

MODEL = """\
name: demo
description: a counter
vars: x, y
init: y = 1/2
problem:
  x = 2 -> [x := x + 1] tae: x > 0   # trailing comment
"""


def test_parse_model_sections():
    m = parse_model(MODEL)
    assert m.name == "demo"
    assert m.variables == ("x", "y")
    assert m.problem == parse_state_formula("x = 2 -> [x := x + 1] tae: x > 0")
    assert m.initial_values() == {"x": 2, "y": Fraction(1, 2)}


def test_parts():
    pre, prog, post = parse_model(MODEL).parts
    assert pre == parse_state_formula("x = 2")
    assert post == parse_state_formula("x > 0")


def test_parts_of_plain_formula():
    assert parse_model("problem: x > 0").parts is None


def test_missing_problem():
    with pytest.raises(ParseError):
        parse_model("vars: x\n")


def test_unknown_section_position():
    with pytest.raises(ParseError) as err:
        parse_model("vars: x\nproblme: x > 0\n")
    assert err.value.line == 2


def test_problem_error_points_into_file():
    with pytest.raises(ParseError) as err:
        parse_model("vars: x\nproblem:\n  x > 0 &\n  & x < 1\n")
    assert err.value.line == 4


def test_undeclared_variable():
    with pytest.raises(ParseError):
        parse_model("vars: x\nproblem: y > 0\n")


def test_corpus_is_complete():
    names = corpus_names()
    for n in ("train", "circle", "robots_safe", "robots_unsafe", "discrete", "strict", "relaxed"):
        assert n in names
    assert "train_truncated.pdtlp" in corpus_scripts("train")


def test_train_starts_at_rest():
    assert corpus_model("train").initial_values() == {"x": 0, "v": 0, "a": 0}


def test_resolve_rejects_unknown():
    with pytest.raises(FileNotFoundError):
        resolve("no_such_model", ".pdtl")
