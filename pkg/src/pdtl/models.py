"""Model files: a variable list and one problem formula, plus the bundled corpus.

Format::

    name: train
    vars: x, v, a
    init: x = 0          # optional; overrides values read off the problem
    problem:
      a = 0 & v = 0 -> [...] tae: v < 100

A section header starts at column 0; indented lines continue the section
above them. ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .parser import ParseError, parse_state_formula
from .syntax import Atom, Box, Imp, Tae, conjuncts, free_variables

SECTIONS = ("name", "description", "vars", "init", "problem")
_HEADER = re.compile(r"^([a-z]+):(.*)$")


@dataclass(frozen=True)
class Model:
    name: str
    variables: tuple
    problem: object
    init: tuple = ()  # ((var, Fraction), ...) from the init section
    description: str = ""
    source: str = field(default="", repr=False)

    @property
    def parts(self):
        """(precondition or None, program, postcondition) when the problem is P -> [a] tae: Q."""
        f = self.problem
        pre = None
        if isinstance(f, Imp):
            pre, f = f.left, f.right
        if isinstance(f, Box) and isinstance(f.post, Tae):
            return pre, f.prog, f.post.body
        return None

    def initial_values(self) -> dict:
        """Declared variables at 0, then equalities ``x = c`` among the precondition's conjuncts, then init."""
        values = {v: Fraction(0) for v in self.variables}
        parts = self.parts
        if parts and parts[0] is not None:
            values.update(read_equalities(parts[0]))
        values.update(dict(self.init))
        return values


def read_equalities(f) -> dict:
    out = {}
    for c in conjuncts(f):
        if not isinstance(c, Atom) or c.op != "=":
            continue
        p = c.poly
        if not p.is_linear() or len(p.variables()) != 1:
            continue
        (v,) = p.variables()
        coeffs = p.coefficients(v)
        out[v] = -coeffs[0].constant_value() / coeffs[1].constant_value()
    return out


def parse_model(text: str, name: str = "model") -> Model:
    sections: dict = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = _HEADER.match(line)
        if m and not raw[0].isspace():
            key, rest = m.group(1), m.group(2).strip()
            if key not in SECTIONS:
                raise ParseError(f"unknown section {key!r}", text, _offset(text, lineno))
            if key in sections:
                raise ParseError(f"section {key!r} given twice", text, _offset(text, lineno))
            sections[key] = [(lineno, rest)] if rest else []
            current = key
        elif current is not None and raw[0].isspace():
            sections[current].append((lineno, line.strip()))
        else:
            raise ParseError("expected 'section:' or an indented continuation", text, _offset(text, lineno))
    if "problem" not in sections or not sections["problem"]:
        raise ParseError("model has no problem section", text, len(text))

    def joined(key):
        return " ".join(s for _, s in sections.get(key, []))

    problem_text = "\n".join(s for _, s in sections["problem"])
    try:
        problem = parse_state_formula(problem_text)
    except ParseError as exc:
        first = sections["problem"][0][0]
        raise ParseError(f"problem: {exc.reason}", text, _offset(text, first + exc.line - 1)) from exc
    declared = tuple(v.strip() for v in joined("vars").split(",") if v.strip())
    for v in declared:
        if not re.fullmatch(r"[a-zA-Z][a-zA-Z0-9_]*", v):
            raise ParseError(f"bad variable name {v!r}", text, 0)
    undeclared = free_variables(problem) - set(declared)
    if declared and undeclared:
        raise ParseError(f"undeclared variables: {', '.join(sorted(undeclared))}", text, 0)
    variables = declared or tuple(sorted(free_variables(problem)))
    init = ()
    if sections.get("init"):
        try:
            values = read_equalities(_conj_of(parse_state_formula(joined("init").replace(",", " & "))))
        except ParseError as exc:
            raise ParseError(f"init: {exc.reason}", text, _offset(text, sections["init"][0][0])) from exc
        init = tuple(sorted(values.items()))
    return Model(joined("name") or name, variables, problem, init, joined("description"), text)


def _conj_of(f):
    for c in conjuncts(f):
        if not (isinstance(c, Atom) and c.op == "="):
            raise ParseError("init takes equalities x = c", "", 0)
    return f


def _offset(text: str, lineno: int) -> int:
    pos = 0
    for _ in range(lineno - 1):
        nxt = text.find("\n", pos)
        if nxt < 0:
            break
        pos = nxt + 1
    return pos


def load_model(path) -> Model:
    path = Path(path)
    return parse_model(path.read_text(encoding="utf-8"), path.stem)


# -- bundled corpus ---------------------------------------------------------------------------


def _corpus():
    return resources.files("pdtl") / "corpus"


def corpus_names() -> list:
    return sorted(p.name[:-5] for p in _corpus().iterdir() if p.name.endswith(".pdtl"))


def corpus_scripts(name: str) -> list:
    """Proof scripts bundled for a model, e.g. ``train`` -> ``train.pdtlp``, ``train_truncated.pdtlp``."""
    return sorted(p.name for p in _corpus().iterdir()
                  if p.name.endswith(".pdtlp") and (p.name == name + ".pdtlp" or p.name.startswith(name + "_")))


def corpus_path(filename: str) -> Path:
    return Path(str(_corpus() / filename))


def resolve(path_or_name: str, suffix: str) -> Path:
    """A file on disk, or a bundled corpus entry given by name."""
    p = Path(path_or_name)
    if p.exists():
        return p
    bundled = corpus_path(path_or_name if path_or_name.endswith(suffix) else path_or_name + suffix)
    if bundled.exists():
        return bundled
    raise FileNotFoundError(path_or_name)


def corpus_model(name: str) -> Model:
    return load_model(corpus_path(name + ".pdtl"))


__all__ = ["Model", "parse_model", "load_model", "read_equalities", "corpus_names",
           "corpus_scripts", "corpus_path", "corpus_model", "resolve"]
