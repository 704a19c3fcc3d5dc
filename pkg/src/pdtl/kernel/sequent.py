"""Sequents, formula positions and the kernel's error types."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..printer import format_sequent, pretty_print
from ..syntax import (
    BINARY, MODALITIES, QUANTIFIERS, Box, Diamond, Not, Tae, all_names,
)


class KernelError(ValueError):
    pass


class ShapeMismatch(KernelError):
    """The addressed formula does not have the shape the rule needs."""


class ContextError(KernelError):
    """A contextual rewrite would change which variables are bound."""


class ReplayMismatch(KernelError):
    """A recorded script step cannot be replayed."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


@dataclass(frozen=True)
class Sequent:
    ante: tuple = ()
    succ: tuple = ()

    def __post_init__(self):
        for f in self.ante + self.succ:
            if isinstance(f, Tae):
                raise ShapeMismatch("sequents hold state formulas only")

    def __str__(self):
        return format_sequent(self.ante, self.succ)

    def names(self) -> frozenset:
        return all_names(self.ante + self.succ)

    def side(self, side: str) -> tuple:
        return self.ante if side == "L" else self.succ

    def with_side(self, side: str, formulas) -> "Sequent":
        formulas = tuple(formulas)
        return Sequent(formulas, self.succ) if side == "L" else Sequent(self.ante, formulas)


@dataclass(frozen=True)
class Position:
    side: str  # "L" antecedent, "R" succedent
    index: int
    path: tuple = ()

    def __str__(self):
        return f"{self.side}{self.index}" + "".join(f".{i}" for i in self.path)

    @property
    def top(self) -> bool:
        return not self.path

    def child(self, i: int) -> "Position":
        return Position(self.side, self.index, self.path + (i,))


_POS = re.compile(r"([LR])(\d+)((?:\.\d+)*)\Z")


def parse_position(text: str) -> Position:
    m = _POS.match(text.strip())
    if not m:
        raise ValueError(f"bad position {text!r}; expected e.g. R0 or L1.0.1")
    path = tuple(int(p) for p in m.group(3).split(".")[1:]) if m.group(3) else ()
    return Position(m.group(1), int(m.group(2)), path)


def children(f) -> list:
    """Addressable children: binary 0/1, negation and quantifier body 0, modality postcondition 0."""
    if isinstance(f, Not):
        return [f.arg]
    if isinstance(f, BINARY):
        return [f.left, f.right]
    if isinstance(f, QUANTIFIERS):
        return [f.body]
    if isinstance(f, MODALITIES):
        post = f.post.body if isinstance(f.post, Tae) else f.post
        return [post]
    return []


def replace_child(f, i: int, new):
    if isinstance(f, Not) and i == 0:
        return Not(new)
    if isinstance(f, BINARY) and i in (0, 1):
        return type(f)(new, f.right) if i == 0 else type(f)(f.left, new)
    if isinstance(f, QUANTIFIERS) and i == 0:
        return type(f)(f.var, new)
    if isinstance(f, MODALITIES) and i == 0:
        post = Tae(new) if isinstance(f.post, Tae) else new
        return type(f)(f.prog, post)
    raise ShapeMismatch(f"no child {i} in {pretty_print(f)}")


def formula_at(seq: Sequent, pos: Position):
    fs = seq.side(pos.side)
    if not 0 <= pos.index < len(fs):
        raise ShapeMismatch(f"no formula at {pos}")
    f = fs[pos.index]
    for i in pos.path:
        kids = children(f)
        if i >= len(kids):
            raise ShapeMismatch(f"position {pos} does not exist")
        f = kids[i]
    return f


def replace_at(seq: Sequent, pos: Position, new) -> Sequent:
    fs = list(seq.side(pos.side))
    if not 0 <= pos.index < len(fs):
        raise ShapeMismatch(f"no formula at {pos}")
    fs[pos.index] = _replace_path(fs[pos.index], pos.path, new)
    return seq.with_side(pos.side, fs)


def _replace_path(f, path, new):
    if not path:
        return new
    kids = children(f)
    if path[0] >= len(kids):
        raise ShapeMismatch("position does not exist")
    return replace_child(f, path[0], _replace_path(kids[path[0]], path[1:], new))


def binders_along(seq: Sequent, pos: Position) -> frozenset:
    """Variables bound by quantifiers or written by programs above the position."""
    from ..syntax import bound_vars

    f = seq.side(pos.side)[pos.index]
    bound = set()
    for i in pos.path:
        if isinstance(f, QUANTIFIERS):
            bound.add(f.var)
        elif isinstance(f, MODALITIES):
            bound |= bound_vars(f.prog)
        f = children(f)[i]
    return frozenset(bound)


def all_positions(seq: Sequent):
    """Every (position, formula) pair, top-level formulas first in each side."""
    for side in ("L", "R"):
        for idx, f in enumerate(seq.side(side)):
            yield from _walk(Position(side, idx), f)


def _walk(pos, f):
    yield pos, f
    for i, c in enumerate(children(f)):
        yield from _walk(pos.child(i), c)


def is_box_tae(f) -> bool:
    return isinstance(f, Box) and isinstance(f.post, Tae)


def is_state_box(f) -> bool:
    return isinstance(f, (Box, Diamond)) and not isinstance(f.post, Tae)
