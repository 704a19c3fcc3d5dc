"""Abstract syntax for hybrid programs, state formulas and trace formulas.

Every node is a frozen dataclass, so structural equality and hashing come
for free and values can be shared between threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .poly import Poly

IDENT = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*\Z")
COMPARISONS = ("=", ">=", "<", "<=", ">", "!=")
NEGATED_OP = {"=": "!=", "!=": "=", ">=": "<", "<": ">=", "<=": ">", ">": "<="}
FLIPPED_OP = {"=": "=", "!=": "!=", ">=": "<=", "<=": ">=", "<": ">", ">": "<"}


class SubstitutionError(Exception):
    """Base class for inadmissible substitutions."""


class CaptureError(SubstitutionError):
    pass


class InadmissibleContext(SubstitutionError):
    pass


def check_var(name: str) -> str:
    if not IDENT.match(name):
        raise ValueError(f"invalid variable name {name!r}")
    return name


# -- programs -----------------------------------------------------------------


@dataclass(frozen=True)
class Assign:
    var: str
    term: Poly


@dataclass(frozen=True)
class Test:
    cond: "Formula"


@dataclass(frozen=True)
class Ode:
    eqs: tuple  # ((var, Poly), ...)
    domain: Optional["Formula"] = None

    def __post_init__(self):
        names = [v for v, _ in self.eqs]
        if not names:
            raise ValueError("an ODE system needs at least one equation")
        if len(set(names)) != len(names):
            raise ValueError("ODE left-hand variables must be distinct")

    @property
    def variables(self) -> tuple:
        return tuple(v for v, _ in self.eqs)

    def rhs(self) -> dict:
        return dict(self.eqs)


@dataclass(frozen=True)
class Choice:
    left: "Program"
    right: "Program"


@dataclass(frozen=True)
class Seq:
    left: "Program"
    right: "Program"


@dataclass(frozen=True)
class Loop:
    body: "Program"


Program = Union[Assign, Test, Ode, Choice, Seq, Loop]

# -- formulas -------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    """``poly op 0``."""

    poly: Poly
    op: str

    def __post_init__(self):
        if self.op not in COMPARISONS:
            raise ValueError(f"unknown comparison {self.op!r}")


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Tae:
    """The time-almost-everywhere trace modality; wraps a state formula only."""

    body: "Formula"

    def __post_init__(self):
        if isinstance(self.body, Tae):
            raise TypeError("tae modalities do not nest")


@dataclass(frozen=True)
class Box:
    prog: Program
    post: Union["Formula", Tae]


@dataclass(frozen=True)
class Diamond:
    prog: Program
    post: Union["Formula", Tae]


Formula = Union[Atom, Not, And, Or, Imp, Iff, Forall, Exists, Box, Diamond]
BINARY = (And, Or, Imp, Iff)
QUANTIFIERS = (Forall, Exists)
MODALITIES = (Box, Diamond)

TRUE = Atom(Poly(), "=")
FALSE = Atom(Poly(), "<")


def atom(lhs, op: str, rhs=0) -> Atom:
    """Atom for ``lhs op rhs`` given polynomials or numbers."""
    return Atom(Poly.const(0) + lhs - rhs, op)


def conj(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def conjuncts(f: Formula) -> list:
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


def disjuncts(f: Formula) -> list:
    if isinstance(f, Or):
        return disjuncts(f.left) + disjuncts(f.right)
    return [f]


# -- structural queries -----------------------------------------------------------


def subformulas(f) -> Iterator:
    """Pre-order walk over formulas (programs' tests and domains included)."""
    yield f
    if isinstance(f, Atom):
        return
    if isinstance(f, Not):
        yield from subformulas(f.arg)
    elif isinstance(f, BINARY):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, QUANTIFIERS):
        yield from subformulas(f.body)
    elif isinstance(f, Tae):
        yield from subformulas(f.body)
    elif isinstance(f, MODALITIES):
        for g in program_formulas(f.prog):
            yield from subformulas(g)
        yield from subformulas(f.post)


def program_formulas(p) -> Iterator:
    if isinstance(p, Test):
        yield p.cond
    elif isinstance(p, Ode):
        if p.domain is not None:
            yield p.domain
    elif isinstance(p, (Choice, Seq)):
        yield from program_formulas(p.left)
        yield from program_formulas(p.right)
    elif isinstance(p, Loop):
        yield from program_formulas(p.body)


def program_terms(p) -> Iterator:
    if isinstance(p, Assign):
        yield p.term
    elif isinstance(p, Ode):
        for _, rhs in p.eqs:
            yield rhs
    elif isinstance(p, (Choice, Seq)):
        yield from program_terms(p.left)
        yield from program_terms(p.right)
    elif isinstance(p, Loop):
        yield from program_terms(p.body)


def is_first_order(f) -> bool:
    return not any(isinstance(g, MODALITIES) for g in subformulas(f))


def is_quantifier_free(f) -> bool:
    return not any(isinstance(g, QUANTIFIERS + MODALITIES) for g in subformulas(f))


def atoms(f) -> list:
    return [g for g in subformulas(f) if isinstance(g, Atom)]


def is_linear(f) -> bool:
    return all(a.poly.degree() <= 1 for a in atoms(f))


def check_program(p) -> None:
    """Tests and evolution domains must be first order."""
    for g in program_formulas(p):
        if not is_first_order(g):
            raise ValueError("tests and evolution domains must be first order")


# -- variables --------------------------------------------------------------------


def bound_vars(p) -> frozenset:
    """Variables the program may write."""
    if isinstance(p, Assign):
        return frozenset([p.var])
    if isinstance(p, Test):
        return frozenset()
    if isinstance(p, Ode):
        return frozenset(p.variables)
    if isinstance(p, (Choice, Seq)):
        return bound_vars(p.left) | bound_vars(p.right)
    if isinstance(p, Loop):
        return bound_vars(p.body)
    raise TypeError(p)


def must_bound_vars(p) -> frozenset:
    """Variables written on every run."""
    if isinstance(p, Assign):
        return frozenset([p.var])
    if isinstance(p, Test):
        return frozenset()
    if isinstance(p, Ode):
        return frozenset(p.variables)
    if isinstance(p, Choice):
        return must_bound_vars(p.left) & must_bound_vars(p.right)
    if isinstance(p, Seq):
        return must_bound_vars(p.left) | must_bound_vars(p.right)
    if isinstance(p, Loop):
        return frozenset()
    raise TypeError(p)


def free_variables(node) -> frozenset:
    """Free variables of a term, program, state formula or trace formula.

    For programs this is every variable whose initial value can matter,
    including the left-hand sides of differential equations.
    """
    if isinstance(node, Poly):
        return node.variables()
    if isinstance(node, Atom):
        return node.poly.variables()
    if isinstance(node, Not):
        return free_variables(node.arg)
    if isinstance(node, BINARY):
        return free_variables(node.left) | free_variables(node.right)
    if isinstance(node, QUANTIFIERS):
        return free_variables(node.body) - {node.var}
    if isinstance(node, Tae):
        return free_variables(node.body)
    if isinstance(node, MODALITIES):
        return free_variables(node.prog) | (free_variables(node.post) - must_bound_vars(node.prog))
    if isinstance(node, Assign):
        return node.term.variables()
    if isinstance(node, Test):
        return free_variables(node.cond)
    if isinstance(node, Ode):
        out = set(node.variables)
        for _, rhs in node.eqs:
            out |= rhs.variables()
        if node.domain is not None:
            out |= free_variables(node.domain)
        return frozenset(out)
    if isinstance(node, (Choice, Seq)):
        return free_variables(node.left) | free_variables(node.right)
    if isinstance(node, Loop):
        return free_variables(node.body)
    raise TypeError(f"not a syntax node: {node!r}")


def all_names(node) -> frozenset:
    """Every variable name occurring anywhere, bound or free."""
    if isinstance(node, Poly):
        return node.variables()
    if isinstance(node, Atom):
        return node.poly.variables()
    if isinstance(node, Not):
        return all_names(node.arg)
    if isinstance(node, BINARY):
        return all_names(node.left) | all_names(node.right)
    if isinstance(node, QUANTIFIERS):
        return all_names(node.body) | {node.var}
    if isinstance(node, Tae):
        return all_names(node.body)
    if isinstance(node, MODALITIES):
        return all_names(node.prog) | all_names(node.post)
    if isinstance(node, Assign):
        return node.term.variables() | {node.var}
    if isinstance(node, Test):
        return all_names(node.cond)
    if isinstance(node, Ode):
        out = set(node.variables)
        for _, rhs in node.eqs:
            out |= rhs.variables()
        if node.domain is not None:
            out |= all_names(node.domain)
        return frozenset(out)
    if isinstance(node, (Choice, Seq)):
        return all_names(node.left) | all_names(node.right)
    if isinstance(node, Loop):
        return all_names(node.body)
    if isinstance(node, (tuple, list)):
        out = frozenset()
        for n in node:
            out |= all_names(n)
        return out
    raise TypeError(f"not a syntax node: {node!r}")


def fresh_name(base: str, avoid) -> str:
    avoid = set(avoid)
    if base not in avoid:
        return base
    i = 0
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


# -- substitution -------------------------------------------------------------------


def substitute(f, x: str, e: Poly):
    """Replace free occurrences of ``x`` by the term ``e``.

    Boxes and diamonds are entered only when the program neither writes
    ``x`` nor any variable of ``e``; otherwise ``InadmissibleContext``.
    """
    if isinstance(e, (int,)):
        e = Poly.const(e)
    if x not in free_variables(f) or e == Poly.var(x):
        return f
    if isinstance(f, Atom):
        return Atom(f.poly.subs({x: e}), f.op)
    if isinstance(f, Not):
        return Not(substitute(f.arg, x, e))
    if isinstance(f, BINARY):
        return type(f)(substitute(f.left, x, e), substitute(f.right, x, e))
    if isinstance(f, QUANTIFIERS):
        if f.var in e.variables():
            raise CaptureError(f"substituting for {x} would capture {f.var}")
        return type(f)(f.var, substitute(f.body, x, e))
    if isinstance(f, Tae):
        return Tae(substitute(f.body, x, e))
    if isinstance(f, MODALITIES):
        written = bound_vars(f.prog)
        if x in written:
            raise InadmissibleContext(f"{x} is written by the program")
        clash = written & e.variables()
        if clash:
            raise InadmissibleContext(f"program writes {', '.join(sorted(clash))}")
        return type(f)(substitute_program(f.prog, x, e), substitute(f.post, x, e))
    raise TypeError(f)


def substitute_program(p, x: str, e: Poly):
    """Substitution into a program that does not write ``x`` or vars of ``e``."""
    if isinstance(p, Assign):
        return Assign(p.var, p.term.subs({x: e}))
    if isinstance(p, Test):
        return Test(substitute(p.cond, x, e))
    if isinstance(p, Ode):
        dom = None if p.domain is None else substitute(p.domain, x, e)
        return Ode(tuple((v, rhs.subs({x: e})) for v, rhs in p.eqs), dom)
    if isinstance(p, (Choice, Seq)):
        return type(p)(substitute_program(p.left, x, e), substitute_program(p.right, x, e))
    if isinstance(p, Loop):
        return Loop(substitute_program(p.body, x, e))
    raise TypeError(p)


def substitute_many(f, mapping: dict):
    """Simultaneous substitution into a first-order formula."""
    if not mapping:
        return f
    if isinstance(f, Atom):
        return Atom(f.poly.subs(mapping), f.op)
    if isinstance(f, Not):
        return Not(substitute_many(f.arg, mapping))
    if isinstance(f, BINARY):
        return type(f)(substitute_many(f.left, mapping), substitute_many(f.right, mapping))
    if isinstance(f, QUANTIFIERS):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        live = free_variables(f.body) & inner.keys()
        for k in live:
            if f.var in inner[k].variables():
                raise CaptureError(f"substitution would capture {f.var}")
        return type(f)(f.var, substitute_many(f.body, inner))
    if isinstance(f, Tae):
        return Tae(substitute_many(f.body, mapping))
    raise InadmissibleContext("simultaneous substitution is first order only")


def rename(node, old: str, new: str):
    """Uniformly rename every occurrence of a variable, bound ones included."""
    sub = {old: Poly.var(new)}
    if isinstance(node, Poly):
        return node.subs(sub)
    if isinstance(node, Atom):
        return Atom(node.poly.subs(sub), node.op)
    if isinstance(node, Not):
        return Not(rename(node.arg, old, new))
    if isinstance(node, BINARY):
        return type(node)(rename(node.left, old, new), rename(node.right, old, new))
    if isinstance(node, QUANTIFIERS):
        return type(node)(new if node.var == old else node.var, rename(node.body, old, new))
    if isinstance(node, Tae):
        return Tae(rename(node.body, old, new))
    if isinstance(node, MODALITIES):
        return type(node)(rename(node.prog, old, new), rename(node.post, old, new))
    if isinstance(node, Assign):
        return Assign(new if node.var == old else node.var, node.term.subs(sub))
    if isinstance(node, Test):
        return Test(rename(node.cond, old, new))
    if isinstance(node, Ode):
        dom = None if node.domain is None else rename(node.domain, old, new)
        return Ode(tuple((new if v == old else v, rhs.subs(sub)) for v, rhs in node.eqs), dom)
    if isinstance(node, (Choice, Seq)):
        return type(node)(rename(node.left, old, new), rename(node.right, old, new))
    if isinstance(node, Loop):
        return Loop(rename(node.body, old, new))
    raise TypeError(node)


# -- derived connectives ----------------------------------------------------------------


def expand_derived(f):
    """Rewrite |, ->, <->, exists and diamonds into the !, & and forall core."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(expand_derived(f.arg))
    if isinstance(f, And):
        return And(expand_derived(f.left), expand_derived(f.right))
    if isinstance(f, Or):
        return Not(And(Not(expand_derived(f.left)), Not(expand_derived(f.right))))
    if isinstance(f, Imp):
        return Not(And(expand_derived(f.left), Not(expand_derived(f.right))))
    if isinstance(f, Iff):
        a, b = expand_derived(f.left), expand_derived(f.right)
        return And(Not(And(a, Not(b))), Not(And(b, Not(a))))
    if isinstance(f, Forall):
        return Forall(f.var, expand_derived(f.body))
    if isinstance(f, Exists):
        return Not(Forall(f.var, Not(expand_derived(f.body))))
    if isinstance(f, Tae):
        return Tae(expand_derived(f.body))
    if isinstance(f, Box):
        return Box(f.prog, expand_derived(f.post))
    if isinstance(f, Diamond):
        return Diamond(f.prog, expand_derived(f.post))
    raise TypeError(f)
