"""Recursive-descent parser for terms, hybrid programs and formulas.

Formula precedence, loosest first: ``<->``, ``->`` (right associative),
``|``, ``&``, then the unary forms ``!``, quantifiers, ``[a]``/``<a>`` and
comparisons.  Program precedence: ``++`` < ``;`` < postfix ``*``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .poly import Poly
from .syntax import (
    COMPARISONS, FALSE, TRUE, And, Assign, Atom, Box, Choice, Diamond, Exists,
    Forall, Iff, Imp, Loop, Not, Ode, Or, Seq, Tae, Test, is_first_order,
)

KEYWORDS = {"true", "false", "forall", "exists"}


class ParseError(ValueError):
    def __init__(self, message: str, text: str = "", pos: int = 0):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.line, self.column, self.reason = line, col, message


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<num>\d+\.\d*|\.\d+|\d+)
  | (?P<ident>[a-zA-Z][a-zA-Z0-9_]*)
  | (?P<op><->|:=|\+\+|->|<=|>=|!=|[-+*/^()\[\]{}<>=!&|;?,:'])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list:
    out = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", text, i)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), i))
        i = m.end()
    out.append(Token("eof", "", len(text)))
    return out


class _Backtrack(Exception):
    pass


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    # -- helpers ------------------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *texts) -> bool:
        t = self.tok
        return t.kind in ("op", "ident") and t.text in texts

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        found = tok.text or "end of input"
        raise ParseError(f"{msg} (found {found!r})", self.text, tok.pos)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> str:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            self.error("expected a variable name")
        self.i += 1
        return t.text

    def done(self):
        if self.tok.kind != "eof":
            self.error("unexpected trailing input")

    # -- terms ------------------------------------------------------------------------
    def term(self) -> Poly:
        left = self.product()
        while self.at("+", "-"):
            op = self.tok.text
            self.i += 1
            right = self.product()
            left = left + right if op == "+" else left - right
        return left

    def product(self) -> Poly:
        left = self.unary_term()
        while self.at("*", "/"):
            # a '*' not followed by a factor is a loop star, not multiplication
            if self.at("*") and not self._starts_factor(self.peek()):
                break
            op_tok = self.tok
            self.i += 1
            right = self.unary_term()
            if op_tok.text == "*":
                left = left * right
            else:
                if not right.is_constant() or right.is_zero():
                    self.error("division only by nonzero constants", op_tok)
                left = left / right
        return left

    @staticmethod
    def _starts_factor(t: Token) -> bool:
        return t.kind in ("num", "ident") or (t.kind == "op" and t.text in ("(", "-", "+"))

    def unary_term(self) -> Poly:
        if self.at("-"):
            self.i += 1
            return -self.unary_term()
        if self.at("+"):
            self.i += 1
            return self.unary_term()
        return self.power()

    def power(self) -> Poly:
        base = self.primary_term()
        if self.at("^"):
            self.i += 1
            t = self.tok
            if t.kind != "num" or not t.text.isdigit():
                self.error("exponent must be a natural number literal")
            self.i += 1
            return base ** int(t.text)
        return base

    def primary_term(self) -> Poly:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Poly.const(Fraction(t.text))
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.i += 1
            if self.at("'"):
                self.error("primed variables only appear on the left of ODEs")
            return Poly.var(t.text)
        if self.at("("):
            self.i += 1
            inner = self.term()
            self.expect(")")
            return inner
        self.error("expected a term")

    # -- formulas ------------------------------------------------------------------------
    def formula(self):
        left = self.implication()
        while self.at("<->"):
            self.i += 1
            left = Iff(left, self.implication())
        return left

    def implication(self):
        left = self.disjunction()
        if self.at("->"):
            self.i += 1
            return Imp(left, self.implication())
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.at("|"):
            self.i += 1
            left = Or(left, self.conjunction())
        return left

    def conjunction(self):
        left = self.unary()
        while self.at("&"):
            self.i += 1
            left = And(left, self.unary())
        return left

    def unary(self):
        t = self.tok
        if self.at("!"):
            self.i += 1
            return Not(self.unary())
        if t.kind == "ident" and t.text in ("forall", "exists"):
            self.i += 1
            var = self.ident()
            body = self.unary()
            return Forall(var, body) if t.text == "forall" else Exists(var, body)
        if t.kind == "ident" and t.text in ("true", "false"):
            self.i += 1
            return TRUE if t.text == "true" else FALSE
        if self.at("["):
            self.i += 1
            prog = self.program()
            self.expect("]")
            return Box(prog, self.postcondition())
        if self.at("<"):
            self.i += 1
            prog = self.program()
            self.expect(">")
            return Diamond(prog, self.postcondition())
        if self.at("("):
            save = self.i
            try:
                return self.comparison()
            except (_Backtrack, ParseError):
                self.i = save
            self.i += 1
            inner = self.formula()
            self.expect(")")
            return inner
        return self.comparison(strict=True)

    def postcondition(self):
        if self.tok.kind == "ident" and self.tok.text == "tae" and self.peek().text == ":":
            self.i += 2
            body = self.unary()
            return Tae(body)
        return self.unary()

    def comparison(self, strict: bool = False):
        start = self.tok
        lhs = self.term()
        if not self.at(*COMPARISONS):
            if strict:
                self.error("expected a comparison operator")
            raise _Backtrack()
        op = self.tok.text
        self.i += 1
        rhs = self.term()
        if self.at(*COMPARISONS):
            self.error("comparisons do not chain; use &", start)
        return Atom(lhs - rhs, op)

    # -- programs -------------------------------------------------------------------------
    def program(self):
        left = self.sequence()
        while self.at("++"):
            self.i += 1
            left = Choice(left, self.sequence())
        return left

    def sequence(self):
        left = self.loop()
        while self.at(";"):
            self.i += 1
            left = Seq(left, self.loop())
        return left

    def loop(self):
        prog = self.primary_program()
        while self.at("*"):
            self.i += 1
            prog = Loop(prog)
        return prog

    def primary_program(self):
        t = self.tok
        if self.at("?"):
            self.i += 1
            cond = self.unary()
            if not is_first_order(cond):
                self.error("tests must be first order", t)
            return Test(cond)
        if self.at("{"):
            self.i += 1
            if self.tok.kind == "ident" and self.peek().text == "'":
                prog = self.ode(t)
            else:
                prog = self.program()
            self.expect("}")
            return prog
        if self.at("("):
            self.i += 1
            prog = self.program()
            self.expect(")")
            return prog
        if t.kind == "ident" and t.text not in KEYWORDS:
            var = self.ident()
            self.expect(":=")
            return Assign(var, self.term())
        self.error("expected a program")

    def ode(self, start: Token):
        eqs = []
        while True:
            name_tok = self.tok
            var = self.ident()
            self.expect("'")
            self.expect("=")
            eqs.append((var, self.term()))
            if any(v == var for v, _ in eqs[:-1]):
                self.error(f"duplicate ODE variable {var}", name_tok)
            if not self.at(","):
                break
            self.i += 1
        domain = None
        if self.at("&"):
            self.i += 1
            domain = self.formula()
            if not is_first_order(domain):
                self.error("evolution domains must be first order", start)
        return Ode(tuple(eqs), domain)


def parse_program(text: str):
    p = Parser(text)
    prog = p.program()
    p.done()
    return prog


def parse_state_formula(text: str):
    p = Parser(text)
    f = p.formula()
    p.done()
    return f


def parse_term(text: str) -> Poly:
    p = Parser(text)
    t = p.term()
    p.done()
    return t


def parse_ode_system(text: str) -> Ode:
    """Accepts ``{x'=v, v'=a & R}`` with or without the braces."""
    stripped = text.strip()
    if not stripped.startswith("{"):
        stripped = "{" + stripped + "}"
    prog = parse_program(stripped)
    if not isinstance(prog, Ode):
        raise ParseError("expected an ODE system", text, 0)
    return prog


parse_formula = parse_state_formula
