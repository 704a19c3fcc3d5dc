"""Axioms and primitive rules of the kernel.

Axioms are equivalences applied as rewrites at any position.  Structural
rules act on top-level sequent formulas.  Every function returns the list of
premises; an empty list closes the goal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..arith import check_validity, closure, fm_eliminate, g_transform, to_normal_form
from ..ode import solve_polynomial
from ..poly import Poly
from ..printer import pretty_print
from ..syntax import (
    And, Assign, Atom, Box, Choice, Diamond, Exists, Forall, Iff, Imp, Loop, Not,
    Ode, Or, Seq, Tae, Test, SubstitutionError, all_names, conj, disj,
    free_variables, fresh_name, is_first_order, is_quantifier_free, rename,
    substitute, substitute_many,
)
from .sequent import (
    ContextError, Position, Sequent, ShapeMismatch, all_positions, binders_along,
    formula_at, replace_at,
)


# -- closure as used by the axioms -------------------------------------------------------


def cl(phi):
    """Closure formula of a first-order postcondition."""
    if not is_first_order(phi):
        raise ShapeMismatch(f"closure needs a first-order formula, got {pretty_print(phi)}")
    if not is_quantifier_free(phi):
        phi = fm_eliminate(phi)
    return closure(phi)


def _tae_body(f, prog_type):
    if not (isinstance(f, Box) and isinstance(f.post, Tae) and isinstance(f.prog, prog_type)):
        raise ShapeMismatch(f"expected [{prog_type.__name__}] tae: ..., got {pretty_print(f)}")
    return f.prog, f.post.body


def _state_box(f, prog_type):
    if not (isinstance(f, Box) and not isinstance(f.post, Tae) and isinstance(f.prog, prog_type)):
        raise ShapeMismatch(f"expected a [{prog_type.__name__}] box with a state postcondition, got {pretty_print(f)}")
    return f.prog, f.post


# -- ODE helpers ---------------------------------------------------------------------------


def nested_assignments(mapping: dict, post):
    """``[x1 := e1][x2 := e2]... post`` ordered so no later term reads an earlier target.

    Variables whose terms read each other cyclically have no sequential
    order; they are substituted simultaneously into the postcondition.
    """
    remaining = dict(mapping)
    order = []
    while remaining:
        pick = next((w for w in remaining
                     if not any(w in e.variables() for u, e in remaining.items() if u != w)), None)
        if pick is None:
            post = substitute_many(post, remaining)
            break
        order.append(pick)
        del remaining[pick]
    for v in reversed(order):
        post = Box(Assign(v, mapping[v]), post)
    return post


def _fresh_times(f, ctx_names, count: int):
    taken = set(ctx_names) | set(all_names(f))
    out = []
    for base in ("t", "s")[:count]:
        name = fresh_name(base, taken)
        taken.add(name)
        out.append(name)
    return out


def _solution_at(ode: Ode, time: Poly):
    sol = solve_polynomial(Ode(ode.eqs), time_var="__t")
    return {v: y.subs({sol.time_var: time}) for v, y in sol.solutions}


def _ge(a: Poly, b: Poly) -> Atom:
    return Atom(b - a, "<=")


# -- tae axioms ------------------------------------------------------------------------------


def ax_test_tae(f, ctx):
    prog, phi = _tae_body(f, Test)
    return cl(phi)


def ax_choice_tae(f, ctx):
    prog, phi = _tae_body(f, Choice)
    return And(Box(prog.left, Tae(phi)), Box(prog.right, Tae(phi)))


def ax_choice_tae_back(f, ctx):
    if isinstance(f, And) and all(isinstance(g, Box) and isinstance(g.post, Tae) for g in (f.left, f.right)):
        if f.left.post == f.right.post:
            return Box(Choice(f.left.prog, f.right.prog), f.left.post)
    raise ShapeMismatch("expected [a] tae: p & [b] tae: p")


def ax_assign_tae(f, ctx):
    prog, phi = _tae_body(f, Assign)
    c = cl(phi)
    return And(c, Box(prog, c))


def ax_seq_tae(f, ctx):
    prog, phi = _tae_body(f, Seq)
    return And(Box(prog.left, Tae(phi)), Box(prog.left, Box(prog.right, Tae(phi))))


def ax_seq_tae_back(f, ctx):
    if isinstance(f, And) and isinstance(f.left, Box) and isinstance(f.left.post, Tae):
        a, post = f.left.prog, f.left.post
        r = f.right
        if isinstance(r, Box) and r.prog == a and isinstance(r.post, Box) and r.post.post == post:
            return Box(Seq(a, r.post.prog), post)
    raise ShapeMismatch("expected [a] tae: p & [a][b] tae: p")


def ax_loop_tae(f, ctx):
    prog, phi = _tae_body(f, Loop)
    c = cl(phi)
    return And(c, Box(prog, Imp(c, Box(prog.body, Tae(phi)))))


def _q_formula(ode: Ode, P, t: str):
    at_t = _solution_at(ode, Poly.var(t))
    moved = substitute_many(P, at_t)
    return g_transform(to_normal_form(moved), t)


def ax_ode_tae(f, ctx):
    ode, P = _tae_body(f, Ode)
    if ode.domain is not None:
        raise ShapeMismatch("ODE has an evolution domain; use ['&]_tae")
    if not is_first_order(P):
        raise ShapeMismatch("postcondition must be first order")
    (t,) = _fresh_times(f, ctx, 1)
    q = _q_formula(ode, P, t)
    return And(cl(P), Forall(t, Imp(_ge(Poly.var(t), Poly()), q)))


def ax_ode_domain_tae(f, ctx):
    ode, P = _tae_body(f, Ode)
    if ode.domain is None:
        raise ShapeMismatch("ODE has no evolution domain; use [']_tae")
    if not is_first_order(P):
        raise ShapeMismatch("postcondition must be first order")
    t, s = _fresh_times(f, ctx, 2)
    q = _q_formula(ode, P, t)
    tp, sp = Poly.var(t), Poly.var(s)
    along = nested_assignments(_solution_at(ode, sp), ode.domain)
    stay = Forall(s, Imp(And(Atom(-sp, "<="), Atom(sp - tp, "<=")), along))
    return And(cl(P), Forall(t, Imp(Atom(-tp, "<"), Imp(stay, q))))


# -- dL axioms --------------------------------------------------------------------------------


def ax_assign(f, ctx):
    prog, phi = _state_box(f, Assign)
    try:
        return substitute(phi, prog.var, prog.term)
    except SubstitutionError:
        # fall back to a fresh copy of the variable: forall x~ (x~ = e -> phi(x~))
        fresh = fresh_name(prog.var, set(all_names(f)) | set(ctx))
        return Forall(fresh, Imp(Atom(Poly.var(fresh) - prog.term, "="), rename(phi, prog.var, fresh)))


def ax_test(f, ctx):
    prog, phi = _state_box(f, Test)
    return Imp(prog.cond, phi)


def ax_test_back(f, ctx):
    if isinstance(f, Imp) and is_first_order(f.left):
        return Box(Test(f.left), f.right)
    raise ShapeMismatch("expected Q -> p")


def ax_ode(f, ctx):
    ode, phi = _state_box(f, Ode)
    if ode.domain is not None:
        raise ShapeMismatch("ODE has an evolution domain; use ['&]")
    (t,) = _fresh_times(f, ctx, 1)
    tp = Poly.var(t)
    return Forall(t, Imp(_ge(tp, Poly()), nested_assignments(_solution_at(ode, tp), phi)))


def ax_ode_domain(f, ctx):
    ode, phi = _state_box(f, Ode)
    if ode.domain is None:
        raise ShapeMismatch("ODE has no evolution domain; use [']")
    t, s = _fresh_times(f, ctx, 2)
    tp, sp = Poly.var(t), Poly.var(s)
    along = nested_assignments(_solution_at(ode, sp), ode.domain)
    stay = Forall(s, Imp(And(Atom(-sp, "<="), Atom(sp - tp, "<=")), along))
    return Forall(t, Imp(_ge(tp, Poly()), Imp(stay, nested_assignments(_solution_at(ode, tp), phi))))


def ax_choice(f, ctx):
    prog, phi = _state_box(f, Choice)
    return And(Box(prog.left, phi), Box(prog.right, phi))


def ax_choice_back(f, ctx):
    if (isinstance(f, And) and isinstance(f.left, Box) and isinstance(f.right, Box)
            and not isinstance(f.left.post, Tae) and f.left.post == f.right.post):
        return Box(Choice(f.left.prog, f.right.prog), f.left.post)
    raise ShapeMismatch("expected [a]p & [b]p")


def ax_seq(f, ctx):
    prog, phi = _state_box(f, Seq)
    return Box(prog.left, Box(prog.right, phi))


def ax_seq_back(f, ctx):
    if isinstance(f, Box) and isinstance(f.post, Box) and not isinstance(f.post.post, Tae):
        return Box(Seq(f.prog, f.post.prog), f.post.post)
    raise ShapeMismatch("expected [a][b]p")


def ax_loop(f, ctx):
    prog, phi = _state_box(f, Loop)
    return And(phi, Box(prog.body, Box(prog, phi)))


def ax_loop_back(f, ctx):
    if isinstance(f, And) and isinstance(f.right, Box) and isinstance(f.right.post, Box):
        inner = f.right.post
        if (isinstance(inner.prog, Loop) and inner.prog.body == f.right.prog
                and inner.post == f.left and not isinstance(inner.post, Tae)):
            return inner
    raise ShapeMismatch("expected p & [a][a*]p")


def ax_diamond(f, ctx):
    if not isinstance(f, Diamond) or isinstance(f.post, Tae):
        raise ShapeMismatch("expected <a>p with a state postcondition")
    return Not(Box(f.prog, Not(f.post)))


def ax_diamond_back(f, ctx):
    if isinstance(f, Not) and isinstance(f.arg, Box) and isinstance(f.arg.post, Not):
        return Diamond(f.arg.prog, f.arg.post.arg)
    raise ShapeMismatch("expected ![a]!p")


TAE_AXIOMS = {
    "[?]_tae": (ax_test_tae, None),
    "[++]_tae": (ax_choice_tae, ax_choice_tae_back),
    "[:=]_tae": (ax_assign_tae, None),
    "[;]_tae": (ax_seq_tae, ax_seq_tae_back),
    "I_tae": (ax_loop_tae, None),
    "[']_tae": (ax_ode_tae, None),
    "['&]_tae": (ax_ode_domain_tae, None),
}

DL_AXIOMS = {
    "[:=]": (ax_assign, None),
    "[?]": (ax_test, ax_test_back),
    "[']": (ax_ode, None),
    "['&]": (ax_ode_domain, None),
    "[++]": (ax_choice, ax_choice_back),
    "[;]": (ax_seq, ax_seq_back),
    "[*]": (ax_loop, ax_loop_back),
    "<>": (ax_diamond, ax_diamond_back),
}


def _axiom(table: dict, goal: Sequent, name: str, position):
    base, reverse = (name[:-2], True) if name.endswith("<-") else (name, False)
    if base not in table:
        raise ShapeMismatch(f"unknown axiom {name}")
    forward, backward = table[base]
    fn = backward if reverse else forward
    if fn is None:
        raise ShapeMismatch(f"{base} is not applied right to left")
    ctx = goal.names()
    if position is None:
        position = _unique_match(goal, lambda f: fn(f, ctx), name)
    new = fn(formula_at(goal, position), ctx)
    return [replace_at(goal, position, new)]


def _unique_match(goal, try_fn, name) -> Position:
    hits = []
    for pos, f in all_positions(goal):
        try:
            try_fn(f)
        except ShapeMismatch:
            continue
        except Exception:
            pass
        hits.append(pos)
    if not hits:
        raise ShapeMismatch(f"{name} matches nowhere in {goal}")
    if len(hits) > 1:
        raise ShapeMismatch(f"{name} matches at {', '.join(map(str, hits))}; give a position")
    return hits[0]


def apply_tae_axiom(goal: Sequent, name: str, position=None) -> list:
    return _axiom(TAE_AXIOMS, goal, name, _pos(position))


def apply_dl_axiom(goal: Sequent, name: str, position=None) -> list:
    return _axiom(DL_AXIOMS, goal, name, _pos(position))


def _pos(position):
    if position is None or isinstance(position, Position):
        return position
    from .sequent import parse_position

    return parse_position(position)


# -- structural and modal rules ------------------------------------------------------------


def _top(goal: Sequent, position, side: str, kind, name: str) -> Position:
    if position is None:
        hits = [Position(side, i) for i, f in enumerate(goal.side(side)) if kind is None or isinstance(f, kind)]
        if len(hits) != 1:
            where = "antecedent" if side == "L" else "succedent"
            raise ShapeMismatch(f"{name}: {'no' if not hits else 'several'} candidate formulas in the {where}; give a position")
        return hits[0]
    if position.side != side or position.path:
        raise ShapeMismatch(f"{name} applies to a top-level {'antecedent' if side == 'L' else 'succedent'} formula")
    f = formula_at(goal, position)
    if kind is not None and not isinstance(f, kind):
        raise ShapeMismatch(f"{name} does not apply to {pretty_print(f)}")
    return position


def _without(fs, i):
    return fs[:i] + fs[i + 1:]


def _put(fs, i, *new):
    return fs[:i] + tuple(new) + fs[i + 1:]


def r_imp_right(goal, pos, arg):
    p = _top(goal, pos, "R", Imp, "->R")
    f = goal.succ[p.index]
    return [Sequent(goal.ante + (f.left,), _put(goal.succ, p.index, f.right))]


def r_imp_left(goal, pos, arg):
    p = _top(goal, pos, "L", Imp, "->L")
    f = goal.ante[p.index]
    rest = _without(goal.ante, p.index)
    return [Sequent(rest, (f.left,) + goal.succ), Sequent(_put(goal.ante, p.index, f.right), goal.succ)]


def r_and_right(goal, pos, arg):
    p = _top(goal, pos, "R", And, "&R")
    f = goal.succ[p.index]
    return [Sequent(goal.ante, _put(goal.succ, p.index, f.left)),
            Sequent(goal.ante, _put(goal.succ, p.index, f.right))]


def r_and_left(goal, pos, arg):
    p = _top(goal, pos, "L", And, "&L")
    f = goal.ante[p.index]
    return [Sequent(_put(goal.ante, p.index, f.left, f.right), goal.succ)]


def r_or_right(goal, pos, arg):
    p = _top(goal, pos, "R", Or, "|R")
    f = goal.succ[p.index]
    return [Sequent(goal.ante, _put(goal.succ, p.index, f.left, f.right))]


def r_or_left(goal, pos, arg):
    p = _top(goal, pos, "L", Or, "|L")
    f = goal.ante[p.index]
    return [Sequent(_put(goal.ante, p.index, f.left), goal.succ),
            Sequent(_put(goal.ante, p.index, f.right), goal.succ)]


def r_not_right(goal, pos, arg):
    p = _top(goal, pos, "R", Not, "!R")
    f = goal.succ[p.index]
    return [Sequent(goal.ante + (f.arg,), _without(goal.succ, p.index))]


def r_not_left(goal, pos, arg):
    p = _top(goal, pos, "L", Not, "!L")
    f = goal.ante[p.index]
    return [Sequent(_without(goal.ante, p.index), (f.arg,) + goal.succ)]


def r_cut(goal, pos, arg):
    if arg is None:
        raise ShapeMismatch("cut needs a formula: with <formula>")
    return [Sequent(goal.ante, (arg,) + goal.succ), Sequent(goal.ante + (arg,), goal.succ)]


def r_weaken_left(goal, pos, arg):
    p = _top(goal, pos, "L", None, "WL")
    return [Sequent(_without(goal.ante, p.index), goal.succ)]


def r_weaken_right(goal, pos, arg):
    p = _top(goal, pos, "R", None, "WR")
    return [Sequent(goal.ante, _without(goal.succ, p.index))]


def r_id(goal, pos, arg):
    if pos is not None:
        f = formula_at(goal, pos)
        other = goal.succ if pos.side == "L" else goal.ante
        if pos.path or f not in other:
            raise ShapeMismatch(f"{pretty_print(f)} does not occur on both sides")
        return []
    if any(f in goal.succ for f in goal.ante):
        return []
    raise ShapeMismatch("no formula occurs on both sides")


def _fresh_instance(goal, p, f):
    others = _without(goal.side(p.side), p.index)
    other_side = goal.succ if p.side == "L" else goal.ante
    clash = _fv_all(others + tuple(other_side))
    if f.var not in clash:
        return f.body
    fresh = fresh_name(f.var, goal.names())
    return substitute(f.body, f.var, Poly.var(fresh))


def _fv_all(fs):
    out = set()
    for g in fs:
        out |= free_variables(g)
    return out


def r_forall_right(goal, pos, arg):
    p = _top(goal, pos, "R", Forall, "allR")
    return [Sequent(goal.ante, _put(goal.succ, p.index, _fresh_instance(goal, p, goal.succ[p.index])))]


def r_exists_left(goal, pos, arg):
    p = _top(goal, pos, "L", Exists, "existsL")
    return [Sequent(_put(goal.ante, p.index, _fresh_instance(goal, p, goal.ante[p.index])), goal.succ)]


def _instantiate(f, term):
    if term is None:
        raise ShapeMismatch("instantiation needs a term: with <term>")
    try:
        return substitute(f.body, f.var, term)
    except SubstitutionError as exc:
        raise ShapeMismatch(str(exc)) from exc


def r_forall_left(goal, pos, arg):
    p = _top(goal, pos, "L", Forall, "allL")
    return [Sequent(_put(goal.ante, p.index, _instantiate(goal.ante[p.index], arg)), goal.succ)]


def r_exists_right(goal, pos, arg):
    p = _top(goal, pos, "R", Exists, "existsR")
    return [Sequent(goal.ante, _put(goal.succ, p.index, _instantiate(goal.succ[p.index], arg)))]


def _implication_goal(goal: Sequent, pos, name: str):
    """(A, B) from either ``|- A -> B`` or ``A |- B``; the context is dropped."""
    if len(goal.ante) == 1 and len(goal.succ) == 1 and pos is None:
        return goal.ante[0], goal.succ[0]
    p = _top(goal, pos, "R", Imp, name)
    f = goal.succ[p.index]
    return f.left, f.right


def _single_succ(goal, pos, name):
    p = _top(goal, pos, "R", None, name)
    return goal.succ[p.index]


def r_godel(goal, pos, arg):
    f = _single_succ(goal, pos, "G")
    if not (isinstance(f, Box) and not isinstance(f.post, Tae)):
        raise ShapeMismatch("G needs [a]p with a state postcondition")
    return [Sequent((), (f.post,))]


def r_godel_tae(goal, pos, arg):
    f = _single_succ(goal, pos, "G_tae")
    if not (isinstance(f, Box) and isinstance(f.post, Tae)):
        raise ShapeMismatch("G_tae needs [a] tae: p")
    return [Sequent((), (f.post.body,))]


def r_k_tae(goal, pos, arg):
    a, b = _implication_goal(goal, pos, "K_tae")
    if not (isinstance(a, Box) and isinstance(b, Box) and isinstance(a.post, Tae)
            and isinstance(b.post, Tae) and a.prog == b.prog):
        raise ShapeMismatch("K_tae needs [a] tae: p -> [a] tae: q")
    phi, psi = a.post.body, b.post.body
    return [Sequent((), (Imp(cl(phi), cl(psi)),)), Sequent((), (Box(a.prog, Tae(Imp(phi, psi))),))]


def r_monotone(goal, pos, arg):
    a, b = _implication_goal(goal, pos, "M")
    if not (isinstance(a, Box) and isinstance(b, Box) and a.prog == b.prog
            and not isinstance(a.post, Tae) and not isinstance(b.post, Tae)):
        raise ShapeMismatch("M needs [a]p -> [a]q with state postconditions")
    return [Sequent((), (Imp(a.post, b.post),))]


def r_topcl(goal, pos, arg):
    a, b = _implication_goal(goal, pos, "TopCl")
    if not isinstance(arg, Imp):
        raise ShapeMismatch("TopCl needs the original implication: with p -> q")
    if cl(arg.left) != a or cl(arg.right) != b:
        raise ShapeMismatch("goal is not cl(p) -> cl(q) for the given p -> q")
    return [Sequent((), (arg,))]


def r_cgg(goal, pos, arg):
    a, b = _implication_goal(goal, pos, "CGG")
    if (isinstance(a, Box) and isinstance(a.post, Tae) and isinstance(b, Box)
            and a.prog == b.prog and not isinstance(b.post, Tae) and b.post == cl(a.post.body)):
        return []
    raise ShapeMismatch("CGG needs [a] tae: p -> [a] cl(p)")


@dataclass(frozen=True)
class Closed:
    certificate: str
    status = "closed"


@dataclass(frozen=True)
class Open:
    reason: str
    witness: dict | None = field(default=None, hash=False)
    status = "open"


def close_by_arith(goal: Sequent):
    """Closed iff the sequent's first-order reading is valid."""
    fs = goal.ante + goal.succ
    if not all(is_first_order(f) for f in fs):
        return Open("sequent is not first order")
    claim = Imp(conj(goal.ante), disj(goal.succ)) if goal.ante else disj(goal.succ)
    verdict = check_validity(claim)
    if verdict.status == "valid":
        return Closed(verdict.certificate)
    if verdict.status == "falsified":
        shown = ", ".join(f"{k}={v}" for k, v in sorted(verdict.witness.items()))
        return Open(f"counterexample {shown}", verdict.witness)
    return Open(verdict.reason)


def r_arith(goal, pos, arg):
    result = close_by_arith(goal)
    if isinstance(result, Open):
        raise ArithOpen(result)
    return []


class ArithOpen(ShapeMismatch):
    def __init__(self, result: Open):
        super().__init__(f"arithmetic does not close the goal: {result.reason}")
        self.result = result


def rewrite_in_context(goal: Sequent, position, psi):
    """Replace the subformula at ``position`` by ``psi``; returns (goal, side goal)."""
    position = _pos(position)
    if position is None:
        raise ShapeMismatch("rewrite needs a position")
    phi = formula_at(goal, position)
    bound = binders_along(goal, position)
    introduced = (free_variables(psi) - free_variables(phi)) & bound
    if introduced:
        raise ContextError(
            f"replacement mentions {', '.join(sorted(introduced))}, bound at {position}"
        )
    return replace_at(goal, position, psi), Sequent((), (Iff(phi, psi),))


def r_rewrite(goal, pos, arg):
    if arg is None:
        raise ShapeMismatch("rewrite needs a formula: with <formula>")
    new, side = rewrite_in_context(goal, pos, arg)
    return [new, side]


RULES = {
    "->R": r_imp_right, "->L": r_imp_left,
    "&R": r_and_right, "&L": r_and_left,
    "|R": r_or_right, "|L": r_or_left,
    "!R": r_not_right, "!L": r_not_left,
    "cut": r_cut, "WL": r_weaken_left, "WR": r_weaken_right, "id": r_id,
    "allR": r_forall_right, "allL": r_forall_left,
    "existsR": r_exists_right, "existsL": r_exists_left,
    "G": r_godel, "G_tae": r_godel_tae, "K_tae": r_k_tae, "M": r_monotone,
    "TopCl": r_topcl, "CGG": r_cgg,
    "rewrite": r_rewrite, "arith": r_arith,
}

# term arguments (instantiations) versus formula arguments
TERM_ARG_RULES = {"allL", "existsR"}


def apply_rule(goal: Sequent, name: str, position=None, arg=None) -> list:
    if name not in RULES:
        raise ShapeMismatch(f"unknown rule {name}")
    return RULES[name](goal, _pos(position), arg)
