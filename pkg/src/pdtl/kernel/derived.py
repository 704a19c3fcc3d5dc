"""Derived rules, built by applying primitive rules.

Each derived rule records the primitive tree it was expanded into.  Its
premises are the open leaves of that tree, and they are checked against the
premises the rule is meant to have.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..syntax import Box, Imp, Loop, Seq, Tae
from . import rules
from .rules import cl
from .sequent import KernelError, Position, Sequent, ShapeMismatch


@dataclass
class Step:
    """A node of an expansion tree; ``rule is None`` marks an open leaf."""

    sequent: Sequent
    rule: str | None = None
    position: Position | None = None
    arg: object = None
    children: list = field(default_factory=list)
    expansion: "Step | None" = None

    def open_leaves(self) -> list:
        if self.rule is None:
            return [self]
        return [leaf for c in self.children for leaf in c.open_leaves()]


class Builder:
    """Applies rules to the open leaves of a growing tree."""

    def __init__(self, goal: Sequent):
        self.root = Step(goal)

    def apply(self, node: Step, name: str, position=None, arg=None) -> list:
        premises, expansion = apply_any(node.sequent, name, position, arg)
        node.rule, node.position, node.arg = name, rules._pos(position), arg
        node.expansion = expansion
        node.children = [Step(p) for p in premises]
        return node.children

    def premises(self) -> list:
        return list(dict.fromkeys(leaf.sequent for leaf in self.root.open_leaves()))


def _box_tae(f, name):
    if not (isinstance(f, Box) and isinstance(f.post, Tae)):
        raise ShapeMismatch(f"{name} needs a tae box, got {f}")
    return f.prog, f.post.body


def _check(name: str, b: Builder, expected: list):
    """The expected premises, in rule order, once the tree's open leaves match them."""
    got = b.premises()
    expected = list(dict.fromkeys(expected))
    if set(got) != set(expected):
        raise KernelError(
            f"{name} expansion left {', '.join(map(str, got))} instead of the expected premises"
        )
    return expected


def _only(goal: Sequent, name: str):
    """(A, B) for ``|- A -> B`` or ``A |- B`` with nothing else in the sequent."""
    if len(goal.ante) == 1 and len(goal.succ) == 1:
        return goal.ante[0], goal.succ[0], True
    if not goal.ante and len(goal.succ) == 1 and isinstance(goal.succ[0], Imp):
        return goal.succ[0].left, goal.succ[0].right, False
    raise ShapeMismatch(f"{name} needs |- A -> B or A |- B")


def d_monotone_tae(goal, pos, arg):
    a, b, _ = _only(goal, "M_tae")
    prog, phi = _box_tae(a, "M_tae")
    prog2, psi = _box_tae(b, "M_tae")
    if prog != prog2:
        raise ShapeMismatch("M_tae needs the same program on both sides")
    bld = Builder(goal)
    closures, body = bld.apply(bld.root, "K_tae")
    bld.apply(closures, "TopCl", arg=Imp(phi, psi))
    bld.apply(body, "G_tae")
    return _check("M_tae", bld, [Sequent((), (Imp(phi, psi),))]), bld.root


def d_induction_tae(goal, pos, arg):
    if len(goal.ante) != 1 or len(goal.succ) != 1:
        raise ShapeMismatch("Ind_tae needs cl(p) |- [a*] tae: p")
    prog, phi = _box_tae(goal.succ[0], "Ind_tae")
    if not isinstance(prog, Loop) or goal.ante[0] != cl(phi):
        raise ShapeMismatch("Ind_tae needs cl(p) |- [a*] tae: p")
    bld = Builder(goal)
    (unfolded,) = bld.apply(bld.root, "I_tae", Position("R", 0))
    base, step = bld.apply(unfolded, "&R", Position("R", 0))
    bld.apply(base, "id")
    (gen,) = bld.apply(step, "G", Position("R", 0))
    bld.apply(gen, "->R", Position("R", 0))
    expected = [Sequent((cl(phi),), (Box(prog.body, Tae(phi)),))]
    return _check("Ind_tae", bld, expected), bld.root


def _weaken_to(bld: Builder, node: Step, keep_ante: int, keep_succ: int) -> Step:
    """Weaken away every formula but one on each side."""
    n = len(node.sequent.succ)
    for i in reversed(range(n)):
        if i != keep_succ:
            (node,) = bld.apply(node, "WR", Position("R", i))
    n = len(node.sequent.ante)
    for i in reversed(range(n)):
        if i != keep_ante:
            (node,) = bld.apply(node, "WL", Position("L", i))
    return node


def d_loop_tae(goal, pos, arg):
    if arg is None:
        raise ShapeMismatch("loop_tae needs an invariant: with <formula>")
    pos = rules._top(goal, rules._pos(pos), "R", Box, "loop_tae")
    prog, phi = _box_tae(goal.succ[pos.index], "loop_tae")
    if not isinstance(prog, Loop):
        raise ShapeMismatch("loop_tae needs [a*] tae: p")
    psi = arg
    inv_box = Box(prog, Tae(psi))
    bridge = Imp(cl(psi), inv_box)
    bld = Builder(goal)
    show, use = bld.apply(bld.root, "cut", arg=bridge)

    (ind,) = bld.apply(show, "->R", Position("R", 0))
    ind = _weaken_to(bld, ind, len(ind.sequent.ante) - 1, 0)
    bld.apply(ind, "Ind_tae")

    init, post = bld.apply(use, "->L", Position("L", len(goal.ante)))
    bld.apply(init, "WR", Position("R", pos.index + 1))
    mono = _weaken_to(bld, post, len(goal.ante), pos.index)
    (imp,) = bld.apply(mono, "M_tae")
    bld.apply(imp, "->R", Position("R", 0))

    rest = goal.succ[:pos.index] + goal.succ[pos.index + 1:]
    expected = [
        Sequent(goal.ante, (cl(psi),) + rest),
        Sequent((cl(psi),), (Box(prog.body, Tae(psi)),)),
        Sequent((psi,), (phi,)),
    ]
    return _check("loop_tae", bld, expected), bld.root


def d_composition_tae(goal, pos, arg):
    a, b, sequent_form = _only(goal, "Comp_tae")
    prog, phi = _box_tae(b, "Comp_tae")
    if not isinstance(prog, Seq):
        raise ShapeMismatch("Comp_tae needs [a;b] tae: p")
    if arg is not None and arg != a:
        raise ShapeMismatch("Comp_tae: the given formula is not the antecedent of the goal")
    psi = a
    first = Box(prog.left, Tae(phi))
    bld = Builder(goal)
    node = bld.root
    if sequent_form:
        # bridge psi |- box to |- psi -> box
        show, use = bld.apply(node, "cut", arg=Imp(psi, b))
        (node,) = bld.apply(show, "WR", Position("R", 1))
        (node,) = bld.apply(node, "WL", Position("L", 0))
        left, right = bld.apply(use, "->L", Position("L", 1))
        bld.apply(left, "id")
        bld.apply(right, "id")

    (node,) = bld.apply(node, "[;]_tae", Position("R", 0, (1,)))
    show, use = bld.apply(node, "cut", arg=Imp(psi, first))
    bld.apply(show, "WR", Position("R", 1))
    (node,) = bld.apply(use, "->R", Position("R", 0))
    hyp, node = bld.apply(node, "->L", Position("L", 0))
    bld.apply(hyp, "id")
    (node,) = bld.apply(node, "WL", Position("L", 1))
    same, later = bld.apply(node, "&R", Position("R", 0))
    bld.apply(same, "id")
    bridge = Box(prog.left, cl(phi))
    show, use = bld.apply(later, "cut", arg=bridge)
    (show,) = bld.apply(show, "WR", Position("R", 1))
    bld.apply(show, "CGG")
    (use,) = bld.apply(use, "WL", Position("L", 0))
    bld.apply(use, "M")

    expected = [
        Sequent((), (Imp(psi, first),)),
        Sequent((), (Imp(cl(phi), Box(prog.right, Tae(phi))),)),
    ]
    return _check("Comp_tae", bld, expected), bld.root


DERIVED = {
    "M_tae": d_monotone_tae,
    "Ind_tae": d_induction_tae,
    "loop_tae": d_loop_tae,
    "Comp_tae": d_composition_tae,
}

_CHOICE = {"∪": "++", "u": "++"}
_PREFIXES = {"→": "->", "∧": "&", "∨": "|", "¬": "!", "∀": "all", "∃": "exists", "imp": "->"}


def canonical(name: str) -> str:
    """Map alternative spellings (unicode, ``[u]``, missing underscores) to the registry name."""
    name = name.strip()
    if name.startswith("["):
        close = name.index("]") + 1
        head, tail = name[1:close - 1], name[close:]
        head = _CHOICE.get(head, head)
        if tail.startswith("tae"):
            tail = "_" + tail
        name = f"[{head}]{tail}"
    else:
        for k, v in _PREFIXES.items():
            if name.startswith(k):
                name = v + name[len(k):]
                break
        if name.endswith("tae") and not name.endswith("_tae"):
            name = name[:-3] + "_tae"
    return name


def known(name: str) -> bool:
    base = name[:-2] if name.endswith("<-") else name
    return (base in rules.TAE_AXIOMS or base in rules.DL_AXIOMS
            or name in rules.RULES or name in DERIVED)


def apply_any(goal: Sequent, name: str, position=None, arg=None):
    """Premises and (for derived rules) the expansion tree of one step."""
    name = canonical(name)
    base = name[:-2] if name.endswith("<-") else name
    if base in rules.TAE_AXIOMS:
        return rules.apply_tae_axiom(goal, name, position), None
    if base in rules.DL_AXIOMS:
        return rules.apply_dl_axiom(goal, name, position), None
    if name in rules.RULES:
        return rules.apply_rule(goal, name, position, arg), None
    if name in DERIVED:
        return DERIVED[name](goal, rules._pos(position), arg)
    raise ShapeMismatch(f"unknown rule {name}")


def apply_derived(goal: Sequent, name: str, position=None, arg=None) -> list:
    name = canonical(name)
    if name not in DERIVED:
        raise ShapeMismatch(f"unknown derived rule {name}")
    premises, _ = DERIVED[name](goal, rules._pos(position), arg)
    return premises


def expansion(goal: Sequent, name: str, position=None, arg=None) -> Step:
    """The primitive tree behind a derived step."""
    name = canonical(name)
    if name not in DERIVED:
        raise ShapeMismatch(f"unknown derived rule {name}")
    return DERIVED[name](goal, rules._pos(position), arg)[1]
