"""Proof scripts: parsing, deterministic replay and JSON export.

A script is a list of lines ``goal <n>: <rule> [at <position>] [with <arg>]``
plus an optional ``auto-arith`` line.  Goal ids are handed out in creation
order: the claim is goal 0 and every new premise takes the next number.
Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field

from ..parser import ParseError, parse_state_formula, parse_term
from .derived import DERIVED, apply_any, canonical, known
from .rules import TERM_ARG_RULES, ArithOpen, close_by_arith
from .sequent import KernelError, ReplayMismatch, Sequent, parse_position

_LINE = re.compile(
    r"goal\s+(?P<goal>\d+)\s*:\s*(?P<rule>\S+)"
    r"(?:\s+at\s+(?P<at>\S+))?(?:\s+with\s+(?P<arg>.+?))?\s*\Z"
)


@dataclass(frozen=True)
class ScriptStep:
    line: int
    goal: int | None  # None for auto-arith
    rule: str
    position: str | None = None
    arg_text: str | None = None

    def __str__(self):
        if self.goal is None:
            return self.rule
        out = f"goal {self.goal}: {self.rule}"
        if self.position:
            out += f" at {self.position}"
        if self.arg_text:
            out += f" with {self.arg_text}"
        return out


@dataclass(frozen=True)
class ProofScript:
    steps: tuple

    def __str__(self):
        return "\n".join(map(str, self.steps)) + "\n"


def parse_script(text: str) -> ProofScript:
    steps = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "auto-arith":
            steps.append(ScriptStep(n, None, "auto-arith"))
            continue
        m = _LINE.match(line)
        if not m:
            raise ParseError(f"line {n}: expected 'goal <n>: <rule> [at <position>] [with <arg>]'")
        rule = canonical(m["rule"])
        if not known(rule):
            raise ParseError(f"line {n}: unknown rule {m['rule']!r}")
        steps.append(ScriptStep(n, int(m["goal"]), rule, m["at"], m["arg"]))
    return ProofScript(tuple(steps))


@dataclass
class ProofNode:
    id: int
    sequent: Sequent
    rule: str | None = None
    position: str | None = None
    arg_text: str | None = None
    children: list = field(default_factory=list)
    note: str | None = None
    expansion: object = None

    @property
    def closed(self) -> bool:
        return self.rule is not None and all(c.closed for c in self.children)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "sequent": str(self.sequent),
            "rule": None if self.rule is None else _rule_text(self),
            "children": [c.to_json() for c in self.children],
        }


def _rule_text(node: ProofNode) -> str:
    out = node.rule
    if node.position:
        out += f" at {node.position}"
    if node.arg_text:
        out += f" with {node.arg_text}"
    return out


@dataclass(frozen=True)
class OpenGoal:
    id: int
    sequent: Sequent
    note: str | None = None

    def to_json(self) -> dict:
        return {"id": self.id, "sequent": str(self.sequent), "note": self.note}


@dataclass
class Verdict:
    closed: bool
    open_goals: list
    statistics: dict
    tree: ProofNode

    def to_json(self) -> dict:
        return {
            "closed": self.closed,
            "open_goals": [g.to_json() for g in self.open_goals],
            "statistics": self.statistics,
            "tree": self.tree.to_json(),
        }


def _parse_arg(rule: str, text: str | None, line: int):
    if text is None:
        return None
    try:
        return parse_term(text) if rule in TERM_ARG_RULES else parse_state_formula(text)
    except ParseError as exc:
        raise ReplayMismatch(f"cannot parse argument {text!r}: {exc}", line) from exc


def replay(script: ProofScript, claim: Sequent) -> ProofNode:
    root = ProofNode(0, claim)
    open_nodes = {0: root}
    counter = 1
    for step in script.steps:
        if step.goal is None:
            for node in list(open_nodes.values()):
                _try_arith(node, open_nodes)
            continue
        node = open_nodes.get(step.goal)
        if node is None:
            raise ReplayMismatch(f"goal {step.goal} is not an open goal", step.line)
        arg = _parse_arg(step.rule, step.arg_text, step.line)
        try:
            position = parse_position(step.position) if step.position else None
            premises, expansion = apply_any(node.sequent, step.rule, position, arg)
        except ArithOpen as exc:
            node.note = str(exc)
            continue
        except (KernelError, ValueError, ArithmeticError) as exc:
            raise ReplayMismatch(f"{step}: {exc}", step.line) from exc
        node.rule, node.position, node.arg_text = step.rule, step.position, step.arg_text
        node.expansion = expansion
        del open_nodes[node.id]
        for p in premises:
            child = ProofNode(counter, p)
            counter += 1
            node.children.append(child)
            open_nodes[child.id] = child
    return root


def _try_arith(node: ProofNode, open_nodes: dict):
    result = close_by_arith(node.sequent)
    if result.status == "closed":
        node.rule = "arith"
        node.note = None
        del open_nodes[node.id]
    else:
        node.note = f"arithmetic does not close the goal: {result.reason}"


def check_script(script, claim: Sequent) -> Verdict:
    """Replay ``script`` (text or parsed) against ``claim``."""
    if isinstance(script, str):
        script = parse_script(script)
    root = replay(script, claim)
    nodes = list(root.walk())
    leaves = [n for n in nodes if n.rule is None]
    rules = Counter(n.rule for n in nodes if n.rule is not None)
    stats = {
        "steps": len(script.steps),
        "nodes": len(nodes),
        "open": len(leaves),
        "derived_steps": sum(c for r, c in rules.items() if r in DERIVED),
        "primitive_steps": sum(_primitive_count(n) for n in nodes),
        "rules": dict(sorted(rules.items())),
    }
    return Verdict(
        closed=not leaves,
        open_goals=[OpenGoal(n.id, n.sequent, n.note) for n in leaves],
        statistics=stats,
        tree=root,
    )


def _primitive_count(node: ProofNode) -> int:
    """Kernel primitives behind one node: 1, or the size of a derived rule's expansion."""
    if node.rule is None:
        return 0
    if node.expansion is None:
        return 1
    return _expansion_size(node.expansion)


def _expansion_size(step) -> int:
    if step.rule is None:
        return 0
    own = _expansion_size(step.expansion) if step.expansion is not None else 1
    return own + sum(_expansion_size(c) for c in step.children)


def format_verdict(verdict: Verdict) -> str:
    lines = [f"{'closed' if verdict.closed else 'open'}: "
             f"{verdict.statistics['nodes']} nodes, {len(verdict.open_goals)} open"]
    for g in verdict.open_goals:
        lines.append(f"  goal {g.id}: {g.sequent}")
        if g.note:
            lines.append(f"    {g.note}")
    return "\n".join(lines)


__all__ = [
    "ProofNode", "ProofScript", "ScriptStep", "OpenGoal", "Verdict",
    "parse_script", "replay", "check_script", "format_verdict",
]
