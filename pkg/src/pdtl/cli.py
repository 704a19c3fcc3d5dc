"""Command-line front end: parse, prove, simulate, closure, qe, solve-ode, examples."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .arith import NonlinearQuantifier, Unknown, closure, fm_eliminate
from .kernel import ReplayMismatch, Sequent, check_script, format_verdict, parse_script
from .models import Model, corpus_model, corpus_names, corpus_path, corpus_scripts, load_model, resolve
from .ode import NotPolynomialSolvable, solve_polynomial
from .parser import ParseError, parse_ode_system, parse_program, parse_state_formula
from .poly import format_poly
from .printer import pretty_print
from .sim import EnumConfig, NumericODE, State, eval_box_tae, eval_state_formula

EXIT_OK, EXIT_FAIL, EXIT_UNKNOWN, EXIT_USAGE, EXIT_PARSE = 0, 1, 2, 64, 65
MAX_UNROLL = 12
MAX_MC = 10_000_000


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: str | None = None
    script: str | None = None
    enum: EnumConfig = field(default_factory=EnumConfig)
    json: bool = False

    def __post_init__(self):
        if not 0 <= self.enum.unroll <= MAX_UNROLL:
            raise UsageError(f"--unroll must be between 0 and {MAX_UNROLL}")
        if not 1 <= self.enum.mc_samples <= MAX_MC:
            raise UsageError(f"--mc must be between 1 and {MAX_MC}")


# -- output helpers ------------------------------------------------------------------------------


_COLORS = {"holds": "32", "closed": "32", "fails": "31", "open": "31", "unknown": "33"}


def _use_color(stream) -> bool:
    setting = os.environ.get("PDTL_COLOR", "auto").lower()
    if setting in ("1", "always", "yes", "true"):
        return True
    if setting in ("0", "never", "no", "false"):
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _paint(word: str, out) -> str:
    code = _COLORS.get(word)
    if code and _use_color(out):
        return f"\x1b[{code}m{word}\x1b[0m"
    return word


def _emit_json(obj, out):
    out.write(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def _show(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return repr(float(x))


# -- commands ------------------------------------------------------------------------------------


def cmd_parse(target: str, as_program: bool, as_json: bool, out) -> int:
    path = _maybe_model_path(target)
    if path is not None:
        model = load_model(path)
        if as_json:
            _emit_json({"kind": "model", "name": model.name, "vars": list(model.variables),
                        "problem": pretty_print(model.problem)}, out)
        else:
            out.write(f"model {model.name}: vars {', '.join(model.variables)}\n{pretty_print(model.problem)}\n")
        return EXIT_OK
    node = parse_program(target) if as_program else parse_state_formula(target)
    kind = "program" if as_program else "formula"
    if as_json:
        _emit_json({"kind": kind, "text": pretty_print(node)}, out)
    else:
        out.write(pretty_print(node) + "\n")
    return EXIT_OK


def _maybe_model_path(target: str):
    if target.endswith(".pdtl") or target in corpus_names():
        return resolve(target, ".pdtl")
    return None


def cmd_prove(model: Model, script_text: str, as_json: bool, out) -> int:
    """Replay a script against the claim ``|- problem``; 0 iff every goal closes."""
    script = parse_script(script_text)
    start = time.perf_counter()
    try:
        verdict = check_script(script, Sequent((), (model.problem,)))
    except ReplayMismatch as exc:
        if as_json:
            _emit_json({"model": model.name, "closed": False, "error": str(exc), "line": exc.line}, out)
        else:
            out.write(f"{_paint('open', out)}: replay stopped at line {exc.line}: {exc}\n")
        return EXIT_FAIL
    elapsed = time.perf_counter() - start
    if as_json:
        _emit_json({"model": model.name, **verdict.to_json()}, out)
    else:
        text = format_verdict(verdict)
        word = "closed" if verdict.closed else "open"
        out.write(_paint(word, out) + text[len(word):] + f"\n  ({elapsed:.3f} s)\n")
    return EXIT_OK if verdict.closed else EXIT_FAIL


def simulation_report(model: Model, cfg: EnumConfig) -> dict:
    """Deterministic JSON-ready report of a bounded simulation of ``model``."""
    values = model.initial_values()
    state = State(values)
    report = {
        "problem": pretty_print(model.problem),
        "model": model.name,
        "initial_state": state.to_json(),
        "config": cfg.to_json(),
    }
    parts = model.parts
    if parts is None:
        truth = eval_state_formula(state, model.problem, cfg)
        report.update(verdict=_truth_word(truth), traces=[], seeds={"base": cfg.seed, "sampled": []})
        if isinstance(truth, Unknown):
            report["reason"] = truth.reason
        return report
    pre, prog, post = parts
    if pre is not None:
        ok = eval_state_formula(state, pre, cfg)
        if ok is not True:
            report.update(verdict="unknown", traces=[], seeds={"base": cfg.seed, "sampled": []},
                          reason="the precondition does not hold at the initial state")
            return report
    verdict = eval_box_tae(prog, state, post, cfg)
    records = []
    sampled = []
    for k, (trace, tv) in enumerate(verdict.traces):
        witnesses = []
        for i, r in tv.reports:
            if isinstance(trace.flows[i], NumericODE):
                sampled.append([cfg.seed, k, i])
            witnesses.extend({"flow": i, "local": w.to_json(), "time": t.to_json()}
                             for w, t in zip(r.witnesses, r.times))
        record = {
            "index": k,
            "status": tv.status,
            "measure": _show(tv.measure),
            "exact": all(r.exact for _, r in tv.reports),
            "witnesses": witnesses,
            "flows": trace.to_json(),
            "reports": [{"flow": i, **r.to_json()} for i, r in tv.reports],
        }
        if tv.index is not None:
            record["discrete_index"] = tv.index
        if tv.reason:
            record["reason"] = tv.reason
        records.append(record)
    report.update(
        verdict=verdict.status,
        bounded=verdict.bounded,
        traces=records,
        seeds={"base": cfg.seed, "derivation": "SeedSequence([base, trace, flow])", "sampled": sampled},
    )
    if verdict.reason:
        report["reason"] = verdict.reason
    return report


def _truth_word(v) -> str:
    if isinstance(v, Unknown):
        return "unknown"
    return "holds" if v else "fails"


_VERDICT_EXIT = {"holds": EXIT_OK, "fails": EXIT_FAIL, "unknown": EXIT_UNKNOWN}


def cmd_simulate(model: Model, cfg: EnumConfig, as_json: bool, out) -> int:
    report = simulation_report(model, cfg)
    if as_json:
        _emit_json(report, out)
    else:
        out.write(_format_simulation(report, out))
    return _VERDICT_EXIT[report["verdict"]]


def _format_simulation(report: dict, out) -> str:
    lines = [f"{report['model']}: {_paint(report['verdict'], out)}"]
    traces = report["traces"]
    if traces:
        numeric = any(not t["exact"] for t in traces)
        scope = "bounded enumeration" if report.get("bounded") else "all traces"
        kind = "statistical (sampled flows present)" if numeric else "exact"
        lines.append(f"  {len(traces)} traces, {scope}, {kind}")
    if report.get("reason"):
        lines.append(f"  reason: {report['reason']}")
    failing = [t for t in traces if t["status"].startswith("failed")]
    for t in failing[:5]:
        line = f"  trace {t['index']}: {t['status']}"
        if "discrete_index" in t:
            line += f" at flow {t['discrete_index']}"
        if t["status"] == "failed-continuous":
            line += f", measure {t['measure']}"
            spans = [f"flow {w['flow']} {_interval(w['local'])} (time {_interval(w['time'])})" for w in t["witnesses"]]
            if spans:
                line += ", witnesses " + "; ".join(spans)
        lines.append(line)
    if len(failing) > 5:
        lines.append(f"  ... {len(failing) - 5} more failing traces")
    return "\n".join(lines) + "\n"


def _interval(w: dict) -> str:
    if w["lo"] == w["hi"]:
        return "{" + w["lo"] + "}"
    return ("[" if w["lo_closed"] else "(") + f"{w['lo']}, {w['hi']}" + ("]" if w["hi_closed"] else ")")


def cmd_closure(text: str, as_json: bool, out) -> int:
    f = parse_state_formula(text)
    result = pretty_print(closure(f))
    _emit_json({"formula": pretty_print(f), "closure": result}, out) if as_json else out.write(result + "\n")
    return EXIT_OK


def cmd_qe(text: str, as_json: bool, out) -> int:
    f = parse_state_formula(text)
    result = pretty_print(fm_eliminate(f))
    _emit_json({"formula": pretty_print(f), "result": result}, out) if as_json else out.write(result + "\n")
    return EXIT_OK


def cmd_solve_ode(text: str, as_json: bool, out) -> int:
    ode = parse_ode_system(text)
    taken = set(ode.variables)
    initial = {}
    for v in ode.variables:
        name = v + "0"
        while name in taken:
            name += "_"
        initial[v] = name
        taken.add(name)
    sol = solve_polynomial(ode, initial_names=initial, avoid=tuple(taken))
    rows = [(v, format_poly(y)) for v, y in sol.solutions]
    if as_json:
        _emit_json({"time": sol.time_var, "initial": dict(sol.initial),
                    "solution": {v: y for v, y in rows}}, out)
    else:
        for v, y in rows:
            out.write(f"{v}({sol.time_var}) = {y}\n")
    return EXIT_OK


def cmd_examples(name: str | None, as_json: bool, out) -> int:
    if name is not None:
        if name not in corpus_names():
            raise UsageError(f"no bundled example {name!r}; try 'pdtl examples'")
        text = corpus_path(name + ".pdtl").read_text(encoding="utf-8")
        if as_json:
            _emit_json({"name": name, "source": text, "scripts": corpus_scripts(name)}, out)
        else:
            out.write(text)
        return EXIT_OK
    entries = []
    for n in corpus_names():
        m = corpus_model(n)
        entries.append({"name": n, "description": m.description, "scripts": corpus_scripts(n)})
    if as_json:
        _emit_json(entries, out)
    else:
        for e in entries:
            scripts = f"  [scripts: {', '.join(e['scripts'])}]" if e["scripts"] else ""
            out.write(f"{e['name']:<14} {e['description']}{scripts}\n")
    return EXIT_OK


# -- argument handling -------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _durations(text: str) -> tuple:
    try:
        return tuple(Fraction(part.strip()) for part in text.split(",") if part.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad duration list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pdtl", description="Proof checker and trace-semantics oracle for tae dynamic logic.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        return sp

    sp = common(sub.add_parser("parse", help="parse and pretty-print a model, formula or program"))
    sp.add_argument("target", help="model file, bundled model name, or formula text")
    sp.add_argument("--program", action="store_true", help="read the text as a hybrid program")

    sp = common(sub.add_parser("prove", help="replay a proof script against a model's problem"))
    sp.add_argument("model", help="model file or bundled model name")
    sp.add_argument("script", nargs="?", help="proof script (default: the bundled script of the model)")

    sp = common(sub.add_parser("simulate", help="evaluate a model's problem on enumerated traces"))
    sp.add_argument("model", help="model file or bundled model name")
    sp.add_argument("--unroll", type=int, default=3, help=f"loop unrolling bound N (<= {MAX_UNROLL})")
    sp.add_argument("--durations", type=_durations, default=None,
                    help="comma-separated ODE durations, e.g. 0,1/4,1/2,1,2")
    sp.add_argument("--mc", type=float, default=100_000, help=f"Monte Carlo samples per numeric flow (<= {MAX_MC})")
    sp.add_argument("--seed", type=int, default=0)

    for name, what, text in (
        ("closure", "topological closure of a quantifier-free formula", "formula"),
        ("qe", "eliminate quantifiers from a linear formula", "formula"),
        ("solve-ode", "closed-form polynomial solution of an ODE system", "ODE system"),
    ):
        sp = common(sub.add_parser(name, help=what))
        sp.add_argument("text", help=text)

    sp = common(sub.add_parser("examples", help="list the bundled models, or print one"))
    sp.add_argument("name", nargs="?")
    return p


def _run(args, out) -> int:
    if args.command == "parse":
        return cmd_parse(args.target, args.program, args.json, out)
    if args.command == "prove":
        path = resolve(args.model, ".pdtl")
        model = load_model(path)
        script = args.script
        if script is None:
            bundled = corpus_path(path.stem + ".pdtlp")
            if not bundled.exists():
                raise UsageError(f"no bundled script for {path.stem}; pass one explicitly")
            script_path = bundled
        else:
            script_path = resolve(script, ".pdtlp")
        cfg = RunConfig("prove", str(path), str(script_path), json=args.json)
        return cmd_prove(model, Path(cfg.script).read_text(encoding="utf-8"), cfg.json, out)
    if args.command == "simulate":
        if args.mc != int(args.mc):
            raise UsageError("--mc takes an integer")
        try:
            enum = EnumConfig(unroll=args.unroll, mc_samples=int(args.mc), seed=args.seed,
                              **({"durations": args.durations} if args.durations is not None else {}))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        path = resolve(args.model, ".pdtl")
        cfg = RunConfig("simulate", str(path), enum=enum, json=args.json)
        return cmd_simulate(load_model(path), cfg.enum, cfg.json, out)
    if args.command == "closure":
        return cmd_closure(args.text, args.json, out)
    if args.command == "qe":
        return cmd_qe(args.text, args.json, out)
    if args.command == "solve-ode":
        return cmd_solve_ode(args.text, args.json, out)
    if args.command == "examples":
        return cmd_examples(args.name, args.json, out)
    raise UsageError(f"unknown command {args.command}")  # pragma: no cover


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return _run(args, out)
    except UsageError as exc:
        err.write(f"pdtl: usage error: {exc}\n")
        return EXIT_USAGE
    except FileNotFoundError as exc:
        err.write(f"pdtl: no such file or bundled example: {exc.args[0] if exc.args else exc}\n")
        return EXIT_USAGE
    except ParseError as exc:
        err.write(f"pdtl: parse error: {exc}\n")
        return EXIT_PARSE
    except (NonlinearQuantifier, NotPolynomialSolvable, ValueError) as exc:
        err.write(f"pdtl: {exc}\n")
        return EXIT_UNKNOWN


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
