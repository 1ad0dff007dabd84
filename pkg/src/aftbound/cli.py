"""Command-line front end.

Exit codes: 0 success, 1 parse/usage error, 2 resource cap, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import asp, demo, specanalysis
from .asp.oracle import DEFAULT_ORACLE_CAP
from .bnb import EXHAUSTIVE, FIRST, BnbConfig
from .errors import AftError, UsageError
from .lattice import Interval
from .refine import RefineConfig
from .specanalysis import signs


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _set_text(names: list[str]) -> str:
    return "{" + ", ".join(names) + "}"


def _interval_json(prog: asp.GroundProgram, b: Interval) -> dict:
    return {"lower": prog.visible(b.lo), "upper": prog.visible(b.hi), "valid": b.valid}


def _interval_text(prog: asp.GroundProgram, b: Interval) -> str:
    flag = "" if b.valid else " (invalid)"
    return f"[{_set_text(prog.visible(b.lo))}, {_set_text(prog.visible(b.hi))}]{flag}"


def _positive(name: str):
    def check(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer") from None
        if v < 1:
            raise argparse.ArgumentTypeError(f"{name} must be at least 1")
        return v

    return check


# asp -------------------------------------------------------------------------


def cmd_asp_bounds(args) -> str:
    prog = asp.load_program(_read(args.file))
    cfg = None
    if args.bnb:
        cfg = BnbConfig(
            budget=args.budget,
            outer_cap=args.outer_max,
            ir_config=RefineConfig(max_f_steps=args.ir_max),
            stop_mode=FIRST if args.first else EXHAUSTIVE,
            workers=args.workers,
        )
    elif args.budget or args.outer_max or args.ir_max or args.first:
        raise UsageError("--budget, --outer-max, --ir-max and --first need --bnb")
    report = asp.stable_model_bounds(prog, cfg)
    models = [prog.visible(m) for m in report.models]
    if args.json:
        out = {"well_founded": _interval_json(prog, report.well_founded)}
        if report.search is not None:
            s = report.search
            out["search"] = {
                "final": [_interval_json(prog, b) for b in s.final],
                "active": [_interval_json(prog, b) for b in s.bounds],
                "fixed_points": [prog.visible(x) for x in s.fixed_points_found],
                "outer_iterations": s.outer_iterations,
                "ir_calls": s.ir_calls,
                "stalled": [_interval_json(prog, b) for b in s.stalled],
            }
            out["models"] = models
        return _dump(out)
    lines = [f"well-founded bound: {_interval_text(prog, report.well_founded)}"]
    s = report.search
    if s is not None:
        lines.append(f"outer iterations: {s.outer_iterations}, IR calls: {s.ir_calls}")
        lines.append(f"final intervals: {len(s.final)}")
        lines += [f"  {_interval_text(prog, b)}" for b in s.final]
        if s.bounds:
            lines.append(f"active intervals (search interrupted): {len(s.bounds)}")
            lines += [f"  {_interval_text(prog, b)}" for b in s.bounds]
        lines.append(f"stable models found: {len(models)}")
        lines += [f"  {_set_text(m)}" for m in models]
    return "\n".join(lines) + "\n"


def cmd_asp_preprocess(args) -> str:
    prog = asp.load_program(_read(args.file))
    try:
        obj = json.loads(_read(args.bounds))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.bounds}: invalid JSON: {exc.msg}") from None
    bound = asp.bound_from_json(prog.universe, obj, prog.hidden)
    if args.emit == "assumptions":
        return asp.emit_assumptions(bound, prog.hidden)
    pe = asp.partial_eval(prog, bound, args.mode)
    return asp.format_program(pe.program)


def cmd_asp_oracle(args) -> str:
    prog = asp.load_program(_read(args.file))
    models = [prog.visible(m) for m in asp.brute_force_stable_models(prog, args.cap)]
    if args.json:
        return _dump({"models": models})
    return "".join(_set_text(m) + "\n" for m in models) or "no stable models\n"


# demo ------------------------------------------------------------------------


def cmd_demo(args) -> str:
    trace = demo.run_demo(args.steps)
    if args.json:
        return trace.to_json_lines()
    q = demo.SQUARE.element_to_json

    def show(b: Interval) -> str:
        return f"[{tuple(q(b.lo))}, {tuple(q(b.hi))}]".replace("'", "")

    lines = [f"step {k}: {show(b)}" for k, b in enumerate(trace.steps)]
    img = trace.unsound_image
    valid = img.lo <= img.hi
    lines.append(f"F({show(trace.unsound_input)}) = {show(img)} {'valid' if valid else 'invalid'}")
    lines.append(f"converged: {trace.converged}")
    return "\n".join(lines) + "\n"


# spec ------------------------------------------------------------------------


def cmd_spec(args) -> str:
    p = specanalysis.parse_mini(_read(args.file))
    if args.action == "analyze":
        s = specanalysis.analyze(p)
        if args.json:
            return _dump(specanalysis.state_to_json(p, s))
        return _state_text(p, s)
    cfg = BnbConfig(workers=args.workers)
    report = specanalysis.stable_assumption_sets(p, args.mode, cfg)
    if args.json:
        return _dump({
            "mode": args.mode,
            "assumptions": [a.label for a in p.assumptions],
            "final": [{"lower": b.lo.names(), "upper": b.hi.names()} for b in report.intervals],
            "stable": [
                {"assumptions": sigma.names(), "analysis": specanalysis.state_to_json(p, st)}
                for sigma, st in report.stable
            ],
        })
    lines = [f"mode: {args.mode}", f"declared assumptions: {len(p.assumptions)}"]
    lines.append(f"stable assumption sets: {len(report.stable)}")
    for sigma, st in report.stable:
        lines.append(f"  {_set_text(sigma.names())}")
        lines += ["    " + ln for ln in _state_text(p, st).splitlines()]
    return "\n".join(lines) + "\n"


def _state_text(p, s) -> str:
    out = []
    for b, row in zip(p.blocks, s):
        if row is None:
            out.append(f"{b.name}: unreachable")
        else:
            out.append(f"{b.name}: " + " ".join(f"{v}={signs.name(x)}" for v, x in zip(p.variables, row)))
    return "\n".join(out) + "\n"


# wiring ----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # bad flags are usage errors (exit 1); exit 2 is reserved for resource caps
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="aftbound", description="Bound fixed points of non-monotone lattice operators.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("asp", help="ground answer-set programs").add_subparsers(
        dest="asp_command", required=True, parser_class=_Parser
    )

    b = a.add_parser("bounds", help="well-founded bound, optionally refined by branch-and-bound")
    b.add_argument("file")
    b.add_argument("--bnb", action="store_true", help="run branch-and-bound on [bottom, top]")
    b.add_argument("--budget", type=_positive("--budget"), help="cap K on active intervals")
    b.add_argument("--outer-max", type=_positive("--outer-max"), help="cap T on outer iterations")
    b.add_argument("--ir-max", type=_positive("--ir-max"), help="cap on refinement steps per IR call")
    b.add_argument("--first", action="store_true", help="stop at the first fixed point found")
    b.add_argument("--workers", type=_positive("--workers"), default=1)
    b.add_argument("--json", action="store_true")
    b.set_defaults(run=cmd_asp_bounds)

    p = a.add_parser("preprocess", help="specialize a program to a bound")
    p.add_argument("file")
    p.add_argument("--bounds", required=True, help='JSON file {"lower": [...], "excluded": [...]}')
    p.add_argument("--emit", choices=["program", "assumptions"], default="program")
    p.add_argument("--mode", choices=[asp.SAFE, asp.SUBSTITUTE], default=asp.SAFE)
    p.set_defaults(run=cmd_asp_preprocess)

    o = a.add_parser("oracle", help="brute-force stable models")
    o.add_argument("file")
    o.add_argument("--cap", type=_positive("--cap"), default=DEFAULT_ORACLE_CAP)
    o.add_argument("--json", action="store_true")
    o.set_defaults(run=cmd_asp_oracle)

    d = sub.add_parser("demo", help="exact best-response refinement example")
    d.add_argument("--steps", type=int, default=2)
    d.add_argument("--json", action="store_true", help="JSON lines")
    d.set_defaults(run=cmd_demo)

    s = sub.add_parser("spec", help="speculative sign analysis over the mini IR")
    s.add_argument("action", choices=["analyze", "stable"])
    s.add_argument("file")
    s.add_argument("--mode", choices=[specanalysis.MAY, specanalysis.PROVED], default=specanalysis.MAY)
    s.add_argument("--workers", type=_positive("--workers"), default=1)
    s.add_argument("--json", action="store_true")
    s.set_defaults(run=cmd_spec)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = args.run(args)
    except AftError as exc:
        print(f"aftbound: error: {exc}", file=sys.stderr)
        return exc.exit_code
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
