"""Command-line entry point: ``deltah check|run|trace|essence|fuzz``."""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .essence import essence_expr
from .parser import Defs, ParseError, Program, parse_program, parse_type
from .pcfv import embed, pcf_eval, pcf_step_rule
from .prelude import load_defs
from .printer import Names, show
from .semantics import (
    DEFAULT_FUEL,
    EvalResult,
    Exhaustive,
    First,
    Random,
    evaluate,
    run_path,
)
from .syntax import Blame, is_value
from .typecheck import TriVerdict, TypeCheckError, check_runtime, guess, infer_compile

EXIT_OK = 0
EXIT_BLAME = 1
EXIT_TYPE = 2
EXIT_STUCK = 3
EXIT_BUDGET = 4
EXIT_USAGE = 64
EXIT_NOINPUT = 66

# JSON emitted by ``run --json``; terms are printed in the concrete syntax
RUN_SCHEMA = {
    "type": "object",
    "required": ["values", "blame", "stuck", "fuel_exhausted", "steps_used", "states_explored", "exit_code"],
    "properties": {
        "values": {"type": "array", "items": {"type": "string"}},
        "blame": {"type": "boolean"},
        "stuck": {"type": "array", "items": {"type": "string"}},
        "fuel_exhausted": {"type": "array", "items": {"type": "string"}},
        "steps_used": {"type": "integer", "minimum": 0},
        "states_explored": {"type": "integer", "minimum": 0},
        "truncated": {"type": "boolean"},
        "exit_code": {"type": "integer", "enum": [0, 1, 3, 4]},
        "trace": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["step", "rule", "term"],
                "properties": {
                    "step": {"type": "integer", "minimum": 1},
                    "rule": {"type": "string"},
                    "term": {"type": "string"},
                },
            },
        },
    },
    "additionalProperties": False,
}


class UsageError(Exception):
    pass


def exit_code(r: EvalResult) -> int:
    if r.stuck:
        return EXIT_STUCK
    if r.blame:
        return EXIT_BLAME
    if r.fuel_exhausted or r.truncated:
        return EXIT_BUDGET
    return EXIT_OK


def verdict_code(v: TriVerdict) -> int:
    return {"yes": EXIT_OK, "no": EXIT_TYPE, "unknown": EXIT_BUDGET}[v.status]


# ---------------------------------------------------------------------------
# argument parsing


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("file", nargs="?", help="source file (.dh); omit when using -e")
    p.add_argument("-e", "--expr", help="program text given inline")
    p.add_argument("--no-prelude", action="store_true", help="do not load the arithmetic prelude")
    p.add_argument("--numerals", action="store_true", help="print numerals as decimals")
    p.add_argument("--expand", action="store_true", help="do not fold definitions back into names")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="deltah", description="Manifest contracts with refinement intersection types.")
    ap.add_argument("--version", action="version", version=f"deltah {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="type check a program")
    _common(p)
    p.add_argument("--runtime", action="store_true", help="use the run-time rules (three-valued)")
    p.add_argument("--type", dest="against", help="goal type for --runtime (default: the inferred type)")
    p.add_argument("--fuel", type=int, default=1_000)
    p.add_argument("--json", action="store_true")

    for name, help_ in (("run", "evaluate a program"), ("trace", "print one evaluation path")):
        p = sub.add_parser(name, help=help_)
        _common(p)
        p.add_argument("--lang", choices=("deltah", "pcfv"), default="deltah")
        p.add_argument("--strategy", choices=("first", "all", "random"), default="first" if name == "trace" else "all")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
        p.add_argument("--max-states", type=int, default=100_000)
        p.add_argument("--json", action="store_true")
        if name == "run":
            p.add_argument("--trace", action="store_true", help="also print the path (first/random only)")

    p = sub.add_parser("essence", help="print the essence of a program")
    _common(p)

    p = sub.add_parser("fuzz", help="check a metatheory property on generated programs")
    p.add_argument("--prop", default="all", help="property name or 'all'")
    p.add_argument("--cases", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fuel", type=int, default=2_000)
    p.add_argument("--max-depth", type=int, default=4)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", action="store_true")
    return ap


# ---------------------------------------------------------------------------
# helpers


def _source(args) -> tuple[str, str]:
    if args.expr is not None:
        if args.file is not None:
            raise UsageError("give either a file or -e, not both")
        return "<expr>", args.expr
    if args.file is None:
        raise UsageError("missing input file")
    with open(args.file, encoding="utf-8") as fh:
        return args.file, fh.read()


def _load(args, allow_runtime=False) -> tuple[Program, Defs, Names | None]:
    origin, text = _source(args)
    defs = load_defs(not args.no_prelude)
    try:
        prog = parse_program(text, defs, allow_runtime=allow_runtime)
    except ParseError as err:
        raise _Reported(f"{origin}:{err.line}:{err.col}: {err.message}", EXIT_TYPE) from err
    if prog.main is None:
        raise _Reported(f"{origin}: no term to process", EXIT_TYPE)
    all_defs = defs.merged(prog.defs)
    names = None if args.expand else Names.from_defs(all_defs)
    return prog, all_defs, names


class _Reported(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _show(t, args, names) -> str:
    return show(t, numerals=args.numerals, names=names)


def _result_json(r: EvalResult, code: int, fmt) -> dict:
    return {
        "values": [fmt(v) for v in r.values],
        "blame": r.blame,
        "stuck": [fmt(s) for s in r.stuck],
        "fuel_exhausted": [fmt(s) for s in r.fuel_exhausted],
        "steps_used": r.steps_used,
        "states_explored": r.states_explored,
        "truncated": r.truncated,
        "exit_code": code,
    }


def _strategy(args):
    if args.strategy == "first":
        return First()
    if args.strategy == "random":
        return Random(args.seed)
    return Exhaustive(args.max_states)


# ---------------------------------------------------------------------------
# subcommands


def cmd_check(args, out) -> int:
    prog, defs, names = _load(args, allow_runtime=True)
    m = prog.main
    if isinstance(m, Blame):
        raise _Reported("blame is a command, not a typeable expression", EXIT_TYPE)
    if not args.runtime:
        try:
            t = infer_compile((), m)
        except TypeCheckError as err:
            if args.json:
                print(json.dumps({"ok": False, "error": err.to_json()}), file=out)
            else:
                print(f"type error [{err.rule}] {err.message}", file=sys.stderr)
            return EXIT_TYPE
        if args.json:
            print(json.dumps({"ok": True, "type": _show(t, args, names)}), file=out)
        else:
            print(_show(t, args, names), file=out)
        return EXIT_OK
    if args.against is not None:
        try:
            goal = parse_type(args.against, defs)
        except ParseError as err:
            raise _Reported(f"--type: {err}", EXIT_USAGE) from err
    else:
        try:
            goal = infer_compile((), m)
        except TypeCheckError:
            goal = guess((), m)
        if goal is None:
            raise _Reported("cannot determine a goal type; pass --type", EXIT_USAGE)
    v = check_runtime((), m, goal, fuel=args.fuel)
    if args.json:
        print(json.dumps({
            "verdict": v.status,
            "type": _show(goal, args, names),
            "error": v.error.to_json() if v.error else None,
            "reason": v.reason,
        }), file=out)
    elif v.yes:
        print(f"yes: {_show(goal, args, names)}", file=out)
    elif v.no:
        print(f"no [{v.error.rule}] {v.error.message}", file=out)
    else:
        print(f"unknown ({v.reason})", file=out)
    return verdict_code(v)


def cmd_run(args, out, force_trace=False) -> int:
    prog, _, names = _load(args)
    m = prog.main
    fmt = lambda t: _show(t, args, names)  # noqa: E731
    want_trace = force_trace or getattr(args, "trace", False)
    if args.fuel < 0:
        raise _Reported("--fuel must be non-negative", EXIT_USAGE)
    if want_trace and args.strategy == "all":
        if force_trace:
            raise _Reported("trace needs --strategy first or random", EXIT_USAGE)
        raise _Reported("--trace needs --strategy first or random", EXIT_USAGE)
    if args.lang == "pcfv":
        return _run_pcf(args, m, fmt, want_trace, force_trace, out)

    strategy = _strategy(args)
    steps = []
    if want_trace:
        path = run_path(m, strategy, args.fuel)
        steps = [{"step": k, "rule": str(lab), "term": fmt(c)} for k, (lab, c) in enumerate(path, 1)]
    r = evaluate(m, strategy, args.fuel)
    code = exit_code(r)
    if args.json:
        payload = _result_json(r, code, fmt)
        if want_trace:
            payload["trace"] = steps
        print(json.dumps(payload), file=out)
        return code
    for s in steps:
        print(f"step {s['step']} [{s['rule']}] {s['term']}", file=out)
    if force_trace:
        return code
    for v in r.values:
        print(fmt(v), file=out)
    if r.blame:
        print("blame", file=out)
    for s in r.stuck:
        print(f"stuck: {fmt(s)}", file=out)
    if r.fuel_exhausted or r.truncated:
        print(f"budget exhausted after {r.steps_used} steps, {r.states_explored} states", file=out)
    return code


def _run_pcf(args, m, fmt, want_trace, trace_only, out) -> int:
    try:
        embed(m)
    except ValueError as err:
        raise _Reported(f"not a PCFv program: {err}", EXIT_TYPE) from err
    steps = []
    if want_trace:
        c = m
        for k in range(1, args.fuel + 1):
            r = pcf_step_rule(c)
            if r is None:
                break
            c = r[1]
            steps.append({"step": k, "rule": r[0], "term": fmt(c)})
    res = pcf_eval(m, args.fuel)
    code = {"value": EXIT_OK, "stuck": EXIT_STUCK, "fuel_exhausted": EXIT_BUDGET}[res.status]
    if args.json:
        payload = {
            "values": [fmt(res.term)] if res.status == "value" else [],
            "blame": False,
            "stuck": [fmt(res.term)] if res.status == "stuck" else [],
            "fuel_exhausted": [fmt(res.term)] if res.status == "fuel_exhausted" else [],
            "steps_used": res.steps,
            "states_explored": res.steps + 1,
            "truncated": False,
            "exit_code": code,
        }
        if want_trace:
            payload["trace"] = steps
        print(json.dumps(payload), file=out)
        return code
    for s in steps:
        print(f"step {s['step']} [{s['rule']}] {s['term']}", file=out)
    if trace_only:
        return code
    if res.status == "value":
        print(fmt(res.term), file=out)
    elif res.status == "stuck":
        print(f"stuck: {fmt(res.term)}", file=out)
    else:
        print(f"budget exhausted after {res.steps} steps", file=out)
    return code


def cmd_essence(args, out) -> int:
    prog, _, names = _load(args, allow_runtime=True)
    if isinstance(prog.main, Blame):
        print("blame", file=out)
    else:
        print(_show(essence_expr(prog.main), args, names), file=out)
    return EXIT_OK


def cmd_fuzz(args, out) -> int:
    from .harness.generate import GenConfig
    from .harness.properties import PROPERTIES, check_property

    props = PROPERTIES if args.prop == "all" else (args.prop,)
    if any(p not in PROPERTIES for p in props):
        raise _Reported(f"unknown property {args.prop!r}; expected one of: all, {', '.join(PROPERTIES)}", EXIT_USAGE)
    if args.cases < 0 or args.fuel < 0 or args.jobs < 1:
        raise _Reported("--cases and --fuel must be non-negative and --jobs positive", EXIT_USAGE)
    try:
        cfg = GenConfig(seed=args.seed, max_depth=args.max_depth)
    except ValueError as err:
        raise _Reported(str(err), EXIT_USAGE) from err
    code = EXIT_OK
    for name in props:
        rep = check_property(name, cfg, args.cases, args.fuel, args.jobs)
        if args.json:
            print(rep.dumps(), file=out)
        else:
            status = "ok" if rep.ok else "FAILED"
            print(
                f"{name}: {status} cases={rep.cases} passed={rep.passed} "
                f"unknown={rep.unknown} failed={rep.failed} depth={rep.explored_depth}",
                file=out,
            )
            if rep.counterexample:
                cex = rep.counterexample
                print(f"  counterexample: {cex['term']}", file=out)
                print(f"  type: {cex['type']}", file=out)
                print(f"  trace: {' '.join(cex['trace'])}", file=out)
                print(f"  {cex['detail']}", file=out)
        if rep.failed:
            code = EXIT_BLAME
        elif rep.unknown and code == EXIT_OK:
            code = EXIT_BUDGET
    return code


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage and 0 for --help/--version
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        match args.command:
            case "check":
                return cmd_check(args, out)
            case "run":
                return cmd_run(args, out)
            case "trace":
                return cmd_run(args, out, force_trace=True)
            case "essence":
                return cmd_essence(args, out)
            case "fuzz":
                return cmd_fuzz(args, out)
    except UsageError as err:
        print(f"deltah: {err}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as err:
        print(f"deltah: {err.filename}: no such file", file=sys.stderr)
        return EXIT_NOINPUT
    except _Reported as err:
        print(f"deltah: {err}", file=sys.stderr)
        return err.code
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
