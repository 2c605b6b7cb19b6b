"""Property drivers for the metatheory of the calculus.

Each property is checked case by case.  A case is a closed term (and, for
the typed properties, its compile-time type); the states examined are those
on the first-choice path and on a few seeded random paths from the term.
Outcomes are pass, unknown (a budget ran out) or fail; failures are shrunk
and reported with the label trace that leads to the offending state.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from ..essence import essence_expr
from ..parser import parse, parse_type
from ..pcfv import pcf_step, pcf_trace
from ..semantics import (
    Exhaustive,
    First,
    Random,
    evaluate,
    replay,
    run_path,
    step_all,
    step_c,
    step_p,
)
from ..syntax import (
    TRUE,
    Blame,
    Expr,
    Pair,
    Refine,
    Type,
    Wedge,
    alpha_eq,
    alpha_key,
    is_closed,
    is_value,
    subst,
    subterms,
)
from ..typecheck import RuntimeChecker, TypeCheckError, infer_compile
from .corpus import example_corpus
from .generate import GenConfig, case_rng, gen_pcf, gen_well_typed
from .oracle import derivations
from .shrink import shrink

PROPERTIES = (
    "pcf-determinism",
    "essence-sim",
    "essence-inv",
    "pair-sync",
    "preservation",
    "progress",
    "value-inversion",
    "intersection-inversion",
)

RANDOM_PATHS = 2
MAX_EXPLORE = 20_000


@dataclass(frozen=True)
class Case:
    name: str
    term: Expr
    type: Type | None = None


@dataclass(frozen=True)
class Outcome:
    status: str  # "pass" | "unknown" | "fail"
    depth: int = 0
    trace: tuple[str, ...] = ()
    detail: str = ""


PASS = Outcome("pass")


@dataclass
class PropertyReport:
    property: str
    cases: int = 0
    passed: int = 0
    unknown: int = 0
    failed: int = 0
    explored_depth: int = 0
    counterexample: dict | None = None
    unknown_cases: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_json(self) -> dict:
        out = {
            "property": self.property,
            "cases": self.cases,
            "passed": self.passed,
            "unknown": self.unknown,
            "failed": self.failed,
            "explored_depth": self.explored_depth,
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


# ---------------------------------------------------------------------------
# corpora


def _typed_goal(name: str) -> str:
    return {"value-inversion": "refinement", "intersection-inversion": "wedge-refinement"}.get(name, "any")


def generated_case(name: str, cfg: GenConfig, index: int) -> Case:
    rng = case_rng(cfg.seed, index)
    if name == "pcf-determinism":
        return Case(f"gen-{index}", gen_pcf(rng, depth=cfg.max_depth + 1, max_numeral=cfg.max_numeral))
    m, t = gen_well_typed(cfg, rng, goal=_typed_goal(name))
    return Case(f"gen-{index}", m, t)


def example_cases(name: str) -> list[Case]:
    out = []
    for ex in example_corpus():
        if name == "pcf-determinism":
            out.append(Case(ex.name, essence_expr(ex.term)))
        else:
            out.append(Case(ex.name, ex.term, ex.type))
    return out


def corpus(name: str, cfg: GenConfig, cases: int) -> list[Case]:
    return example_cases(name) + [generated_case(name, cfg, i) for i in range(cases)]


# ---------------------------------------------------------------------------
# states


def explored_states(m: Expr, fuel: int, seed: int = 0) -> tuple[list, int]:
    """Distinct states on the first-choice path and ``RANDOM_PATHS`` random
    paths, each with the labels leading to it, and the longest path."""
    states: dict = {}
    depth = 0
    strategies = [First()] + [Random(seed * 7919 + k) for k in range(RANDOM_PATHS)]
    for s in strategies:
        path = run_path(m, s, fuel)
        depth = max(depth, len(path))
        labels: tuple[str, ...] = ()
        if alpha_key(m) not in states:
            states[alpha_key(m)] = ((), m)
        for lab, c in path:
            labels = labels + (str(lab),)
            if isinstance(c, Blame):
                continue
            states.setdefault(alpha_key(c), (labels, c))
    return list(states.values()), depth


# ---------------------------------------------------------------------------
# individual properties


def _pcf_determinism(case: Case, fuel: int, seed: int) -> Outcome:
    trace = pcf_trace(case.term, min(fuel, 500))
    for i, s in enumerate(trace):
        results = {alpha_key(n): n for _, n in derivations(s)}
        ours = pcf_step(s)
        if ours is not None:
            results.setdefault(alpha_key(ours), ours)
        if len(results) > 1:
            return Outcome("fail", i, (), f"{s} has {len(results)} distinct successors")
        if (ours is None) != (not results):
            return Outcome("fail", i, (), f"evaluator and rule table disagree on {s}")
    return Outcome("pass", len(trace) - 1)


def _essence_sim(case, fuel, seed):
    states, depth = explored_states(case.term, fuel, seed)
    for labels, s in states:
        for lab, n in step_p(s):
            want = pcf_step(essence_expr(s))
            if want is None or not alpha_eq(want, essence_expr(n)):
                return Outcome("fail", depth, labels + (str(lab),),
                               f"essence of {s} does not take the matching PCFv step")
    return Outcome("pass", depth)


def _essence_inv(case, fuel, seed):
    states, depth = explored_states(case.term, fuel, seed)
    for labels, s in states:
        for lab, n in step_c(s):
            if isinstance(n, Blame):
                continue
            if not alpha_eq(essence_expr(s), essence_expr(n)):
                return Outcome("fail", depth, labels + (str(lab),), f"checking step changed the essence of {s}")
    return Outcome("pass", depth)


def _pair_sync(case, fuel, seed):
    states, depth = explored_states(case.term, fuel, seed)
    for labels, s in states:
        for p in subterms(s):
            if not isinstance(p, Pair) or not is_closed(p):
                continue
            if not alpha_eq(essence_expr(p.left), essence_expr(p.right)):
                return Outcome("fail", depth, labels, f"pair {p} has components of different essence")
            for _, a in step_p(p.left):
                for _, b in step_p(p.right):
                    if not alpha_eq(essence_expr(a), essence_expr(b)):
                        return Outcome("fail", depth, labels, f"pair {p} steps out of sync")
    return Outcome("pass", depth)


def _preservation(case, fuel, seed):
    states, depth = explored_states(case.term, fuel, seed)
    checker = RuntimeChecker(fuel, MAX_EXPLORE)
    unknown = None
    for labels, s in states:
        for lab, n in step_all(s):
            if isinstance(n, Blame):
                continue
            v = checker.check((), n, case.type)
            if v.no:
                return Outcome("fail", depth, labels + (str(lab),), f"successor lost its type: {v.error}")
            if v.unknown and unknown is None:
                unknown = Outcome("unknown", depth, labels + (str(lab),), v.reason or "")
    return unknown or Outcome("pass", depth)


def _progress(case, fuel, seed):
    states, depth = explored_states(case.term, fuel, seed)
    for labels, s in states:
        if not is_value(s) and not step_all(s):
            return Outcome("fail", depth, labels, f"stuck at {s}")
    return Outcome("pass", depth)


def _all_paths_true(pred: Expr, fuel: int) -> str:
    r = evaluate(pred, Exhaustive(MAX_EXPLORE), fuel)
    if r.blame or r.stuck or any(not alpha_eq(v, TRUE) for v in r.values):
        return "fail"
    if r.truncated or r.fuel_exhausted or not r.values:
        return "unknown"
    return "pass"


def satisfies(v: Expr, t: Type, fuel: int) -> tuple[str, str]:
    """Whether a value meets every predicate in ``t`` on all paths."""
    if isinstance(t, Refine):
        verdict = _all_paths_true(subst(t.pred, t.var, v), fuel)
        if verdict != "pass":
            return verdict, f"{v} against {t}"
        return satisfies(v, t.base, fuel)
    if isinstance(t, Wedge):
        if not isinstance(v, Pair):
            return "fail", f"value {v} of an intersection type is not a strong pair"
        left = satisfies(v.left, t.left, fuel)
        if left[0] != "pass":
            return left
        return satisfies(v.right, t.right, fuel)
    return "pass", ""


def _inversion(case, fuel, seed):
    r = evaluate(case.term, Exhaustive(MAX_EXPLORE), fuel)
    depth = r.steps_used
    pending = None
    for v in r.values:
        verdict, why = satisfies(v, case.type, fuel)
        if verdict == "fail":
            return Outcome("fail", depth, (), why)
        if verdict == "unknown" and pending is None:
            pending = Outcome("unknown", depth, (), why)
    if pending:
        return pending
    if not r.values and (r.truncated or r.fuel_exhausted):
        return Outcome("unknown", depth, (), "no value reached within budget")
    return Outcome("pass", depth)


CHECKS = {
    "pcf-determinism": _pcf_determinism,
    "essence-sim": _essence_sim,
    "essence-inv": _essence_inv,
    "pair-sync": _pair_sync,
    "preservation": _preservation,
    "progress": _progress,
    "value-inversion": _inversion,
    "intersection-inversion": _inversion,
}


def check_case(name: str, case: Case, fuel: int, seed: int = 0) -> Outcome:
    return CHECKS[name](case, fuel, seed)


# ---------------------------------------------------------------------------
# driver


def _still_fails(name, case, fuel, seed):
    def test(m):
        if case.type is not None:
            try:
                if not alpha_eq(infer_compile((), m), case.type):
                    return False
            except TypeCheckError:
                return False
        elif not is_closed(m):
            return False
        return check_case(name, Case(case.name, m, case.type), fuel, seed).status == "fail"

    return test


def counterexample(name: str, case: Case, fuel: int, seed: int) -> dict:
    small = shrink(case.term, _still_fails(name, case, fuel, seed))
    out = check_case(name, Case(case.name, small, case.type), fuel, seed)
    return {
        "case": case.name,
        "term": str(small),
        "type": None if case.type is None else str(case.type),
        "trace": list(out.trace),
        "detail": out.detail,
    }


def replay_counterexample(name: str, cex: dict, fuel: int, seed: int = 0) -> bool:
    """Re-run a reported counterexample: follow its trace and re-check."""
    m = parse(cex["term"])
    t = None if cex["type"] is None else parse_type(cex["type"])
    path = replay(m, cex["trace"])
    assert path is not None
    return check_case(name, Case(cex["case"], m, t), fuel, seed).status == "fail"


def _run_generated(args) -> tuple[Case, Outcome]:
    name, cfg, index, fuel = args
    case = generated_case(name, cfg, index)
    return case, check_case(name, case, fuel, cfg.seed)


def _tally(name: str, results, fuel: int, seed: int) -> PropertyReport:
    report = PropertyReport(name)
    for case, out in results:
        report.cases += 1
        report.explored_depth = max(report.explored_depth, out.depth)
        if out.status == "pass":
            report.passed += 1
        elif out.status == "unknown":
            report.unknown += 1
            report.unknown_cases.append(case.name)
        else:
            report.failed += 1
            if report.counterexample is None:
                report.counterexample = counterexample(name, case, fuel, seed)
    return report


def check_property(
    name: str,
    cfg: GenConfig = GenConfig(),
    cases: int = 500,
    fuel: int = 2_000,
    jobs: int = 1,
) -> PropertyReport:
    """Run property ``name`` on the example corpus plus ``cases`` generated cases."""
    if name not in CHECKS:
        raise ValueError(f"unknown property {name!r}; expected one of {', '.join(PROPERTIES)}")
    results = [(c, check_case(name, c, fuel, cfg.seed)) for c in example_cases(name)]
    work = [(name, cfg, i, fuel) for i in range(cases)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results.extend(pool.map(_run_generated, work, chunksize=8))
    else:
        results.extend(map(_run_generated, work))
    return _tally(name, results, fuel, cfg.seed)


def check_cases(name: str, cases: list[Case], fuel: int = 2_000, seed: int = 0) -> PropertyReport:
    """Run a property on an explicit list of cases."""
    return _tally(name, [(c, check_case(name, c, fuel, seed)) for c in cases], fuel, seed)
