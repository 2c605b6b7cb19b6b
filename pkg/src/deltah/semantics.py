"""Small-step semantics of the contract calculus.

Two relations are combined: essential steps (``step_p``), which mirror
PCFv computation and synchronize the two halves of a strong pair, and
checking steps (``step_c``), which run casts and may end in blame.  Their
union is nondeterministic; ``evaluate`` explores it under a strategy.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Union

from .syntax import (
    BLAME,
    FALSE,
    TRUE,
    Abs,
    Active,
    App,
    Arrow,
    Blame,
    Bool,
    Cast,
    Command,
    Delayed,
    Expr,
    FalseLit,
    Fix,
    If,
    IsZero,
    Nat,
    Pair,
    Pred,
    Proj,
    Refine,
    Succ,
    TrueLit,
    Waiting,
    Wedge,
    Zero,
    alpha_key,
    decompose,
    is_numeral,
    is_value,
    plug,
    subst,
)


@dataclass(frozen=True)
class StepLabel:
    """The axiom that fired, the contextual rules around it (innermost
    first) and whether the step counts as essential (``p``) or checking
    (``c``).  For synchronized pair steps ``parts`` holds both halves."""

    rule: str
    kind: str
    via: tuple[str, ...] = ()
    parts: tuple["StepLabel", ...] = ()

    def wrap(self, ctx_rule: str, kind: str | None = None) -> "StepLabel":
        return StepLabel(self.rule, kind or self.kind, self.via + (ctx_rule,), self.parts)

    def __str__(self) -> str:
        head = self.rule
        if self.parts:
            head += "(" + ",".join(str(p) for p in self.parts) + ")"
        return "/".join((head,) + self.via)


Step = tuple[StepLabel, Command]


# ---------------------------------------------------------------------------
# essential evaluation


def reduce_p(m: Expr) -> list[Step]:
    match m:
        case Pred(Succ(n)) if is_numeral(n):
            return [(StepLabel("RP-Pred", "p"), n)]
        case IsZero(Zero()):
            return [(StepLabel("RP-IsZero-T", "p"), TRUE)]
        case IsZero(Succ(n)) if is_numeral(n):
            return [(StepLabel("RP-IsZero-F", "p"), FALSE)]
        case If(TrueLit(), then, _):
            return [(StepLabel("RP-If-T", "p"), then)]
        case If(FalseLit(), _, else_):
            return [(StepLabel("RP-If-F", "p"), else_)]
        case App(Abs(x, _, body), v) if is_value(v):
            return [(StepLabel("RP-Beta", "p"), subst(body, x, v))]
        case Fix(f, _, body):
            return [(StepLabel("RP-Fix", "p"), subst(body, f, m))]
    # pred(O) deliberately has no rule
    return []


def _memo(attr):
    """Cache a step function on the node: states share most subterms."""

    def deco(fn):
        def wrapper(m):
            d = m.__dict__
            hit = d.get(attr)
            if hit is None:
                hit = tuple(fn(m))
                d[attr] = hit
            return list(hit)

        wrapper.__name__ = fn.__name__
        wrapper.__doc__ = fn.__doc__
        return wrapper

    return deco


@_memo("_step_p")
def step_p(m: Expr) -> list[Step]:
    out = reduce_p(m)
    split = decompose(m)
    if split is not None:
        frame, inner = split
        out.extend((lab.wrap("EP-Ctx"), plug(frame, n)) for lab, n in step_p(inner))
    elif isinstance(m, Pair):
        lefts, rights = step_p(m.left), step_p(m.right)
        for l_lab, l2 in lefts:
            for r_lab, r2 in rights:
                out.append((StepLabel("EP-PairS", "p", (), (l_lab, r_lab)), Pair(l2, r2)))
    return out


# ---------------------------------------------------------------------------
# dynamic checking


def reduce_c(m: Expr) -> list[Step]:
    match m:
        case Proj(i, Pair(v1, v2)) if is_value(v1) and is_value(v2):
            return [(StepLabel("RC-Proj", "c"), v1 if i == 1 else v2)]
        case Cast(v, source, target) if is_value(v):
            return _reduce_cast(v, source, target)
        case App(Delayed(v1, source, Arrow(t1, t2)), v2) if is_value(v2):
            match source:
                case Arrow(s1, s2):
                    return [(StepLabel("RC-Arrow", "c"), Cast(App(v1, Cast(v2, t1, s1)), s2, t2))]
                case Wedge(s1, s2):
                    target = Arrow(t1, t2)
                    return [
                        (StepLabel("RC-WedgeL", "c"), App(Cast(Proj(1, v1), s1, target), v2)),
                        (StepLabel("RC-WedgeR", "c"), App(Cast(Proj(2, v1), s2, target), v2)),
                    ]
        case Waiting(v, Refine(x, _, pred) as target) if is_value(v):
            return [(StepLabel("RC-Activate", "c"), Active(subst(pred, x, v), v, target))]
        case Active(TrueLit(), v, _):
            return [(StepLabel("RC-Succeed", "c"), v)]
        case Active(FalseLit(), _, _):
            return [(StepLabel("RC-Fail", "c"), BLAME)]
    return []


def _reduce_cast(v: Expr, source, target) -> list[Step]:
    # side conditions of the cast rules make this dispatch deterministic
    if isinstance(source, Refine):
        return [(StepLabel("RC-Forget", "c"), Cast(v, source.base, target))]
    if isinstance(target, Refine):
        inner = Cast(v, source, target.base)
        return [(StepLabel("RC-Waiting", "c"), Waiting(inner, target))]
    if isinstance(target, Wedge):
        pair = Pair(Cast(v, source, target.left), Cast(v, source, target.right))
        return [(StepLabel("RC-WedgeI", "c"), pair)]
    if isinstance(target, Arrow):
        return [(StepLabel("RC-Delay", "c"), Delayed(v, source, target))]
    if isinstance(source, Wedge) and isinstance(target, Nat):
        return [(StepLabel("RC-WedgeN", "c"), Cast(Proj(1, v), source.left, target))]
    if isinstance(source, Wedge) and isinstance(target, Bool):
        return [(StepLabel("RC-WedgeB", "c"), Cast(Proj(1, v), source.left, target))]
    if isinstance(source, Nat) and isinstance(target, Nat):
        return [(StepLabel("RC-Nat", "c"), v)]
    if isinstance(source, Bool) and isinstance(target, Bool):
        return [(StepLabel("RC-Bool", "c"), v)]
    return []


@_memo("_step_c")
def step_c(m: Expr) -> list[Step]:
    out = list(reduce_c(m))
    split = decompose(m)
    if split is not None:
        frame, inner = split
        for lab, c in step_c(inner):
            if isinstance(c, Blame):
                out.append((lab.wrap("EB-Ctx"), BLAME))
            else:
                out.append((lab.wrap("EC-Ctx"), plug(frame, c)))
    elif isinstance(m, Active):
        for lab, n in step_p(m.test):
            out.append((lab.wrap("EC-ActiveP", "c"), Active(n, m.subject, m.target)))
        for lab, c in step_c(m.test):
            if isinstance(c, Blame):
                out.append((lab.wrap("EB-Active"), BLAME))
            else:
                out.append((lab.wrap("EC-ActiveC"), Active(c, m.subject, m.target)))
    elif isinstance(m, Pair):
        for lab, c in step_c(m.left):
            if isinstance(c, Blame):
                out.append((lab.wrap("EB-PairL"), BLAME))
            else:
                out.append((lab.wrap("EC-PairL"), Pair(c, m.right)))
        for lab, c in step_c(m.right):
            if isinstance(c, Blame):
                out.append((lab.wrap("EB-PairR"), BLAME))
            else:
                out.append((lab.wrap("EC-PairR"), Pair(m.left, c)))
    return out


def step_all(c: Command) -> list[Step]:
    """All one-step successors, essential steps first."""
    if isinstance(c, Blame):
        return []
    return step_p(c) + step_c(c)


# ---------------------------------------------------------------------------
# strategies and evaluation


@dataclass(frozen=True)
class First:
    """Always take the first successor (essential before checking, left
    before right)."""


@dataclass(frozen=True)
class Exhaustive:
    max_states: int = 100_000


@dataclass(frozen=True)
class Random:
    seed: int = 0


Strategy = Union[First, Exhaustive, Random]

DEFAULT_FUEL = 10_000


@dataclass
class EvalResult:
    values: list = field(default_factory=list)
    blame: bool = False
    stuck: list = field(default_factory=list)
    fuel_exhausted: list = field(default_factory=list)
    steps_used: int = 0
    states_explored: int = 0
    truncated: bool = False  # the state budget ran out before exploration finished

    @property
    def budget_exhausted(self) -> bool:
        return self.truncated or bool(self.fuel_exhausted)


class _UniqueList:
    def __init__(self, out: list):
        self.out = out
        self.keys: set = set()

    def add(self, e):
        k = alpha_key(e)
        if k not in self.keys:
            self.keys.add(k)
            self.out.append(e)


def evaluate(m: Command, strategy: Strategy = First(), fuel: int = DEFAULT_FUEL) -> EvalResult:
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    if isinstance(strategy, Exhaustive):
        return _explore(m, strategy.max_states, fuel)
    result = EvalResult()
    path = run_path(m, strategy, fuel)
    final = path[-1][1] if path else m
    result.steps_used = len(path)
    result.states_explored = len(path) + 1
    _record(result, final, fuel_left=len(path) < fuel)
    return result


def _record(result: EvalResult, c: Command, fuel_left: bool) -> None:
    if isinstance(c, Blame):
        result.blame = True
    elif is_value(c):
        _add_unique(result.values, c)
    elif not step_all(c):
        _add_unique(result.stuck, c)
    else:
        _add_unique(result.fuel_exhausted, c)


def _add_unique(xs: list, e) -> None:
    k = alpha_key(e)
    if all(alpha_key(x) != k for x in xs):
        xs.append(e)


def _explore(m: Command, max_states: int, fuel: int) -> EvalResult:
    result = EvalResult()
    values, stuck, frontier = _UniqueList(result.values), _UniqueList(result.stuck), _UniqueList(result.fuel_exhausted)
    seen = {_key(m)}
    queue = deque([(m, 0)])
    while queue:
        c, d = queue.popleft()
        result.states_explored += 1
        result.steps_used = max(result.steps_used, d)
        if isinstance(c, Blame):
            result.blame = True
            continue
        if is_value(c):
            values.add(c)
            continue
        succs = step_all(c)
        if not succs:
            stuck.add(c)
            continue
        if d >= fuel:
            frontier.add(c)
            continue
        for _, n in succs:
            k = _key(n)
            if k in seen:
                continue
            if len(seen) >= max_states:
                result.truncated = True
                frontier.add(c)
                break
            seen.add(k)
            queue.append((n, d + 1))
    return result


def _key(c: Command):
    return "blame" if isinstance(c, Blame) else alpha_key(c)


def run_path(m: Command, strategy: Strategy = First(), fuel: int = DEFAULT_FUEL) -> list[Step]:
    """Follow one path; Exhaustive is not a path strategy."""
    if isinstance(strategy, Exhaustive):
        raise ValueError("trace needs a First or Random strategy")
    rng = random.Random(strategy.seed) if isinstance(strategy, Random) else None
    path: list[Step] = []
    c = m
    while len(path) < fuel:
        succs = step_all(c)
        if not succs:
            break
        step = succs[0] if rng is None else rng.choice(succs)
        path.append(step)
        c = step[1]
    return path


trace = run_path


def replay(m: Command, labels: Iterable[str]) -> list[Step]:
    """Re-run a path recorded as label strings."""
    path: list[Step] = []
    c = m
    for wanted in labels:
        for lab, n in step_all(c):
            if str(lab) == wanted:
                path.append((lab, n))
                c = n
                break
        else:
            raise ValueError(f"no step labelled {wanted!r} from {c}")
    return path


def check_labels(path: list[Step]) -> list[str]:
    """Labels of the path whose axiom is a checking reduction."""
    return [lab.rule for lab, _ in path if lab.rule.startswith("RC-")]
