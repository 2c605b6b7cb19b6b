"""Type system: well-formed contexts and types, compile-time inference, and
a fuel-bounded checker for the run-time rules.

Compile-time typing is syntax directed and decidable, so ``infer_compile``
returns the unique type or raises ``TypeCheckError``.  The run-time rules
add premises of the form ``N ⟶* M``; ``check_runtime`` searches for them
under a step budget and answers yes, no, or unknown.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .essence import essence_expr, essence_type
from .syntax import (
    BOOL,
    NAT,
    NONZERO,
    TRUE,
    Abs,
    Active,
    App,
    Arrow,
    Blame,
    Bool,
    Cast,
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
    Type,
    Var,
    Waiting,
    Wedge,
    Zero,
    alpha_eq,
    alpha_key,
    free_vars,
    fresh,
    is_closed,
    is_interface,
    is_numeral,
    is_recursion_body,
    is_value,
    rename,
    subst,
)

Context = tuple  # tuple[tuple[str, Type], ...], innermost binding last


class TypeCheckError(Exception):
    """A rejected judgment.  ``rule`` names the rule whose premise failed."""

    def __init__(self, kind: str, rule: str, message: str, location=None):
        super().__init__(f"{rule}: {message}")
        self.kind = kind
        self.rule = rule
        self.message = message
        self.location = location

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "rule": self.rule,
            "message": self.message,
            "location": None if self.location is None else str(self.location),
        }


@dataclass(frozen=True)
class TriVerdict:
    status: str  # "yes" | "no" | "unknown"
    error: TypeCheckError | None = None
    reason: str | None = None  # "fuel" | "nondeterministic-premise" when unknown

    @property
    def yes(self) -> bool:
        return self.status == "yes"

    @property
    def no(self) -> bool:
        return self.status == "no"

    @property
    def unknown(self) -> bool:
        return self.status == "unknown"

    def __str__(self) -> str:
        if self.status == "no":
            return f"no ({self.error})"
        if self.status == "unknown":
            return f"unknown ({self.reason})"
        return "yes"


YES = TriVerdict("yes")


def _no(kind, rule, message, location=None) -> TriVerdict:
    return TriVerdict("no", TypeCheckError(kind, rule, message, location))


def _all(verdicts: Iterable) -> TriVerdict:
    """Conjunction; arguments may be thunks so later premises are skipped
    after a definite failure."""
    pending = None
    for v in verdicts:
        if callable(v):
            v = v()
        if v.no:
            return v
        if v.unknown and pending is None:
            pending = v
    return pending or YES


# ---------------------------------------------------------------------------
# well-formedness

_WF_CACHE: dict = {}


def wf_type(t: Type) -> None:
    """Raise ``TypeCheckError`` unless ``t`` is well formed."""
    key = alpha_key(t)
    hit = _WF_CACHE.get(key)
    if hit is True:
        return
    if hit is not None:
        raise hit
    try:
        _wf_type(t)
    except TypeCheckError as err:
        _WF_CACHE[key] = err
        raise
    _WF_CACHE[key] = True


def _wf_type(t: Type) -> None:
    match t:
        case Nat() | Bool():
            return
        case Arrow(dom, cod):
            wf_type(dom)
            wf_type(cod)
        case Wedge(left, right):
            wf_type(left)
            wf_type(right)
            if essence_type(left) != essence_type(right):
                raise TypeCheckError(
                    "essence-mismatch", "W-Wedge",
                    f"components of an intersection differ in essence: {left} vs {right}", t,
                )
        case Refine(x, base, pred):
            wf_type(base)
            try:
                got = infer_compile(((x, base),), pred)
            except TypeCheckError as err:
                raise TypeCheckError(
                    "ill-formed-type", "W-Refine", f"predicate of {t} is ill typed: {err}", t
                ) from err
            if not isinstance(got, Bool):
                raise TypeCheckError(
                    "ill-formed-type", "W-Refine", f"predicate of {t} has type {got}, not bool", t
                )
        case _:
            raise TypeCheckError("ill-formed-type", "W-Nat", f"not a type: {t!r}", t)


def is_wf_type(t: Type) -> bool:
    try:
        wf_type(t)
    except TypeCheckError:
        return False
    return True


def wf_ctx(ctx: Sequence) -> None:
    seen = set()
    for x, t in ctx:
        if x in seen:
            raise TypeCheckError("duplicate-binding", "V-Push", f"variable {x} bound twice", Var(x))
        wf_type(t)
        seen.add(x)


def _lookup(ctx, x):
    for y, t in reversed(ctx):
        if y == x:
            return t
    return None


def _push(ctx, x, t, body):
    """Extend ``ctx`` with ``x:t``; a binder that clashes with the context is
    renamed first (terms are identified up to alpha-conversion)."""
    names = {y for y, _ in ctx}
    if x in names:
        x2 = fresh(x, names | free_vars(body))
        body = rename(body, x, x2)
        x = x2
    return ctx + ((x, t),), body


# ---------------------------------------------------------------------------
# compile-time rules


def infer_compile(ctx: Sequence, m: Expr) -> Type:
    """The type of ``m`` under the compile-time rules, or raise."""
    return _infer(tuple(ctx), m)


def _infer(ctx, m) -> Type:
    match m:
        case Zero():
            return NAT
        case Succ(a):
            # iterate over numerals instead of recursing
            while isinstance(a, Succ):
                a = a.arg
            if not isinstance(a, Zero):
                _expect(ctx, a, NAT, "T-Succ")
            return NAT
        case Pred(a):
            got = _infer(ctx, a)
            if not alpha_eq(got, NONZERO):
                raise TypeCheckError(
                    "pred-needs-nonzero", "T-Pred",
                    f"argument of pred has type {got}, expected {NONZERO}", m,
                )
            return NAT
        case IsZero(a):
            _expect(ctx, a, NAT, "T-IsZero")
            return BOOL
        case TrueLit() | FalseLit():
            return BOOL
        case If(c, t, e):
            _expect(ctx, c, BOOL, "T-If")
            tt = _infer(ctx, t)
            _expect(ctx, e, tt, "T-If")
            return tt
        case Var(x):
            t = _lookup(ctx, x)
            if t is None:
                raise TypeCheckError("unbound-var", "T-Var", f"unbound variable {x}", m)
            return t
        case Abs(x, ann, body):
            wf_type(ann)
            ctx2, body = _push(ctx, x, ann, body)
            return Arrow(ann, _infer(ctx2, body))
        case App(f, a):
            ft = _infer(ctx, f)
            if not isinstance(ft, Arrow):
                raise TypeCheckError("mismatch", "T-App", f"applying a term of type {ft}", m)
            _expect(ctx, a, ft.dom, "T-App")
            return ft.cod
        case Pair(left, right):
            lt = _infer(ctx, left)
            rt = _infer(ctx, right)
            if not alpha_eq(essence_expr(left), essence_expr(right)):
                raise TypeCheckError(
                    "essence-mismatch", "T-Pair",
                    f"pair components differ in essence: {essence_expr(left)} vs {essence_expr(right)}", m,
                )
            if essence_type(lt) != essence_type(rt):
                raise TypeCheckError(
                    "essence-mismatch", "T-Pair",
                    f"pair component types differ in essence: {lt} vs {rt}", m,
                )
            return Wedge(lt, rt)
        case Proj(i, a):
            rule = "T-Fst" if i == 1 else "T-Snd"
            at = _infer(ctx, a)
            if not isinstance(at, Wedge):
                raise TypeCheckError("mismatch", rule, f"projection from a term of type {at}", m)
            return at.left if i == 1 else at.right
        case Fix(f, ann, body):
            if not is_interface(ann):
                raise TypeCheckError("not-interface", "T-Fix", f"{ann} is not an interface type", m)
            if not is_recursion_body(body):
                raise TypeCheckError(
                    "not-recursion-body", "T-Fix", "body of mu must be an abstraction or a pair of them", m
                )
            wf_type(ann)
            ctx2, body = _push(ctx, f, ann, body)
            _expect(ctx2, body, ann, "T-Fix")
            return ann
        case Cast(a, source, target):
            wf_type(target)
            if essence_type(source) != essence_type(target):
                raise TypeCheckError(
                    "essence-mismatch", "T-Cast",
                    f"cast between types of different essence: {source} and {target}", m,
                )
            _expect(ctx, a, source, "T-Cast")
            return target
        case Delayed():
            raise _runtime_form(m, "T-Delayed")
        case Waiting():
            raise _runtime_form(m, "T-Waiting")
        case Active():
            raise _runtime_form(m, "T-Active")
    raise TypeCheckError("mismatch", "T-Var", f"not an expression: {m!r}", m)


def _runtime_form(m, rule):
    return TypeCheckError(
        "runtime-form-in-source", rule, "run-time check forms have no compile-time typing rule", m
    )


def _expect(ctx, m, want, rule):
    got = _infer(ctx, m)
    if not alpha_eq(got, want):
        raise TypeCheckError("mismatch", rule, f"expected {want}, found {got} for {m}", m)


def check_compile(ctx: Sequence, m: Expr, t: Type) -> None:
    got = infer_compile(ctx, m)
    if not alpha_eq(got, t):
        raise TypeCheckError("mismatch", "T-Cast", f"expected {t}, found {got}", m)


# ---------------------------------------------------------------------------
# reachability premises


def reaches(start: Expr, target, fuel: int, max_states: int = 20_000) -> TriVerdict:
    """Decide ``start ⟶* target`` by breadth-first search over all paths."""
    from .semantics import step_all

    goal = alpha_key(target) if not isinstance(target, Blame) else "blame"

    def key(c):
        return "blame" if isinstance(c, Blame) else alpha_key(c)

    if key(start) == goal:
        return YES
    seen = {key(start)}
    queue = deque([(start, 0)])
    cut = None
    while queue:
        c, d = queue.popleft()
        succs = step_all(c)
        if succs and d >= fuel:
            cut = cut or "fuel"
            continue
        for _, n in succs:
            k = key(n)
            if k == goal:
                return YES
            if k in seen:
                continue
            if len(seen) >= max_states:
                cut = "nondeterministic-premise"
                break
            seen.add(k)
            queue.append((n, d + 1))
    if cut:
        return TriVerdict("unknown", reason=cut)
    return _no("mismatch", "T-Exact", f"{start} never reaches {target}", start)


# ---------------------------------------------------------------------------
# run-time rules


class RuntimeChecker:
    """Goal-directed checking under compile-time and run-time rules.

    A value never synthesizes a refinement type, so a closed value meets a
    refinement goal only by T-Exact; T-Forget is then admissible and is not
    searched for separately.
    """

    def __init__(self, fuel: int, max_states: int):
        self.fuel = fuel
        self.max_states = max_states
        self.memo: dict = {}

    def check(self, ctx, m, goal) -> TriVerdict:
        key = (tuple((x, alpha_key(t)) for x, t in ctx), alpha_key(m), alpha_key(goal))
        hit = self.memo.get(key)
        if hit is None:
            hit = self._check(ctx, m, goal)
            self.memo[key] = hit
        return hit

    def _check(self, ctx, m, goal) -> TriVerdict:
        if isinstance(goal, Refine) and is_value(m):
            return self.exact(ctx, m, goal)
        if is_numeral(m):
            return self.same(NAT, goal, "T-Zero" if isinstance(m, Zero) else "T-Succ", m)
        match m:
            case Succ(a):
                return _all([self.same(NAT, goal, "T-Succ", m), lambda: self.check(ctx, a, NAT)])
            case Pred(a):
                return _all([self.same(NAT, goal, "T-Pred", m), lambda: self.check(ctx, a, NONZERO)])
            case IsZero(a):
                return _all([self.same(BOOL, goal, "T-IsZero", m), lambda: self.check(ctx, a, NAT)])
            case TrueLit():
                return self.same(BOOL, goal, "T-True", m)
            case FalseLit():
                return self.same(BOOL, goal, "T-False", m)
            case If(c, t, e):
                return _all([
                    lambda: self.check(ctx, c, BOOL),
                    lambda: self.check(ctx, t, goal),
                    lambda: self.check(ctx, e, goal),
                ])
            case Var(x):
                t = _lookup(ctx, x)
                if t is None:
                    return _no("unbound-var", "T-Var", f"unbound variable {x}", m)
                return self.same(t, goal, "T-Var", m)
            case Abs(x, ann, body):
                if not isinstance(goal, Arrow) or not alpha_eq(goal.dom, ann):
                    return _no("mismatch", "T-Abs", f"abstraction over {ann} cannot have type {goal}", m)
                v = self.wf(ann)
                if not v.yes:
                    return v
                ctx2, body = _push(ctx, x, ann, body)
                return self.check(ctx2, body, goal.cod)
            case App(f, a):
                dom = ann_or_guess_dom(ctx, f)
                if dom is None:
                    return _no("mismatch", "T-App", f"cannot find a function type for {f}", m)
                return _all([
                    lambda: self.check(ctx, f, Arrow(dom, goal)),
                    lambda: self.check(ctx, a, dom),
                ])
            case Pair(left, right):
                if not isinstance(goal, Wedge):
                    return _no("mismatch", "T-Pair", f"a pair cannot have type {goal}", m)
                if not alpha_eq(essence_expr(left), essence_expr(right)):
                    return _no("essence-mismatch", "T-Pair", "pair components differ in essence", m)
                if essence_type(goal.left) != essence_type(goal.right):
                    return _no("essence-mismatch", "T-Pair", "pair component types differ in essence", m)
                return _all([
                    lambda: self.check(ctx, left, goal.left),
                    lambda: self.check(ctx, right, goal.right),
                ])
            case Proj(i, a):
                rule = "T-Fst" if i == 1 else "T-Snd"
                at = guess(ctx, a)
                if not isinstance(at, Wedge):
                    return _no("mismatch", rule, f"projection from a term of type {at}", m)
                want = Wedge(goal, at.right) if i == 1 else Wedge(at.left, goal)
                return self.check(ctx, a, want)
            case Fix(f, ann, body):
                if not is_interface(ann):
                    return _no("not-interface", "T-Fix", f"{ann} is not an interface type", m)
                if not is_recursion_body(body):
                    return _no("not-recursion-body", "T-Fix", "body of mu is not a recursion body", m)
                ctx2, body = _push(ctx, f, ann, body)
                return _all([
                    self.same(ann, goal, "T-Fix", m),
                    lambda: self.wf(ann),
                    lambda: self.check(ctx2, body, ann),
                ])
            case Cast(a, source, target):
                if essence_type(source) != essence_type(target):
                    return _no("essence-mismatch", "T-Cast", "cast between types of different essence", m)
                return _all([
                    self.same(target, goal, "T-Cast", m),
                    lambda: self.wf(target),
                    lambda: self.check(ctx, a, source),
                ])
            case Delayed(v, source, target):
                if isinstance(source, Refine):
                    return _no("mismatch", "T-Delayed", "delayed check from a refinement type", m)
                if essence_type(source) != essence_type(target):
                    return _no("essence-mismatch", "T-Delayed", "delayed check between different essences", m)
                return _all([
                    self.same(target, goal, "T-Delayed", m),
                    lambda: self.wf(target),
                    lambda: self.closed_check(v, source, "T-Delayed"),
                ])
            case Waiting(a, target):
                return _all([
                    self.same(target, goal, "T-Waiting", m),
                    lambda: self.wf(target),
                    lambda: self.closed_check(a, target.base, "T-Waiting"),
                ])
            case Active(test, v, target):
                return _all([
                    self.same(target, goal, "T-Active", m),
                    lambda: self.wf(target),
                    lambda: self.closed_check(test, BOOL, "T-Active"),
                    lambda: self.closed_check(v, target.base, "T-Active"),
                    lambda: self.reach(subst(target.pred, target.var, v), test, "T-Active"),
                ])
        return _no("mismatch", "T-Var", f"not an expression: {m!r}", m)

    def exact(self, ctx, v, goal: Refine) -> TriVerdict:
        if not is_closed(v):
            return _no("mismatch", "T-Exact", f"open value {v} cannot meet a refinement", v)
        return _all([
            lambda: self.wf(goal),
            lambda: self.check((), v, goal.base),
            lambda: self.reach(subst(goal.pred, goal.var, v), TRUE, "T-Exact"),
        ])

    def closed_check(self, m, t, rule) -> TriVerdict:
        if not is_closed(m):
            return _no("mismatch", rule, f"run-time subject {m} must be closed", m)
        return self.check((), m, t)

    def reach(self, start, target, rule) -> TriVerdict:
        v = reaches(start, target, self.fuel, self.max_states)
        if v.no:
            return _no("mismatch", rule, f"{start} does not reach {target}", start)
        return v

    @staticmethod
    def same(got, want, rule, m) -> TriVerdict:
        if alpha_eq(got, want):
            return YES
        return _no("mismatch", rule, f"expected {want}, found {got}", m)

    @staticmethod
    def wf(t) -> TriVerdict:
        try:
            wf_type(t)
        except TypeCheckError as err:
            return TriVerdict("no", err)
        return YES


def guess(ctx, m) -> Type | None:
    """A cheap candidate type for ``m``; checking confirms or refutes it."""
    match m:
        case Zero() | Succ() | Pred():
            return NAT
        case IsZero() | TrueLit() | FalseLit():
            return BOOL
        case If(_, t, e):
            return guess(ctx, t) or guess(ctx, e)
        case Var(x):
            return _lookup(ctx, x)
        case Abs(x, ann, body):
            ctx2, body = _push(ctx, x, ann, body)
            cod = guess(ctx2, body)
            return None if cod is None else Arrow(ann, cod)
        case App(f, _):
            ft = guess(ctx, f)
            return ft.cod if isinstance(ft, Arrow) else None
        case Pair(left, right):
            lt, rt = guess(ctx, left), guess(ctx, right)
            return None if lt is None or rt is None else Wedge(lt, rt)
        case Proj(i, a):
            at = guess(ctx, a)
            if isinstance(at, Wedge):
                return at.left if i == 1 else at.right
            return None
        case Fix(_, ann, _):
            return ann
        case Cast(_, _, target) | Delayed(_, _, target) | Waiting(_, target) | Active(_, _, target):
            return target
    return None


def ann_or_guess_dom(ctx, f) -> Type | None:
    if isinstance(f, Abs):
        return f.ann
    ft = guess(ctx, f)
    return ft.dom if isinstance(ft, Arrow) else None


def check_runtime(
    ctx: Sequence,
    m: Expr,
    t: Type,
    fuel: int = 1_000,
    max_states: int = 20_000,
    checker: RuntimeChecker | None = None,
) -> TriVerdict:
    """Check ``ctx ⊢ m : t`` with compile-time and run-time rules.

    Passing a ``checker`` shares its memo table across calls."""
    ctx = tuple(ctx)
    try:
        wf_ctx(ctx)
        wf_type(t)
    except TypeCheckError as err:
        return TriVerdict("no", err)
    checker = checker or RuntimeChecker(fuel, max_states)
    return checker.check(ctx, m, t)


def typeof_runtime(m: Expr, fuel: int = 1_000) -> Type | None:
    """A type that closed ``m`` provably has, if one can be found."""
    t = guess((), m)
    if t is None or not is_wf_type(t):
        return None
    return t if check_runtime((), m, t, fuel).yes else None
