"""Call-by-value PCF: the fragment without contracts and its small-step semantics."""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    FALSE,
    TRUE,
    ZERO,
    Abs,
    App,
    Arrow,
    Bool,
    Expr,
    FalseLit,
    Fix,
    If,
    IsZero,
    Nat,
    Pred,
    Succ,
    TrueLit,
    Type,
    Var,
    Zero,
    is_numeral,
    subst,
)


def is_pcf_type(t: Type) -> bool:
    match t:
        case Nat() | Bool():
            return True
        case Arrow(dom, cod):
            return is_pcf_type(dom) and is_pcf_type(cod)
    return False


def is_pcf_expr(e: Expr) -> bool:
    match e:
        case Zero() | TrueLit() | FalseLit() | Var():
            return True
        case Succ(a) | Pred(a) | IsZero(a):
            return is_pcf_expr(a)
        case If(c, t, f):
            return is_pcf_expr(c) and is_pcf_expr(t) and is_pcf_expr(f)
        case App(f, a):
            return is_pcf_expr(f) and is_pcf_expr(a)
        case Abs(_, ann, body):
            return is_pcf_type(ann) and is_pcf_expr(body)
        case Fix(_, Arrow() as ann, Abs() as body):
            return is_pcf_type(ann) and is_pcf_expr(body)
    return False


def embed(p: Expr) -> Expr:
    """Inject a PCFv term into the contract calculus (a syntactic subset)."""
    if not is_pcf_expr(p):
        raise ValueError("not a PCFv term")
    return p


def is_pcf_value(e: Expr) -> bool:
    return is_numeral(e) or isinstance(e, (TrueLit, FalseLit, Abs))


def pcf_step(m: Expr) -> Expr | None:
    """The unique PCFv successor of ``m``, or None for values and stuck terms."""
    r = pcf_step_rule(m)
    return None if r is None else r[1]


def pcf_step_rule(m: Expr) -> tuple[str, Expr] | None:
    """Like ``pcf_step`` but also names the axiom that fired."""
    match m:
        case Pred(Zero()):
            return "PCF-Pred-Z", ZERO
        case Pred(Succ(n)) if is_numeral(n):
            return "PCF-Pred", n
        case IsZero(Zero()):
            return "PCF-IsZero-T", TRUE
        case IsZero(Succ(n)) if is_numeral(n):
            return "PCF-IsZero-F", FALSE
        case If(TrueLit(), then, _):
            return "PCF-If-T", then
        case If(FalseLit(), _, else_):
            return "PCF-If-F", else_
        case App(Abs(x, _, body), v) if is_pcf_value(v):
            return "PCF-Beta", subst(body, x, v)
        case Fix(f, _, body):
            return "PCF-Fix", subst(body, f, m)
        case Succ(a) | Pred(a) | IsZero(a):
            r = pcf_step_rule(a)
            return None if r is None else (r[0], type(m)(r[1]))
        case If(c, t, f):
            r = pcf_step_rule(c)
            return None if r is None else (r[0], If(r[1], t, f))
        case App(f, a):
            if not is_pcf_value(f):
                r = pcf_step_rule(f)
                return None if r is None else (r[0], App(r[1], a))
            r = pcf_step_rule(a)
            return None if r is None else (r[0], App(f, r[1]))
    return None


@dataclass(frozen=True)
class PcfOutcome:
    status: str  # "value" | "stuck" | "fuel_exhausted"
    term: Expr
    steps: int


def pcf_eval(m: Expr, fuel: int = 10_000) -> PcfOutcome:
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    steps = 0
    while True:
        if is_pcf_value(m):
            return PcfOutcome("value", m, steps)
        nxt = pcf_step(m)
        if nxt is None:
            return PcfOutcome("stuck", m, steps)
        if steps >= fuel:
            return PcfOutcome("fuel_exhausted", m, steps)
        m = nxt
        steps += 1


def pcf_trace(m: Expr, fuel: int = 10_000) -> list[Expr]:
    """States visited by ``pcf_eval``, starting with ``m``."""
    out = [m]
    for _ in range(fuel):
        m = pcf_step(m)
        if m is None:
            break
        out.append(m)
    return out
