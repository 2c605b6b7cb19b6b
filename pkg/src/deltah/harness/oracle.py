"""A second, table-driven implementation of the PCFv step relation.

Each axiom is a row (name, guard, contractum); each evaluation frame is a
row naming the field that may step and the guard on its siblings.  The
table enumerates every derivation instead of picking one, so it doubles as
a determinism oracle.  Value testing and substitution are reimplemented
here rather than shared with the main evaluator.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable

from ..syntax import (
    FALSE,
    TRUE,
    ZERO,
    Abs,
    App,
    Expr,
    FalseLit,
    Fix,
    If,
    IsZero,
    Pred,
    Succ,
    TrueLit,
    Var,
    Zero,
)


def _numeral(e) -> bool:
    while type(e) is Succ:
        e = e.arg
    return type(e) is Zero


def _value(e) -> bool:
    return _numeral(e) or type(e) in (TrueLit, FalseLit, Abs)


def _subst(e, x, v):
    """``e[x := v]`` for closed ``v``: no capture is possible."""
    t = type(e)
    if t is Var:
        return v if e.name == x else e
    if t in (Abs, Fix):
        return e if e.var == x else t(e.var, e.ann, _subst(e.body, x, v))
    if t in (Zero, TrueLit, FalseLit):
        return e
    fields = {f.name: getattr(e, f.name) for f in dataclasses.fields(e)}
    return t(**{k: _subst(val, x, v) if isinstance(val, Expr) else val for k, val in fields.items()})


@dataclass(frozen=True)
class Axiom:
    name: str
    guard: Callable[[Expr], bool]
    contractum: Callable[[Expr], Expr]


AXIOMS = (
    Axiom("PCF-Pred-Z", lambda m: type(m) is Pred and type(m.arg) is Zero, lambda m: ZERO),
    Axiom(
        "PCF-Pred",
        lambda m: type(m) is Pred and type(m.arg) is Succ and _numeral(m.arg.arg),
        lambda m: m.arg.arg,
    ),
    Axiom("PCF-IsZero-T", lambda m: type(m) is IsZero and type(m.arg) is Zero, lambda m: TRUE),
    Axiom(
        "PCF-IsZero-F",
        lambda m: type(m) is IsZero and type(m.arg) is Succ and _numeral(m.arg.arg),
        lambda m: FALSE,
    ),
    Axiom("PCF-If-T", lambda m: type(m) is If and type(m.cond) is TrueLit, lambda m: m.then),
    Axiom("PCF-If-F", lambda m: type(m) is If and type(m.cond) is FalseLit, lambda m: m.else_),
    Axiom(
        "PCF-Beta",
        lambda m: type(m) is App and type(m.fun) is Abs and _value(m.arg),
        lambda m: _subst(m.fun.body, m.fun.var, m.arg),
    ),
    Axiom(
        "PCF-Fix",
        lambda m: type(m) is Fix and type(m.body) is Abs,
        lambda m: _subst(m.body, m.var, m),
    ),
)

# (node class, field that holds the hole, guard on the enclosing node)
FRAMES = (
    (Succ, "arg", lambda m: True),
    (Pred, "arg", lambda m: True),
    (IsZero, "arg", lambda m: True),
    (If, "cond", lambda m: True),
    (App, "fun", lambda m: True),
    (App, "arg", lambda m: _value(m.fun)),
)


def derivations(m: Expr) -> list[tuple[str, Expr]]:
    """Every (axiom name, successor) derivable for ``m``."""
    out = [(ax.name, ax.contractum(m)) for ax in AXIOMS if ax.guard(m)]
    for cls, fld, guard in FRAMES:
        if type(m) is cls and guard(m):
            for name, inner in derivations(getattr(m, fld)):
                out.append((name, dataclasses.replace(m, **{fld: inner})))
    return out


def oracle_step(m: Expr) -> Expr | None:
    ds = derivations(m)
    return ds[0][1] if ds else None
