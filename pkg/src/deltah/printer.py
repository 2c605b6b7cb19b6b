"""Concrete syntax printer; ``parse(show(t))`` is alpha-equivalent to ``t``."""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import (
    Abs,
    Active,
    App,
    Arrow,
    Blame,
    Bool,
    Cast,
    Delayed,
    FalseLit,
    Fix,
    If,
    IsZero,
    Nat,
    Node,
    Pair,
    Pred,
    Proj,
    Refine,
    Succ,
    TrueLit,
    Var,
    Waiting,
    Wedge,
    Zero,
    alpha_key,
    free_vars,
    numeral_value,
)

EXPR, APP, ATOM = 0, 1, 2
T_ARROW, T_WEDGE, T_ATOM = 0, 1, 2


@dataclass
class Names:
    """Closed definitions to fold back into names when printing."""

    exprs: dict = field(default_factory=dict)
    types: dict = field(default_factory=dict)

    @classmethod
    def from_defs(cls, defs) -> "Names":
        names = cls()
        for name, e in defs.exprs.items():
            names.exprs.setdefault(alpha_key(e), name)
        for name, t in defs.types.items():
            names.types.setdefault(alpha_key(t), name)
        return names


def show(t, numerals: bool = False, names: Names | None = None) -> str:
    return _Printer(numerals, names).term(t)


class _Printer:
    def __init__(self, numerals, names):
        self.numerals = numerals
        self.names = names
        self.bound: list[str] = []

    def term(self, t) -> str:
        if isinstance(t, Blame):
            return "blame"
        if isinstance(t, (Nat, Bool, Arrow, Wedge, Refine)):
            return self.ty(t, T_ARROW)
        return self.expr(t, EXPR)

    def _fold(self, t: Node, table) -> str | None:
        if self.names is None or not table or free_vars(t):
            return None
        name = table.get(alpha_key(t))
        if name is not None and name not in self.bound:
            return name
        return None

    def _binder(self, x, render):
        self.bound.append(x)
        try:
            return render()
        finally:
            self.bound.pop()

    # -- types ----------------------------------------------------------
    def ty(self, t, level) -> str:
        if isinstance(t, (Arrow, Wedge, Refine)):
            name = self._fold(t, self.names.types if self.names else None)
            if name is not None:
                return name
        match t:
            case Nat():
                return "nat"
            case Bool():
                return "bool"
            case Arrow(dom, cod):
                s = f"{self.ty(dom, T_WEDGE)} -> {self.ty(cod, T_ARROW)}"
                return f"({s})" if level > T_ARROW else s
            case Wedge(left, right):
                s = f"{self.ty(left, T_ATOM)} /\\ {self.ty(right, T_WEDGE)}"
                return f"({s})" if level > T_WEDGE else s
            case Refine(x, base, pred):
                body = self._binder(x, lambda: self.expr(pred, EXPR))
                return f"{{{x}:{self.ty(base, T_ARROW)} | {body}}}"
        raise TypeError(f"not a type: {t!r}")

    # -- expressions ----------------------------------------------------
    def expr(self, e, level) -> str:
        if isinstance(e, (Abs, Fix)):
            name = self._fold(e, self.names.exprs if self.names else None)
            if name is not None:
                return name
        n = numeral_value(e)
        if n is not None and (self.numerals or n == 0):
            return str(n)
        match e:
            case TrueLit():
                return "true"
            case FalseLit():
                return "false"
            case Var(name):
                return name
            case Succ(a) | Pred(a) | IsZero(a):
                kw = {Succ: "succ", Pred: "pred", IsZero: "iszero"}[type(e)]
                return self._paren(f"{kw} {self.expr(a, ATOM)}", level > APP)
            case Proj(i, a):
                return self._paren(f"proj{i} {self.expr(a, ATOM)}", level > APP)
            case App(f, a):
                return self._paren(f"{self.expr(f, APP)} {self.expr(a, ATOM)}", level > APP)
            case If(c, t, f):
                s = f"if {self.expr(c, EXPR)} then {self.expr(t, EXPR)} else {self.expr(f, EXPR)}"
                return self._paren(s, level > EXPR)
            case Abs(x, ann, body):
                ann_s = self.ty(ann, T_ARROW)
                body_s = self._binder(x, lambda: self.expr(body, EXPR))
                return self._paren(f"fun {x}:{ann_s}. {body_s}", level > EXPR)
            case Fix(f, ann, body):
                ann_s = self.ty(ann, T_ARROW)
                body_s = self._binder(f, lambda: self.expr(body, EXPR))
                return self._paren(f"mu {f}:{ann_s}. {body_s}", level > EXPR)
            case Pair(l, r):
                return f"<{self.expr(l, EXPR)}, {self.expr(r, EXPR)}>"
            case Cast(m, s, t):
                return f"({self.expr(m, EXPR)} : {self.ty(s, T_ARROW)} => {self.ty(t, T_ARROW)})"
            case Delayed(v, s, t):
                return f"<| {self.expr(v, EXPR)} : {self.ty(s, T_ARROW)} => {self.ty(t, T_ARROW)} |>"
            case Waiting(m, target):
                return f"<| {self.expr(m, EXPR)} ? {self.ty(target, T_ATOM)} |>"
            case Active(test, v, target):
                return (
                    f"<| {self.expr(test, EXPR)} ==> {self.expr(v, EXPR)} : "
                    f"{self.ty(target, T_ATOM)} |>"
                )
        raise TypeError(f"not an expression: {e!r}")

    @staticmethod
    def _paren(s, needed):
        return f"({s})" if needed else s
