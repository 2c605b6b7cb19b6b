"""Erasure of casts, refinements, strong pairs and run-time checks.

The result lives in the PCFv fragment of the shared syntax.
"""

from __future__ import annotations

from .syntax import (
    Abs,
    Active,
    Arrow,
    Bool,
    Cast,
    Delayed,
    Expr,
    Fix,
    Nat,
    Node,
    Pair,
    Proj,
    Refine,
    Type,
    Waiting,
    Wedge,
    map_children,
)


def essence_type(t: Type) -> Type:
    match t:
        case Nat() | Bool():
            return t
        case Arrow(dom, cod):
            d, c = essence_type(dom), essence_type(cod)
            return t if (d is dom and c is cod) else Arrow(d, c)
        case Wedge(left, _):
            return essence_type(left)
        case Refine(_, base, _):
            return essence_type(base)
    raise TypeError(f"not a type: {t!r}")


def essence_expr(m: Expr) -> Expr:
    try:
        return m.__dict__["_essence"]
    except KeyError:
        pass
    match m:
        case Pair(left, _):
            e = essence_expr(left)
        case Proj(_, arg):
            e = essence_expr(arg)
        case Cast(subject, _, _) | Waiting(subject, _) | Delayed(subject, _, _):
            e = essence_expr(subject)
        case Active(_, subject, _):
            # the checked value, not the running test
            e = essence_expr(subject)
        case Abs(x, ann, body):
            e = Abs(x, essence_type(ann), essence_expr(body))
        case Fix(f, ann, body):
            e = Fix(f, essence_type(ann), essence_expr(body))
        case _:
            e = map_children(m, essence_expr)
    object.__setattr__(m, "_essence", e)
    return e


def essence(t: Node) -> Node:
    return essence_type(t) if isinstance(t, Type) else essence_expr(t)
