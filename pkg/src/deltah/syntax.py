"""Abstract syntax shared by PCFv and the contract calculus.

Types and expressions are immutable dataclasses.  Variables are named;
binders are ``Abs``, ``Fix`` and ``Refine`` (the refinement binder scopes
over the predicate only).  Equality on nodes is structural, and
``alpha_eq`` / ``alpha_key`` identify terms up to bound-variable renaming.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator, Union


class Node:
    """Base for all syntax nodes: structural equality with a cached hash."""

    __match_args__: tuple[str, ...] = ()

    def children(self) -> tuple:
        return tuple(getattr(self, name) for name in self.__match_args__)

    def __hash__(self) -> int:
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((type(self).__name__, *self.children()))
            object.__setattr__(self, "_hash", h)
            return h

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if type(self) is not type(other):
            return False
        if hash(self) != hash(other):
            return False
        return self.children() == other.children()

    def __ne__(self, other: object) -> bool:
        return not self.__eq__(other)

    def __getstate__(self):
        # cached hashes depend on the per-process string hash seed
        return {k: v for k, v in self.__dict__.items() if not k.startswith("_")}

    def __str__(self) -> str:
        from .printer import show

        return show(self)


# ---------------------------------------------------------------------------
# types


class Type(Node):
    pass


@dataclass(frozen=True, eq=False, repr=False)
class Nat(Type):
    def __repr__(self) -> str:
        return "NAT"


@dataclass(frozen=True, eq=False, repr=False)
class Bool(Type):
    def __repr__(self) -> str:
        return "BOOL"


@dataclass(frozen=True, eq=False)
class Arrow(Type):
    dom: Type
    cod: Type


@dataclass(frozen=True, eq=False)
class Wedge(Type):
    left: Type
    right: Type


@dataclass(frozen=True, eq=False)
class Refine(Type):
    var: str
    base: Type
    pred: "Expr"


NAT = Nat()
BOOL = Bool()


# ---------------------------------------------------------------------------
# expressions


class Expr(Node):
    pass


@dataclass(frozen=True, eq=False, repr=False)
class Zero(Expr):
    def __repr__(self) -> str:
        return "ZERO"


@dataclass(frozen=True, eq=False)
class Succ(Expr):
    arg: Expr


@dataclass(frozen=True, eq=False)
class Pred(Expr):
    arg: Expr


@dataclass(frozen=True, eq=False)
class IsZero(Expr):
    arg: Expr


@dataclass(frozen=True, eq=False, repr=False)
class TrueLit(Expr):
    def __repr__(self) -> str:
        return "TRUE"


@dataclass(frozen=True, eq=False, repr=False)
class FalseLit(Expr):
    def __repr__(self) -> str:
        return "FALSE"


@dataclass(frozen=True, eq=False)
class If(Expr):
    cond: Expr
    then: Expr
    else_: Expr


@dataclass(frozen=True, eq=False)
class Var(Expr):
    name: str


@dataclass(frozen=True, eq=False)
class App(Expr):
    fun: Expr
    arg: Expr


@dataclass(frozen=True, eq=False)
class Abs(Expr):
    var: str
    ann: Type
    body: Expr


@dataclass(frozen=True, eq=False)
class Fix(Expr):
    """``mu f:I. B``; the annotation should be an interface type and the
    body a recursion body, which the type checker enforces."""

    var: str
    ann: Type
    body: Expr


@dataclass(frozen=True, eq=False)
class Pair(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=False)
class Proj(Expr):
    index: int
    arg: Expr

    def __post_init__(self):
        if self.index not in (1, 2):
            raise ValueError(f"projection index must be 1 or 2, got {self.index}")


@dataclass(frozen=True, eq=False)
class Cast(Expr):
    subject: Expr
    source: Type
    target: Type


@dataclass(frozen=True, eq=False)
class Delayed(Expr):
    """Delayed check of a value against a function type (run-time only)."""

    subject: Expr
    source: Type
    target: Arrow

    def __post_init__(self):
        if not is_value(self.subject):
            raise ValueError("delayed check needs a value subject")
        if not isinstance(self.target, Arrow):
            raise ValueError("delayed check needs an arrow target")


@dataclass(frozen=True, eq=False)
class Waiting(Expr):
    """Waiting check: evaluate ``subject`` then test it against ``target``."""

    subject: Expr
    target: Refine


@dataclass(frozen=True, eq=False)
class Active(Expr):
    """Active check: ``test`` is the running predicate for ``subject``."""

    test: Expr
    subject: Expr
    target: Refine

    def __post_init__(self):
        if not is_value(self.subject):
            raise ValueError("active check needs a value subject")


@dataclass(frozen=True, eq=False, repr=False)
class Blame:
    def __repr__(self) -> str:
        return "BLAME"

    def __str__(self) -> str:
        return "blame"


ZERO = Zero()
TRUE = TrueLit()
FALSE = FalseLit()
BLAME = Blame()

Command = Union[Expr, Blame]
Term = Union[Expr, Type]

RUNTIME_FORMS = (Delayed, Waiting, Active)

# Argument of T-Pred: {x:nat | if iszero(x) then false else true}
NONZERO = Refine("x", NAT, If(IsZero(Var("x")), FALSE, TRUE))


def numeral(n: int) -> Expr:
    e: Expr = ZERO
    for _ in range(n):
        e = Succ(e)
    return e


def numeral_value(e: Expr) -> int | None:
    """The integer denoted by a numeral, or None if ``e`` is not one."""
    n = 0
    while isinstance(e, Succ):
        e = e.arg
        n += 1
    return n if isinstance(e, Zero) else None


def is_numeral(e: Expr) -> bool:
    return numeral_value(e) is not None


def is_value(e: Expr) -> bool:
    match e:
        case Zero() | TrueLit() | FalseLit() | Abs() | Delayed():
            return True
        case Succ(arg):
            return is_numeral(arg)
        case Pair(left, right):
            return is_value(left) and is_value(right)
    return False


def is_recursion_body(e: Expr) -> bool:
    match e:
        case Abs():
            return True
        case Pair(left, right):
            return is_recursion_body(left) and is_recursion_body(right)
    return False


def is_interface(t: Type) -> bool:
    match t:
        case Arrow():
            return True
        case Wedge(left, right):
            return is_interface(left) and is_interface(right)
    return False


def is_runtime_form(e: Expr) -> bool:
    return isinstance(e, RUNTIME_FORMS)


def contains_runtime_form(t: Term) -> bool:
    return any(isinstance(s, RUNTIME_FORMS) for s in subterms(t))


def classify(e: Expr, as_fix_body: bool = False) -> str:
    """One of ``value``, ``recursion-body``, ``runtime-form`` or ``plain``."""
    if as_fix_body and is_recursion_body(e):
        return "recursion-body"
    if is_value(e):
        return "value"
    if is_runtime_form(e):
        return "runtime-form"
    return "plain"


# ---------------------------------------------------------------------------
# traversal


def map_children(t: Node, fn: Callable[[Node], Node]) -> Node:
    """Rebuild ``t`` with ``fn`` applied to each child node (binder names kept)."""
    changed = False
    new = []
    for c in t.children():
        if isinstance(c, Node):
            c2 = fn(c)
            changed = changed or c2 is not c
            new.append(c2)
        else:
            new.append(c)
    return type(t)(*new) if changed else t


def subterms(t: Node) -> Iterator[Node]:
    stack = [t]
    while stack:
        s = stack.pop()
        yield s
        stack.extend(c for c in reversed(s.children()) if isinstance(c, Node))


def size(t: Node) -> int:
    return sum(1 for _ in subterms(t))


def depth(t: Node) -> int:
    kids = [c for c in t.children() if isinstance(c, Node)]
    return 1 + max((depth(c) for c in kids), default=0)


# ---------------------------------------------------------------------------
# binding


def free_vars(t: Node) -> frozenset[str]:
    try:
        return t.__dict__["_fv"]
    except KeyError:
        pass
    match t:
        case Var(name):
            fv = frozenset((name,))
        case Abs(x, ann, body) | Fix(x, ann, body):
            fv = free_vars(ann) | (free_vars(body) - {x})
        case Refine(x, base, pred):
            fv = free_vars(base) | (free_vars(pred) - {x})
        case _:
            fv = frozenset().union(*(free_vars(c) for c in t.children() if isinstance(c, Node)))
    object.__setattr__(t, "_fv", fv)
    return fv


def is_closed(t: Node) -> bool:
    return not free_vars(t)


def fresh(base: str, avoid) -> str:
    stem = base.rstrip("0123456789") or "v"
    if base not in avoid:
        return base
    for i in itertools.count(1):
        cand = f"{stem}{i}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


def subst(t: Node, x: str, n: Expr) -> Node:
    """Capture-avoiding ``t[x := n]`` over expressions and types."""
    if x not in free_vars(t):
        return t
    fv_n = free_vars(n)
    return _subst(t, x, n, fv_n)


def _subst(t, x, n, fv_n):
    if x not in free_vars(t):
        return t
    match t:
        case Var(name):
            return n if name == x else t
        case Abs(y, ann, body) | Fix(y, ann, body):
            ann2 = _subst(ann, x, n, fv_n)
            y2, body2 = _under_binder(y, body, x, n, fv_n)
            return type(t)(y2, ann2, body2)
        case Refine(y, base, pred):
            base2 = _subst(base, x, n, fv_n)
            y2, pred2 = _under_binder(y, pred, x, n, fv_n)
            return Refine(y2, base2, pred2)
    return map_children(t, lambda c: _subst(c, x, n, fv_n))


def _under_binder(y, body, x, n, fv_n):
    if y == x:
        return y, body
    if y in fv_n:
        y2 = fresh(y, fv_n | free_vars(body) | {x})
        body = _subst(body, y, Var(y2), frozenset((y2,)))
        y = y2
    return y, _subst(body, x, n, fv_n)


def rename(t: Node, old: str, new: str) -> Node:
    return subst(t, old, Var(new))


def alpha_key(t: Node):
    """A hashable canonical form: equal keys iff alpha-equivalent terms."""
    try:
        return t.__dict__["_akey"]
    except KeyError:
        pass
    key = _canon_node(t, {}, 0)
    object.__setattr__(t, "_akey", key)
    return key


def _canon(t, env, level):
    # de Bruijn indices make the form of a subterm independent of the
    # binders around it unless it mentions one of them
    if not env or env.keys().isdisjoint(free_vars(t)):
        return alpha_key(t)
    return _canon_node(t, env, level)


def _canon_node(t, env, level):
    match t:
        case Var(name):
            return ("B", level - 1 - env[name]) if name in env else ("F", name)
        case Abs(x, ann, body) | Fix(x, ann, body):
            return (type(t).__name__, _canon(ann, env, level), _canon(body, {**env, x: level}, level + 1))
        case Refine(x, base, pred):
            return ("Refine", _canon(base, env, level), _canon(pred, {**env, x: level}, level + 1))
    return (type(t).__name__,) + tuple(
        _canon(c, env, level) if isinstance(c, Node) else c for c in t.children()
    )


def alpha_eq(a: Node, b: Node) -> bool:
    if a is b or a == b:
        return True
    if type(a) is not type(b):
        return False
    return alpha_key(a) == alpha_key(b)


# ---------------------------------------------------------------------------
# evaluation frames


class Frame(Node):
    pass


@dataclass(frozen=True, eq=False)
class SuccHole(Frame):
    pass


@dataclass(frozen=True, eq=False)
class PredHole(Frame):
    pass


@dataclass(frozen=True, eq=False)
class IsZeroHole(Frame):
    pass


@dataclass(frozen=True, eq=False)
class IfHole(Frame):
    then: Expr
    else_: Expr


@dataclass(frozen=True, eq=False)
class AppFunHole(Frame):
    arg: Expr


@dataclass(frozen=True, eq=False)
class AppArgHole(Frame):
    fun: Expr

    def __post_init__(self):
        if not is_value(self.fun):
            raise ValueError("argument frame needs a value in function position")


@dataclass(frozen=True, eq=False)
class ProjHole(Frame):
    index: int


@dataclass(frozen=True, eq=False)
class CastHole(Frame):
    source: Type
    target: Type


@dataclass(frozen=True, eq=False)
class WaitingHole(Frame):
    target: Refine


def plug(frame: Frame, m: Expr) -> Expr:
    match frame:
        case SuccHole():
            return Succ(m)
        case PredHole():
            return Pred(m)
        case IsZeroHole():
            return IsZero(m)
        case IfHole(then, else_):
            return If(m, then, else_)
        case AppFunHole(arg):
            return App(m, arg)
        case AppArgHole(fun):
            return App(fun, m)
        case ProjHole(index):
            return Proj(index, m)
        case CastHole(source, target):
            return Cast(m, source, target)
        case WaitingHole(target):
            return Waiting(m, target)
    raise TypeError(f"not a frame: {frame!r}")


def decompose(m: Expr) -> tuple[Frame, Expr] | None:
    """Split ``m`` as ``E[n]`` with ``n`` not a value, if such a frame exists.

    Pairs and active checks have their own contextual rules and are never
    decomposed here.
    """
    match m:
        case Succ(a) if not is_value(a):
            return SuccHole(), a
        case Pred(a) if not is_value(a):
            return PredHole(), a
        case IsZero(a) if not is_value(a):
            return IsZeroHole(), a
        case If(c, t, e) if not is_value(c):
            return IfHole(t, e), c
        case App(f, a):
            if not is_value(f):
                return AppFunHole(a), f
            if not is_value(a):
                return AppArgHole(f), a
        case Proj(i, a) if not is_value(a):
            return ProjHole(i), a
        case Cast(a, s, t) if not is_value(a):
            return CastHole(s, t), a
        case Waiting(a, target) if not is_value(a):
            return WaitingHole(target), a
    return None
