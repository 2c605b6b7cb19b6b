"""Random generation of well-typed programs and of raw PCFv terms.

Typed generation is goal directed: pick a PCFv type, decorate it with
refinements and intersections into a well-formed type, then build a term
whose inferred type is exactly that goal.  Strong pairs come from
``retarget``, which rewrites one term to another type of the same essence
without touching its essence, so pair components agree by construction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

from ..essence import essence_expr, essence_type
from ..parser import parse_type
from ..prelude import prelude
from ..syntax import (
    BOOL,
    FALSE,
    NAT,
    NONZERO,
    TRUE,
    Abs,
    App,
    Arrow,
    Bool,
    Cast,
    Expr,
    Fix,
    If,
    IsZero,
    Nat,
    Pair,
    Pred,
    Proj,
    Refine,
    Succ,
    Type,
    Var,
    Wedge,
    alpha_eq,
    alpha_key,
    numeral,
    size,
    subst,
    subterms,
)
from ..typecheck import TypeCheckError, infer_compile


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_depth: int = 4
    max_numeral: int = 4
    pred_pool: int = 6
    wedge_prob: float = 0.3
    cast_prob: float = 0.3
    # terms above this many nodes are discarded and regenerated
    max_size: int = 200

    def __post_init__(self):
        if self.max_depth < 1 or self.max_numeral < 1 or self.pred_pool < 1 or self.max_size < 1:
            raise ValueError("generator bounds must be positive")
        for p in (self.wedge_prob, self.cast_prob):
            if not 0.0 <= p <= 1.0:
                raise ValueError("probabilities must lie in [0, 1]")


# ---------------------------------------------------------------------------
# refinement pool

_NAT_PREDICATES: tuple[tuple[str, Callable[[int], bool]], ...] = (
    ("iszero x", lambda n: n == 0),
    ("if iszero x then false else true", lambda n: n != 0),
    ("evenp x", lambda n: n % 2 == 0),
    ("oddp x", lambda n: n % 2 == 1),
    ("true", lambda n: True),
    ("gt x 1", lambda n: n > 1),
)
_BOOL_PREDICATES: tuple[tuple[str, Callable[[bool], bool]], ...] = (
    ("x", lambda b: b),
    ("not x", lambda b: not b),
    ("true", lambda b: True),
)


@dataclass(frozen=True)
class PoolEntry:
    type: Refine
    holds: Callable  # Python reading of the predicate on a literal


@lru_cache(maxsize=None)
def refinement_pool(size: int) -> tuple[tuple[PoolEntry, ...], tuple[PoolEntry, ...]]:
    defs = prelude()
    nat = tuple(
        PoolEntry(parse_type(f"{{x:nat | {src}}}", defs), fn) for src, fn in _NAT_PREDICATES[:size]
    )
    boo = tuple(PoolEntry(parse_type(f"{{x:bool | {src}}}", defs), fn) for src, fn in _BOOL_PREDICATES)
    return nat, boo


def pool_oracle(t: Type, size: int = len(_NAT_PREDICATES)):
    """The Python predicate behind a pool refinement, or None."""
    key = alpha_key(t)
    if alpha_eq(t, NONZERO):
        return lambda n: n != 0
    for entry in refinement_pool(size)[0] + refinement_pool(size)[1]:
        if alpha_key(entry.type) == key:
            return entry.holds
    return None


# ---------------------------------------------------------------------------
# typed generation


class Generator:
    def __init__(self, cfg: GenConfig, rng: random.Random):
        self.cfg = cfg
        self.rng = rng
        self.nat_pool, self.bool_pool = refinement_pool(cfg.pred_pool)
        self.counter = 0

    def name(self, stem: str) -> str:
        self.counter += 1
        return f"{stem}{self.counter}"

    # -- types -----------------------------------------------------------
    def essence(self, depth: int) -> Type:
        r = self.rng.random()
        if depth <= 0 or r < 0.45:
            return NAT
        if r < 0.7:
            return BOOL
        return Arrow(self.essence(depth - 1), self.essence(depth - 1))

    def decorate(self, ess: Type, depth: int) -> Type:
        """A well-formed type whose essence is ``ess``."""
        match ess:
            case Nat():
                t = self.rng.choice(self.nat_pool).type if self.rng.random() < 0.4 else NAT
            case Bool():
                t = self.rng.choice(self.bool_pool).type if self.rng.random() < 0.25 else BOOL
            case Arrow(dom, cod):
                t = Arrow(self.decorate(dom, depth - 1), self.decorate(cod, depth - 1))
            case _:
                raise ValueError(f"not a PCFv type: {ess}")
        if depth > 0 and self.rng.random() < self.cfg.wedge_prob:
            t = Wedge(t, self.decorate(ess, depth - 1))
        return t

    def refinement_goal(self) -> Refine:
        if self.rng.random() < 0.75:
            return self.rng.choice(self.nat_pool).type
        return self.rng.choice(self.bool_pool).type

    # -- terms -----------------------------------------------------------
    def term(self, ctx: tuple, t: Type, d: int) -> Expr:
        rng = self.rng
        matching = [x for x, s in ctx if alpha_eq(s, t)]
        if matching and rng.random() < (0.5 if d <= 0 else 0.2):
            return Var(rng.choice(matching))
        if d <= 0:
            return self.leaf(ctx, t)
        r = rng.random()
        if r < self.cfg.cast_prob:
            return self.cast_into(ctx, t, d)
        if r < self.cfg.cast_prob + 0.2:
            return self.elim(ctx, t, d)
        match t:
            case Refine():
                return self.cast_into(ctx, t, d)
            case Wedge():
                return self.pair(ctx, t, d)
            case Nat():
                return self.nat_intro(ctx, d)
            case Bool():
                k = rng.randrange(3)
                if k == 0:
                    return rng.choice((TRUE, FALSE))
                if k == 1:
                    return IsZero(self.term(ctx, NAT, d - 1))
                return If(self.term(ctx, BOOL, d - 1), self.term(ctx, BOOL, d - 1), self.term(ctx, BOOL, d - 1))
            case Arrow(dom, cod):
                if isinstance(dom, Nat) and d >= 2 and rng.random() < 0.2:
                    return self.fix(ctx, t, d)
                x = self.name("x")
                return Abs(x, dom, self.term(ctx + ((x, dom),), cod, d - 1))
        raise ValueError(f"cannot generate at {t}")

    def nat_intro(self, ctx, d):
        k = self.rng.randrange(4)
        if k == 0:
            return numeral(self.rng.randint(0, self.cfg.max_numeral))
        if k == 1:
            return Succ(self.term(ctx, NAT, d - 1))
        if k == 2:
            return Pred(self.term(ctx, NONZERO, d - 1))
        return If(self.term(ctx, BOOL, d - 1), self.term(ctx, NAT, d - 1), self.term(ctx, NAT, d - 1))

    def elim(self, ctx, t, d):
        k = self.rng.randrange(3)
        if k == 0:
            return If(self.term(ctx, BOOL, d - 1), self.term(ctx, t, d - 1), self.term(ctx, t, d - 1))
        if k == 1:
            s = self.decorate(self.essence(1), 1)
            return App(self.term(ctx, Arrow(s, t), d - 1), self.term(ctx, s, d - 1))
        other = self.decorate(essence_type(t), 1)
        if self.rng.random() < 0.5:
            return Proj(1, self.term(ctx, Wedge(t, other), d - 1))
        return Proj(2, self.term(ctx, Wedge(other, t), d - 1))

    def cast_into(self, ctx, t, d):
        if isinstance(t, Refine) and isinstance(t.base, (Nat, Bool)) and self.rng.random() < 0.5:
            subject, source = self.satisfying_literal(t), t.base
        else:
            source = self.decorate(essence_type(t), 2)
            subject = self.term(ctx, source, d - 1)
        return Cast(subject, source, t)

    def satisfying_literal(self, t: Refine) -> Expr:
        holds = pool_oracle(t)
        if isinstance(t.base, Bool):
            lits = [b for b in (True, False) if holds is None or holds(b)] or [True]
            return TRUE if self.rng.choice(lits) else FALSE
        ns = [n for n in range(self.cfg.max_numeral + 1) if holds is None or holds(n)]
        # sometimes pick a violating literal so that blame paths appear
        if not ns or self.rng.random() < 0.15:
            ns = list(range(self.cfg.max_numeral + 1))
        return numeral(self.rng.choice(ns))

    def pair(self, ctx, t: Wedge, d):
        ess = essence_type(t)
        src = self.decorate(ess, 1) if self.rng.random() < 0.5 else t.left
        seed = self.term(ctx, src, d - 1)
        return Pair(self.retarget(seed, src, t.left), self.retarget(seed, src, t.right))

    def retarget(self, m: Expr, source: Type, target: Type) -> Expr:
        """A term of type ``target`` with the essence of ``m : source``."""
        if alpha_eq(source, target) and self.rng.random() < 0.7:
            return m
        if isinstance(target, Wedge):
            return Pair(self.retarget(m, source, target.left), self.retarget(m, source, target.right))
        if isinstance(m, Pair) and isinstance(source, Wedge) and self.rng.random() < 0.5:
            return self.retarget(m.left, source.left, target)
        if (
            isinstance(m, Abs)
            and isinstance(source, Arrow)
            and isinstance(target, Arrow)
            and self.rng.random() < 0.6
        ):
            x = m.var
            arg = Var(x) if alpha_eq(target.dom, source.dom) else Cast(Var(x), target.dom, source.dom)
            body = subst(m.body, x, arg)
            return Abs(x, target.dom, self.retarget(body, source.cod, target.cod))
        return Cast(m, source, target)

    def fix(self, ctx, t: Arrow, d):
        """Structural recursion on the nat argument, so evaluation terminates."""
        f, n, r = self.name("f"), self.name("n"), self.name("r")
        inner = ctx + ((n, NAT),)
        base = self.term(inner, t.cod, d - 2)
        step = self.term(inner + ((r, t.cod),), t.cod, d - 2)
        call = App(Var(f), Pred(Cast(Var(n), NAT, NONZERO)))
        body = If(IsZero(Var(n)), base, App(Abs(r, t.cod, step), call))
        return Fix(f, t, Abs(n, NAT, body))

    def leaf(self, ctx, t):
        match t:
            case Nat():
                return numeral(self.rng.randint(0, self.cfg.max_numeral))
            case Bool():
                return self.rng.choice((TRUE, FALSE))
            case Refine():
                if isinstance(t.base, (Nat, Bool)):
                    return Cast(self.satisfying_literal(t), t.base, t)
                return Cast(self.leaf(ctx, t.base), t.base, t)
            case Wedge():
                ess = essence_type(t)
                seed = self.leaf(ctx, ess)
                return Pair(self.retarget(seed, ess, t.left), self.retarget(seed, ess, t.right))
            case Arrow(dom, cod):
                x = self.name("x")
                return Abs(x, dom, self.term(ctx + ((x, dom),), cod, 0))
        raise ValueError(f"cannot generate at {t}")


def case_rng(seed: int, index: int) -> random.Random:
    return random.Random(f"{seed}:{index}")


def gen_type(cfg: GenConfig, rng: random.Random) -> Type:
    g = Generator(cfg, rng)
    return g.decorate(g.essence(2), 2)


def gen_well_typed(cfg: GenConfig, rng: random.Random | None = None, goal: str = "any", attempts: int = 50):
    """A closed term and its type.  ``goal`` is ``any``, ``refinement``
    (a refinement type) or ``wedge-refinement`` (an intersection of
    refinements)."""
    rng = rng or random.Random(cfg.seed)
    for _ in range(attempts):
        g = Generator(cfg, rng)
        if goal == "refinement":
            t = g.refinement_goal()
        elif goal == "wedge-refinement":
            left = g.refinement_goal()
            pool = g.nat_pool if isinstance(left.base, Nat) else g.bool_pool
            t = Wedge(left, rng.choice(pool).type)
        else:
            t = g.decorate(g.essence(2), 2)
        m = g.term((), t, cfg.max_depth)
        if size(m) > cfg.max_size:
            continue
        try:
            got = infer_compile((), m)
        except TypeCheckError:
            continue
        if alpha_eq(got, t):
            return m, t
    raise RuntimeError("generator failed to produce a well-typed term")


def has_wedge_cast(m: Expr) -> bool:
    return any(
        isinstance(s, Cast) and (isinstance(s.source, Wedge) or isinstance(s.target, Wedge))
        for s in subterms(m)
    )


# ---------------------------------------------------------------------------
# untyped PCFv terms


def gen_pcf(rng: random.Random, depth: int = 5, max_numeral: int = 4) -> Expr:
    """A closed PCFv term, often ill typed, biased towards redexes."""
    counter = [0]

    def fresh(stem):
        counter[0] += 1
        return f"{stem}{counter[0]}"

    def ty(d):
        if d <= 0 or rng.random() < 0.6:
            return rng.choice((NAT, BOOL))
        return Arrow(ty(d - 1), ty(d - 1))

    def go(env, d):
        if d <= 0 or rng.random() < 0.15:
            k = rng.randrange(4)
            if env and k == 0:
                return Var(rng.choice(env))
            if k == 1:
                return rng.choice((TRUE, FALSE))
            return numeral(rng.randint(0, max_numeral))
        k = rng.randrange(9)
        if k == 0:
            return Succ(go(env, d - 1))
        if k == 1:
            return Pred(go(env, d - 1))
        if k == 2:
            return IsZero(go(env, d - 1))
        if k == 3:
            return If(go(env, d - 1), go(env, d - 1), go(env, d - 1))
        if k in (4, 5):
            x = fresh("x")
            return App(Abs(x, ty(1), go(env + [x], d - 1)), go(env, d - 1))
        if k == 6:
            return App(go(env, d - 1), go(env, d - 1))
        if k == 7:
            x = fresh("x")
            return Abs(x, ty(1), go(env + [x], d - 1))
        f, x = fresh("f"), fresh("x")
        dom, cod = ty(0), ty(0)
        fix = Fix(f, Arrow(dom, cod), Abs(x, dom, go(env + [f, x], d - 1)))
        return App(fix, go(env, d - 1))

    return go([], depth)


def pcf_essence_sample(cfg: GenConfig, rng: random.Random) -> Expr:
    """The essence of a generated well-typed term: a well-typed PCFv term."""
    m, _ = gen_well_typed(cfg, rng)
    return essence_expr(m)

