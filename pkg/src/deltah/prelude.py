"""Arithmetic prelude written in the core language.

Every ``pred`` is guarded by a cast to ``nz`` so the definitions type check
under T-Pred.  The prelude is type checked when first loaded.
"""

from __future__ import annotations

from functools import lru_cache

from .parser import Defs, parse_program

PRELUDE_SOURCE = r"""
-- argument type demanded by pred
type nz = {x:nat | if iszero x then false else true};

def not = fun b:bool. if b then false else true;

def evenp = mu evenp: nat -> bool. fun x:nat.
  if iszero x then true else not (evenp (pred (x : nat => nz)));
def oddp = fun x:nat. not (evenp x);

type even = {x:nat | evenp x};
type odd = {x:nat | oddp x};

def plus = mu plus: nat -> nat -> nat. fun x:nat. fun y:nat.
  if iszero x then y else succ (plus (pred (x : nat => nz)) y);

-- truncated subtraction
def minus = mu minus: nat -> nat -> nat. fun x:nat. fun y:nat.
  if iszero y then x
  else if iszero x then 0
  else minus (pred (x : nat => nz)) (pred (y : nat => nz));

def gt = mu gt: nat -> nat -> bool. fun x:nat. fun y:nat.
  if iszero x then false
  else if iszero y then true
  else gt (pred (x : nat => nz)) (pred (y : nat => nz));

def eq = mu eq: nat -> nat -> bool. fun x:nat. fun y:nat.
  if iszero x then iszero y
  else if iszero y then false
  else eq (pred (x : nat => nz)) (pred (y : nat => nz));

-- diverges when the divisor is 0
def mod = mu mod: nat -> nat -> nat. fun x:nat. fun n:nat.
  if gt n x then x else mod (minus x n) n;
"""


@lru_cache(maxsize=1)
def prelude() -> Defs:
    from .typecheck import infer_compile, wf_type

    defs = parse_program(PRELUDE_SOURCE).defs
    for t in defs.types.values():
        wf_type(t)
    for e in defs.exprs.values():
        infer_compile((), e)
    return defs


def load_defs(use_prelude: bool = True) -> Defs:
    return prelude() if use_prelude else Defs()
