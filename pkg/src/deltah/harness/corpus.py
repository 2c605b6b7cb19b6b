"""Hand-written example programs: the motivating examples and their
well-typed variants, shared by the property runs and the acceptance tests."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from ..parser import parse
from ..prelude import prelude
from ..typecheck import infer_compile

SUCC_PAIR = (
    "<fun x:odd. (succ (x : odd => nat) : nat => even),"
    " fun x:even. (succ (x : even => nat) : nat => odd)>"
)
ID_PAIR = "<fun x:even. x, fun x:odd. x>"
WEDGE_FUN = "<fun x:even. (x : even => nat), fun x:odd. (x : odd => nat)>"

SOURCES = {
    "id-pair": ID_PAIR,
    "succ-pair": SUCC_PAIR,
    "succ-pair-applied": f"({SUCC_PAIR} : (odd -> even) /\\ (even -> odd) => nat -> nat) 3",
    "delayed-cast": (
        "(fun f:nat -> nat. plus (f 0) (f 1))"
        f" ({WEDGE_FUN} : (even -> nat) /\\ (odd -> nat) => nat -> nat)"
    ),
    # the failing check, with the refinement forgotten again so that the
    # argument of plus is well typed
    "failing-check": "plus ((0 : nat => {x:nat | gt x 0}) : {x:nat | gt x 0} => nat) 1",
    "zero-check": "(0 : nat => {x:nat | iszero x})",
    "even-nonzero": "(succ (succ 0) : nat => even /\\ nz)",
    "fix-pair": "proj1 (mu f:(even -> even) /\\ (odd -> odd). <fun x:even. x, fun x:odd. x>) (2 : nat => even)",
    "pred-guarded": "pred (3 : nat => nz)",
}

# not well typed (no subsumption from the refinement to nat) but runnable
FAILING_CHECK_RAW = "plus (0 : nat => {x:nat | gt x 0}) 1"


@dataclass(frozen=True)
class Example:
    name: str
    term: object
    type: object


@lru_cache(maxsize=1)
def example_corpus() -> tuple[Example, ...]:
    defs = prelude()
    out = []
    for name, src in SOURCES.items():
        m = parse(src, defs)
        out.append(Example(name, m, infer_compile((), m)))
    return tuple(out)
