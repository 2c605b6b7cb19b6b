"""Greedy, deterministic minimization of failing terms."""

from __future__ import annotations

from typing import Callable, Iterator

from ..syntax import Expr, Node, size


def _rebuild(t: Node, i: int, child) -> Node:
    kids = list(t.children())
    kids[i] = child
    return type(t)(*kids)


def one_step_smaller(t: Expr) -> Iterator[Expr]:
    """Every term obtained by replacing one expression node by one of its
    expression children.  On numerals this is numeral reduction."""
    kids = t.children()
    for c in kids:
        if isinstance(c, Expr):
            yield c
    for i, c in enumerate(kids):
        if isinstance(c, Expr):
            for r in one_step_smaller(c):
                try:
                    yield _rebuild(t, i, r)
                except ValueError:
                    # e.g. an active check whose subject stopped being a value
                    continue


def shrink(term: Expr, still_fails: Callable[[Expr], bool], max_rounds: int = 200) -> Expr:
    """Repeatedly move to the smallest candidate that still fails.

    The result is a local minimum, so shrinking it again returns it
    unchanged."""
    current = term
    for _ in range(max_rounds):
        seen = set()
        cands = []
        for c in one_step_smaller(current):
            if c not in seen:
                seen.add(c)
                cands.append(c)
        cands.sort(key=size)
        for c in cands:
            if still_fails(c):
                current = c
                break
        else:
            return current
    return current
