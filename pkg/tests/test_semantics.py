import pytest
from hypothesis import given

from conftest import P, typed_terms
from deltah.harness.corpus import FAILING_CHECK_RAW, SOURCES
from deltah.parser import parse
from deltah.prelude import prelude
from deltah.syntax import (
    BLAME,
    ZERO,
    Blame,
    Pair,
    alpha_eq,
    is_value,
    numeral,
)
from deltah.semantics import (
    Exhaustive,
    First,
    Random,
    StepLabel,
    check_labels,
    evaluate,
    reduce_c,
    reduce_p,
    replay,
    run_path,
    step_all,
    step_c,
    step_p,
    trace,
)


def R(text):
    return parse(text, prelude(), allow_runtime=True)


def rules(steps):
    return [lab.rule for lab, _ in steps]


def test_reduce_p_examples():
    assert reduce_p(P("pred (succ 0)")) == [(StepLabel("RP-Pred", "p"), ZERO)]
    assert reduce_p(P("pred 0")) == []
    fix = P("mu f:(even -> even) /\\ (odd -> odd). <fun x:even. x, fun x:odd. x>")
    [(lab, n)] = reduce_p(fix)
    assert lab.rule == "RP-Fix" and isinstance(n, Pair)


def test_step_p_examples():
    assert [n for _, n in step_p(P("succ (pred (succ 0))"))] == [P("succ 0")]
    [(lab, n)] = step_p(P("<(fun x:even. x) 2, (fun x:odd. x) 2>"))
    assert lab.rule == "EP-PairS" and n == Pair(numeral(2), numeral(2))
    assert step_p(P("<0, (fun x:nat. x) 0>")) == []


def test_reduce_c_cast_dispatch():
    v = P("fun x:nat. x")
    [(lab, n)] = reduce_c(P("(fun x:nat. x : nat -> nat => (nat -> nat) /\\ (nat -> nat))"))
    assert lab.rule == "RC-WedgeI" and isinstance(n, Pair)
    assert rules(reduce_c(P("(0 : nat => nat)"))) == ["RC-Nat"]
    assert rules(reduce_c(P("(true : bool => bool)"))) == ["RC-Bool"]
    assert rules(reduce_c(P("((0 : nat => even) : even => nat)"))) == []
    assert rules(reduce_c(R("(<| 0 ? even |> : even => nat)"))) == []
    assert rules(reduce_c(P("(fun x:nat. x : nat -> nat => nat -> nat)"))) == ["RC-Delay"]
    assert rules(reduce_c(P("(0 : nat => even)"))) == ["RC-Waiting"]
    assert rules(reduce_c(R("(<0, 0> : even /\\ nat => nat)"))) == ["RC-WedgeN"]
    assert v is not None


def test_forget_takes_priority():
    m = R("(0 : {x:nat | iszero x} => even)")
    assert rules(reduce_c(m)) == ["RC-Forget"]


def test_wedge_application_is_nondeterministic():
    m = R("<| <fun x:even. x, fun x:odd. x> : (even -> even) /\\ (odd -> odd) => nat -> nat |> 2")
    got = reduce_c(m)
    assert rules(got) == ["RC-WedgeL", "RC-WedgeR"]
    assert alpha_eq(got[0][1], R("(proj1 <fun x:even. x, fun x:odd. x> : even -> even => nat -> nat) 2"))


def test_active_checks():
    assert reduce_c(R("<| false ==> 0 : {x:nat | iszero (succ x)} |>")) == [(StepLabel("RC-Fail", "c"), BLAME)]
    [(lab, n)] = reduce_c(R("<| 0 ? {x:nat | iszero x} |>"))
    assert lab.rule == "RC-Activate" and n == R("<| iszero 0 ==> 0 : {x:nat | iszero x} |>")
    [(lab, n)] = step_c(R("<| iszero 0 ==> 0 : {x:nat | iszero x} |>"))
    assert lab.via == ("EC-ActiveP",) and lab.kind == "c"


def test_step_c_examples():
    [(lab, n)] = step_c(R("<| (0 : nat => nat) ? {x:nat | iszero x} |>"))
    assert str(lab) == "RC-Nat/EC-Ctx" and n == R("<| 0 ? {x:nat | iszero x} |>")
    [(lab, n)] = step_c(R("succ <| false ==> 0 : {x:nat | iszero x} |>"))
    assert str(lab) == "RC-Fail/EB-Ctx" and n == BLAME
    got = step_c(R("<(0 : nat => nat), (0 : nat => nat)>"))
    assert [str(lab) for lab, _ in got] == ["RC-Nat/EC-PairL", "RC-Nat/EC-PairR"]
    assert got[0][1] == R("<0, (0 : nat => nat)>")


def test_step_all_examples():
    assert step_all(BLAME) == []
    assert [lab.kind for lab, _ in step_all(P("pred (succ 0)"))] == ["p"]
    [(lab, n)] = step_all(P("(0 : nat => nat)"))
    assert lab.rule == "RC-Nat" and lab.kind == "c" and n == ZERO


def test_evaluate_basics():
    assert evaluate(ZERO, First(), 10).values == [ZERO]
    r = evaluate(P("pred 0"), Exhaustive(), 10)
    assert r.stuck == [P("pred 0")]
    r = evaluate(P("(mu f:nat -> nat. fun x:nat. f (succ x)) 0"), First(), 50)
    assert r.fuel_exhausted and r.budget_exhausted
    with pytest.raises(ValueError):
        evaluate(ZERO, First(), -1)


def test_exhaustive_truncates():
    r = evaluate(P("(mu f:nat -> nat. fun x:nat. f (succ x)) 0"), Exhaustive(max_states=20), 10_000)
    assert r.truncated and not r.values


def test_failing_check_blames_everywhere():
    m = P(FAILING_CHECK_RAW)
    for s in (First(), Random(3), Exhaustive()):
        r = evaluate(m, s)
        assert r.blame and not r.values


def test_failing_check_trace():
    path = trace(P(FAILING_CHECK_RAW), First(), 1_000)
    assert path[-1][1] == BLAME
    assert str(path[-1][0]).startswith("RC-Fail")
    labels = check_labels(path)
    assert [r for r in labels if r in ("RC-Waiting", "RC-Activate", "RC-Fail")] == [
        "RC-Waiting", "RC-Activate", "RC-Fail"]


def test_trace_examples():
    assert run_path(P("(0 : nat => nat)"), First(), 5) == [(StepLabel("RC-Nat", "c"), ZERO)]
    path = run_path(R("<| 0 ? {x:nat | iszero x} |>"), First(), 10)
    assert [lab.rule for lab, _ in path] == ["RC-Activate", "RP-IsZero-T", "RC-Succeed"]
    assert path[-1][1] == ZERO
    with pytest.raises(ValueError):
        run_path(ZERO, Exhaustive())


def test_replay():
    m = P(SOURCES["succ-pair-applied"])
    path = run_path(m, Random(11), 2_000)
    again = replay(m, [str(lab) for lab, _ in path])
    assert [c for _, c in again] == [c for _, c in path]
    with pytest.raises(ValueError):
        replay(m, ["RC-Nope"])


def test_random_is_seeded():
    m = P(SOURCES["delayed-cast"])
    assert run_path(m, Random(5), 2_000) == run_path(m, Random(5), 2_000)


@given(typed_terms())
def test_values_and_blame_are_final(case):
    m, _ = case
    for _, c in run_path(m, Random(1), 300):
        if isinstance(c, Blame) or is_value(c):
            assert step_all(c) == []


@given(typed_terms())
def test_labels_partition(case):
    m, _ = case
    for lab, _ in run_path(m, First(), 300):
        if lab.rule.startswith("RC-"):
            assert lab.kind == "c"
        elif "EC-ActiveP" in lab.via:
            # essential steps inside an active check count as checking
            assert lab.kind == "c"
        else:
            assert lab.kind == "p"
