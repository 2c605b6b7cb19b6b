import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import P, T, seeds
from deltah.essence import essence_expr
from deltah.harness import properties
from deltah.harness.corpus import SOURCES, example_corpus
from deltah.harness.generate import (
    GenConfig,
    case_rng,
    gen_pcf,
    gen_well_typed,
    has_wedge_cast,
    pool_oracle,
    refinement_pool,
)
from deltah.harness.oracle import derivations, oracle_step
from deltah.harness.properties import (
    Case,
    Outcome,
    check_cases,
    check_property,
    replay_counterexample,
    satisfies,
)
from deltah.harness.shrink import one_step_smaller, shrink
from deltah.pcfv import is_pcf_expr
from deltah.syntax import Pair, Pred, alpha_eq, is_closed, numeral, size, subterms
from deltah.typecheck import infer_compile


# -- generation ---------------------------------------------------------


def test_config_validation():
    with pytest.raises(ValueError):
        GenConfig(max_depth=0)
    with pytest.raises(ValueError):
        GenConfig(wedge_prob=1.5)
    with pytest.raises(ValueError):
        GenConfig(max_size=0)


@given(seeds, st.sampled_from(["any", "refinement", "wedge-refinement"]))
def test_generated_terms_have_their_type(seed, goal):
    m, t = gen_well_typed(GenConfig(), case_rng(seed, 0), goal=goal)
    assert is_closed(m)
    assert alpha_eq(infer_compile((), m), t)
    for s in subterms(m):
        if isinstance(s, Pair):
            assert alpha_eq(essence_expr(s.left), essence_expr(s.right))


def test_generation_is_reproducible():
    a = gen_well_typed(GenConfig(), case_rng(3, 9))
    b = gen_well_typed(GenConfig(), case_rng(3, 9))
    assert a == b


def test_generation_respects_the_size_bound():
    cfg = GenConfig(max_size=80)
    for i in range(50):
        m, _ = gen_well_typed(cfg, case_rng(0, i))
        assert size(m) <= 80


def test_wedge_casts_are_common():
    cfg = GenConfig()
    assert cfg.max_depth >= 4
    hits = sum(has_wedge_cast(gen_well_typed(cfg, case_rng(0, i))[0]) for i in range(1_000))
    assert hits >= 100


def test_refinement_pool_oracle_matches_evaluation():
    from deltah.pcfv import pcf_eval
    from deltah.syntax import TRUE, subst

    nat_pool, bool_pool = refinement_pool(6)
    for entry in nat_pool:
        holds = pool_oracle(entry.type)
        for n in range(6):
            pred = essence_expr(subst(entry.type.pred, entry.type.var, numeral(n)))
            assert (pcf_eval(pred).term == TRUE) == holds(n)


@given(seeds)
def test_pcf_generator_stays_in_pcf(seed):
    m = gen_pcf(random.Random(seed))
    assert is_pcf_expr(m) and is_closed(m)


# -- oracle -------------------------------------------------------------


def test_oracle_names_rules():
    assert derivations(P("pred 0")) == [("PCF-Pred-Z", P("0"))]
    assert [r for r, _ in derivations(P("succ ((fun x:nat. x) 0)"))] == ["PCF-Beta"]
    assert oracle_step(P("0")) is None


# -- shrinking ----------------------------------------------------------


def test_shrink_examples():
    m = P("succ (pred (1 : nat => nz))")
    assert shrink(m, lambda t: any(isinstance(s, Pred) for s in subterms(t))) == P("pred 0")
    assert shrink(numeral(5), lambda t: size(t) >= 3) == numeral(2)


def test_candidates_are_smaller():
    m = P(SOURCES["succ-pair"])
    assert all(size(c) < size(m) for c in one_step_smaller(m))


@given(seeds, st.integers(min_value=1, max_value=4))
def test_shrink_contract_on_synthetic_failures(seed, k):
    m, _ = gen_well_typed(GenConfig(), case_rng(seed, 1))

    # a synthetic oracle: "fails" while the term keeps at least k pairs or casts
    def fails(t):
        return sum(1 for s in subterms(t) if type(s).__name__ in ("Pair", "Cast")) >= k

    if not fails(m):
        return
    small = shrink(m, fails)
    assert fails(small)
    assert size(small) <= size(m)
    assert alpha_eq(shrink(small, fails), small)


# -- property drivers ---------------------------------------------------


def test_value_inversion_example():
    case = Case("zero", P("(0 : nat => {x:nat | iszero x})"), T("{x:nat | iszero x}"))
    assert properties.check_case("value-inversion", case, 500).status == "pass"


def test_intersection_inversion_example():
    t = T("{x:nat | evenp x} /\\ {x:nat | gt x 1}")
    m = P("<(2 : nat => {x:nat | evenp x}), (2 : nat => {x:nat | gt x 1})>")
    assert alpha_eq(infer_compile((), m), t)
    assert properties.check_case("intersection-inversion", Case("pair", m, t), 2_000).status == "pass"
    assert satisfies(P("<2, 2>"), t, 500)[0] == "pass"
    assert satisfies(P("<2, 1>"), t, 500)[0] == "fail"
    assert satisfies(P("2"), t, 500)[0] == "fail"


def test_inversion_treats_blame_only_runs_as_passing():
    m = P("(1 : nat => {x:nat | iszero x})")
    assert properties.check_case("value-inversion", Case("b", m, T("{x:nat | iszero x}")), 500).status == "pass"


@pytest.mark.parametrize("name", properties.PROPERTIES)
def test_worked_examples_pass_every_property(name):
    report = check_cases(name, properties.example_cases(name), fuel=2_000)
    assert report.failed == 0


@pytest.mark.parametrize("name", properties.PROPERTIES)
def test_small_runs_are_clean(name):
    report = check_property(name, GenConfig(seed=1), cases=15, fuel=1_000)
    assert report.ok and report.cases == 15 + len(properties.example_cases(name))


def test_reports_are_reproducible():
    a = check_property("progress", GenConfig(seed=4), cases=20, fuel=500)
    b = check_property("progress", GenConfig(seed=4), cases=20, fuel=500)
    assert a.dumps() == b.dumps()


def test_parallel_runs_match_serial_runs():
    a = check_property("essence-inv", GenConfig(seed=2), cases=16, fuel=500, jobs=1)
    b = check_property("essence-inv", GenConfig(seed=2), cases=16, fuel=500, jobs=2)
    assert a.dumps() == b.dumps()


def test_unknown_property_is_rejected():
    with pytest.raises(ValueError):
        check_property("subsumption", cases=1)


def test_counterexamples_are_shrunk_and_replay(monkeypatch):
    # inject a bogus property that fails on any state containing a
    # checking redex reached along the first path
    from deltah.semantics import First, run_path

    def fake(case, fuel, seed):
        labels = ()
        for lab, c in run_path(case.term, First(), fuel):
            labels += (str(lab),)
            if lab.rule == "RC-Nat":
                return Outcome("fail", len(labels), labels, "cast reached")
        return Outcome("pass")

    monkeypatch.setitem(properties.CHECKS, "progress", fake)
    m = P("succ (if iszero 0 then (1 : nat => nat) else 2)")
    report = check_cases("progress", [Case("bad", m, T("nat"))], fuel=100)
    assert report.failed == 1
    cex = report.counterexample
    assert size(P(cex["term"])) < size(m)
    assert cex["trace"] and cex["trace"][-1].startswith("RC-Nat")
    assert replay_counterexample("progress", cex, 100)
    assert {"property", "cases", "passed", "unknown", "counterexample"} <= set(report.to_json())


def test_example_corpus_types():
    by_name = {e.name: e for e in example_corpus()}
    assert alpha_eq(by_name["id-pair"].type, T("(even -> even) /\\ (odd -> odd)"))
    assert alpha_eq(by_name["succ-pair"].type, T("(odd -> even) /\\ (even -> odd)"))
