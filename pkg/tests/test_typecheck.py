import pytest
from hypothesis import given

from conftest import P, T, typed_terms
from deltah.essence import essence_type
from deltah.parser import parse
from deltah.prelude import prelude
from deltah.syntax import NAT, ZERO, Abs, App, Refine, Succ, Var, Wedge, alpha_eq, is_closed, subst, subterms
from deltah.typecheck import (
    TypeCheckError,
    check_runtime,
    infer_compile,
    is_wf_type,
    reaches,
    wf_ctx,
    wf_type,
)


def rejects(m, rule, kind=None):
    with pytest.raises(TypeCheckError) as err:
        infer_compile((), m)
    assert err.value.rule == rule
    if kind is not None:
        assert err.value.kind == kind
    return err.value


def test_wf_type_examples():
    wf_type(T("(even -> even) /\\ (odd -> odd)"))
    wf_type(T("{x:nat | iszero x}"))
    with pytest.raises(TypeCheckError) as err:
        wf_type(T("(nat -> nat) /\\ (bool -> bool)"))
    assert err.value.kind == "essence-mismatch" and err.value.rule == "W-Wedge"


def test_wf_refinement_needs_boolean_predicate():
    assert not is_wf_type(T("{x:nat | succ x}"))
    assert not is_wf_type(T("{x:nat | y}"))


def test_wf_ctx_examples():
    wf_ctx(())
    wf_ctx((("x", T("{y:nat | true}")),))
    with pytest.raises(TypeCheckError) as err:
        wf_ctx((("x", NAT), ("x", T("bool"))))
    assert err.value.rule == "V-Push"


def test_infer_examples():
    assert alpha_eq(infer_compile((), P("<fun x:even. x, fun x:odd. x>")), T("(even -> even) /\\ (odd -> odd)"))
    assert alpha_eq(infer_compile((), P("(0 : nat => {x:nat | iszero x})")), T("{x:nat | iszero x}"))
    rejects(P("pred 0"), "T-Pred", "pred-needs-nonzero")
    rejects(P("<0, succ 0>"), "T-Pair", "essence-mismatch")


def test_pred_accepts_exactly_the_nonzero_refinement():
    assert infer_compile((), P("pred (1 : nat => nz)")) == NAT
    # alpha-equivalent spelling is accepted
    assert infer_compile((), P("pred (1 : nat => {y:nat | if iszero y then false else true})")) == NAT
    # a semantically equal but different predicate is not
    rejects(P("pred (1 : nat => {y:nat | not (iszero y)})"), "T-Pred")


def test_no_subsumption():
    rejects(P("fun x:odd. succ x"), "T-Succ")
    rejects(P("(fun x:nat. x) (0 : nat => even)"), "T-App")


def test_casts():
    rejects(P("(0 : nat => bool)"), "T-Cast", "essence-mismatch")
    rejects(P("(true : nat => nat)"), "T-Cast", "mismatch")
    m = P("(<fun x:even. x, fun x:odd. x> : (even -> even) /\\ (odd -> odd) => nat -> nat)")
    assert infer_compile((), m) == T("nat -> nat")


def test_fix():
    assert infer_compile((), P("mu f:nat -> nat. fun x:nat. f x")) == T("nat -> nat")
    rejects(P("mu f:nat. 0"), "T-Fix", "not-interface")
    rejects(P("mu f:nat -> nat. f"), "T-Fix", "not-recursion-body")


def test_projections():
    assert infer_compile((), P("proj2 <fun x:even. x, fun x:odd. x>")) == T("odd -> odd")
    rejects(P("proj1 0"), "T-Fst")
    rejects(P("proj2 0"), "T-Snd")


def test_runtime_forms_have_no_compile_rule():
    e = rejects(parse("<| 0 ? {x:nat | iszero x} |>", allow_runtime=True), "T-Waiting")
    assert e.kind == "runtime-form-in-source"
    rejects(parse("<| true ==> 0 : {x:nat | iszero x} |>", allow_runtime=True), "T-Active")
    rejects(parse("<| fun x:nat. x : nat -> nat => nat -> nat |>", allow_runtime=True), "T-Delayed")


def test_binders_shadowing_the_context_are_renamed():
    m = Abs("x", NAT, Abs("x", T("bool"), Var("x")))
    assert infer_compile((), m) == T("nat -> bool -> bool")
    assert infer_compile((("x", NAT),), Abs("x", T("bool"), Var("x"))) == T("bool -> bool")


def test_errors_serialize():
    e = rejects(P("pred 0"), "T-Pred")
    assert e.to_json()["rule"] == "T-Pred"


def test_check_runtime_examples():
    assert check_runtime((), ZERO, T("{x:nat | iszero x}"), 50).yes
    v = check_runtime((), Succ(ZERO), T("{x:nat | iszero x}"), 50)
    assert v.no and v.error.rule == "T-Exact"
    w = parse("<| (0 : nat => nat) ? {x:nat | iszero x} |>", allow_runtime=True)
    assert check_runtime((), w, T("{x:nat | iszero x}"), 50).yes


def test_check_runtime_active_and_delayed():
    a = parse("<| iszero 0 ==> 0 : {x:nat | iszero x} |>", allow_runtime=True)
    assert check_runtime((), a, T("{x:nat | iszero x}"), 50).yes
    # the test must be reachable from the predicate instance
    bad = parse("<| false ==> 0 : {x:nat | iszero x} |>", allow_runtime=True)
    assert check_runtime((), bad, T("{x:nat | iszero x}"), 50).no
    d = parse("<| <fun x:even. x, fun x:odd. x> : (even -> even) /\\ (odd -> odd) => nat -> nat |>",
              prelude(), allow_runtime=True)
    assert check_runtime((), d, T("nat -> nat"), 50).yes


def test_check_runtime_unknown_on_divergence():
    loop = P("(mu f:nat -> bool. fun x:nat. f (succ x)) 0")
    t = T("{x:nat | iszero x}")
    refine = Refine("x", NAT, App(Abs("y", NAT, loop), Var("x")))
    v = check_runtime((), ZERO, refine, 30)
    assert v.unknown and v.reason == "fuel"
    assert check_runtime((), ZERO, t, 30).yes


def test_reaches():
    assert reaches(P("iszero 0"), P("true"), 10).yes
    assert reaches(P("iszero 1"), P("true"), 10).no
    # a cycle is explored completely and refuted
    assert reaches(P("(mu f:nat -> bool. fun x:nat. f x) 0"), P("true"), 20).no
    assert reaches(P("(mu f:nat -> bool. fun x:nat. f (succ x)) 0"), P("true"), 20).unknown


@given(typed_terms())
def test_inferred_types_are_well_formed(case):
    m, t = case
    assert alpha_eq(infer_compile((), m), t)
    assert is_wf_type(t)


@given(typed_terms())
def test_runtime_checking_agrees_with_inference(case):
    m, t = case
    assert not check_runtime((), m, t, 300, max_states=2_000).no
    other = T("bool") if essence_type(t) != T("bool") else NAT
    assert not check_runtime((), m, other, 300, max_states=2_000).yes


@given(typed_terms())
def test_every_accepted_wedge_is_a_refinement_intersection(case):
    m, t = case
    for s in list(subterms(m)) + list(subterms(t)):
        if isinstance(s, Wedge):
            assert essence_type(s.left) == essence_type(s.right)


@given(typed_terms())
def test_substitution(case):
    # every closed beta-redex inside a well-typed term can be contracted
    # without losing its type
    m, _ = case
    for s in subterms(m):
        if isinstance(s, App) and isinstance(s.fun, Abs) and is_closed(s):
            try:
                t = infer_compile((), s)
            except TypeCheckError:
                continue
            body = subst(s.fun.body, s.fun.var, s.arg)
            assert not check_runtime((), body, t, 300, max_states=2_000).no
