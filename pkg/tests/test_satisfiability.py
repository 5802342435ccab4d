"""The decision core: fragments, witnesses, and both decision routes."""

import random

import pytest

from randgen import (
    EQ_KINDS,
    NEQ_KINDS,
    random_graph,
    random_pattern,
    random_well_designed,
    witness_is_sound,
)
from sparqlsat import (
    Iri,
    Literal,
    Route,
    Satisfiable,
    Unknown,
    Unsatisfiable,
    UnsatReason,
    Variable,
    candidate_schemes,
    classify_fragment,
    constant_witness,
    decide_satisfiability,
    decide_well_designed,
    evaluate,
    injective_witness,
    parse_pattern,
)
from sparqlsat.errors import NotWellDesigned, PreconditionViolated
from sparqlsat.evaluator import format_graph
from sparqlsat.satisfiability import ConstraintKind, _decide_well_designed_core, run_pipeline

x, y = Variable("x"), Variable("y")


# --- fragment classification -----------------------------------------------------

def test_classification_routes():
    def route_of(text):
        return classify_fragment(parse_pattern(text)).route

    assert route_of("(?x p ?y) FILTER bound(?x) FILTER ?x = ?y") is Route.EQUALITY
    assert route_of("(?x p ?y) FILTER ?x != ?y") is Route.NONEQUALITY
    assert route_of("(?x p ?y) FILTER bound(?x) FILTER ?x != c") is Route.BOTH
    assert route_of("(?x p ?y)") is Route.BOTH
    assert route_of("((?x p ?y) FILTER ?x = ?y) FILTER ?x != ?y") is Route.NONE
    assert route_of("(?x p ?y) FILTER !bound(?x)") is Route.NONE
    assert route_of("(?x p ?y) FILTER ?x = c") is Route.NONE


def test_classification_collects_kinds():
    profile = classify_fragment(parse_pattern("((?x p ?y) FILTER bound(?x)) FILTER ?x != c"))
    assert profile.kinds == {ConstraintKind.BOUND, ConstraintKind.CONSTANT_NEQ}


# --- witness constructions ----------------------------------------------------------

def test_constant_witness_reproduces_the_worked_example():
    pattern = parse_pattern("((?x p ?y) FILTER ?x != a) OPT ((?x q ?z) UNION (?x r ?u))")
    witness, model = constant_witness(pattern)
    constant = model[x]
    assert constant != Iri("a")
    assert len(set(model[v] for v in model.domain)) == 1
    rendered = format_graph(witness)
    assert rendered.splitlines() == [
        f"<{constant.name}> <p> <{constant.name}> .",
        f"<{constant.name}> <q> <{constant.name}> .",
        f"<{constant.name}> <r> <{constant.name}> .",
    ]
    assert witness_is_sound(pattern, witness, model)


def test_constant_witness_single_triple():
    witness, model = constant_witness(parse_pattern("(?x p ?y)"))
    assert len(witness) == 1


def test_injective_witness_forces_distinct_values():
    pattern = parse_pattern("(?x p ?y) FILTER ?x != ?y")
    witness, model = injective_witness(pattern)
    assert model[x] != model[y]
    assert witness_is_sound(pattern, witness, model)


def test_injective_witness_avoids_nonequality_constants():
    pattern = parse_pattern("(?x p ?y) FILTER ?x != w")
    _, model = injective_witness(pattern)
    assert Iri("w") not in {model[v] for v in model.domain}


def test_witness_preconditions_are_checked():
    with pytest.raises(PreconditionViolated):
        constant_witness(parse_pattern("(?x p ?y) FILTER ?x != ?y"))  # wrong fragment
    with pytest.raises(PreconditionViolated):
        injective_witness(parse_pattern("(?x p ?y) FILTER ?x = ?y"))  # wrong fragment
    with pytest.raises(PreconditionViolated):
        constant_witness(parse_pattern("(?x p ?y) FILTER bound(?z)"))  # empty schemes


# --- the decision pipeline -----------------------------------------------------------

def test_union_bound_example_is_unsatisfiable():
    verdict = decide_satisfiability(
        parse_pattern("((?x a_ ?y) UNION (?x b_ ?z)) FILTER bound(?y) FILTER bound(?z)")
    )
    assert verdict == Unsatisfiable(UnsatReason.EMPTY_SCHEMES)


def test_literal_subject_is_wrong_literal():
    assert decide_satisfiability(parse_pattern("(42 ?x ?y)")) == Unsatisfiable(
        UnsatReason.WRONG_LITERAL
    )


def test_satisfiable_verdict_carries_checkable_witness():
    pattern = parse_pattern("((?x p ?y) FILTER ?x != a) OPT ((?x q ?z) UNION (?x r ?u))")
    verdict = decide_satisfiability(pattern)
    assert isinstance(verdict, Satisfiable)
    assert len(verdict.witness) == 3
    assert verdict.sample in evaluate(pattern, verdict.witness)


def test_select_queries_get_projected_samples():
    pattern = parse_pattern("SELECT ?x WHERE { ?x <p> ?y FILTER (?y != <a>) }")
    verdict = decide_satisfiability(pattern)
    assert isinstance(verdict, Satisfiable)
    assert verdict.sample.domain <= {x, y}
    assert verdict.sample in evaluate(pattern, verdict.witness)


def test_opaque_filters_without_flag_are_unknown():
    pattern = parse_pattern('(?x p ?y) FILTER regex(?y, "a")')
    verdict = decide_satisfiability(pattern)
    assert isinstance(verdict, Unknown)
    verdict = decide_satisfiability(pattern, builtins_as_bound=True)
    assert isinstance(verdict, Satisfiable)


def test_normalization_blowup_is_reported_as_unknown():
    from sparqlsat.patterns import AndExpr, Bound, Filter, OrExpr

    condition = OrExpr(Bound(x), Bound(y))
    for _ in range(8):
        condition = AndExpr(condition, OrExpr(Bound(x), Bound(y)))
    pattern = Filter(parse_pattern("(?x p ?y)"), condition)
    verdict = decide_satisfiability(pattern, dnf_cap=64)
    assert isinstance(verdict, Unknown)
    assert isinstance(decide_satisfiability(pattern, dnf_cap=1 << 12), Satisfiable)


def test_undecidable_kinds_without_well_designedness_are_unknown():
    pattern = parse_pattern("((?x p ?y) OPT (?y q ?z)) AND ((?z r ?w) FILTER ?z = c)")
    verdict = decide_satisfiability(pattern)
    assert isinstance(verdict, Unknown)
    assert "well-designed" in verdict.reason


def test_nested_union_outside_fragments_is_unknown():
    pattern = parse_pattern("(((?x p ?y) UNION (?x q ?y)) AND (?x r ?z)) FILTER ?x = c")
    verdict = decide_satisfiability(pattern)
    assert isinstance(verdict, Unknown)
    assert "UNION" in verdict.reason


def test_well_designed_route_through_the_pipeline():
    pattern = parse_pattern("((?x p ?y) OPT (?x q ?z)) FILTER ?x = c")
    result = run_pipeline(pattern)
    assert result.profile.route is Route.NONE
    assert result.well_designed is True
    assert isinstance(result.verdict, Satisfiable)
    assert result.verdict.sample in evaluate(pattern, result.verdict.witness)


def test_union_of_well_designed_members():
    pattern = parse_pattern("((?x p ?y) FILTER ?x = c) UNION ((?x q ?y) FILTER ?x = d)")
    verdict = decide_satisfiability(pattern)
    assert isinstance(verdict, Satisfiable)
    assert verdict.sample in evaluate(pattern, verdict.witness)


def test_unsat_union_of_well_designed_members():
    pattern = parse_pattern(
        "(((?x p ?y) FILTER ?x = c) FILTER ?x = d) UNION (((?x q ?y) FILTER ?x = c) FILTER ?x = d)"
    )
    assert decide_satisfiability(pattern) == Unsatisfiable(UnsatReason.INCONSISTENT_CONSTRAINTS)


# --- the well-designed decision --------------------------------------------------------

def test_decide_well_designed_inconsistent_constants():
    pattern = parse_pattern("((?u p ?v) FILTER ?u = a) FILTER ?u = b")
    assert decide_well_designed(pattern) == Unsatisfiable(UnsatReason.INCONSISTENT_CONSTRAINTS)


def test_decide_well_designed_sort_conflict():
    pattern = parse_pattern('((?y p ?z) AND (?x q ?y)) FILTER ?y = "42"')
    assert decide_well_designed(pattern) == Unsatisfiable(UnsatReason.SORT_CONFLICT)


def test_decide_well_designed_literal_on_object_only_variable_is_fine():
    pattern = parse_pattern('(?x p ?y) FILTER ?y = "42"')
    verdict = decide_well_designed(pattern)
    assert isinstance(verdict, Satisfiable)
    assert verdict.sample[y] == Literal("42")


def test_negated_bound_inside_well_designed_is_empty_schemes():
    pattern = parse_pattern("(?x p ?y) FILTER !bound(?y)")
    assert decide_well_designed(pattern) == Unsatisfiable(UnsatReason.EMPTY_SCHEMES)


def test_decide_well_designed_rejects_condition_violations():
    pattern = parse_pattern("((?x p ?y) OPT ((?x q ?z) FILTER ?y = ?z)) FILTER ?x != c")
    with pytest.raises(NotWellDesigned):
        decide_well_designed(pattern)
    # the underlying machinery still decides it, matching its reduction values
    from sparqlsat import af_reduce, extract_constraints

    reduced = af_reduce(pattern)
    assert candidate_schemes(reduced) == frozenset([frozenset([x, y])])
    assert extract_constraints(reduced) == frozenset([type(pattern.condition)(x, Iri("c"))])
    verdict = _decide_well_designed_core(pattern)
    assert isinstance(verdict, Satisfiable)
    assert verdict.sample in evaluate(pattern, verdict.witness)


def test_decide_well_designed_agrees_with_its_reduction():
    rng = random.Random(77)
    checked = 0
    for _ in range(250):
        pattern = random_well_designed(rng, depth=rng.randint(1, 3), negbound_rate=0.05)
        verdict = decide_well_designed(pattern)
        reduced_verdict = _decide_well_designed_core(pattern)
        assert isinstance(verdict, Satisfiable) == isinstance(reduced_verdict, Satisfiable)
        if isinstance(verdict, Satisfiable):
            checked += 1
            assert verdict.sample in evaluate(pattern, verdict.witness)
        else:
            for _ in range(15):
                graph = random_graph(rng, pattern)
                assert not evaluate(pattern, graph)
    assert checked > 50


def test_every_scheme_is_covered_by_some_witness_solution():
    # for each scheme of the family there is a witness solution that restricts
    # the model and covers that scheme, exhaustively per pattern
    rng = random.Random(37)
    checked = 0
    for kinds in (EQ_KINDS, NEQ_KINDS):
        for _ in range(150):
            pattern = random_pattern(rng, depth=rng.randint(0, 4), kinds=kinds)
            family = candidate_schemes(pattern)
            if not family:
                continue
            checked += 1
            route = classify_fragment(pattern).route
            builder = (
                constant_witness if route in (Route.EQUALITY, Route.BOTH) else injective_witness
            )
            witness, model = builder(pattern)
            solutions = evaluate(pattern, witness)
            for scheme in family:
                assert any(
                    model.extends(m) and scheme <= m.domain for m in solutions
                ), (ss.serialize_pattern(pattern), sorted(v.name for v in scheme))
    assert checked > 150


def test_witness_model_restricts_into_every_subpattern():
    # for satisfiable AND/FILTER patterns, the sample restricted to each
    # subpattern's (unique) scheme is a solution of that subpattern
    from sparqlsat import af_reduce
    from sparqlsat.patterns import iter_subpatterns

    rng = random.Random(61)
    checked = 0
    while checked < 150:
        pattern = af_reduce(random_well_designed(rng, depth=rng.randint(1, 3)))
        verdict = _decide_well_designed_core(pattern)
        if not isinstance(verdict, Satisfiable):
            continue
        checked += 1
        for node in iter_subpatterns(pattern):
            (scheme,) = candidate_schemes(node)
            restricted = verdict.sample.restrict(scheme)
            assert restricted in evaluate(node, verdict.witness)


# --- route consistency ------------------------------------------------------------------

def test_both_routes_certify_shared_fragment_patterns():
    rng = random.Random(13)
    certified = 0
    for _ in range(200):
        pattern = random_pattern(rng, depth=rng.randint(0, 4), kinds=("bound", "neqc"))
        if not candidate_schemes(pattern):
            continue
        certified += 1
        for builder in (constant_witness, injective_witness):
            witness, model = builder(pattern)
            assert witness_is_sound(pattern, witness, model)
    assert certified > 60


def test_decidable_routes_match_evaluator_verdicts():
    rng = random.Random(29)
    for kinds in (EQ_KINDS, NEQ_KINDS):
        sat = unsat = 0
        for _ in range(150):
            pattern = random_pattern(rng, depth=rng.randint(0, 4), kinds=kinds)
            verdict = decide_satisfiability(pattern)
            if isinstance(verdict, Satisfiable):
                sat += 1
                assert evaluate(pattern, verdict.witness)
                assert verdict.sample in evaluate(pattern, verdict.witness)
            else:
                unsat += 1
                assert verdict.reason is UnsatReason.EMPTY_SCHEMES
                for _ in range(20):
                    graph = random_graph(rng, pattern)
                    assert not evaluate(pattern, graph)
        assert sat > 30 and unsat > 10
