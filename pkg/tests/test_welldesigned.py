"""Well-designedness conditions, outside-variable sets, constraint extraction."""

import random

import pytest

from randgen import random_well_designed
from sparqlsat import (
    EqC,
    Iri,
    NeqC,
    Eq,
    Variable,
    extract_constraints,
    is_well_designed,
    outside_vars,
    parse_pattern,
)
from sparqlsat.errors import InvalidPosition, NotAFPattern, NotUnionFree

x, y, z, w = Variable("x"), Variable("y"), Variable("z"), Variable("w")


def test_simple_optional_is_well_designed():
    ok, violations = is_well_designed(parse_pattern("(?x p ?y) OPT (?x q ?z)"))
    assert ok and not violations


def test_escaping_optional_variable_violates_condition_two():
    pattern = parse_pattern("((?x p ?y) OPT (?y q ?z)) AND (?z r ?w)")
    ok, violations = is_well_designed(pattern)
    assert not ok
    assert any(v.kind == "optional-escape" and v.variable == z for v in violations)


def test_filter_variable_outside_subpattern_violates_condition_one():
    pattern = parse_pattern("((?x p ?y) OPT ((?x q ?z) FILTER ?y = ?z)) FILTER ?x != c")
    ok, violations = is_well_designed(pattern)
    assert not ok
    assert any(v.kind == "filter-unsafe" and v.variable == y for v in violations)


def test_union_is_rejected():
    with pytest.raises(NotUnionFree):
        is_well_designed(parse_pattern("(?x p ?y) UNION (?x q ?y)"))


def test_generated_well_designed_patterns_pass_the_check():
    rng = random.Random(99)
    for _ in range(300):
        pattern = random_well_designed(rng, depth=rng.randint(1, 4), negbound_rate=0.1)
        ok, violations = is_well_designed(pattern)
        assert ok, violations


def test_outside_vars_examples():
    pattern = parse_pattern("((?x p ?y) OPT (?y q ?z)) AND (?z r ?w)")
    assert outside_vars(pattern, (0, 1)) == {y, z}
    assert outside_vars(pattern, ()) == frozenset()
    with pytest.raises(InvalidPosition):
        outside_vars(pattern, (5, 5))


def test_outside_vars_distinguishes_duplicate_subtrees():
    pattern = parse_pattern("(?x p ?y) AND (?x p ?y)")
    # each occurrence sees the other occurrence's variables as outside
    assert outside_vars(pattern, (0,)) == {x, y}
    assert outside_vars(pattern, (1,)) == {x, y}


def test_extract_constraints_keeps_value_kinds_only():
    pattern = parse_pattern("((?x p ?y) FILTER ?x != c) FILTER bound(?y)")
    assert extract_constraints(pattern) == frozenset([NeqC(x, Iri("c"))])


def test_extract_constraints_on_filter_free_pattern():
    assert extract_constraints(parse_pattern("(?x p ?y) AND (?y q ?z)")) == frozenset()


def test_extract_constraints_collects_all_four_kinds():
    pattern = parse_pattern("(((?x p ?y) AND (?y q ?z)) FILTER ?x = ?z) FILTER ?x = c")
    assert extract_constraints(pattern) == frozenset([Eq(x, z), EqC(x, Iri("c"))])


def test_extract_constraints_rejects_non_af_patterns():
    with pytest.raises(NotAFPattern):
        extract_constraints(parse_pattern("(?x p ?y) OPT (?x q ?z)"))
