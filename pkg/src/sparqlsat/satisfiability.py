"""The satisfiability decision core.

For patterns whose filter constraints stay inside one of the two decidable
fragments, satisfiability is exactly nonemptiness of the (pruned) scheme
family, and a SAT verdict comes with a checkable witness graph: instantiate
every triple pattern under a constant mapping (equality fragment) or an
injective mapping into fresh IRIs (nonequality fragment).  Union-free
well-designed patterns outside those fragments reduce to their AND/FILTER
core, where nonempty schemes plus consistent value constraints decide.
Everything else is answered Unknown, never guessed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .constraints import Failure, fresh_iris, solve_constraints
from .errors import (
    NormalizationBlowup,
    NotNormalized,
    NotWellDesigned,
    PreconditionViolated,
    UnsupportedOpaquePredicate,
)
from .evaluator import evaluate
from .normalize import DEFAULT_DNF_CAP, normalize_filters
from .patterns import (
    And,
    Bound,
    Eq,
    EqC,
    Filter,
    Neq,
    NeqC,
    NegBound,
    Opt,
    Pattern,
    TriplePattern,
    Union,
    constants_of,
    is_atomic,
    iter_filter_conditions,
    iter_triple_patterns,
    neq_constants,
    vars_of,
)
from .rewrites import af_reduce, select_eliminate_info, union_free_split, wrong_literal_reduce
from .schemes import candidate_schemes, scheme_sort_key, scheme_table
from .terms import Literal, Mapping, RdfGraph, RdfTriple, Scheme, format_term
from .welldesigned import derive_sort_map, extract_constraints, is_well_designed


class ConstraintKind(enum.Enum):
    BOUND = "bound"
    NEG_BOUND = "!bound"
    EQUALITY = "="
    NONEQUALITY = "!="
    CONSTANT_EQ = "=c"
    CONSTANT_NEQ = "!=c"


_KIND_OF = {
    Bound: ConstraintKind.BOUND,
    NegBound: ConstraintKind.NEG_BOUND,
    Eq: ConstraintKind.EQUALITY,
    Neq: ConstraintKind.NONEQUALITY,
    EqC: ConstraintKind.CONSTANT_EQ,
    NeqC: ConstraintKind.CONSTANT_NEQ,
}

EQUALITY_FRAGMENT = frozenset(
    (ConstraintKind.BOUND, ConstraintKind.EQUALITY, ConstraintKind.CONSTANT_NEQ)
)
NONEQUALITY_FRAGMENT = frozenset(
    (ConstraintKind.BOUND, ConstraintKind.NONEQUALITY, ConstraintKind.CONSTANT_NEQ)
)


class Route(enum.Enum):
    """Which decidable fragment's witness construction applies."""

    EQUALITY = "equality"
    NONEQUALITY = "nonequality"
    BOTH = "both"
    NONE = "none"


@dataclass(frozen=True, slots=True)
class FragmentProfile:
    kinds: frozenset
    route: Route


def classify_fragment(pattern: Pattern) -> FragmentProfile:
    """Collect the constraint kinds used and pick the decidable route, if any."""
    kinds = set()
    for condition in iter_filter_conditions(pattern):
        if not is_atomic(condition):
            raise NotNormalized("classify_fragment requires atomic filter constraints")
        kinds.add(_KIND_OF[type(condition)])
    kinds = frozenset(kinds)
    in_eq = kinds <= EQUALITY_FRAGMENT
    in_neq = kinds <= NONEQUALITY_FRAGMENT
    if in_eq and in_neq:
        route = Route.BOTH
    elif in_eq:
        route = Route.EQUALITY
    elif in_neq:
        route = Route.NONEQUALITY
    else:
        route = Route.NONE
    return FragmentProfile(kinds, route)


# --- verdicts -----------------------------------------------------------------

class UnsatReason(enum.Enum):
    WRONG_LITERAL = "wrong-literal"
    EMPTY_SCHEMES = "empty-schemes"
    INCONSISTENT_CONSTRAINTS = "inconsistent-constraints"
    SORT_CONFLICT = "sort-conflict"


@dataclass(frozen=True, slots=True)
class Satisfiable:
    """SAT verdict: the evaluator returns the sample on the witness graph."""

    witness: RdfGraph
    sample: Mapping


@dataclass(frozen=True, slots=True)
class Unsatisfiable:
    reason: UnsatReason


@dataclass(frozen=True, slots=True)
class Unknown:
    reason: str


Verdict = Satisfiable | Unsatisfiable | Unknown


# --- witness graphs for the decidable fragments --------------------------------

def _instantiate(pattern: Pattern, model: Mapping) -> RdfGraph:
    triples = []
    for tp in iter_triple_patterns(pattern):
        try:
            triples.append(
                RdfTriple(model.apply(tp.subject), model.apply(tp.predicate), model.apply(tp.object))
            )
        except ValueError as exc:
            raise PreconditionViolated(f"triple pattern instantiates outside RDF: {exc}") from exc
    return RdfGraph.of(triples)


def _witness_preconditions(pattern: Pattern, fragment: frozenset, name: str):
    profile = classify_fragment(pattern)
    if not profile.kinds <= fragment:
        raise PreconditionViolated(f"{name} requires constraint kinds within {sorted(k.value for k in fragment)}")
    if not scheme_table(pattern)[1][id(pattern)]:
        raise PreconditionViolated(f"{name} requires a nonempty scheme family")


def _constant_model(pattern: Pattern) -> Mapping:
    constant = next(fresh_iris(constants_of(pattern)))
    return Mapping({v: constant for v in vars_of(pattern)})


def _injective_model(pattern: Pattern) -> Mapping:
    pool = fresh_iris(constants_of(pattern) | neq_constants(pattern))
    return Mapping(
        (v, next(pool)) for v in sorted(vars_of(pattern), key=lambda v: v.name)
    )


def constant_witness(pattern: Pattern) -> tuple[RdfGraph, Mapping]:
    """Witness for the bound/equality/constant-nonequality fragment.

    Maps every variable to one fresh IRI that avoids every constant of the
    pattern (in particular every constant-nonequality constant) and collects
    the instantiated triple patterns.
    """
    _witness_preconditions(pattern, EQUALITY_FRAGMENT, "constant_witness")
    model = _constant_model(pattern)
    return _instantiate(pattern, model), model


def injective_witness(pattern: Pattern) -> tuple[RdfGraph, Mapping]:
    """Witness for the bound/nonequality/constant-nonequality fragment.

    Maps the variables injectively to fresh IRIs disjoint from every constant
    of the pattern (the constant-nonequality constants in particular).
    """
    _witness_preconditions(pattern, NONEQUALITY_FRAGMENT, "injective_witness")
    model = _injective_model(pattern)
    return _instantiate(pattern, model), model


def _realized_solution(pattern: Pattern, model: Mapping, table: dict) -> Mapping:
    """A restriction of the witness model that the evaluator must return.

    Follows the inductive argument behind the witness construction: choose a
    surviving pruned scheme at the root and descend, joining optional arms
    whenever their scheme family is nonempty (their solutions are restrictions
    of the same model, hence always compatible).
    """

    def decompose(left: Pattern, right: Pattern, target: Scheme) -> Scheme | None:
        for s1 in sorted(table[id(left)], key=scheme_sort_key):
            if not s1 <= target:
                continue
            for s2 in sorted(table[id(right)], key=scheme_sort_key):
                if s1 | s2 == target:
                    return realize(left, s1) | realize(right, s2)
        return None

    def realize(node: Pattern, target: Scheme) -> Scheme:
        if isinstance(node, TriplePattern):
            return node.variables()
        if isinstance(node, Union):
            for branch in (node.left, node.right):
                if target in table[id(branch)]:
                    return realize(branch, target)
            raise AssertionError("target scheme lost in union branch")
        if isinstance(node, And):
            joined = decompose(node.left, node.right, target)
            if joined is None:
                raise AssertionError("target scheme not decomposable over conjunction")
            return joined
        if isinstance(node, Opt):
            joined = decompose(node.left, node.right, target)
            if joined is not None:
                return joined
            # Mandatory-side scheme: when the optional arm can produce
            # solutions at all, the model's restriction joins with one.
            right_schemes = table[id(node.right)]
            realized = realize(node.left, target)
            if right_schemes:
                smallest = min(right_schemes, key=scheme_sort_key)
                realized = realized | realize(node.right, smallest)
            return realized
        if isinstance(node, Filter):
            return realize(node.pattern, target)
        raise TypeError(f"not a pattern node: {node!r}")

    root_schemes = table[id(pattern)]
    target = min(root_schemes, key=scheme_sort_key)
    return model.restrict(realize(pattern, target))


# --- the decision pipeline ------------------------------------------------------

@dataclass(frozen=True, slots=True)
class PipelineResult:
    """Everything the batch analyzer wants to report about one pattern."""

    verdict: Verdict
    profile: FragmentProfile | None
    well_designed: bool | None
    wrong_literal_modified: bool
    blocking: str | None


def decide_satisfiability(
    pattern: Pattern,
    *,
    builtins_as_bound: bool = False,
    dnf_cap: int = DEFAULT_DNF_CAP,
) -> Verdict:
    """Decide satisfiability where possible; Unknown names the blocker otherwise."""
    return run_pipeline(
        pattern, builtins_as_bound=builtins_as_bound, dnf_cap=dnf_cap
    ).verdict


def run_pipeline(
    pattern: Pattern,
    *,
    builtins_as_bound: bool = False,
    dnf_cap: int = DEFAULT_DNF_CAP,
) -> PipelineResult:
    core, fresh_introduced = select_eliminate_info(pattern)
    try:
        core = normalize_filters(core, builtins_as_bound=builtins_as_bound, dnf_cap=dnf_cap)
    except UnsupportedOpaquePredicate as exc:
        return PipelineResult(Unknown(str(exc)), None, None, False, "opaque-builtin")
    except NormalizationBlowup as exc:
        return PipelineResult(Unknown(str(exc)), None, None, False, "normalization-blowup")

    reduced = wrong_literal_reduce(core)
    if reduced is None:
        profile = classify_fragment(core)
        return PipelineResult(
            Unsatisfiable(UnsatReason.WRONG_LITERAL), profile, None, True, None
        )
    modified = reduced != core

    profile = classify_fragment(reduced)
    members = union_free_split(reduced)
    well_designed = all(
        member.union_free and is_well_designed(member.pattern)[0] for member in members
    )

    if profile.route is not Route.NONE:
        _, table = scheme_table(reduced)
        if not table[id(reduced)]:
            verdict: Verdict = Unsatisfiable(UnsatReason.EMPTY_SCHEMES)
        else:
            if profile.route in (Route.EQUALITY, Route.BOTH):
                model = _constant_model(reduced)
            else:
                model = _injective_model(reduced)
            witness = _instantiate(reduced, model)
            sample = _realized_solution(reduced, model, table).drop(fresh_introduced)
            verdict = Satisfiable(witness, sample)
        return PipelineResult(verdict, profile, well_designed, modified, None)

    if well_designed:
        reasons = []
        for member in members:
            member_verdict = _decide_well_designed_core(member.pattern)
            if isinstance(member_verdict, Satisfiable):
                sample = member_verdict.sample.drop(fresh_introduced)
                verdict = Satisfiable(member_verdict.witness, sample)
                return PipelineResult(verdict, profile, True, modified, None)
            reasons.append(member_verdict.reason)
        return PipelineResult(
            Unsatisfiable(reasons[0]), profile, True, modified, None
        )

    blocking = _blocking_feature(members)
    kinds = ", ".join(sorted(k.value for k in profile.kinds))
    return PipelineResult(
        Unknown(f"constraint kinds {{{kinds}}} are outside the decidable fragments and {blocking}"),
        profile,
        False,
        modified,
        blocking,
    )


def _blocking_feature(members) -> str:
    for member in members:
        if not member.union_free:
            return "a UNION is nested under another operator"
        ok, violations = is_well_designed(member.pattern)
        if not ok:
            return f"the pattern is not well-designed ({violations[0].describe()})"
    return "the pattern is not well-designed"


def decide_well_designed(pattern: Pattern) -> Verdict:
    """Decide a union-free well-designed pattern via its AND/FILTER core.

    Expects atomic constraints, no SELECT, and no literal-subject triples
    (run the earlier pipeline stages first).
    """
    ok, violations = is_well_designed(pattern)  # also rejects UNION / SELECT
    if not ok:
        raise NotWellDesigned("; ".join(v.describe() for v in violations))
    return _decide_well_designed_core(pattern)


def _decide_well_designed_core(pattern: Pattern) -> Verdict:
    if any(isinstance(tp.subject, Literal) for tp in iter_triple_patterns(pattern)):
        raise PreconditionViolated("run wrong_literal_reduce before the well-designed decision")
    reduced = af_reduce(pattern)
    schemes = candidate_schemes(reduced)
    if not schemes:
        return Unsatisfiable(UnsatReason.EMPTY_SCHEMES)
    (scheme,) = schemes

    constraint_set = extract_constraints(reduced)
    sorts = derive_sort_map(reduced)
    solved = solve_constraints(constraint_set, sorts)
    if solved is Failure.SORT_CLASH:
        return Unsatisfiable(UnsatReason.SORT_CONFLICT)
    if isinstance(solved, Failure):
        return Unsatisfiable(UnsatReason.INCONSISTENT_CONSTRAINTS)

    pool = fresh_iris(constants_of(reduced) | frozenset(t for _, t in solved.items()))
    bindings = dict(solved.items())
    for var in sorted(scheme - solved.domain, key=lambda v: v.name):
        bindings[var] = next(pool)
    model = Mapping(bindings)

    witness = _instantiate(reduced, model)
    # The optional arms of a well-designed pattern only extend solutions of
    # its AND/FILTER core, so the model's core solution reappears extended.
    solutions = evaluate(pattern, witness)
    extensions = [m for m in solutions if m.extends(model)]
    if not extensions:
        raise AssertionError("witness graph lost the core solution")
    sample = min(extensions, key=_mapping_sort_key)
    return Satisfiable(witness, sample)


def _mapping_sort_key(mapping: Mapping):
    return (len(mapping), tuple((v.name, format_term(t)) for v, t in mapping.items()))
