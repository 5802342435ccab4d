"""Candidate solution schemes: the bound-variable analysis behind the decision.

Every pattern is assigned a finite family of schemes (variable sets), the
candidate domains of its solution mappings.  Every actual solution's domain
is one of the candidates, so an empty family proves unsatisfiability; for the
two decidable constraint fragments the converse holds as well.

The family can grow exponentially in the number of UNION/OPT operators, but
only variables mentioned in filters can ever make it empty, so the pruned
variant intersects every scheme with the filter variables and stays tiny on
real queries.
"""

from __future__ import annotations

from .errors import NotNormalized, PreconditionViolated, SchemeSetBlowup
from .patterns import (
    And,
    Bound,
    Constraint,
    Eq,
    EqC,
    Neq,
    NeqC,
    NegBound,
    Opt,
    Pattern,
    Select,
    TriplePattern,
    Union,
    condition_vars,
    contains_node,
    is_atomic,
    iter_filter_conditions,
)
from .terms import Scheme, Variable

#: Schemes beyond this many raise SchemeSetBlowup; switch to pruned_schemes.
DEFAULT_SCHEME_CAP = 1 << 20

SchemeSet = frozenset  # frozenset[Scheme]


def admits(scheme: Scheme, constraint: Constraint) -> bool:
    """Syntactic entailment: can a mapping with this domain satisfy the constraint?"""
    if isinstance(constraint, (Bound, EqC, NeqC)):
        return constraint.var in scheme
    if isinstance(constraint, (Eq, Neq)):
        return constraint.left in scheme and constraint.right in scheme
    if isinstance(constraint, NegBound):
        return constraint.var not in scheme
    raise NotNormalized(f"not an atomic constraint: {constraint!r}")


def _check_input(pattern: Pattern, caller: str):
    if contains_node(pattern, Select):
        raise PreconditionViolated(f"{caller} requires a SELECT-free pattern")
    if any(not is_atomic(c) for c in iter_filter_conditions(pattern)):
        raise NotNormalized(f"{caller} requires atomic filter constraints")


def candidate_schemes(pattern: Pattern, cap: int = DEFAULT_SCHEME_CAP) -> SchemeSet:
    """The full scheme family of a SELECT-free pattern with atomic filters."""
    _check_input(pattern, "candidate_schemes")

    def rec(node: Pattern) -> frozenset:
        if isinstance(node, TriplePattern):
            return frozenset((node.variables(),))
        if isinstance(node, Union):
            out = rec(node.left) | rec(node.right)
        elif isinstance(node, And):
            out = _products(rec(node.left), rec(node.right), cap)
        elif isinstance(node, Opt):
            left = rec(node.left)
            out = _products(left, rec(node.right), cap) | left
        else:  # Filter
            out = frozenset(s for s in rec(node.pattern) if admits(s, node.condition))
        if len(out) > cap:
            raise SchemeSetBlowup(f"scheme family exceeds {cap} schemes")
        return out

    return rec(pattern)


def _products(left: frozenset, right: frozenset, cap: int) -> frozenset:
    out = set()
    for s1 in left:
        for s2 in right:
            out.add(s1 | s2)
            if len(out) > cap:
                raise SchemeSetBlowup(f"scheme family exceeds {cap} schemes")
    return frozenset(out)


def filter_variables(pattern: Pattern) -> Scheme:
    """All variables mentioned in any filter condition of the pattern."""
    acc: set[Variable] = set()
    for condition in iter_filter_conditions(pattern):
        acc.update(condition_vars(condition))
    return frozenset(acc)


def pruned_schemes(pattern: Pattern) -> SchemeSet:
    """Scheme family intersected with the filter variables at every step.

    The result is the pointwise image of the full family under intersection
    with the filter variables, so it is empty exactly when the full family
    is, while its size is bounded by two to the number of filter variables.
    """
    return scheme_table(pattern)[1][id(pattern)]


def scheme_table(pattern: Pattern) -> tuple[Scheme, dict[int, SchemeSet]]:
    """Pruned scheme family for every subpattern, keyed by node identity.

    Returns the filter-variable set and the per-node table; the table backs
    both the pruned emptiness test and the witness sample construction.
    """
    _check_input(pattern, "pruned_schemes")
    fv = filter_variables(pattern)
    table: dict[int, SchemeSet] = {}

    def rec(node: Pattern) -> frozenset:
        if isinstance(node, TriplePattern):
            out = frozenset((node.variables() & fv,))
        elif isinstance(node, Union):
            out = rec(node.left) | rec(node.right)
        elif isinstance(node, And):
            left = rec(node.left)
            right = rec(node.right)
            out = frozenset(s1 | s2 for s1 in left for s2 in right)
        elif isinstance(node, Opt):
            left = rec(node.left)
            right = rec(node.right)
            out = frozenset(s1 | s2 for s1 in left for s2 in right) | left
        else:  # Filter
            out = frozenset(s for s in rec(node.pattern) if admits(s, node.condition))
        table[id(node)] = out
        return out

    rec(pattern)
    return fv, table


def scheme_sort_key(scheme: Scheme):
    return (len(scheme), tuple(sorted(v.name for v in scheme)))
