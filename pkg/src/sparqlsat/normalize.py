"""Lowering of composite filter conditions to atomic constraints.

Negation is pushed to the atoms (`!bound` flips to the negated bound check,
`!(?x=?y)` to `?x!=?y`, and conversely; the three-valued error semantics makes
these flips exact), the result is expanded to disjunctive normal form, each
disjunct becomes a UNION branch, and each conjunct a chained FILTER.
"""

from __future__ import annotations

from .errors import NormalizationBlowup, UnsupportedOpaquePredicate
from .patterns import (
    And,
    AndExpr,
    Bound,
    Constraint,
    Eq,
    EqC,
    Filter,
    FilterCondition,
    Neq,
    NeqC,
    NegBound,
    NotExpr,
    Opaque,
    Opt,
    OrExpr,
    Pattern,
    Select,
    TriplePattern,
    Union,
    is_atomic,
)

DEFAULT_DNF_CAP = 64


def normalize_filters(
    pattern: Pattern,
    *,
    builtins_as_bound: bool = False,
    dnf_cap: int = DEFAULT_DNF_CAP,
) -> Pattern:
    """Rewrite every composite filter into atomic FILTER chains under UNIONs.

    Opaque builtin calls are only accepted when `builtins_as_bound` is set, in
    which case a call stands for "all mentioned variables are bound"; this is
    an analysis approximation, not a semantics-preserving step.
    """
    if isinstance(pattern, TriplePattern):
        return pattern
    if isinstance(pattern, (Union, And, Opt)):
        return type(pattern)(
            normalize_filters(pattern.left, builtins_as_bound=builtins_as_bound, dnf_cap=dnf_cap),
            normalize_filters(pattern.right, builtins_as_bound=builtins_as_bound, dnf_cap=dnf_cap),
        )
    if isinstance(pattern, Select):
        return Select(
            pattern.scheme,
            normalize_filters(pattern.pattern, builtins_as_bound=builtins_as_bound, dnf_cap=dnf_cap),
        )
    sub = normalize_filters(pattern.pattern, builtins_as_bound=builtins_as_bound, dnf_cap=dnf_cap)
    if is_atomic(pattern.condition):
        return Filter(sub, pattern.condition)
    disjuncts = _to_dnf(pattern.condition, builtins_as_bound, dnf_cap)
    branches = []
    for conjunct in disjuncts:
        branch = sub
        for atom in conjunct:
            branch = Filter(branch, atom)
        branches.append(branch)
    # fold balanced, so large disjunctions do not produce towers of unions
    while len(branches) > 1:
        branches = [
            Union(branches[i], branches[i + 1]) if i + 1 < len(branches) else branches[i]
            for i in range(0, len(branches), 2)
        ]
    return branches[0]


def _negate_atom(atom: Constraint | Opaque) -> list[Constraint] | Opaque:
    if isinstance(atom, Bound):
        return [NegBound(atom.var)]
    if isinstance(atom, NegBound):
        return [Bound(atom.var)]
    if isinstance(atom, Eq):
        if atom.left == atom.right:
            # !(?x=?x) is never satisfied; the bound/!bound pair encodes
            # that single always-false atom.
            return [Bound(atom.left), NegBound(atom.left)]
        return [Neq(atom.left, atom.right)]
    if isinstance(atom, Neq):
        return [Eq(atom.left, atom.right)]
    if isinstance(atom, EqC):
        return [NeqC(atom.var, atom.constant)]
    if isinstance(atom, NeqC):
        return [EqC(atom.var, atom.constant)]
    # A negated builtin call still demands its arguments bound to come out
    # true, so under builtin-as-bound both polarities lower the same way.
    return atom


def _to_dnf(condition: FilterCondition, builtins_as_bound: bool, cap: int) -> list[list[Constraint]]:
    def lower_atom(atom: Constraint | Opaque) -> list[Constraint]:
        if isinstance(atom, Opaque):
            if not builtins_as_bound:
                raise UnsupportedOpaquePredicate(
                    f"opaque builtin call in filter: {atom.text!r}"
                )
            return [Bound(v) for v in sorted(atom.mentions, key=lambda v: v.name)]
        return [atom]

    def rec(expr: FilterCondition, negated: bool) -> list[list[Constraint]]:
        if isinstance(expr, NotExpr):
            return rec(expr.operand, not negated)
        if isinstance(expr, AndExpr):
            left, right = (expr.left, expr.right)
            if negated:
                return _or(rec(left, True), rec(right, True), cap)
            return _and(rec(left, False), rec(right, False), cap)
        if isinstance(expr, OrExpr):
            left, right = (expr.left, expr.right)
            if negated:
                return _and(rec(left, True), rec(right, True), cap)
            return _or(rec(left, False), rec(right, False), cap)
        if negated:
            flipped = _negate_atom(expr)
            if isinstance(flipped, Opaque):
                return [lower_atom(flipped)]
            return [[a for atom in flipped for a in lower_atom(atom)]]
        return [lower_atom(expr)]

    return [_dedup(c) for c in rec(condition, False)]


def _or(left: list[list[Constraint]], right: list[list[Constraint]], cap: int) -> list[list[Constraint]]:
    if len(left) + len(right) > cap:
        raise NormalizationBlowup(f"DNF exceeds {cap} disjuncts")
    return left + right


def _and(left: list[list[Constraint]], right: list[list[Constraint]], cap: int) -> list[list[Constraint]]:
    if len(left) * len(right) > cap:
        raise NormalizationBlowup(f"DNF exceeds {cap} disjuncts")
    return [l + r for l in left for r in right]


def _dedup(conjunct: list[Constraint]) -> list[Constraint]:
    seen = []
    for atom in conjunct:
        if atom not in seen:
            seen.append(atom)
    return seen
