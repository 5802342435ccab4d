"""Consistency and model construction for (non)equality constraint sets.

Constraint sets here are restricted to the four value-comparing forms
(equality, nonequality, and their constant versions); bound checks belong to
the scheme analysis, not to consistency.  Solving is a union-find pass over
the equalities with one constant annotation per class, followed by clash
checks and deterministic fresh-IRI assignment; positional sort requirements
(a variable standing in subject or predicate position must denote an IRI)
are enforced against literal-forcing constant equalities.
"""

from __future__ import annotations

import enum
from typing import Iterable, Iterator

from .patterns import Constraint, Eq, EqC, Neq, NeqC
from .terms import Constant, Iri, Literal, Mapping, Variable

VALUE_CONSTRAINT_TYPES = (Eq, Neq, EqC, NeqC)


class SortReq(enum.Enum):
    IRI_REQUIRED = "iri-required"
    ANY_VALUE = "any-value"


#: Per-variable sort requirement; missing entries default to ANY_VALUE.
SortMap = dict


class Failure(enum.Enum):
    CONSTANT_CLASH = "constant-clash"
    NEQ_COLLAPSE = "neq-collapse"
    NEQC_CLASH = "neqc-clash"
    SORT_CLASH = "sort-clash"


def fresh_iris(avoid: Iterable[Constant]) -> Iterator[Iri]:
    """Deterministic witness-constant pool, skipping the given constants."""
    taken = set(avoid)
    index = 0
    while True:
        candidate = Iri(f"urn:wit:{index}")
        index += 1
        if candidate not in taken:
            yield candidate


def _canonical(constraints: Iterable[Constraint]) -> list[Constraint]:
    def key(c: Constraint):
        if isinstance(c, Eq):
            return (0, c.left.name, c.right.name, "")
        if isinstance(c, Neq):
            return (1, c.left.name, c.right.name, "")
        if isinstance(c, EqC):
            return (2, c.var.name, "", str(c.constant))
        return (3, c.var.name, "", str(c.constant))

    out = []
    for c in constraints:
        if not isinstance(c, VALUE_CONSTRAINT_TYPES):
            raise ValueError(f"consistency is defined for value constraints only: {c!r}")
        out.append(c)
    return sorted(out, key=key)


class _UnionFind:
    def __init__(self):
        self.parent: dict[Variable, Variable] = {}

    def add(self, var: Variable):
        self.parent.setdefault(var, var)

    def find(self, var: Variable) -> Variable:
        root = var
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[var] != root:  # path compression
            self.parent[var], var = root, self.parent[var]
        return root

    def union(self, a: Variable, b: Variable):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def solve_constraints(
    constraints: Iterable[Constraint],
    sorts: SortMap | None = None,
) -> Mapping | Failure:
    """A total model of the constraint set, or the reason none exists.

    On success the mapping covers every mentioned variable: class constants
    where forced, otherwise distinct fresh IRIs in first-mention order.
    """
    sorts = sorts or {}
    ordered = _canonical(constraints)

    mention_order: list[Variable] = []
    seen: set[Variable] = set()
    uf = _UnionFind()

    def mention(var: Variable):
        uf.add(var)
        if var not in seen:
            seen.add(var)
            mention_order.append(var)

    for c in ordered:
        if isinstance(c, (Eq, Neq)):
            mention(c.left)
            mention(c.right)
        else:
            mention(c.var)
    for c in ordered:
        if isinstance(c, Eq):
            uf.union(c.left, c.right)

    forced: dict[Variable, Constant] = {}
    for c in ordered:
        if isinstance(c, EqC):
            root = uf.find(c.var)
            existing = forced.get(root)
            if existing is not None and existing != c.constant:
                return Failure.CONSTANT_CLASH
            forced[root] = c.constant

    for c in ordered:
        if isinstance(c, Neq):
            ra, rb = uf.find(c.left), uf.find(c.right)
            if ra == rb:
                return Failure.NEQ_COLLAPSE
            ca, cb = forced.get(ra), forced.get(rb)
            if ca is not None and ca == cb:
                return Failure.NEQ_COLLAPSE
    for c in ordered:
        if isinstance(c, NeqC):
            if forced.get(uf.find(c.var)) == c.constant:
                return Failure.NEQC_CLASH

    iri_required = {
        uf.find(v) for v in mention_order if sorts.get(v) == SortReq.IRI_REQUIRED
    }
    for root in iri_required:
        if isinstance(forced.get(root), Literal):
            return Failure.SORT_CLASH

    pool = fresh_iris(c.constant for c in ordered if isinstance(c, (EqC, NeqC)))
    values: dict[Variable, Constant] = {}
    for var in mention_order:
        root = uf.find(var)
        if root not in values:
            values[root] = forced.get(root) or next(pool)
    return Mapping({v: values[uf.find(v)] for v in mention_order})


def consistent(constraints: Iterable[Constraint], sorts: SortMap | None = None) -> bool:
    """True iff some mapping satisfies every constraint (respecting sorts)."""
    return isinstance(solve_constraints(constraints, sorts), Mapping)
