"""The pattern algebra: triple patterns, constraints, and the pattern AST.

A pattern is a finite tree built from triple patterns with UNION, AND, OPT,
and FILTER, plus a SELECT projection node kept as a flagged extension so the
core analyses can insist on its absence.  Filter conditions are either one of
the six atomic constraint forms or a boolean combination of atoms awaiting
normalization.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

from .errors import InvalidPosition
from .terms import Constant, Iri, Literal, Scheme, Term, Variable, is_constant

#: Variables with this prefix are reserved for generated fresh names.
RESERVED_VAR_PREFIX = "_g"
_RESERVED_RE = re.compile(r"_g(\d+)$")


@dataclass(frozen=True, slots=True)
class TriplePattern:
    """A triple pattern; blank nodes are excluded (pre-replaced by variables)."""

    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self):
        for position, term in (("subject", self.subject), ("predicate", self.predicate), ("object", self.object)):
            if not isinstance(term, (Iri, Literal, Variable)):
                raise ValueError(f"triple pattern {position} must be an IRI, literal, or variable: {term!r}")
        if isinstance(self.predicate, Literal):
            raise ValueError("triple pattern predicate must not be a literal")

    def terms(self) -> tuple[Term, Term, Term]:
        return (self.subject, self.predicate, self.object)

    def variables(self) -> Scheme:
        return frozenset(t for t in self.terms() if isinstance(t, Variable))


# --- atomic constraints (the six forms) -------------------------------------

@dataclass(frozen=True, slots=True)
class Bound:
    var: Variable


@dataclass(frozen=True, slots=True)
class NegBound:
    var: Variable


@dataclass(frozen=True, slots=True)
class Eq:
    left: Variable
    right: Variable


@dataclass(frozen=True, slots=True)
class Neq:
    left: Variable
    right: Variable

    def __post_init__(self):
        if self.left == self.right:
            raise ValueError("nonequality requires two distinct variables")


@dataclass(frozen=True, slots=True)
class EqC:
    var: Variable
    constant: Constant

    def __post_init__(self):
        if not is_constant(self.constant):
            raise ValueError(f"constraint constant must be an IRI or literal: {self.constant!r}")


@dataclass(frozen=True, slots=True)
class NeqC:
    var: Variable
    constant: Constant

    def __post_init__(self):
        if not is_constant(self.constant):
            raise ValueError(f"constraint constant must be an IRI or literal: {self.constant!r}")


Constraint = Bound | NegBound | Eq | Neq | EqC | NeqC
CONSTRAINT_TYPES = (Bound, NegBound, Eq, Neq, EqC, NeqC)


# --- composite filter conditions (pre-normalization surface forms) ----------

@dataclass(frozen=True, slots=True)
class Opaque:
    """A builtin call we do not interpret, with the variables it mentions."""

    text: str
    mentions: Scheme


@dataclass(frozen=True, slots=True)
class NotExpr:
    operand: "FilterCondition"


@dataclass(frozen=True, slots=True)
class AndExpr:
    left: "FilterCondition"
    right: "FilterCondition"


@dataclass(frozen=True, slots=True)
class OrExpr:
    left: "FilterCondition"
    right: "FilterCondition"


FilterCondition = Constraint | Opaque | NotExpr | AndExpr | OrExpr


def is_atomic(condition: FilterCondition) -> bool:
    return isinstance(condition, CONSTRAINT_TYPES)


def condition_vars(condition: FilterCondition) -> Scheme:
    """All variables mentioned by a filter condition, atomic or composite."""
    if isinstance(condition, (Bound, NegBound)):
        return frozenset((condition.var,))
    if isinstance(condition, (Eq, Neq)):
        return frozenset((condition.left, condition.right))
    if isinstance(condition, (EqC, NeqC)):
        return frozenset((condition.var,))
    if isinstance(condition, Opaque):
        return condition.mentions
    if isinstance(condition, NotExpr):
        return condition_vars(condition.operand)
    return condition_vars(condition.left) | condition_vars(condition.right)


# --- the pattern AST ---------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Union:
    left: "Pattern"
    right: "Pattern"


@dataclass(frozen=True, slots=True)
class And:
    left: "Pattern"
    right: "Pattern"


@dataclass(frozen=True, slots=True)
class Opt:
    left: "Pattern"
    right: "Pattern"


@dataclass(frozen=True, slots=True)
class Filter:
    pattern: "Pattern"
    condition: FilterCondition


@dataclass(frozen=True, slots=True)
class Select:
    """Projection extension node; core analyses require its prior elimination."""

    scheme: Scheme
    pattern: "Pattern"


Pattern = TriplePattern | Union | And | Opt | Filter | Select
BINARY_TYPES = (Union, And, Opt)

#: A tree position: a path of child indices from the root (0 = left/only child).
Position = tuple


def children(pattern: Pattern) -> tuple[Pattern, ...]:
    if isinstance(pattern, BINARY_TYPES):
        return (pattern.left, pattern.right)
    if isinstance(pattern, Filter):
        return (pattern.pattern,)
    if isinstance(pattern, Select):
        return (pattern.pattern,)
    return ()


def iter_subpatterns(pattern: Pattern) -> Iterator[Pattern]:
    """Pre-order traversal of all subpattern occurrences."""
    stack = [pattern]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def iter_positions(pattern: Pattern) -> Iterator[tuple[Position, Pattern]]:
    stack: list[tuple[Position, Pattern]] = [((), pattern)]
    while stack:
        pos, node = stack.pop()
        yield pos, node
        for i, child in reversed(list(enumerate(children(node)))):
            stack.append((pos + (i,), child))


def node_at(pattern: Pattern, position: Position) -> Pattern:
    node = pattern
    for index in position:
        kids = children(node)
        if index >= len(kids):
            raise InvalidPosition(f"no child {index} at {position}")
        node = kids[index]
    return node


def iter_triple_patterns(pattern: Pattern) -> Iterator[TriplePattern]:
    for node in iter_subpatterns(pattern):
        if isinstance(node, TriplePattern):
            yield node


def iter_filter_conditions(pattern: Pattern) -> Iterator[FilterCondition]:
    for node in iter_subpatterns(pattern):
        if isinstance(node, Filter):
            yield node.condition


def vars_of(pattern: Pattern) -> Scheme:
    """All variables occurring in triple patterns, filters, and SELECT schemes."""
    acc: set[Variable] = set()
    for node in iter_subpatterns(pattern):
        if isinstance(node, TriplePattern):
            acc.update(node.variables())
        elif isinstance(node, Filter):
            acc.update(condition_vars(node.condition))
        elif isinstance(node, Select):
            acc.update(node.scheme)
    return frozenset(acc)


def constants_of(pattern: Pattern) -> frozenset:
    """All constants occurring in triple patterns or filter conditions."""
    acc: set[Constant] = set()

    def from_condition(condition: FilterCondition):
        if isinstance(condition, (EqC, NeqC)):
            acc.add(condition.constant)
        elif isinstance(condition, NotExpr):
            from_condition(condition.operand)
        elif isinstance(condition, (AndExpr, OrExpr)):
            from_condition(condition.left)
            from_condition(condition.right)

    for node in iter_subpatterns(pattern):
        if isinstance(node, TriplePattern):
            acc.update(t for t in node.terms() if is_constant(t))
        elif isinstance(node, Filter):
            from_condition(node.condition)
    return frozenset(acc)


def neq_constants(pattern: Pattern) -> frozenset:
    """Constants appearing in constant-nonequality filter conditions."""
    return frozenset(
        c.constant for c in iter_filter_conditions(pattern) if isinstance(c, NeqC)
    )


def has_complex_filters(pattern: Pattern) -> bool:
    return any(not is_atomic(c) for c in iter_filter_conditions(pattern))


def contains_node(pattern: Pattern, node_type) -> bool:
    return any(isinstance(node, node_type) for node in iter_subpatterns(pattern))


def pattern_size(pattern: Pattern) -> int:
    """Number of nodes in the syntax tree (triples count as one node)."""
    return sum(1 for _ in iter_subpatterns(pattern))


def rename_condition(condition: FilterCondition, renaming: dict[Variable, Variable]) -> FilterCondition:
    def r(v: Variable) -> Variable:
        return renaming.get(v, v)

    if isinstance(condition, Bound):
        return Bound(r(condition.var))
    if isinstance(condition, NegBound):
        return NegBound(r(condition.var))
    if isinstance(condition, Eq):
        return Eq(r(condition.left), r(condition.right))
    if isinstance(condition, Neq):
        return Neq(r(condition.left), r(condition.right))
    if isinstance(condition, EqC):
        return EqC(r(condition.var), condition.constant)
    if isinstance(condition, NeqC):
        return NeqC(r(condition.var), condition.constant)
    if isinstance(condition, Opaque):
        return Opaque(condition.text, frozenset(r(v) for v in condition.mentions))
    if isinstance(condition, NotExpr):
        return NotExpr(rename_condition(condition.operand, renaming))
    if isinstance(condition, AndExpr):
        return AndExpr(rename_condition(condition.left, renaming), rename_condition(condition.right, renaming))
    return OrExpr(rename_condition(condition.left, renaming), rename_condition(condition.right, renaming))


def rename_vars(pattern: Pattern, renaming: dict[Variable, Variable]) -> Pattern:
    """Apply a variable renaming throughout a pattern."""

    def term(t: Term) -> Term:
        return renaming.get(t, t) if isinstance(t, Variable) else t

    if isinstance(pattern, TriplePattern):
        return TriplePattern(term(pattern.subject), term(pattern.predicate), term(pattern.object))
    if isinstance(pattern, Union):
        return Union(rename_vars(pattern.left, renaming), rename_vars(pattern.right, renaming))
    if isinstance(pattern, And):
        return And(rename_vars(pattern.left, renaming), rename_vars(pattern.right, renaming))
    if isinstance(pattern, Opt):
        return Opt(rename_vars(pattern.left, renaming), rename_vars(pattern.right, renaming))
    if isinstance(pattern, Filter):
        return Filter(rename_vars(pattern.pattern, renaming), rename_condition(pattern.condition, renaming))
    return Select(frozenset(renaming.get(v, v) for v in pattern.scheme), rename_vars(pattern.pattern, renaming))


def is_reserved_name(name: str) -> bool:
    return _RESERVED_RE.fullmatch(name) is not None


class FreshVars:
    """Deterministic fresh-variable allocator with the reserved ``_g<N>`` prefix.

    The counter starts past the largest reserved index already present in the
    seed patterns, so repeated rewrites never collide.
    """

    def __init__(self, *patterns: Pattern):
        start = 0
        for pattern in patterns:
            for var in vars_of(pattern):
                match = _RESERVED_RE.fullmatch(var.name)
                if match:
                    start = max(start, int(match.group(1)))
        self._next = start + 1

    def take(self) -> Variable:
        var = Variable(f"{RESERVED_VAR_PREFIX}{self._next}")
        self._next += 1
        return var
