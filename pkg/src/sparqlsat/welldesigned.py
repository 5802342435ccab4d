"""Well-designedness checks and the constraint set of an AND/FILTER pattern."""

from __future__ import annotations

from dataclasses import dataclass

from .constraints import SortMap, SortReq
from .errors import NotAFPattern, NotNormalized, NotUnionFree, PreconditionViolated
from .patterns import (
    Constraint,
    Eq,
    EqC,
    Filter,
    Neq,
    NeqC,
    Opt,
    Pattern,
    Position,
    Select,
    TriplePattern,
    Union,
    children,
    condition_vars,
    contains_node,
    is_atomic,
    iter_filter_conditions,
    iter_triple_patterns,
    node_at,
    vars_of,
)
from .terms import Scheme, Variable


@dataclass(frozen=True, slots=True)
class WdViolation:
    """One reason a pattern fails the well-designedness conditions."""

    kind: str  # "filter-unsafe" | "optional-escape"
    position: Position
    variable: Variable

    def describe(self) -> str:
        if self.kind == "filter-unsafe":
            return f"filter at {self.position or 'root'} mentions {self.variable} outside its subpattern"
        return f"{self.variable} from the optional arm at {self.position or 'root'} escapes to the outside"


def outside_vars(pattern: Pattern, position: Position) -> Scheme:
    """Variables of the addressed subpattern that also occur outside of it."""
    occurrence = node_at(pattern, position)  # raises InvalidPosition

    acc: set[Variable] = set()

    def walk(node: Pattern, pos: Position):
        if pos == position:
            return
        if isinstance(node, TriplePattern):
            acc.update(node.variables())
            return
        if isinstance(node, Filter):
            acc.update(condition_vars(node.condition))
        elif isinstance(node, Select):
            acc.update(node.scheme)
        for i, child in enumerate(children(node)):
            walk(child, pos + (i,))

    walk(pattern, ())
    return vars_of(occurrence) & frozenset(acc)


def is_well_designed(pattern: Pattern) -> tuple[bool, list[WdViolation]]:
    """Check the two well-designedness conditions over all occurrences.

    Condition 1: each filter's variables occur in the pattern it applies to.
    Condition 2: a variable of an optional arm that also occurs outside that
    OPT node must occur in the mandatory arm.

    Runs in two linear passes: subtree variable sets bottom-up, then
    outside-occurring variable sets top-down.
    """
    if contains_node(pattern, Union):
        raise NotUnionFree("well-designedness is defined for union-free patterns")
    if contains_node(pattern, Select):
        raise PreconditionViolated("run select_eliminate before the well-designedness check")

    subtree: dict[int, frozenset] = {}

    def collect(node: Pattern) -> frozenset:
        if isinstance(node, TriplePattern):
            out = node.variables()
        elif isinstance(node, Filter):
            out = collect(node.pattern) | condition_vars(node.condition)
        else:
            out = collect(node.left) | collect(node.right)
        subtree[id(node)] = out
        return out

    collect(pattern)
    violations: list[WdViolation] = []

    def check(node: Pattern, pos: Position, outside: frozenset):
        if isinstance(node, TriplePattern):
            return
        if isinstance(node, Filter):
            unsafe = condition_vars(node.condition) - subtree[id(node.pattern)]
            for var in sorted(unsafe, key=lambda v: v.name):
                violations.append(WdViolation("filter-unsafe", pos, var))
            check(node.pattern, pos + (0,), outside | condition_vars(node.condition))
            return
        left_vars = subtree[id(node.left)]
        right_vars = subtree[id(node.right)]
        if isinstance(node, Opt):
            escaped = (right_vars & outside) - left_vars
            for var in sorted(escaped, key=lambda v: v.name):
                violations.append(WdViolation("optional-escape", pos, var))
        check(node.left, pos + (0,), outside | right_vars)
        check(node.right, pos + (1,), outside | left_vars)

    check(pattern, (), frozenset())
    return (not violations, violations)


def extract_constraints(pattern: Pattern) -> frozenset:
    """The value constraints (four comparison kinds) in an AND/FILTER pattern.

    Bound checks are excluded: they influence the scheme analysis only.
    """
    if contains_node(pattern, (Union, Opt, Select)):
        raise NotAFPattern("extract_constraints requires an AND/FILTER pattern")
    out: set[Constraint] = set()
    for condition in iter_filter_conditions(pattern):
        if not is_atomic(condition):
            raise NotNormalized("extract_constraints requires atomic filter constraints")
        if isinstance(condition, (Eq, Neq, EqC, NeqC)):
            out.add(condition)
    return frozenset(out)


def derive_sort_map(pattern: Pattern) -> SortMap:
    """Positional sort requirements: subject/predicate variables need IRIs."""
    sorts: SortMap = {}
    for node in iter_triple_patterns(pattern):
        if isinstance(node.subject, Variable):
            sorts[node.subject] = SortReq.IRI_REQUIRED
        if isinstance(node.predicate, Variable):
            sorts[node.predicate] = SortReq.IRI_REQUIRED
        if isinstance(node.object, Variable):
            sorts.setdefault(node.object, SortReq.ANY_VALUE)
    return sorts
