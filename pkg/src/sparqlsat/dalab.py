"""Executable reduction machinery: relation algebra and hardness generators.

Two families of constructions live here.

The first compiles expressions of the algebra of binary relations with union,
difference, and composition (the DA algebra) into patterns that emulate them,
in three variants distinguished by which constraint kind expresses the
difference operator: a negated bound check, a nonequality/equality pair, or
two constant equalities.  Each compiled pattern reads its input relation off
an RDF graph with one fixed predicate and returns the relation as the values
of the two reserved variables ?x and ?y.

The second turns CNF formulas into choice-cover instances and those into
OPT-free patterns whose only filters are bound checks, reproducing the
hardness pipeline at desk scale so the whole chain can be cross-checked
against brute force.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import BoundTooLarge, EmptyChoiceSet, InvalidConstants, PreconditionViolated, QuerySyntaxError
from .patterns import (
    And,
    Bound,
    Eq,
    EqC,
    Filter,
    Neq,
    NegBound,
    Opt,
    Pattern,
    TriplePattern,
    Union,
    rename_vars,
    vars_of,
)
from .terms import Iri, RdfGraph, RdfTriple, SolutionSet, Variable

#: A finite binary relation over IRIs.
BinaryRelation = frozenset  # frozenset[tuple[Iri, Iri]]

DEFAULT_RELATION_PREDICATE = Iri("r")
RESULT_X = Variable("x")
RESULT_Y = Variable("y")


# --- the algebra ----------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Rel:
    """The single relation symbol."""


@dataclass(frozen=True, slots=True)
class DUnion:
    left: "DAExpr"
    right: "DAExpr"


@dataclass(frozen=True, slots=True)
class DDiff:
    left: "DAExpr"
    right: "DAExpr"


@dataclass(frozen=True, slots=True)
class DComp:
    left: "DAExpr"
    right: "DAExpr"


DAExpr = Rel | DUnion | DDiff | DComp


def da_eval(expr: DAExpr, relation: BinaryRelation) -> BinaryRelation:
    """Evaluate an expression on a finite binary relation."""
    if isinstance(expr, Rel):
        return frozenset(relation)
    left = da_eval(expr.left, relation)
    right = da_eval(expr.right, relation)
    if isinstance(expr, DUnion):
        return left | right
    if isinstance(expr, DDiff):
        return left - right
    by_first: dict = {}
    for y, z in right:
        by_first.setdefault(y, []).append(z)
    return frozenset((x, z) for x, y in left for z in by_first.get(y, ()))


def adom(relation: BinaryRelation) -> frozenset:
    """Active domain: every element occurring in some pair."""
    out = set()
    for x, y in relation:
        out.add(x)
        out.add(y)
    return frozenset(out)


def graph_of_relation(relation: BinaryRelation, predicate: Iri = DEFAULT_RELATION_PREDICATE) -> RdfGraph:
    """One triple per pair, all under the fixed relation predicate."""
    return RdfGraph.of(RdfTriple(x, predicate, y) for x, y in relation)


def result_pairs(solutions: SolutionSet) -> BinaryRelation:
    """Project a solution set to the (?x, ?y) value pairs."""
    return frozenset((m[RESULT_X], m[RESULT_Y]) for m in solutions)


# --- expression surface syntax (for the CLI) ------------------------------------

_DA_TOKEN_RE = re.compile(r"\s*(R|[().|\-])")
_DA_PREC = {"|": 10, "-": 20, ".": 30}


def parse_da(text: str) -> DAExpr:
    """Parse `R`, `|` (union), `-` (difference), `.` (composition), parens."""
    tokens: list[str] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _DA_TOKEN_RE.match(text, pos)
        if match is None:
            raise QuerySyntaxError(f"cannot read {text[pos:].strip()[0]!r}", pos)
        tokens.append(match.group(1))
        pos = match.end()
    tokens.append("$")
    index = 0

    def peek() -> str:
        return tokens[index]

    def advance() -> str:
        nonlocal index
        token = tokens[index]
        index += 1
        return token

    def primary() -> DAExpr:
        token = advance()
        if token == "R":
            return Rel()
        if token == "(":
            inner = expr(0)
            if advance() != ")":
                raise QuerySyntaxError("expected ')'", pos)
            return inner
        raise QuerySyntaxError(f"unexpected {token!r} in relation expression", pos)

    def expr(min_prec: int) -> DAExpr:
        left = primary()
        while peek() in _DA_PREC and _DA_PREC[peek()] >= min_prec:
            op = advance()
            right = expr(_DA_PREC[op] + 1)
            node = {"|": DUnion, "-": DDiff, ".": DComp}[op]
            left = node(left, right)
        return left

    result = expr(0)
    if peek() != "$":
        raise QuerySyntaxError(f"trailing {peek()!r}", pos)
    return result


def da_text(expr: DAExpr) -> str:
    if isinstance(expr, Rel):
        return "R"
    op = {DUnion: "|", DDiff: "-", DComp: "."}[type(expr)]

    def wrap(e: DAExpr) -> str:
        return "R" if isinstance(e, Rel) else f"({da_text(e)})"

    return f"{wrap(expr.left)} {op} {wrap(expr.right)}"


# --- the three difference-emulating compilers ------------------------------------

class _Fresh:
    def __init__(self):
        self.index = 0

    def take(self) -> Variable:
        self.index += 1
        return Variable(f"_g{self.index}")


def _adom_gadget(var: Variable, aux_in: Variable, aux_out: Variable, predicate: Iri) -> Pattern:
    """Binds `var` to any active-domain element of the relation graph."""
    return Union(
        TriplePattern(var, predicate, aux_out),
        TriplePattern(aux_in, predicate, var),
    )


def _compile(expr: DAExpr, fresh: _Fresh, predicate: Iri, diff) -> Pattern:
    if isinstance(expr, Rel):
        return TriplePattern(RESULT_X, predicate, RESULT_Y)
    if isinstance(expr, DUnion):
        return Union(_compile(expr.left, fresh, predicate, diff), _compile(expr.right, fresh, predicate, diff))
    if isinstance(expr, DComp):
        left = _compile(expr.left, fresh, predicate, diff)
        right = _compile(expr.right, fresh, predicate, diff)
        middle = fresh.take()
        return And(
            rename_vars(left, {RESULT_Y: middle}),
            rename_vars(right, {RESULT_X: middle}),
        )
    left = _compile(expr.left, fresh, predicate, diff)
    right = _compile(expr.right, fresh, predicate, diff)
    return diff(left, right, fresh, predicate)


def emulate_negbound(expr: DAExpr, predicate: Iri = DEFAULT_RELATION_PREDICATE) -> Pattern:
    """Difference via an optional probe filtered by a negated bound check."""

    def diff(left: Pattern, right: Pattern, fresh: _Fresh, pred: Iri) -> Pattern:
        probe, probe_obj = fresh.take(), fresh.take()
        return Filter(
            Opt(left, And(right, TriplePattern(probe, pred, probe_obj))),
            NegBound(probe),
        )

    return _compile(expr, _Fresh(), predicate, diff)


def emulate_eqneq(expr: DAExpr, predicate: Iri = DEFAULT_RELATION_PREDICATE) -> Pattern:
    """Difference via a nonequality inside the optional arm refuted by an
    outer equality; faithful on relations with at least two domain elements."""

    def diff(left: Pattern, right: Pattern, fresh: _Fresh, pred: Iri) -> Pattern:
        u, u2, v, v2, w, w2 = (fresh.take() for _ in range(6))
        adom_u = _adom_gadget(u, v, w, pred)
        adom_u2 = _adom_gadget(u2, v2, w2, pred)
        inner = Filter(And(And(right, adom_u), adom_u2), Neq(u, u2))
        return Filter(And(And(Opt(left, inner), adom_u), adom_u2), Eq(u, u2))

    return _compile(expr, _Fresh(), predicate, diff)


def emulate_eqc(
    expr: DAExpr,
    const_a: Iri,
    const_b: Iri,
    predicate: Iri = DEFAULT_RELATION_PREDICATE,
) -> Pattern:
    """Difference via two clashing constant equalities; faithful on relations
    whose active domain contains both constants."""
    if const_a == const_b or const_a == predicate or const_b == predicate:
        raise InvalidConstants(
            "the two constants must be distinct and differ from the relation predicate"
        )

    def diff(left: Pattern, right: Pattern, fresh: _Fresh, pred: Iri) -> Pattern:
        u, v, w = fresh.take(), fresh.take(), fresh.take()
        adom_u = _adom_gadget(u, v, w, pred)
        inner = Filter(And(right, adom_u), EqC(u, const_a))
        return Filter(And(Opt(left, inner), adom_u), EqC(u, const_b))

    return _compile(expr, _Fresh(), predicate, diff)


def two_sat_wrapper(expr: DAExpr, predicate: Iri = DEFAULT_RELATION_PREDICATE) -> Pattern:
    """Satisfiable on some relation graph iff the expression has a model with
    at least two active-domain elements (within the bound searched)."""
    compiled = emulate_eqneq(expr, predicate)
    fresh = _Fresh()
    fresh.index = _max_reserved_index(compiled)
    u, u2, v, v2, w, w2 = (fresh.take() for _ in range(6))
    gadgets = And(_adom_gadget(u, v, w, predicate), _adom_gadget(u2, v2, w2, predicate))
    return And(compiled, Filter(gadgets, Neq(u, u2)))


def ab_sat_wrapper(
    expr: DAExpr,
    const_a: Iri,
    const_b: Iri,
    predicate: Iri = DEFAULT_RELATION_PREDICATE,
) -> Pattern:
    """Satisfiable on some relation graph iff the expression has a model whose
    active domain contains both constants (within the bound searched)."""
    compiled = emulate_eqc(expr, const_a, const_b, predicate)
    fresh = _Fresh()
    fresh.index = _max_reserved_index(compiled)
    u, u2, v, v2, w, w2 = (fresh.take() for _ in range(6))
    gadgets = And(_adom_gadget(u, v, w, predicate), _adom_gadget(u2, v2, w2, predicate))
    return And(compiled, Filter(Filter(gadgets, EqC(u, const_a)), EqC(u2, const_b)))


def _max_reserved_index(pattern: Pattern) -> int:
    best = 0
    for var in vars_of(pattern):
        match = re.fullmatch(r"_g(\d+)", var.name)
        if match:
            best = max(best, int(match.group(1)))
    return best


# --- bounded satisfiability search ------------------------------------------------

MAX_SEARCH_ADOM = 4


def canonical_domain(size: int) -> tuple[Iri, ...]:
    return tuple(Iri(f"d{i + 1}") for i in range(size))


def relations_over(size: int) -> Iterator[BinaryRelation]:
    """All relations over the canonical domain of the given size, in a fixed
    order, whose active domain is exactly that domain."""
    domain = canonical_domain(size)
    pairs = [(a, b) for a in domain for b in domain]
    full = frozenset(domain)
    for mask in range(1 << len(pairs)):
        relation = frozenset(pairs[i] for i in range(len(pairs)) if mask >> i & 1)
        if adom(relation) == full:
            yield relation


def _is_canonical(relation: BinaryRelation, size: int) -> bool:
    domain = canonical_domain(size)
    key = sorted((x.name, y.name) for x, y in relation)
    for perm in itertools.permutations(domain):
        image = {domain[i]: perm[i] for i in range(size)}
        mapped = sorted((image[x].name, image[y].name) for x, y in relation)
        if mapped < key:
            return False
    return True


def bounded_sat_search(expr: DAExpr, max_adom: int) -> BinaryRelation | None:
    """First relation (domain sizes 1..max_adom, canonical forms only) on
    which the expression evaluates nonempty; None if there is none in range."""
    if max_adom > MAX_SEARCH_ADOM:
        raise BoundTooLarge(f"max_adom is capped at {MAX_SEARCH_ADOM}")
    for size in range(1, max_adom + 1):
        for relation in relations_over(size):
            if not _is_canonical(relation, size):
                continue
            if da_eval(expr, relation):
                return relation
    return None


# --- choice cover and the CNF pipeline ---------------------------------------------

@dataclass(frozen=True)
class ChoiceCoverInstance:
    """Pick one subset from each group so the picks cover the ground set.

    The groups form an indexed family (a tuple), not a set: two groups with
    equal contents still demand independent picks.
    """

    ground: frozenset  # frozenset[Variable]
    groups: tuple  # tuple[frozenset[frozenset[Variable]], ...]

    def __post_init__(self):
        for group in self.groups:
            for subset in group:
                if not subset <= self.ground:
                    raise ValueError(f"group member {set(subset)!r} is not a subset of the ground set")


def choice_cover_solve(instance: ChoiceCoverInstance) -> bool:
    """Brute force over all pick combinations."""
    ordered_groups = [sorted(group, key=_subset_key) for group in instance.groups]
    for picks in itertools.product(*ordered_groups):
        union = frozenset().union(*picks) if picks else frozenset()
        if union == instance.ground:
            return True
    return False


def _subset_key(subset: frozenset):
    return (len(subset), tuple(sorted(v.name for v in subset)))


#: A CNF formula: clauses of nonzero integers, negative for negated variables.
Cnf = tuple  # tuple[frozenset[int], ...]


def cnf_to_choice_cover(cnf: Sequence[frozenset]) -> ChoiceCoverInstance:
    """Clauses become the ground set; each variable contributes the group
    {clauses it occurs in positively, clauses it occurs in negatively}."""
    if not cnf:
        raise ValueError("CNF must contain at least one clause")
    clause_vars = [Variable(f"c{i + 1}") for i in range(len(cnf))]
    used = sorted({abs(lit) for clause in cnf for lit in clause})
    groups = []
    for var in used:
        positive = frozenset(clause_vars[i] for i, clause in enumerate(cnf) if var in clause)
        negative = frozenset(clause_vars[i] for i, clause in enumerate(cnf) if -var in clause)
        groups.append(frozenset((positive, negative)))
    return ChoiceCoverInstance(frozenset(clause_vars), tuple(groups))


def choice_cover_to_pattern(instance: ChoiceCoverInstance, constant: Iri = Iri("c")) -> Pattern:
    """The OPT-free, bound-only pattern satisfiable iff the instance is a yes.

    An empty pick (or an empty family of groups) is encoded as the ground
    triple (c, c, c), the unit of conjunction on the intended witness graph.
    """
    if not instance.ground:
        raise PreconditionViolated("the ground set must be nonempty")
    for group in instance.groups:
        if not group:
            raise EmptyChoiceSet("every group must offer at least one pick")

    unit = TriplePattern(constant, constant, constant)

    def subset_pattern(subset: frozenset) -> Pattern:
        members = sorted(subset, key=lambda v: v.name)
        if not members:
            return unit
        pattern: Pattern = TriplePattern(members[0], constant, constant)
        for var in members[1:]:
            pattern = And(pattern, TriplePattern(var, constant, constant))
        return pattern

    def group_pattern(group: frozenset) -> Pattern:
        subsets = sorted(group, key=_subset_key)
        pattern = subset_pattern(subsets[0])
        for subset in subsets[1:]:
            pattern = Union(pattern, subset_pattern(subset))
        return pattern

    if instance.groups:
        pattern = group_pattern(instance.groups[0])
        for group in instance.groups[1:]:
            pattern = And(pattern, group_pattern(group))
    else:
        pattern = unit
    for var in sorted(instance.ground, key=lambda v: v.name):
        pattern = Filter(pattern, Bound(var))
    return pattern


def parse_dimacs(text: str) -> Cnf:
    """DIMACS-like CNF: `p cnf V C` header, clauses of signed ints ending in 0."""
    clauses: list[frozenset] = []
    current: set[int] = set()
    saw_header = False
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("c"):
            continue
        if stripped.startswith("p"):
            fields = stripped.split()
            if len(fields) != 4 or fields[1] != "cnf":
                raise QuerySyntaxError(f"malformed DIMACS header: {stripped!r}", 0)
            saw_header = True
            continue
        for field in stripped.split():
            literal = int(field)
            if literal == 0:
                clauses.append(frozenset(current))
                current = set()
            else:
                current.add(literal)
    if not saw_header:
        raise QuerySyntaxError("missing DIMACS `p cnf` header", 0)
    if current:
        clauses.append(frozenset(current))
    return tuple(clauses)


def cnf_satisfiable(cnf: Sequence[frozenset]) -> bool:
    """Brute-force CNF satisfiability over the variables that occur."""
    used = sorted({abs(lit) for clause in cnf for lit in clause})
    for bits in itertools.product((False, True), repeat=len(used)):
        assignment = dict(zip(used, bits))
        if all(
            any(assignment[abs(lit)] == (lit > 0) for lit in clause)
            for clause in cnf
        ):
            return True
    return False
