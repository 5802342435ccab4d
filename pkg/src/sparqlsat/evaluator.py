"""Reference set-based evaluator for patterns over RDF graphs.

This is a deliberately naive structural interpreter: no indexes, no planning.
It exists as the ground-truth oracle that every static analysis in this
package is checked against, so clarity beats speed throughout.
"""

from __future__ import annotations

import re

from .errors import NotNormalized, QuerySyntaxError
from .patterns import (
    And,
    Bound,
    Constraint,
    Eq,
    EqC,
    Filter,
    Neq,
    NeqC,
    NegBound,
    Opt,
    Pattern,
    Select,
    TriplePattern,
    Union,
    is_atomic,
)
from .terms import (
    BlankNode,
    Iri,
    Literal,
    Mapping,
    RdfGraph,
    RdfTriple,
    SolutionSet,
    Variable,
    format_term,
)


def compatible(m1: Mapping, m2: Mapping) -> bool:
    """True iff the two mappings agree on the intersection of their domains."""
    small, large = (m1, m2) if len(m1) <= len(m2) else (m2, m1)
    for var, value in small.items():
        other = large.get(var)
        if other is not None and other != value:
            return False
    return True


def _by_domain(omega: SolutionSet) -> dict:
    groups: dict = {}
    for mapping in omega:
        groups.setdefault(mapping.domain, []).append(mapping)
    return groups


def _shared_value_index(group: list, shared: tuple) -> dict:
    index: dict = {}
    for mapping in group:
        index.setdefault(tuple(mapping[v] for v in shared), []).append(mapping)
    return index


def join(omega1: SolutionSet, omega2: SolutionSet) -> SolutionSet:
    """All unions of compatible pairs drawn from the two solution sets.

    Two mappings are compatible exactly when they agree on the shared part of
    their domains, so the pairs are found by grouping per domain and probing
    on the shared variables' values; the result is the definitional one.
    """
    if not omega1 or not omega2:
        return frozenset()
    out = set()
    groups1 = _by_domain(omega1)
    for domain2, group2 in _by_domain(omega2).items():
        for domain1, group1 in groups1.items():
            shared = tuple(sorted(domain1 & domain2, key=lambda v: v.name))
            index = _shared_value_index(group2, shared)
            for m1 in group1:
                for m2 in index.get(tuple(m1[v] for v in shared), ()):
                    out.add(m1.merge(m2))
    return frozenset(out)


def set_minus(omega1: SolutionSet, omega2: SolutionSet) -> SolutionSet:
    """Mappings of the first set compatible with nothing in the second."""
    if not omega2:
        return frozenset(omega1)
    indexes: dict = {}  # (domain1, domain2) -> shared-value index into omega2
    groups2 = _by_domain(omega2)
    survivors = []
    for m1 in omega1:
        domain1 = m1.domain
        hit = False
        for domain2, group2 in groups2.items():
            pair = (domain1, domain2)
            entry = indexes.get(pair)
            if entry is None:
                shared = tuple(sorted(domain1 & domain2, key=lambda v: v.name))
                entry = (shared, _shared_value_index(group2, shared))
                indexes[pair] = entry
            shared, index = entry
            if tuple(m1[v] for v in shared) in index:
                hit = True
                break
        if not hit:
            survivors.append(m1)
    return frozenset(survivors)


def satisfies(mapping: Mapping, constraint: Constraint) -> bool:
    """Constraint satisfaction under the error-as-false reading.

    When a mentioned variable is unbound, equalities and nonequalities (and
    their constant forms) are both unsatisfied; only the negated bound check
    holds on an unbound variable.
    """
    if isinstance(constraint, Bound):
        return constraint.var in mapping
    if isinstance(constraint, NegBound):
        return constraint.var not in mapping
    if isinstance(constraint, Eq):
        left = mapping.get(constraint.left)
        right = mapping.get(constraint.right)
        return left is not None and right is not None and left == right
    if isinstance(constraint, Neq):
        left = mapping.get(constraint.left)
        right = mapping.get(constraint.right)
        return left is not None and right is not None and left != right
    if isinstance(constraint, EqC):
        value = mapping.get(constraint.var)
        return value is not None and value == constraint.constant
    if isinstance(constraint, NeqC):
        value = mapping.get(constraint.var)
        return value is not None and value != constraint.constant
    raise TypeError(f"not an atomic constraint: {constraint!r}")


def _match_triple(tp: TriplePattern, graph: RdfGraph) -> SolutionSet:
    out = set()
    pattern_terms = tp.terms()
    for triple in graph:
        bindings: dict[Variable, object] = {}
        ok = True
        for pat_term, graph_term in zip(pattern_terms, (triple.subject, triple.predicate, triple.object)):
            if isinstance(pat_term, Variable):
                bound = bindings.get(pat_term)
                if bound is None:
                    bindings[pat_term] = graph_term
                elif bound != graph_term:
                    ok = False
                    break
            elif pat_term != graph_term:
                ok = False
                break
        if ok:
            out.add(Mapping(bindings))
    return frozenset(out)


def evaluate(pattern: Pattern, graph: RdfGraph) -> SolutionSet:
    """The set of solution mappings of a pattern on a graph.

    Requires atomic filter constraints; normalize composite filters first.
    """
    if isinstance(pattern, TriplePattern):
        return _match_triple(pattern, graph)
    if isinstance(pattern, Union):
        return evaluate(pattern.left, graph) | evaluate(pattern.right, graph)
    if isinstance(pattern, And):
        return join(evaluate(pattern.left, graph), evaluate(pattern.right, graph))
    if isinstance(pattern, Opt):
        left = evaluate(pattern.left, graph)
        right = evaluate(pattern.right, graph)
        return join(left, right) | set_minus(left, right)
    if isinstance(pattern, Filter):
        if not is_atomic(pattern.condition):
            raise NotNormalized(f"composite filter condition in evaluate: {pattern.condition!r}")
        return frozenset(
            m for m in evaluate(pattern.pattern, graph) if satisfies(m, pattern.condition)
        )
    if isinstance(pattern, Select):
        return frozenset(
            m.restrict(pattern.scheme & m.domain) for m in evaluate(pattern.pattern, graph)
        )
    raise TypeError(f"not a pattern: {pattern!r}")


# --- graph fixture format -----------------------------------------------------
#
# One triple per line: `<s> <p> <o> .` with IRIs angle-bracketed, literals
# quoted, and blank nodes written `_:label`.  Bare words are read as IRIs.

_TERM_RE = re.compile(
    r"""\s*(?:
        <(?P<iri>[^>]*)> |
        "(?P<lit>(?:[^"\\]|\\.)*)" |
        _:(?P<blank>\w+) |
        (?P<word>[^\s.]+)
    )""",
    re.VERBOSE,
)


def _read_term(text: str, offset: int):
    match = _TERM_RE.match(text, offset)
    if not match:
        raise QuerySyntaxError("expected a graph term", offset)
    if match.group("iri") is not None:
        term = Iri(match.group("iri"))
    elif match.group("lit") is not None:
        raw = match.group("lit")
        term = Literal(raw.replace('\\"', '"').replace("\\\\", "\\"))
    elif match.group("blank") is not None:
        term = BlankNode(match.group("blank"))
    else:
        word = match.group("word")
        term = Literal(word) if word[0].isdigit() or word[0] == "-" else Iri(word)
    return term, match.end()


def parse_graph(text: str) -> RdfGraph:
    """Parse the line-oriented graph fixture format."""
    triples = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        subject, offset = _read_term(line, 0)
        predicate, offset = _read_term(line, offset)
        obj, offset = _read_term(line, offset)
        rest = line[offset:].strip()
        if rest not in (".", ""):
            raise QuerySyntaxError(f"trailing content on line {lineno}: {rest!r}", offset)
        triples.append(RdfTriple(subject, predicate, obj))
    return RdfGraph.of(triples)


def format_graph(graph: RdfGraph) -> str:
    """Serialize a graph in the fixture format, deterministically ordered."""
    lines = sorted(
        f"{format_term(t.subject)} {format_term(t.predicate)} {format_term(t.object)} ."
        for t in graph
    )
    return "\n".join(lines)
