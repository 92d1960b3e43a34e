"""Knowledge-base validation.

Errors block materialization: cycles in acyclic relations, and self-loops in
asymmetric (acyclic-flagged) relations.  Divergent categorizations of one
concept under one relation are *not* errors - same-domain divergence is
multiple inheritance, and cross-domain divergence is the whole point of
domain scoping; the latter is recorded as a separation witness.  Lints flag
domain proliferation: case-only variants and near-duplicate spellings.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .domains import DomainExpr
from .errors import CycleError
from .relations import RelationRegistry, RelationShape
from .store import ConceptId, Fact, FactStore


@dataclass(frozen=True)
class Violation:
    kind: str  # "cycle" or "irreflexive"
    relation: str
    domain: str
    description: str
    facts: tuple[Fact, ...]


@dataclass(frozen=True)
class Lint:
    kind: str  # "case-variant-domains", "near-duplicate-domains", "duplicate-fact", ...
    description: str


@dataclass(frozen=True)
class SeparationWitness:
    """One concept categorized differently in two domains - coexisting, not conflicting."""

    concept: ConceptId
    relation: str
    first: tuple[ConceptId, DomainExpr]
    second: tuple[ConceptId, DomainExpr]

    def describe(self) -> str:
        (o1, d1), (o2, d2) = self.first, self.second
        return (
            f"{self.relation}({self.concept}, {o1}, \"{d1.text}\") coexists with "
            f"{self.relation}({self.concept}, {o2}, \"{d2.text}\")"
        )


@dataclass
class ConsistencyReport:
    errors: list[Violation] = field(default_factory=list)
    warnings: list[Lint] = field(default_factory=list)
    separation_witnesses: list[SeparationWitness] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def find_cycle(adjacency: dict[ConceptId, list[ConceptId]]) -> list[ConceptId] | None:
    """One closed walk [v0..vk] (edge vk->v0 exists) or None.  Deterministic:
    nodes and successors are visited in sorted order."""
    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict[ConceptId, int] = {}
    for root in sorted(adjacency):
        if color.get(root, WHITE) != WHITE:
            continue
        color[root] = GRAY
        path = [root]
        stack = [(root, iter(sorted(adjacency.get(root, ()))))]
        while stack:
            node, successors = stack[-1]
            advanced = False
            for succ in successors:
                state = color.get(succ, WHITE)
                if state == GRAY:
                    return path[path.index(succ):]
                if state == WHITE:
                    color[succ] = GRAY
                    path.append(succ)
                    stack.append((succ, iter(sorted(adjacency.get(succ, ())))))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                path.pop()
                stack.pop()
    return None


def _edge_adjacency(store: FactStore, relation: str, domain: DomainExpr) -> dict[ConceptId, list[ConceptId]]:
    adjacency: dict[ConceptId, list[ConceptId]] = {}
    for fact in store.partition(relation, domain):
        adjacency.setdefault(fact.concepts[0], []).append(fact.concepts[1])
        adjacency.setdefault(fact.concepts[1], [])
    return adjacency


def _acyclicity_violations(store: FactStore, registry: RelationRegistry) -> list[Violation]:
    violations: list[Violation] = []
    for spec in registry:
        if not spec.acyclic:
            continue
        for domain in store.relation_domains(spec.name):
            adjacency = _edge_adjacency(store, spec.name, domain)
            # self-loops violate asymmetry; report them separately and keep
            # them out of the cycle search
            clean: dict[ConceptId, list[ConceptId]] = {}
            for node, succs in adjacency.items():
                kept = []
                for succ in succs:
                    if succ == node:
                        loop = Fact.intra(spec.name, node, node, domain)
                        violations.append(Violation(
                            kind="irreflexive",
                            relation=spec.name,
                            domain=domain.text,
                            description=f"{spec.name}({node}, {node}, \"{domain.text}\") relates a concept to itself",
                            facts=(loop,),
                        ))
                    else:
                        kept.append(succ)
                clean[node] = kept
            cycle = find_cycle(clean)
            if cycle is not None:
                edges = []
                for i, v in enumerate(cycle):
                    w = cycle[(i + 1) % len(cycle)]
                    edges.append(Fact.intra(spec.name, v, w, domain))
                walk = " -> ".join(v.symbol for v in cycle) + f" -> {cycle[0].symbol}"
                violations.append(Violation(
                    kind="cycle",
                    relation=spec.name,
                    domain=domain.text,
                    description=f"cycle {walk}",
                    facts=tuple(edges),
                ))
    violations.sort(key=lambda v: (v.relation, v.domain, v.kind, v.description))
    return violations


def ensure_acyclic(store: FactStore, registry: RelationRegistry) -> None:
    """Raise CycleError on the first acyclicity violation (materialize pre-check)."""
    violations = _acyclicity_violations(store, registry)
    if violations:
        first = violations[0]
        vertices = tuple(f.concepts[0].symbol for f in first.facts)
        raise CycleError(first.relation, first.domain, vertices)


def _separation_witnesses(store: FactStore, registry: RelationRegistry) -> list[SeparationWitness]:
    witnesses: list[SeparationWitness] = []
    for spec in registry:
        if spec.shape is not RelationShape.INTRA:
            continue
        by_subject: dict[ConceptId, list[Fact]] = {}
        for fact in store.relation_facts(spec.name):
            by_subject.setdefault(fact.concepts[0], []).append(fact)
        for subject, group in by_subject.items():
            if len(group) < 2:
                continue
            group.sort(key=lambda f: (f.domains[0].text, f.concepts[1].symbol))
            for i in range(len(group)):
                for j in range(i + 1, len(group)):
                    a, b = group[i], group[j]
                    if a.domains[0] != b.domains[0] and a.concepts[1] != b.concepts[1]:
                        witnesses.append(SeparationWitness(
                            concept=subject,
                            relation=spec.name,
                            first=(a.concepts[1], a.domains[0]),
                            second=(b.concepts[1], b.domains[0]),
                        ))
    witnesses.sort(key=lambda w: (w.relation, w.concept.symbol, w.first[1].text,
                                  w.first[0].symbol, w.second[1].text, w.second[0].symbol))
    return witnesses


def edit_distance_at_most(a: str, b: str, bound: int) -> bool:
    """Levenshtein(a, b) <= bound, with cheap cutoffs."""
    if abs(len(a) - len(b)) > bound:
        return False
    if a == b:
        return True
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        best = i
        for j, cb in enumerate(b, start=1):
            cost = min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ca != cb),
            )
            current.append(cost)
            best = min(best, cost)
        if best > bound:
            return False
        previous = current
    return previous[-1] <= bound


def _domain_lints(store: FactStore) -> list[Lint]:
    texts = sorted(store.stats().facts_per_domain)
    lints: list[Lint] = []
    by_folded: dict[str, list[str]] = {}
    for text in texts:
        by_folded.setdefault(text.lower(), []).append(text)
    for folded in sorted(by_folded):
        variants = by_folded[folded]
        if len(variants) > 1:
            lints.append(Lint(
                kind="case-variant-domains",
                description="domains differ only by case: " + ", ".join(variants),
            ))
    for i in range(len(texts)):
        for j in range(i + 1, len(texts)):
            a, b = texts[i], texts[j]
            if a.lower() == b.lower():
                continue  # already flagged as a case variant
            if edit_distance_at_most(a, b, 2):
                lints.append(Lint(
                    kind="near-duplicate-domains",
                    description=f"domains are near-duplicates (edit distance <= 2): {a}, {b}",
                ))
    return lints


def check(
    store: FactStore,
    registry: RelationRegistry | None = None,
    extra_warnings: tuple[Lint, ...] = (),
) -> ConsistencyReport:
    """Validate a store.  Pure: never mutates; repeated calls agree."""
    registry = registry or store.registry
    report = ConsistencyReport()
    report.errors = _acyclicity_violations(store, registry)
    report.separation_witnesses = _separation_witnesses(store, registry)
    report.warnings = list(extra_warnings) + _domain_lints(store)
    return report
