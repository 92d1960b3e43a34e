"""Deductive closure over the fact store.

Three rule families, all scoped to a single domain (facts in one domain never
produce conclusions in another):

  transitive    R_star(x, z, d) <- R(x, y, d), R_star(y, z, d)
  symmetric     R(b, a, ...) <- R(a, b, ...)          (all shapes)
  inheritance   A(x, attr, d) <- V(x, y, d), A(y, attr, d)   where V is A's carrier

Materialization runs a semi-naive (delta-driven) fixpoint: each round joins
only the facts derived in the previous round against the accumulated total.
Multi-hop closure facts carry the relation name ``<rel>_star``; the one-hop
base case of R_star is identified with the asserted edge itself, so every
derivation bottoms out in asserted leaves.  Each derived fact records the
rule and premises that first produced it (ties broken lexicographically),
which keeps traces minimal-depth and deterministic.

Single-source queries can skip full materialization: the ``reachable_star``
family walks the per-domain partition directly.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .consistency import ensure_acyclic, find_cycle
from .domains import DomainExpr
from .errors import CycleError, NotDerivableError, RegistryError
from .relations import RelationRegistry, RelationShape
from .store import ConceptId, Fact, FactPattern, FactStore, swap_orientation

RULE_ASSERTED = "asserted"
RULE_SYMMETRIC = "symmetric"
RULE_TRANSITIVE = "transitive"
RULE_INHERITANCE = "inheritance"

STAR_SUFFIX = "_star"


def star_label(relation: str) -> str:
    return relation + STAR_SUFFIX


def base_of_star(label: str) -> str | None:
    if label.endswith(STAR_SUFFIX):
        return label[: -len(STAR_SUFFIX)]
    return None


@dataclass(frozen=True)
class DerivationTrace:
    """How a fact was obtained.  Asserted facts get the leaf trace."""

    rule: str
    premises: tuple[Fact, ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.premises


LEAF = DerivationTrace(RULE_ASSERTED)


@dataclass
class ClosureSet:
    """Derived facts only (asserted facts live in the store), plus traces.

    ``generation`` snapshots the store generation this closure was computed
    from; a mismatch means the closure is stale.
    """

    generation: int
    derived: dict[str, frozenset[Fact]] = field(default_factory=dict)
    traces: dict[Fact, DerivationTrace] = field(default_factory=dict)

    def facts_for(self, label: str, domain: DomainExpr | None = None) -> list[Fact]:
        facts = self.derived.get(label, frozenset())
        if domain is not None:
            facts = {f for f in facts if domain in f.domains}
        return sorted(facts, key=Fact.sort_key)

    def size(self) -> int:
        return sum(len(v) for v in self.derived.values())

    def is_current(self, store: FactStore) -> bool:
        return self.generation == store.generation


def _intra_shaped(fact: Fact) -> bool:
    return len(fact.concepts) == 2 and len(fact.domains) == 1


def materialize(store: FactStore, registry: RelationRegistry | None = None) -> ClosureSet:
    """Compute the full fixpoint.  Raises CycleError if an acyclic relation
    contains a cycle (checked up front, per relation and domain)."""
    registry = registry or store.registry
    ensure_acyclic(store, registry)

    transitive = {spec.name for spec in registry if spec.transitive}
    inheritors_by_carrier: dict[str, list[str]] = {}
    for spec in registry:
        if spec.inherits_via is not None:
            inheritors_by_carrier.setdefault(spec.inherits_via, []).append(spec.name)

    present: set[Fact] = set()
    fwd: dict[tuple[str, DomainExpr], dict[ConceptId, list[Fact]]] = {}
    rev: dict[tuple[str, DomainExpr], dict[ConceptId, list[Fact]]] = {}
    traces: dict[Fact, DerivationTrace] = {}

    def add(fact: Fact) -> None:
        present.add(fact)
        if _intra_shaped(fact):
            key = (fact.relation, fact.domains[0])
            fwd.setdefault(key, {}).setdefault(fact.concepts[0], []).append(fact)
            rev.setdefault(key, {}).setdefault(fact.concepts[1], []).append(fact)

    asserted = store.facts()
    for fact in asserted:
        add(fact)

    delta: list[Fact] = list(asserted)
    while delta:
        candidates: dict[Fact, tuple[str, tuple[Fact, ...]]] = {}

        def propose(fact: Fact, rule: str, premises: tuple[Fact, ...]) -> None:
            if fact in present:
                return
            key = (rule, tuple(p.sort_key() for p in premises))
            best = candidates.get(fact)
            if best is None or key < (best[0], tuple(p.sort_key() for p in best[1])):
                candidates[fact] = (rule, premises)

        for f in delta:
            label = f.relation
            spec = registry.get(label)
            if spec is not None and spec.symmetric:
                propose(swap_orientation(f, spec), RULE_SYMMETRIC, (f,))
            if not _intra_shaped(f):
                continue
            d = f.domains[0]
            x, y = f.concepts

            if spec is not None and spec.transitive:
                out = star_label(label)
                # new edge as first body: join with star-or-edge facts out of y
                for g in fwd.get((label, d), {}).get(y, ()):
                    propose(Fact(out, (x, g.concepts[1]), (d,)), RULE_TRANSITIVE, (f, g))
                for g in fwd.get((out, d), {}).get(y, ()):
                    propose(Fact(out, (x, g.concepts[1]), (d,)), RULE_TRANSITIVE, (f, g))
                # new edge as second body (one-hop star base): join edges into x
                for e in rev.get((label, d), {}).get(x, ()):
                    propose(Fact(out, (e.concepts[0], y), (d,)), RULE_TRANSITIVE, (e, f))

            base = base_of_star(label)
            if base is not None and base in transitive:
                # new multi-hop star fact as second body
                for e in rev.get((base, d), {}).get(x, ()):
                    propose(Fact(label, (e.concepts[0], y), (d,)), RULE_TRANSITIVE, (e, f))

            if spec is not None and label in inheritors_by_carrier:
                # new carrier edge: pull attributes down from y to x
                for attr_rel in inheritors_by_carrier[label]:
                    for g in fwd.get((attr_rel, d), {}).get(y, ()):
                        propose(Fact(attr_rel, (x, g.concepts[1]), (d,)), RULE_INHERITANCE, (f, g))

            if spec is not None and spec.inherits_via is not None:
                # new attribute fact: push down to carrier children of its subject
                for e in rev.get((spec.inherits_via, d), {}).get(x, ()):
                    propose(Fact(label, (e.concepts[0], y), (d,)), RULE_INHERITANCE, (e, f))

        delta = sorted(candidates, key=Fact.sort_key)
        for fact in delta:
            rule, premises = candidates[fact]
            traces[fact] = DerivationTrace(rule, premises)
            add(fact)

    derived_by_label: dict[str, set[Fact]] = {}
    asserted_set = store.fact_set()
    for fact in present:
        if fact not in asserted_set:
            derived_by_label.setdefault(fact.relation, set()).add(fact)
    return ClosureSet(
        generation=store.generation,
        derived={label: frozenset(facts) for label, facts in sorted(derived_by_label.items())},
        traces=traces,
    )


# ---------------------------------------------------------------------------
# Lazy single-source operations (no full materialization needed)
# ---------------------------------------------------------------------------


def _adjacency(store: FactStore, relation: str, domain: DomainExpr) -> dict[ConceptId, list[ConceptId]]:
    adjacency: dict[ConceptId, list[ConceptId]] = {}
    for fact in store.partition(relation, domain):
        adjacency.setdefault(fact.concepts[0], []).append(fact.concepts[1])
    return adjacency


def reachable_star(store: FactStore, relation: str, frm: ConceptId, domain: DomainExpr) -> set[ConceptId]:
    """All concepts reachable from ``frm`` in one or more hops of the relation
    within the domain (depth-first; tolerates cycles)."""
    spec = store.registry.lookup(relation)
    if not spec.transitive:
        raise RegistryError(f"reachable_star needs a transitive relation, {relation!r} is not")
    adjacency = _adjacency(store, relation, domain)
    reached: set[ConceptId] = set()
    stack = list(adjacency.get(frm, ()))
    while stack:
        node = stack.pop()
        if node in reached:
            continue
        reached.add(node)
        stack.extend(adjacency.get(node, ()))
    return reached


def star_pairs(store: FactStore, relation: str, domain: DomainExpr) -> set[tuple[ConceptId, ConceptId]]:
    """Every (x, y) with a path x -> ... -> y of length >= 1 in the domain."""
    adjacency = _adjacency(store, relation, domain)
    pairs: set[tuple[ConceptId, ConceptId]] = set()
    for source in adjacency:
        for target in reachable_star(store, relation, source, domain):
            pairs.add((source, target))
    return pairs


def all_prerequisites(
    store: FactStore,
    target: ConceptId,
    domain: DomainExpr,
    relation: str = "requires",
) -> list[ConceptId]:
    """Transitive prerequisites of ``target``, topologically ordered: every
    prerequisite precedes anything that requires it.  Lexicographic
    tie-break makes the order deterministic.  Raises CycleError if the
    prerequisite subgraph is cyclic."""
    prereqs = reachable_star(store, relation, target, domain)
    if not prereqs:
        return []
    adjacency = _adjacency(store, relation, domain)
    deps: dict[ConceptId, set[ConceptId]] = {
        node: {succ for succ in adjacency.get(node, ()) if succ in prereqs}
        for node in prereqs
    }
    dependents: dict[ConceptId, list[ConceptId]] = {}
    for node, node_deps in deps.items():
        for dep in node_deps:
            dependents.setdefault(dep, []).append(node)
    counts = {node: len(node_deps) for node, node_deps in deps.items()}
    heap = [node for node, count in counts.items() if count == 0]
    heapq.heapify(heap)
    order: list[ConceptId] = []
    while heap:
        node = heapq.heappop(heap)
        order.append(node)
        for dependent in dependents.get(node, ()):
            counts[dependent] -= 1
            if counts[dependent] == 0:
                heapq.heappush(heap, dependent)
    if len(order) != len(prereqs):
        remaining = prereqs - set(order)
        stuck = {n: [s for s in deps[n] if s in remaining] for n in remaining}
        cycle = find_cycle(stuck)
        vertices = tuple(c.symbol for c in cycle) if cycle else tuple(sorted(c.symbol for c in remaining))
        raise CycleError(relation, domain.text, vertices)
    return order


def inherited_attributes(
    store: FactStore,
    concept: ConceptId,
    domain: DomainExpr,
) -> set[tuple[ConceptId, ConceptId]]:
    """(attribute, source) pairs: the concept's own attributes plus every
    attribute of each is_a ancestor.  No overriding - all pairs returned."""
    attr_spec = store.registry.get("has_attribute")
    results: set[tuple[ConceptId, ConceptId]] = set()

    def direct(owner: ConceptId) -> list[ConceptId]:
        pattern = FactPattern("has_attribute", (owner, None), (domain,))
        return [f.concepts[1] for f in store.match(pattern)]

    if attr_spec is None:
        return results
    for attr in direct(concept):
        results.add((attr, concept))
    carrier = attr_spec.inherits_via
    if carrier is None:
        return results
    for ancestor in reachable_star(store, carrier, concept, domain):
        for attr in direct(ancestor):
            results.add((attr, ancestor))
    return results


def analogy_search(
    store: FactStore,
    concept: ConceptId,
    source_domain: DomainExpr | None = None,
) -> set[tuple[ConceptId, DomainExpr, DomainExpr]]:
    """(counterpart, own-side domain, counterpart-side domain) for every
    cross-domain analogy touching the concept, in either orientation."""
    results: set[tuple[ConceptId, DomainExpr, DomainExpr]] = set()
    for fact in store.relation_facts("analogous_to"):
        c1, c2 = fact.concepts
        d1, d2 = fact.domains
        for mine, other, d_mine, d_other in ((c1, c2, d1, d2), (c2, c1, d2, d1)):
            if mine == concept and (source_domain is None or d_mine == source_domain):
                results.add((other, d_mine, d_other))
    return results


def derived_facts_for(store: FactStore, relation: str, domain: DomainExpr | None = None) -> set[Fact]:
    """Lazy equivalent of ClosureSet.derived[relation] (symmetric
    completions and inherited attribute facts), optionally domain-scoped."""
    spec = store.registry.lookup(relation)
    out: set[Fact] = set()
    source = store.relation_facts(relation)
    if domain is not None:
        source = store.partition(relation, domain)
    if spec.symmetric:
        for fact in source:
            flipped = swap_orientation(fact, spec)
            if flipped not in store:
                out.add(flipped)
    if spec.inherits_via is not None:
        domains = [domain] if domain is not None else store.relation_domains(spec.inherits_via)
        for d in domains:
            out.update(_inherited_in_domain(store, relation, spec.inherits_via, d))
    return out


def _inherited_in_domain(store: FactStore, relation: str, carrier: str, domain: DomainExpr) -> set[Fact]:
    """Attribute facts created by pulling each node's attributes down the
    carrier edges, to fixpoint (worklist; tolerates carrier cycles)."""
    children: dict[ConceptId, list[ConceptId]] = {}
    for edge in store.partition(carrier, domain):
        children.setdefault(edge.concepts[1], []).append(edge.concepts[0])
    attrs: dict[ConceptId, set[ConceptId]] = {}
    work: list[tuple[ConceptId, ConceptId]] = []
    for fact in store.partition(relation, domain):
        owner, attr = fact.concepts
        attrs.setdefault(owner, set()).add(attr)
        work.append((owner, attr))
    derived: set[Fact] = set()
    while work:
        owner, attr = work.pop()
        for child in children.get(owner, ()):
            known = attrs.setdefault(child, set())
            if attr not in known:
                known.add(attr)
                fact = Fact.intra(relation, child, attr, domain)
                if fact not in store:
                    derived.add(fact)
                work.append((child, attr))
    return derived


def explain(fact: Fact, store: FactStore, closure: ClosureSet | None = None) -> DerivationTrace:
    """Leaf trace for asserted facts; recorded minimal-depth derivation for
    derived ones.  Star-named facts whose pair is a direct edge resolve to
    the asserted edge (leaf)."""
    if fact.relation in store.registry:
        if fact in store:
            return LEAF
    base = base_of_star(fact.relation)
    if base is not None and base in store.registry and _intra_shaped(fact):
        if Fact(base, fact.concepts, fact.domains) in store:
            return LEAF
    if closure is not None:
        trace = closure.traces.get(fact)
        if trace is not None:
            return trace
    raise NotDerivableError(f"{fact!r} is neither asserted nor derivable")


def trace_depth(fact: Fact, store: FactStore, closure: ClosureSet | None = None) -> int:
    """Number of rule applications along the deepest branch of the derivation."""
    trace = explain(fact, store, closure)
    if trace.is_leaf:
        return 0
    return 1 + max(trace_depth(p, store, closure) for p in trace.premises)
