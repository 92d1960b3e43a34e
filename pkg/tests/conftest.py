from __future__ import annotations

import random

import pytest

from cdcgraph import ConceptId, Fact, FactStore, builtin_registry, parse_domain


@pytest.fixture
def registry():
    return builtin_registry()


@pytest.fixture
def store(registry):
    return FactStore(registry)


def intra(relation: str, subject: str, obj: str, domain: str) -> Fact:
    return Fact.intra(relation, ConceptId(subject), ConceptId(obj), parse_domain(domain))


def cross(relation: str, c1: str, c2: str, d1: str, d2: str) -> Fact:
    return Fact.cross(relation, ConceptId(c1), ConceptId(c2), parse_domain(d1), parse_domain(d2))


def fusion(relation: str, c1: str, c2: str, fused: str, domain: str) -> Fact:
    return Fact.fusion(relation, ConceptId(c1), ConceptId(c2), ConceptId(fused), parse_domain(domain))


def apple_store() -> FactStore:
    """The two-way categorization example used throughout the docs."""
    s = FactStore(builtin_registry())
    s.assert_fact(intra("is_a", "Apple", "Fruit", "Biology@Plant_Taxonomy"))
    s.assert_fact(intra("is_a", "Apple", "Company", "Business@Tech_Sector"))
    return s


def random_dag_store(
    rng: random.Random,
    relations: tuple[str, ...] = ("is_a", "part_of", "requires"),
    max_concepts: int = 12,
    max_domains: int = 3,
    density: float = 0.3,
) -> tuple[FactStore, dict[tuple[str, str], set[tuple[ConceptId, ConceptId]]]]:
    """Random per-domain DAGs; returns the store and the raw edge sets keyed
    by (relation, domain text) for oracle comparison."""
    store = FactStore(builtin_registry())
    n = rng.randint(2, max_concepts)
    concepts = [ConceptId(f"c{i:02d}") for i in range(n)]
    n_domains = rng.randint(1, max_domains)
    edges: dict[tuple[str, str], set[tuple[ConceptId, ConceptId]]] = {}
    for d in range(n_domains):
        domain_text = f"dom{d}"
        domain = parse_domain(domain_text)
        for relation in relations:
            ranked = concepts[:]
            rng.shuffle(ranked)
            chosen: set[tuple[ConceptId, ConceptId]] = set()
            for i in range(n):
                for j in range(i + 1, n):
                    if rng.random() < density:
                        chosen.add((ranked[i], ranked[j]))
            for a, b in chosen:
                store.assert_fact(Fact.intra(relation, a, b, domain))
            edges[(relation, domain_text)] = chosen
    return store, edges
