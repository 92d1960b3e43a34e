from __future__ import annotations

import random

from hypothesis import given
from hypothesis import strategies as st

from cdcgraph import FactStore, builtin_registry, check
from cdcgraph.consistency import edit_distance_at_most
from conftest import apple_store, intra


def brute_levenshtein(a: str, b: str) -> int:
    if not a:
        return len(b)
    if not b:
        return len(a)
    return min(
        brute_levenshtein(a[:-1], b) + 1,
        brute_levenshtein(a, b[:-1]) + 1,
        brute_levenshtein(a[:-1], b[:-1]) + (a[-1] != b[-1]),
    )


def test_apple_kb_separation():
    """Same concept, same relation, different domains, different targets:
    zero errors, one separation witness."""
    store = apple_store()
    report = check(store)
    assert report.ok
    assert len(report.errors) == 0
    assert len(report.separation_witnesses) == 1
    witness = report.separation_witnesses[0]
    assert witness.concept.symbol == "Apple"
    assert witness.relation == "is_a"
    targets = {witness.first[0].symbol, witness.second[0].symbol}
    assert targets == {"Fruit", "Company"}


def test_two_cycle_reported():
    store = FactStore(builtin_registry())
    store.assert_fact(intra("requires", "a", "b", "d"))
    store.assert_fact(intra("requires", "b", "a", "d"))
    report = check(store)
    assert len(report.errors) == 1
    error = report.errors[0]
    assert error.kind == "cycle"
    assert error.relation == "requires"
    # the listed edges exist in the store and form a closed walk
    for fact in error.facts:
        assert fact in store
    heads = [f.concepts[0] for f in error.facts]
    tails = [f.concepts[1] for f in error.facts]
    assert tails == heads[1:] + heads[:1]


def test_self_loop_is_irreflexivity_error():
    store = FactStore(builtin_registry())
    store.assert_fact(intra("is_a", "x", "x", "d"))
    report = check(store)
    assert len(report.errors) == 1
    assert report.errors[0].kind == "irreflexive"
    assert report.errors[0].relation == "is_a"


def test_symmetric_self_loop_is_fine():
    store = FactStore(builtin_registry())
    store.assert_fact(intra("contrasts_with", "x", "x", "d"))
    assert check(store).ok


def test_same_domain_divergence_is_not_an_error_nor_witness():
    store = FactStore(builtin_registry())
    store.assert_fact(intra("is_a", "x", "A", "d"))
    store.assert_fact(intra("is_a", "x", "B", "d"))
    report = check(store)
    assert report.ok
    assert report.separation_witnesses == []


def test_case_variant_domains_lint():
    store = FactStore(builtin_registry())
    store.assert_fact(intra("is_a", "a", "b", "math@algebra"))
    store.assert_fact(intra("is_a", "c", "d", "Math@Algebra"))
    report = check(store)
    lints = [w for w in report.warnings if w.kind == "case-variant-domains"]
    assert len(lints) == 1
    # oracle: the two spellings really are case-insensitively equal
    assert "math@algebra".lower() == "Math@Algebra".lower()
    assert "math@algebra" in lints[0].description and "Math@Algebra" in lints[0].description


def test_near_duplicate_domains_lint():
    store = FactStore(builtin_registry())
    store.assert_fact(intra("is_a", "a", "b", "physics"))
    store.assert_fact(intra("is_a", "c", "d", "physic"))
    store.assert_fact(intra("is_a", "e", "f", "completely_different"))
    report = check(store)
    near = [w for w in report.warnings if w.kind == "near-duplicate-domains"]
    assert len(near) == 1
    assert "physic" in near[0].description


def test_check_is_pure():
    store = apple_store()
    generation = store.generation
    first = check(store)
    second = check(store)
    assert store.generation == generation
    assert first.errors == second.errors
    assert first.warnings == second.warnings
    assert first.separation_witnesses == second.separation_witnesses


def test_random_cycle_edges_always_in_store():
    rng = random.Random(11)
    for _ in range(50):
        store = FactStore(builtin_registry())
        relation = rng.choice(("requires", "is_a", "evolves_to"))
        length = rng.randint(2, 6)
        nodes = [f"n{i}" for i in range(length)]
        for i, node in enumerate(nodes):
            store.assert_fact(intra(relation, node, nodes[(i + 1) % length], "d"))
        report = check(store)
        errors = [e for e in report.errors if e.kind == "cycle"]
        assert errors, "cycle missed"
        for fact in errors[0].facts:
            assert fact in store


@given(st.text(max_size=6), st.text(max_size=6), st.integers(min_value=0, max_value=3))
def test_edit_distance_matches_brute_force(a, b, bound):
    assert edit_distance_at_most(a, b, bound) == (brute_levenshtein(a, b) <= bound)
