from __future__ import annotations

import pytest

from cdcgraph import RegistryError, RelationShape, RelationSpec, builtin_registry

EXPECTED_BUILTINS = {
    "is_a", "part_of", "has_attribute", "requires", "cause_of", "enables",
    "contrasts_with", "conflicts_with", "evolves_to", "if_then",
    "context_value", "strategy", "analogous_to", "fuses_with",
}


def test_builtin_names():
    registry = builtin_registry()
    assert set(registry.names()) == EXPECTED_BUILTINS
    assert len(registry) >= 14


def test_property_table_rows():
    """The five relations with published property rows: T / S / R flags."""
    registry = builtin_registry()
    expected = {
        "is_a": (True, False, False),
        "part_of": (True, False, False),
        "requires": (True, False, False),
        "analogous_to": (False, True, False),
        "fuses_with": (False, True, False),
    }
    for name, (t, s, r) in expected.items():
        spec = registry.lookup(name)
        assert (spec.transitive, spec.symmetric, spec.reflexive) == (t, s, r), name


def test_shapes():
    registry = builtin_registry()
    assert registry.lookup("is_a").shape is RelationShape.INTRA
    assert registry.lookup("analogous_to").shape is RelationShape.CROSS
    assert registry.lookup("fuses_with").shape is RelationShape.FUSION


def test_acyclic_flags():
    registry = builtin_registry()
    for name in ("is_a", "part_of", "requires", "evolves_to"):
        assert registry.lookup(name).acyclic, name
    for name in ("cause_of", "enables", "contrasts_with", "conflicts_with"):
        assert not registry.lookup(name).acyclic, name


def test_inheritance_carrier():
    spec = builtin_registry().lookup("has_attribute")
    assert spec.inherits_via == "is_a"
    assert not spec.transitive and not spec.symmetric


def test_inert_relations_have_no_flags():
    registry = builtin_registry()
    for name in ("context_value", "strategy", "if_then"):
        spec = registry.lookup(name)
        assert not (spec.transitive or spec.symmetric or spec.reflexive or spec.acyclic)


def test_register_plain_relation():
    registry = builtin_registry()
    registry.register(RelationSpec("applies_to"))
    assert registry.lookup("applies_to").shape is RelationShape.INTRA


def test_register_duplicate_rejected():
    registry = builtin_registry()
    with pytest.raises(RegistryError, match="already registered"):
        registry.register(RelationSpec("is_a"))


def test_register_override_allowed():
    registry = builtin_registry()
    registry.register(RelationSpec("cause_of", transitive=True), override=True)
    assert registry.lookup("cause_of").transitive


def test_symmetric_acyclic_conflict():
    with pytest.raises(RegistryError, match="mutually exclusive"):
        builtin_registry().register(RelationSpec("weird", symmetric=True, acyclic=True))


def test_transitive_needs_intra():
    with pytest.raises(RegistryError):
        builtin_registry().register(RelationSpec("bad", shape=RelationShape.CROSS, transitive=True))


def test_unknown_inherits_via_rejected():
    with pytest.raises(RegistryError, match="carrier"):
        builtin_registry().register(RelationSpec("prop", inherits_via="no_such"))


def test_frozen_registry_rejects_registration():
    registry = builtin_registry()
    registry.freeze()
    with pytest.raises(RegistryError, match="frozen"):
        registry.register(RelationSpec("late"))
