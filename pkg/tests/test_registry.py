import pytest

from pqgraph.errors import ValidationError
from pqgraph.registry import (
    CATEGORY_RANGES,
    ResistanceRegistry,
    lookup_resistance,
    weakest_link_resistance,
)


@pytest.fixture(scope="module")
def registry():
    return ResistanceRegistry.default()


def test_default_registry_loads(registry):
    assert len(registry.entries) > 20


def test_known_categories(registry):
    assert registry.lookup("RSA-2048").category == "vulnerable"
    assert registry.lookup("AES-128").category == "transitional"
    assert registry.lookup("ML-KEM-768").category == "quantum_safe"


def test_lookup_is_case_and_whitespace_insensitive(registry):
    assert registry.lookup("  rsa-2048 ").value == registry.lookup("RSA-2048").value


def test_unknown_algorithm_fails_closed(registry):
    hit = lookup_resistance("ROT13-QUANTUM", registry)
    assert hit.defaulted
    assert hit.value == 0.0
    assert hit.category is None


def test_point_estimates_sit_inside_category_ranges(registry):
    for entry in registry.entries.values():
        lo, hi = CATEGORY_RANGES[entry.category]
        assert lo <= entry.point <= hi


def test_weakest_link_takes_the_minimum(registry):
    # One vulnerable algorithm drags the whole asset down.
    mixed = ["ML-KEM-768", "RSA-2048", "AES-256"]
    assert weakest_link_resistance(mixed, registry) == registry.lookup("RSA-2048").value


def test_weakest_link_empty_means_unknown(registry):
    assert weakest_link_resistance([], registry) == registry.unknown_default


def test_custom_unknown_default():
    reg = ResistanceRegistry.from_text("FOO\tvulnerable\t0.0\t0.3\t0.1\n", unknown_default=0.2)
    assert reg.lookup("BAR").value == 0.2


def test_malformed_registry_rows_rejected():
    with pytest.raises(ValidationError):
        ResistanceRegistry.from_text("FOO\tvulnerable\t0.0\n")
    with pytest.raises(ValidationError):
        # point outside the declared range
        ResistanceRegistry.from_text("FOO\tvulnerable\t0.0\t0.3\t0.5\n")
    with pytest.raises(ValidationError):
        ResistanceRegistry.from_text("FOO\tmythical\t0.0\t0.3\t0.1\n")


def test_comments_and_blank_lines_ignored():
    reg = ResistanceRegistry.from_text("# header\n\nFOO\tquantum_safe\t0.9\t1.0\t0.95\n")
    assert reg.lookup("foo").value == 0.95
