"""Attribute calculators for edge exploitability and crown-jewel impact."""

from __future__ import annotations

from .errors import ValidationError

CROWN_JEWEL_THRESHOLD = 0.9


def _check_unit(name: str, value: float) -> float:
    if not (0.0 <= value <= 1.0):
        raise ValidationError(f"{name} must lie in [0, 1], got {value}")
    return float(value)


def edge_probability(
    exposure: float,
    weakness: float,
    control_effectiveness: float,
    relation_prior: float,
) -> float:
    """Exploitability of a dependency edge from its network/crypto context.

    Exposure and weakness enter through an affine floor at 0.5 so that a zero
    reading cannot annihilate an otherwise exploitable edge; fully effective
    controls do annihilate it.
    """
    _check_unit("exposure", exposure)
    _check_unit("weakness", weakness)
    _check_unit("control_effectiveness", control_effectiveness)
    _check_unit("relation_prior", relation_prior)
    p = (
        relation_prior
        * (0.5 + 0.5 * exposure)
        * (0.5 + 0.5 * weakness)
        * (1.0 - control_effectiveness)
    )
    return min(1.0, max(0.0, p))


def crown_jewel_score(sensitivity: float, regulatory: float, criticality: float) -> float:
    """Unweighted mean of data sensitivity, regulatory, and criticality factors."""
    _check_unit("sensitivity", sensitivity)
    _check_unit("regulatory", regulatory)
    _check_unit("criticality", criticality)
    return (sensitivity + regulatory + criticality) / 3.0


def is_crown_jewel(impact: float) -> bool:
    return impact > CROWN_JEWEL_THRESHOLD
