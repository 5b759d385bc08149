"""Protocol resistance registry.

Maps cryptographic algorithm identifiers to quantum-resistance categories and
point estimates. Unknown algorithms resolve to a fail-closed default of 0.0:
crypto we cannot identify is treated as quantum-vulnerable.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import ValidationError

UNKNOWN_RESISTANCE = 0.0

CATEGORY_RANGES: dict[str, tuple[float, float]] = {
    "vulnerable": (0.0, 0.3),
    "transitional": (0.3, 0.7),
    "quantum_safe": (0.9, 1.0),
}


@dataclass(frozen=True)
class RegistryEntry:
    algorithm: str
    category: str
    low: float
    high: float
    point: float

    def __post_init__(self):
        if self.category not in CATEGORY_RANGES:
            raise ValidationError(f"unknown category {self.category!r} for {self.algorithm!r}")
        lo, hi = CATEGORY_RANGES[self.category]
        if not (lo <= self.low <= self.high <= hi):
            raise ValidationError(
                f"{self.algorithm!r}: range [{self.low}, {self.high}] outside "
                f"{self.category} bounds [{lo}, {hi}]"
            )
        if not (self.low <= self.point <= self.high):
            raise ValidationError(
                f"{self.algorithm!r}: point {self.point} outside [{self.low}, {self.high}]"
            )


@dataclass(frozen=True)
class ResistanceLookup:
    """Result of a registry lookup; ``defaulted`` marks unknown algorithms."""

    value: float
    category: str | None
    defaulted: bool


def _normalize(algorithm: str) -> str:
    return algorithm.strip().upper()


class ResistanceRegistry:
    """Algorithm identifier to resistance mapping, loaded from a TSV table."""

    def __init__(self, entries: dict[str, RegistryEntry], unknown_default: float = UNKNOWN_RESISTANCE):
        self.entries = entries
        self.unknown_default = unknown_default

    @classmethod
    def from_text(cls, text: str, unknown_default: float = UNKNOWN_RESISTANCE) -> "ResistanceRegistry":
        entries: dict[str, RegistryEntry] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise ValidationError(f"registry line {lineno}: expected 5 tab-separated fields")
            name, category, low, high, point = parts
            entry = RegistryEntry(_normalize(name), category, float(low), float(high), float(point))
            entries[entry.algorithm] = entry
        return cls(entries, unknown_default)

    @classmethod
    def from_file(cls, path: str | Path, unknown_default: float = UNKNOWN_RESISTANCE) -> "ResistanceRegistry":
        return cls.from_text(Path(path).read_text(encoding="utf-8"), unknown_default)

    @classmethod
    def default(cls) -> "ResistanceRegistry":
        text = resources.files("pqgraph.data").joinpath("resistance_registry.tsv").read_text(encoding="utf-8")
        return cls.from_text(text)

    def lookup(self, algorithm: str) -> ResistanceLookup:
        entry = self.entries.get(_normalize(algorithm))
        if entry is None:
            return ResistanceLookup(self.unknown_default, None, True)
        return ResistanceLookup(entry.point, entry.category, False)


def lookup_resistance(algorithm: str, registry: ResistanceRegistry) -> ResistanceLookup:
    """Point resistance for one algorithm; unknowns fall back to the default."""
    return registry.lookup(algorithm)


def weakest_link_resistance(algorithms: list[str] | tuple[str, ...], registry: ResistanceRegistry) -> float:
    """Minimum point resistance across deployed algorithms.

    An empty algorithm list means the asset's crypto is unknown, which is
    treated the same as an unrecognized algorithm.
    """
    if not algorithms:
        return registry.unknown_default
    return min(registry.lookup(a).value for a in algorithms)
