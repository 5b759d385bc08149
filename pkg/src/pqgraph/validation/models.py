"""Data shapes for the edge-validation pipeline."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, replace
from typing import Any

from ..errors import ValidationError

FINAL_STATES = ("auto_approved", "approved", "rejected", "needs_review")
ITEM_STATUSES = ("pending", "processing", "complete")


@dataclass(frozen=True)
class Verdict:
    valid: bool
    confidence: float
    reasoning: str
    source: str = "llm"

    def __post_init__(self):
        if not (0.0 <= self.confidence <= 1.0):
            raise ValidationError(f"confidence must lie in [0, 1], got {self.confidence}")
        if self.source not in ("llm", "rule", "human"):
            raise ValidationError(f"unknown verdict source {self.source!r}")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "Verdict":
        return cls(
            valid=bool(obj["valid"]),
            confidence=float(obj["confidence"]),
            reasoning=str(obj.get("reasoning", "")),
            source=str(obj.get("source", "llm")),
        )


PARSE_FAILURE = Verdict(valid=False, confidence=0.0, reasoning="parse failure", source="llm")


@dataclass
class ValidationItem:
    item_id: str
    source: str
    target: str
    relation: str
    status: str = "pending"
    llm_verdicts: tuple[Verdict, ...] = ()
    rule_verdict: Verdict | None = None
    final: str | None = None
    routed_reason: str = ""
    attempts: int = 0
    next_attempt_at: float = 0.0

    @property
    def edge_identity(self) -> tuple[str, str, str]:
        return (self.source, self.target, self.relation)


@dataclass(frozen=True)
class ValidationSettings:
    model_name: str = "gemma3:12b"
    endpoint: str = "http://localhost:11434"
    votes_per_item: int = 3
    threshold_general: float = 0.5
    threshold_vpn_cloud: float = 0.7
    auto_approve_rules: tuple[tuple[str, float], ...] = (("RESOLVES_TO", 0.5),)
    scheduler_interval_seconds: int = 30
    crown_review_weight: float = 0.8
    crown_review_impact: float = 0.9
    batch_size: int = 10
    request_timeout_seconds: float = 30.0

    def __post_init__(self):
        if self.votes_per_item < 1 or self.votes_per_item % 2 == 0:
            raise ValidationError(f"votes_per_item must be an odd positive integer, got {self.votes_per_item}")
        for name in ("threshold_general", "threshold_vpn_cloud", "crown_review_weight", "crown_review_impact"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValidationError(f"{name} must lie in [0, 1], got {v}")
        if self.scheduler_interval_seconds < 1:
            raise ValidationError("scheduler_interval_seconds must be at least 1")
        if self.batch_size < 1:
            raise ValidationError("batch_size must be positive")
        for rule in self.auto_approve_rules:
            if len(rule) != 2 or not (0.0 <= float(rule[1]) <= 1.0):
                raise ValidationError(f"bad auto-approve rule {rule!r}")

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["auto_approve_rules"] = [list(r) for r in self.auto_approve_rules]
        return d

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "ValidationSettings":
        try:
            kwargs = dict(obj)
            if "auto_approve_rules" in kwargs:
                kwargs["auto_approve_rules"] = tuple(
                    (str(r[0]), float(r[1])) for r in kwargs["auto_approve_rules"]
                )
            return cls(**kwargs)
        except TypeError as exc:
            raise ValidationError(f"bad settings payload: {exc}") from None

    def fingerprint(self) -> str:
        """Hash of the verdict-affecting knobs, part of every cache key.

        Changing the model, vote count, thresholds, or routing rules must
        invalidate cached outcomes; interval and batch sizing must not.
        """
        payload = {
            "model_name": self.model_name,
            "votes_per_item": self.votes_per_item,
            "threshold_general": self.threshold_general,
            "threshold_vpn_cloud": self.threshold_vpn_cloud,
            "auto_approve_rules": [list(r) for r in self.auto_approve_rules],
            "crown_review_weight": self.crown_review_weight,
            "crown_review_impact": self.crown_review_impact,
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]
