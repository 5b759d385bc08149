"""Edge validation: LLM voting, rule checks, routing, queues, persistence."""

from .models import ValidationItem, ValidationSettings, Verdict
from .pipeline import (
    aggregate,
    apply_pipeline_outcomes,
    apply_review_decisions,
    backoff_delay,
    edge_status_for_final,
    enqueue_unvalidated,
    pipeline_stats,
    scheduler_tick,
)
from .rules import rule_validate
from .store import Store

__all__ = [
    "ValidationItem",
    "ValidationSettings",
    "Verdict",
    "Store",
    "aggregate",
    "apply_pipeline_outcomes",
    "apply_review_decisions",
    "backoff_delay",
    "edge_status_for_final",
    "enqueue_unvalidated",
    "pipeline_stats",
    "rule_validate",
    "scheduler_tick",
]
