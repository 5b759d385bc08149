"""Embedded transactional store for queues, cache, reviews, and snapshots.

Single sqlite database behind a narrow interface. Queue items move
pending -> processing -> complete; a processing claim carries a lease so a
crashed worker's items return to pending once the lease expires, which
gives the scheduler its crash safety. Graph versions are immutable blobs
keyed by content hash; human decisions mark a version dirty and the next
reader materializes a successor lazily.
"""

from __future__ import annotations

import hashlib
import json
import sqlite3
import threading
import time
import uuid
from typing import Any, Iterable

from ..errors import ConflictError, NotFoundError
from .models import ValidationItem, ValidationSettings, Verdict

_SCHEMA = """
CREATE TABLE IF NOT EXISTS validation_queue (
    item_id TEXT PRIMARY KEY,
    source TEXT NOT NULL,
    target TEXT NOT NULL,
    relation TEXT NOT NULL,
    status TEXT NOT NULL DEFAULT 'pending',
    attempts INTEGER NOT NULL DEFAULT 0,
    next_attempt_at REAL NOT NULL DEFAULT 0,
    lease_expires REAL,
    final TEXT,
    routed_reason TEXT NOT NULL DEFAULT '',
    verdicts_json TEXT,
    rule_json TEXT,
    graph_version TEXT NOT NULL DEFAULT '',
    created_at REAL NOT NULL,
    completed_at REAL
);
CREATE UNIQUE INDEX IF NOT EXISTS idx_queue_edge
    ON validation_queue (source, target, relation, graph_version);
CREATE TABLE IF NOT EXISTS validation_cache (
    cache_key TEXT PRIMARY KEY,
    final TEXT NOT NULL,
    routed_reason TEXT NOT NULL DEFAULT '',
    verdicts_json TEXT,
    rule_json TEXT,
    created_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS review_queue (
    review_id TEXT PRIMARY KEY,
    item_id TEXT NOT NULL,
    source TEXT NOT NULL,
    target TEXT NOT NULL,
    relation TEXT NOT NULL,
    routed_reason TEXT NOT NULL DEFAULT '',
    verdicts_json TEXT,
    rule_json TEXT,
    graph_version TEXT NOT NULL DEFAULT '',
    status TEXT NOT NULL DEFAULT 'pending',
    decision TEXT,
    reviewer TEXT,
    decided_at REAL,
    created_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS audit_log (
    seq INTEGER PRIMARY KEY AUTOINCREMENT,
    ts REAL NOT NULL,
    actor TEXT NOT NULL,
    action TEXT NOT NULL,
    payload_json TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS validation_settings (
    id INTEGER PRIMARY KEY CHECK (id = 1),
    settings_json TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS snapshots (
    version TEXT PRIMARY KEY,
    body BLOB NOT NULL,
    parent TEXT,
    dirty INTEGER NOT NULL DEFAULT 0,
    created_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS idempotency_keys (
    key TEXT PRIMARY KEY,
    version TEXT NOT NULL
);
"""


def _verdicts_to_json(verdicts: Iterable[Verdict]) -> str:
    return json.dumps([v.to_dict() for v in verdicts])


def _verdicts_from_json(blob: str | None) -> tuple[Verdict, ...]:
    if not blob:
        return ()
    return tuple(Verdict.from_dict(o) for o in json.loads(blob))


class Store:
    """Thread-safe facade over one sqlite file (or shared in-memory db)."""

    def __init__(self, path: str = ":memory:"):
        self.path = path
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(path, check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        if path != ":memory:":
            self._conn.execute("PRAGMA journal_mode=WAL")
        self._conn.execute("PRAGMA foreign_keys=ON")
        with self._lock, self._conn:
            self._conn.executescript(_SCHEMA)

    def close(self):
        with self._lock:
            self._conn.close()

    # -- settings ------------------------------------------------------------

    def get_settings(self) -> ValidationSettings:
        with self._lock:
            row = self._conn.execute(
                "SELECT settings_json FROM validation_settings WHERE id = 1"
            ).fetchone()
        if row is None:
            return ValidationSettings()
        return ValidationSettings.from_dict(json.loads(row["settings_json"]))

    def put_settings(self, settings: ValidationSettings) -> None:
        blob = json.dumps(settings.to_dict(), sort_keys=True)
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT INTO validation_settings (id, settings_json) VALUES (1, ?) "
                "ON CONFLICT (id) DO UPDATE SET settings_json = excluded.settings_json",
                (blob,),
            )

    # -- validation queue ----------------------------------------------------

    def enqueue_edge(self, source: str, target: str, relation: str, graph_version: str = "") -> str | None:
        """Queue one edge for validation; no-op when already queued."""
        item_id = uuid.uuid4().hex
        with self._lock, self._conn:
            cur = self._conn.execute(
                "INSERT INTO validation_queue (item_id, source, target, relation, graph_version, created_at) "
                "VALUES (?, ?, ?, ?, ?, ?) "
                "ON CONFLICT (source, target, relation, graph_version) DO NOTHING",
                (item_id, source, target, relation, graph_version, time.time()),
            )
            return item_id if cur.rowcount else None

    def claim_batch(self, limit: int, now: float | None = None, lease_seconds: float = 120.0) -> list[ValidationItem]:
        """Atomically claim due pending items, reclaiming expired leases."""
        now = time.time() if now is None else now
        with self._lock, self._conn:
            self._conn.execute(
                "UPDATE validation_queue SET status = 'pending', lease_expires = NULL "
                "WHERE status = 'processing' AND lease_expires IS NOT NULL AND lease_expires < ?",
                (now,),
            )
            rows = self._conn.execute(
                "SELECT * FROM validation_queue "
                "WHERE status = 'pending' AND next_attempt_at <= ? "
                "ORDER BY created_at, item_id LIMIT ?",
                (now, limit),
            ).fetchall()
            items = []
            for row in rows:
                self._conn.execute(
                    "UPDATE validation_queue SET status = 'processing', lease_expires = ? "
                    "WHERE item_id = ?",
                    (now + lease_seconds, row["item_id"]),
                )
                items.append(self._item_from_row(row, status="processing"))
        return items

    @staticmethod
    def _item_from_row(row: sqlite3.Row, status: str | None = None) -> ValidationItem:
        rule = None
        if row["rule_json"]:
            rule = Verdict.from_dict(json.loads(row["rule_json"]))
        return ValidationItem(
            item_id=row["item_id"],
            source=row["source"],
            target=row["target"],
            relation=row["relation"],
            status=status or row["status"],
            llm_verdicts=_verdicts_from_json(row["verdicts_json"]),
            rule_verdict=rule,
            final=row["final"],
            routed_reason=row["routed_reason"],
            attempts=row["attempts"],
            next_attempt_at=row["next_attempt_at"],
        )

    def complete_item(
        self,
        item_id: str,
        final: str,
        routed_reason: str,
        llm_verdicts: Iterable[Verdict],
        rule_verdict: Verdict | None,
        now: float | None = None,
    ) -> None:
        now = time.time() if now is None else now
        rule_json = json.dumps(rule_verdict.to_dict()) if rule_verdict else None
        with self._lock, self._conn:
            cur = self._conn.execute(
                "UPDATE validation_queue SET status = 'complete', final = ?, routed_reason = ?, "
                "verdicts_json = ?, rule_json = ?, completed_at = ?, lease_expires = NULL "
                "WHERE item_id = ? AND status = 'processing'",
                (final, routed_reason, _verdicts_to_json(llm_verdicts), rule_json, now, item_id),
            )
            if cur.rowcount == 0:
                raise ConflictError(f"item {item_id} is not processing; refusing to finalize twice")

    def release_item(self, item_id: str, retry_at: float) -> None:
        """Return a claimed item to pending with a future due time."""
        with self._lock, self._conn:
            self._conn.execute(
                "UPDATE validation_queue SET status = 'pending', lease_expires = NULL, "
                "attempts = attempts + 1, next_attempt_at = ? "
                "WHERE item_id = ? AND status = 'processing'",
                (retry_at, item_id),
            )

    def get_item(self, item_id: str) -> ValidationItem:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM validation_queue WHERE item_id = ?", (item_id,)
            ).fetchone()
        if row is None:
            raise NotFoundError(f"no validation item {item_id}")
        return self._item_from_row(row)

    def queue_counts(self) -> dict[str, int]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT status, COUNT(*) AS n FROM validation_queue GROUP BY status"
            ).fetchall()
        counts = {"pending": 0, "processing": 0, "complete": 0}
        for row in rows:
            counts[row["status"]] = row["n"]
        return counts

    def completed_items(self) -> list[ValidationItem]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT * FROM validation_queue WHERE status = 'complete' ORDER BY completed_at, item_id"
            ).fetchall()
        return [self._item_from_row(r) for r in rows]

    # -- validation cache ----------------------------------------------------

    @staticmethod
    def cache_key(source: str, target: str, relation: str, settings_fingerprint: str) -> str:
        blob = json.dumps([source, target, relation, settings_fingerprint])
        return hashlib.sha256(blob.encode()).hexdigest()

    def cache_get(self, key: str) -> dict[str, Any] | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM validation_cache WHERE cache_key = ?", (key,)
            ).fetchone()
        if row is None:
            return None
        rule = Verdict.from_dict(json.loads(row["rule_json"])) if row["rule_json"] else None
        return {
            "final": row["final"],
            "routed_reason": row["routed_reason"],
            "llm_verdicts": _verdicts_from_json(row["verdicts_json"]),
            "rule_verdict": rule,
        }

    def cache_put(
        self,
        key: str,
        final: str,
        routed_reason: str,
        llm_verdicts: Iterable[Verdict],
        rule_verdict: Verdict | None,
    ) -> None:
        rule_json = json.dumps(rule_verdict.to_dict()) if rule_verdict else None
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT INTO validation_cache (cache_key, final, routed_reason, verdicts_json, rule_json, created_at) "
                "VALUES (?, ?, ?, ?, ?, ?) ON CONFLICT (cache_key) DO NOTHING",
                (key, final, routed_reason, _verdicts_to_json(llm_verdicts), rule_json, time.time()),
            )

    # -- review queue --------------------------------------------------------

    def add_review(
        self,
        item: ValidationItem,
        routed_reason: str,
        llm_verdicts: Iterable[Verdict],
        rule_verdict: Verdict | None,
        graph_version: str = "",
    ) -> str:
        review_id = uuid.uuid4().hex
        rule_json = json.dumps(rule_verdict.to_dict()) if rule_verdict else None
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT INTO review_queue (review_id, item_id, source, target, relation, routed_reason, "
                "verdicts_json, rule_json, graph_version, created_at) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
                (
                    review_id,
                    item.item_id,
                    item.source,
                    item.target,
                    item.relation,
                    routed_reason,
                    _verdicts_to_json(llm_verdicts),
                    rule_json,
                    graph_version,
                    time.time(),
                ),
            )
        return review_id

    def pending_reviews(self) -> list[dict[str, Any]]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT * FROM review_queue WHERE status = 'pending' ORDER BY created_at, review_id"
            ).fetchall()
        return [self._review_from_row(r) for r in rows]

    def get_review(self, review_id: str) -> dict[str, Any]:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM review_queue WHERE review_id = ?", (review_id,)
            ).fetchone()
        if row is None:
            raise NotFoundError(f"no review item {review_id}")
        return self._review_from_row(row)

    @staticmethod
    def _review_from_row(row: sqlite3.Row) -> dict[str, Any]:
        rule = json.loads(row["rule_json"]) if row["rule_json"] else None
        return {
            "review_id": row["review_id"],
            "item_id": row["item_id"],
            "source": row["source"],
            "target": row["target"],
            "relation": row["relation"],
            "routed_reason": row["routed_reason"],
            "llm_verdicts": [v.to_dict() for v in _verdicts_from_json(row["verdicts_json"])],
            "rule_verdict": rule,
            "graph_version": row["graph_version"],
            "status": row["status"],
            "decision": row["decision"],
            "reviewer": row["reviewer"],
        }

    def record_decision(self, review_id: str, decision: str, reviewer: str) -> dict[str, Any]:
        """Terminal human decision; a second decision is a conflict."""
        now = time.time()
        with self._lock, self._conn:
            row = self._conn.execute(
                "SELECT status, reviewer, graph_version FROM review_queue WHERE review_id = ?",
                (review_id,),
            ).fetchone()
            if row is None:
                raise NotFoundError(f"no review item {review_id}")
            if row["status"] != "pending":
                raise ConflictError(f"already decided by {row['reviewer']}")
            self._conn.execute(
                "UPDATE review_queue SET status = 'decided', decision = ?, reviewer = ?, decided_at = ? "
                "WHERE review_id = ?",
                (decision, reviewer, now, review_id),
            )
            if row["graph_version"]:
                self._conn.execute(
                    "UPDATE snapshots SET dirty = 1 WHERE version = ?", (row["graph_version"],)
                )
            self._conn.execute(
                "INSERT INTO audit_log (ts, actor, action, payload_json) VALUES (?, ?, ?, ?)",
                (now, reviewer, "review_decision", json.dumps({"review_id": review_id, "decision": decision})),
            )
        return self.get_review(review_id)

    def decided_reviews(self, graph_version: str) -> list[dict[str, Any]]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT * FROM review_queue WHERE status = 'decided' AND graph_version = ? "
                "ORDER BY decided_at, review_id",
                (graph_version,),
            ).fetchall()
        return [self._review_from_row(r) for r in rows]

    # -- audit log -----------------------------------------------------------

    def audit(self, actor: str, action: str, payload: dict[str, Any]) -> None:
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT INTO audit_log (ts, actor, action, payload_json) VALUES (?, ?, ?, ?)",
                (time.time(), actor, action, json.dumps(payload, sort_keys=True)),
            )

    def audit_entries(self) -> list[dict[str, Any]]:
        with self._lock:
            rows = self._conn.execute("SELECT * FROM audit_log ORDER BY seq").fetchall()
        return [
            {"ts": r["ts"], "actor": r["actor"], "action": r["action"], "payload": json.loads(r["payload_json"])}
            for r in rows
        ]

    # -- snapshots -----------------------------------------------------------

    def put_snapshot(self, body: bytes, parent: str | None = None) -> str:
        version = hashlib.sha256(body).hexdigest()[:16]
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT INTO snapshots (version, body, parent, created_at) VALUES (?, ?, ?, ?) "
                "ON CONFLICT (version) DO NOTHING",
                (version, body, parent, time.time()),
            )
        return version

    def get_snapshot(self, version: str) -> bytes:
        with self._lock:
            row = self._conn.execute(
                "SELECT body FROM snapshots WHERE version = ?", (version,)
            ).fetchone()
        if row is None:
            raise NotFoundError(f"no snapshot version {version}")
        return row["body"]

    def snapshot_dirty(self, version: str) -> bool:
        with self._lock:
            row = self._conn.execute(
                "SELECT dirty FROM snapshots WHERE version = ?", (version,)
            ).fetchone()
        if row is None:
            raise NotFoundError(f"no snapshot version {version}")
        return bool(row["dirty"])

    def clear_dirty(self, version: str) -> None:
        with self._lock, self._conn:
            self._conn.execute("UPDATE snapshots SET dirty = 0 WHERE version = ?", (version,))

    def list_snapshots(self) -> list[dict[str, Any]]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT version, parent, dirty, created_at, LENGTH(body) AS size FROM snapshots ORDER BY created_at"
            ).fetchall()
        return [dict(r) for r in rows]

    def latest_version(self) -> str | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT version FROM snapshots ORDER BY created_at DESC, version LIMIT 1"
            ).fetchone()
        return row["version"] if row else None

    # -- idempotency ---------------------------------------------------------

    def idempotency_get(self, key: str) -> str | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT version FROM idempotency_keys WHERE key = ?", (key,)
            ).fetchone()
        return row["version"] if row else None

    def idempotency_put(self, key: str, version: str) -> None:
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT INTO idempotency_keys (key, version) VALUES (?, ?) ON CONFLICT (key) DO NOTHING",
                (key, version),
            )
