"""The embedded store: queue leases, cache, reviews, snapshots, idempotency."""

import pytest

from pqgraph.errors import ConflictError, NotFoundError
from pqgraph.validation import Store, ValidationSettings, Verdict


@pytest.fixture
def store():
    s = Store(":memory:")
    yield s
    s.close()


def seed_item(store, source="a", target="b", relation="CONNECTS_TO"):
    item_id = store.enqueue_edge(source, target, relation)
    assert item_id is not None
    return item_id


class TestQueue:
    def test_enqueue_dedupes_per_version(self, store):
        assert store.enqueue_edge("a", "b", "CONNECTS_TO", "v1") is not None
        assert store.enqueue_edge("a", "b", "CONNECTS_TO", "v1") is None
        # a different graph version is a separate work item
        assert store.enqueue_edge("a", "b", "CONNECTS_TO", "v2") is not None

    def test_claim_marks_processing(self, store):
        seed_item(store)
        items = store.claim_batch(10, now=100.0)
        assert len(items) == 1
        assert items[0].status == "processing"
        assert store.claim_batch(10, now=100.0) == []

    def test_claim_respects_due_time(self, store):
        item_id = seed_item(store)
        store.claim_batch(10, now=100.0)
        store.release_item(item_id, retry_at=200.0)
        assert store.claim_batch(10, now=150.0) == []
        assert len(store.claim_batch(10, now=200.0)) == 1

    def test_release_counts_attempts(self, store):
        item_id = seed_item(store)
        store.claim_batch(10, now=0.0)
        store.release_item(item_id, retry_at=10.0)
        assert store.get_item(item_id).attempts == 1
        store.claim_batch(10, now=20.0)
        store.release_item(item_id, retry_at=30.0)
        assert store.get_item(item_id).attempts == 2

    def test_expired_lease_reclaimed(self, store):
        # claimed but never completed: a crashed worker
        seed_item(store)
        store.claim_batch(10, now=100.0, lease_seconds=50.0)
        assert store.claim_batch(10, now=120.0) == []
        again = store.claim_batch(10, now=151.0)
        assert len(again) == 1

    def test_complete_requires_processing(self, store):
        item_id = seed_item(store)
        with pytest.raises(ConflictError):
            store.complete_item(item_id, "approved", "", [], None)

    def test_double_complete_conflicts(self, store):
        item_id = seed_item(store)
        store.claim_batch(10)
        store.complete_item(item_id, "approved", "", [], None)
        with pytest.raises(ConflictError, match="twice"):
            store.complete_item(item_id, "rejected", "", [], None)

    def test_completed_items_round_trip_verdicts(self, store):
        item_id = seed_item(store)
        store.claim_batch(10)
        votes = [Verdict(True, 0.9, "yes"), Verdict(False, 0.4, "no")]
        rule = Verdict(True, 0.8, "rule ok", source="rule")
        store.complete_item(item_id, "approved", "", votes, rule)
        done = store.completed_items()
        assert len(done) == 1
        assert done[0].llm_verdicts == tuple(votes)
        assert done[0].rule_verdict == rule
        assert done[0].final == "approved"

    def test_queue_counts(self, store):
        seed_item(store, "a", "b")
        seed_item(store, "a", "c")
        store.claim_batch(1)
        counts = store.queue_counts()
        assert counts == {"pending": 1, "processing": 1, "complete": 0}

    def test_get_missing_item(self, store):
        with pytest.raises(NotFoundError):
            store.get_item("nope")


class TestCache:
    def test_key_depends_on_settings_fingerprint(self):
        k1 = Store.cache_key("a", "b", "USES", "fp1")
        k2 = Store.cache_key("a", "b", "USES", "fp2")
        assert k1 != k2
        assert Store.cache_key("a", "b", "USES", "fp1") == k1

    def test_get_put_round_trip(self, store):
        key = Store.cache_key("a", "b", "USES", "fp")
        assert store.cache_get(key) is None
        votes = [Verdict(True, 0.9, "ok")]
        store.cache_put(key, "approved", "", votes, None)
        hit = store.cache_get(key)
        assert hit["final"] == "approved"
        assert hit["llm_verdicts"] == tuple(votes)

    def test_insert_once(self, store):
        key = Store.cache_key("a", "b", "USES", "fp")
        store.cache_put(key, "approved", "", [], None)
        store.cache_put(key, "rejected", "changed my mind", [], None)
        assert store.cache_get(key)["final"] == "approved"


class TestReviews:
    def seed_review(self, store):
        item_id = store.enqueue_edge("a", "b", "DEPENDS_ON")
        store.claim_batch(10)
        item = store.get_item(item_id)
        store.complete_item(item_id, "needs_review", "low confidence", [], None)
        return store.add_review(item, "low confidence", [Verdict(True, 0.3, "eh")], None, "v1")

    def test_pending_then_decided(self, store):
        review_id = self.seed_review(store)
        pending = store.pending_reviews()
        assert [r["review_id"] for r in pending] == [review_id]
        decided = store.record_decision(review_id, "approve", "alex")
        assert decided["status"] == "decided"
        assert decided["reviewer"] == "alex"
        assert store.pending_reviews() == []
        assert store.decided_reviews("v1")[0]["decision"] == "approve"

    def test_second_decision_conflicts(self, store):
        review_id = self.seed_review(store)
        store.record_decision(review_id, "approve", "alex")
        with pytest.raises(ConflictError, match="already decided by alex"):
            store.record_decision(review_id, "reject", "sam")

    def test_decision_marks_snapshot_dirty(self, store):
        version = store.put_snapshot(b"{}")
        item_id = store.enqueue_edge("a", "b", "USES", version)
        store.claim_batch(10)
        item = store.get_item(item_id)
        store.complete_item(item_id, "needs_review", "r", [], None)
        review_id = store.add_review(item, "r", [], None, version)
        assert not store.snapshot_dirty(version)
        store.record_decision(review_id, "reject", "alex")
        assert store.snapshot_dirty(version)

    def test_decision_lands_in_audit_log(self, store):
        review_id = self.seed_review(store)
        store.record_decision(review_id, "approve", "alex")
        actions = [e["action"] for e in store.audit_entries()]
        assert "review_decision" in actions

    def test_missing_review(self, store):
        with pytest.raises(NotFoundError):
            store.record_decision("nope", "approve", "x")


class TestSnapshots:
    def test_content_addressed(self, store):
        v1 = store.put_snapshot(b'{"x": 1}')
        v2 = store.put_snapshot(b'{"x": 1}')
        v3 = store.put_snapshot(b'{"x": 2}')
        assert v1 == v2
        assert v1 != v3
        assert store.get_snapshot(v1) == b'{"x": 1}'

    def test_parent_chain(self, store):
        v1 = store.put_snapshot(b"one")
        v2 = store.put_snapshot(b"two", parent=v1)
        listing = {s["version"]: s for s in store.list_snapshots()}
        assert listing[v2]["parent"] == v1
        assert listing[v1]["parent"] is None

    def test_latest_version(self, store):
        assert store.latest_version() is None
        store.put_snapshot(b"one")
        v2 = store.put_snapshot(b"two")
        assert store.latest_version() == v2

    def test_dirty_flag_lifecycle(self, store):
        v = store.put_snapshot(b"body")
        assert not store.snapshot_dirty(v)
        store._conn.execute("UPDATE snapshots SET dirty = 1 WHERE version = ?", (v,))
        assert store.snapshot_dirty(v)
        store.clear_dirty(v)
        assert not store.snapshot_dirty(v)

    def test_missing_snapshot(self, store):
        with pytest.raises(NotFoundError):
            store.get_snapshot("ffff")


class TestSettingsPersistence:
    def test_default_when_unset(self, store):
        assert store.get_settings() == ValidationSettings()

    def test_put_get_round_trip(self, store):
        s = ValidationSettings(votes_per_item=5, threshold_general=0.6)
        store.put_settings(s)
        assert store.get_settings() == s

    def test_overwrite(self, store):
        store.put_settings(ValidationSettings(votes_per_item=5))
        store.put_settings(ValidationSettings(votes_per_item=7))
        assert store.get_settings().votes_per_item == 7


class TestIdempotency:
    def test_first_writer_wins(self, store):
        assert store.idempotency_get("k") is None
        store.idempotency_put("k", "v1")
        store.idempotency_put("k", "v2")
        assert store.idempotency_get("k") == "v1"


def test_persists_across_reopen(tmp_path):
    path = str(tmp_path / "state.db")
    s1 = Store(path)
    version = s1.put_snapshot(b"durable")
    s1.put_settings(ValidationSettings(votes_per_item=5))
    s1.close()

    s2 = Store(path)
    try:
        assert s2.get_snapshot(version) == b"durable"
        assert s2.get_settings().votes_per_item == 5
    finally:
        s2.close()
