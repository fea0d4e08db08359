from __future__ import annotations

import json
import random

import pytest

from swipelearn.config import DEFAULT_CONFIG
from swipelearn.engine import (
    SessionEngine,
    TickClock,
    UnknownCardError,
    UnknownSessionError,
)
from swipelearn.events import ChoiceEvent, read_events
from swipelearn.items import generate_item_pool
from swipelearn.lifecycle import IllegalTransition
from swipelearn.recommender import StaleCardError


def new_engine(n_items=30, log_path=None, seed=5):
    pool = generate_item_pool(n_items, seed=seed)
    return SessionEngine(pool, DEFAULT_CONFIG, clock=TickClock(), log_path=log_path)


def drive_random_session(engine, session_id, rng, steps=10):
    """Random but always-legal interaction: skips, engages, cancels."""
    for _ in range(steps):
        top = engine.stack_view(session_id)["top"]
        if top is None:
            break
        card_id = top["card_id"]
        roll = rng.random()
        if roll < 0.25:  # cancelled wiggle, then tap
            engine.gesture(session_id, card_id, "drag", dx=0.1, vx=0.2)
            engine.gesture(session_id, card_id, "release", dx=0.1, vx=0.0)
            engine.gesture(session_id, card_id, "tap")
            engine.answer(session_id, card_id, correct=rng.random() < 0.6,
                          elapsed_s=rng.uniform(5, 120))
        elif roll < 0.6:
            sign = -1.0 if rng.random() < 0.5 else 1.0
            engine.gesture(session_id, card_id, "drag", dx=sign * 0.2, vx=sign)
            engine.gesture(session_id, card_id, "release", dx=sign * rng.uniform(0.31, 0.8),
                           vx=sign * rng.uniform(0, 3))
        else:
            engine.gesture(session_id, card_id, "tap")
            engine.answer(session_id, card_id, correct=rng.random() < 0.6,
                          elapsed_s=rng.uniform(5, 120))
    return engine


class TestCreateSession:
    def test_new_student_gets_full_stack(self):
        resp = new_engine().create_session("alice")
        assert resp["status"] == "active"
        assert resp["top"] is not None
        assert resp["top"]["state"] == "top_idle"
        assert resp["top"]["radar_animated"] is True
        assert resp["preloaded_count"] == 2

    def test_initial_event_order(self):
        engine = new_engine()
        sid = engine.create_session("alice")["session_id"]
        kinds = [e["kind"] for e in engine.events_for(sid)]
        assert kinds == [
            "session_start", "load", "preload", "load", "preload", "load", "preload", "promote",
        ]
        seqs = [e["seq"] for e in engine.events_for(sid)]
        assert seqs == list(range(len(seqs)))

    def test_empty_pool_gives_exhausted_session(self):
        engine = SessionEngine([], DEFAULT_CONFIG, clock=TickClock())
        resp = engine.create_session("alice")
        assert resp["status"] == "exhausted"
        assert resp["top"] is None
        assert resp["preloaded_count"] == 0

    def test_two_sessions_share_student_state(self):
        engine = new_engine()
        first = engine.create_session("alice")
        sid1 = first["session_id"]
        card = first["top"]
        engine.gesture(sid1, card["card_id"], "tap")
        engine.answer(sid1, card["card_id"], correct=True, elapsed_s=10.0)
        theta_after = engine.progress(sid1)["theta"]
        second = engine.create_session("alice")
        assert second["session_id"] != sid1
        assert engine.progress(second["session_id"])["theta"] == theta_after
        # but the session counter restarts
        assert engine.students["alice"].items_consumed_in_session == 0

    def test_malformed_student_id(self):
        engine = new_engine()
        with pytest.raises(ValueError):
            engine.create_session("")
        with pytest.raises(ValueError):
            engine.create_session("x" * 65)


class TestGestureFlow:
    def test_release_above_threshold_swipes_and_promotes(self):
        engine = new_engine()
        resp = engine.create_session("alice")
        sid, card = resp["session_id"], resp["top"]
        engine.gesture(sid, card["card_id"], "drag", dx=0.2, vx=1.0)
        out = engine.gesture(sid, card["card_id"], "release", dx=0.5, vx=0.0)
        assert out["resolution"] == "swiped"
        assert out["direction"] == "right"
        assert out["top"]["card_id"] != card["card_id"]
        assert out["preloaded_count"] == 2  # refilled

    def test_release_below_threshold_cancels(self):
        engine = new_engine()
        resp = engine.create_session("alice")
        sid, card = resp["session_id"], resp["top"]
        engine.gesture(sid, card["card_id"], "drag", dx=0.1, vx=0.0)
        out = engine.gesture(sid, card["card_id"], "release", dx=0.1, vx=0.0)
        assert out["resolution"] == "canceled"
        assert out["top"]["card_id"] == card["card_id"]
        assert out["top"]["state"] == "top_idle"

    def test_release_without_drag_is_rejected(self):
        engine = new_engine()
        resp = engine.create_session("alice")
        with pytest.raises(IllegalTransition):
            engine.gesture(resp["session_id"], resp["top"]["card_id"], "release", dx=0.5)

    def test_tap_then_tap_conflicts(self):
        engine = new_engine()
        resp = engine.create_session("alice")
        sid, card_id = resp["session_id"], resp["top"]["card_id"]
        out = engine.gesture(sid, card_id, "tap")
        assert out["resolution"] == "engaged"
        assert out["item_ref"] == resp["top"]["item_id"]
        with pytest.raises(IllegalTransition):
            engine.gesture(sid, card_id, "tap")

    def test_stale_card_conflicts(self):
        engine = new_engine()
        resp = engine.create_session("alice")
        sid = resp["session_id"]
        nxt = engine.stack_view(sid)["next"]
        with pytest.raises(StaleCardError):
            engine.gesture(sid, nxt["card_id"], "tap")

    def test_unknown_ids(self):
        engine = new_engine()
        resp = engine.create_session("alice")
        with pytest.raises(UnknownSessionError):
            engine.gesture("nosuch", "c0", "tap")
        with pytest.raises(UnknownCardError):
            engine.gesture(resp["session_id"], "c999", "tap")

    def test_drag_echoes_transform(self):
        engine = new_engine()
        resp = engine.create_session("alice")
        out = engine.gesture(resp["session_id"], resp["top"]["card_id"], "drag", dx=-0.15, vx=0.1)
        assert out["transform"]["next"] == {"scale": 0.95, "opacity": 0.75}
        assert out["transform"]["top"]["rotate_deg"] == -7.5


class TestAnswerFlow:
    def test_answer_updates_student_and_queue(self):
        engine = new_engine()
        resp = engine.create_session("alice")
        sid, card = resp["session_id"], resp["top"]
        engine.gesture(sid, card["card_id"], "tap")
        out = engine.answer(sid, card["card_id"], correct=True, elapsed_s=12.5)
        assert out["progress"]["cards_answered"] == 1
        assert out["progress"]["theta"] > 0
        assert out["top"]["card_id"] != card["card_id"]
        session = engine.sessions[sid]
        assert session.queue.previous_item.item_id == card["item_id"]
        assert card["item_id"] in session.queue.consumed_item_ids

    def test_answer_without_tap_rejected(self):
        engine = new_engine()
        resp = engine.create_session("alice")
        with pytest.raises(IllegalTransition):
            engine.answer(resp["session_id"], resp["top"]["card_id"], correct=True, elapsed_s=5.0)

    def test_bad_elapsed_rejected(self):
        engine = new_engine()
        resp = engine.create_session("alice")
        sid, card_id = resp["session_id"], resp["top"]["card_id"]
        engine.gesture(sid, card_id, "tap")
        with pytest.raises(ValueError):
            engine.answer(sid, card_id, correct=True, elapsed_s=0.0)


class TestConsumedNeverReoffered:
    def test_random_choice_sequences(self):
        engine = new_engine(n_items=25)
        rng = random.Random(42)
        sid = engine.create_session("alice")["session_id"]
        offered: list[str] = [engine.stack_view(sid)["top"]["item_id"]]
        for _ in range(18):
            top = engine.stack_view(sid)["top"]
            if top is None:
                break
            card_id = top["card_id"]
            if rng.random() < 0.5:
                engine.gesture(sid, card_id, "drag", dx=0.4, vx=0.0)
                engine.gesture(sid, card_id, "release", dx=0.4, vx=0.0)
            else:
                engine.gesture(sid, card_id, "tap")
                engine.answer(sid, card_id, correct=True, elapsed_s=5.0)
            new_top = engine.stack_view(sid)["top"]
            if new_top is not None:
                offered.append(new_top["item_id"])
        consumed_then_offered = [
            item for n, item in enumerate(offered) if item in offered[:n]
        ]
        assert consumed_then_offered == []


class TestEventSourcing:
    def test_fold_reproduces_live_state(self, tmp_path):
        log = tmp_path / "events.jsonl"
        engine = new_engine(log_path=log)
        rng = random.Random(7)
        for n in range(4):
            sid = engine.create_session(f"stu{n % 2}")["session_id"]
            drive_random_session(engine, sid, rng, steps=8)
        folded = SessionEngine.from_events(engine.pool, DEFAULT_CONFIG, read_events(log))
        assert folded.students == engine.students
        assert folded.sessions.keys() == engine.sessions.keys()
        for sid, live in engine.sessions.items():
            rebuilt = folded.sessions[sid]
            assert rebuilt.queue.top == live.queue.top
            assert rebuilt.queue.preloaded == live.queue.preloaded
            assert rebuilt.queue.consumed_item_ids == live.queue.consumed_item_ids
            assert rebuilt.queue.skipped_item_ids == live.queue.skipped_item_ids
            assert rebuilt.queue.previous_item == live.queue.previous_item
            assert rebuilt.cards == live.cards
            assert folded.progress(sid) == engine.progress(sid)
            assert rebuilt.events == live.events

    def test_restart_continues_gapless(self, tmp_path):
        log = tmp_path / "events.jsonl"
        engine_a = new_engine(log_path=log)
        sid = engine_a.create_session("alice")["session_id"]
        drive_random_session(engine_a, sid, random.Random(1), steps=3)
        engine_a._log.close()

        engine_b = new_engine(log_path=log)
        assert engine_b.progress(sid) == engine_a.progress(sid)
        drive_random_session(engine_b, sid, random.Random(2), steps=3)
        seqs = [e.seq for e in read_events(log) if e.session_id == sid]
        assert seqs == list(range(len(seqs)))
        # a session created after restart does not collide with existing ids
        assert engine_b.create_session("bob")["session_id"] not in (sid,)

    def test_progress_recomputable_from_events(self):
        engine = new_engine()
        sid = engine.create_session("alice")["session_id"]
        drive_random_session(engine, sid, random.Random(3), steps=6)
        events = [ChoiceEvent.from_dict(e) for e in engine.events_for(sid)]
        folded = SessionEngine.from_events(engine.pool, DEFAULT_CONFIG, events)
        assert folded.progress(sid) == engine.progress(sid)

    def test_fold_rejects_seq_gaps(self):
        engine = new_engine()
        sid = engine.create_session("alice")["session_id"]
        events = [ChoiceEvent.from_dict(e) for e in engine.events_for(sid)]
        broken = events[:3] + events[4:]
        with pytest.raises(ValueError, match="seq gap"):
            SessionEngine.from_events(engine.pool, DEFAULT_CONFIG, broken)


class TestIdempotency:
    def test_release_retry_does_not_double_apply(self):
        engine = new_engine()
        resp = engine.create_session("alice")
        sid, card_id = resp["session_id"], resp["top"]["card_id"]
        engine.gesture(sid, card_id, "drag", dx=0.2, vx=0.5)
        first = engine.gesture(sid, card_id, "release", dx=0.5, vx=0.0, token="tok-1")
        n_events = len(engine.events_for(sid))
        retry = engine.gesture(sid, card_id, "release", dx=0.5, vx=0.0, token="tok-1")
        assert retry == first
        assert len(engine.events_for(sid)) == n_events
        assert engine.progress(sid)["cards_skipped"] == 1

    def test_answer_retry(self):
        engine = new_engine()
        resp = engine.create_session("alice")
        sid, card_id = resp["session_id"], resp["top"]["card_id"]
        engine.gesture(sid, card_id, "tap")
        first = engine.answer(sid, card_id, correct=True, elapsed_s=9.0, token="a-1")
        retry = engine.answer(sid, card_id, correct=True, elapsed_s=9.0, token="a-1")
        assert retry == first
        assert engine.progress(sid)["cards_answered"] == 1


class TestProgressAndSnapshots:
    def test_fresh_session_counts(self):
        engine = new_engine()
        sid = engine.create_session("alice")["session_id"]
        p = engine.progress(sid)
        assert p["cards_seen"] == 1  # the initial top card is on display
        assert p["cards_skipped"] == 0 and p["cards_answered"] == 0
        assert p["feature_history"] == [] and p["area_history"] == []

    def test_engaged_card_lands_in_history(self):
        engine = new_engine()
        resp = engine.create_session("alice")
        sid, card_id = resp["session_id"], resp["top"]["card_id"]
        engine.gesture(sid, card_id, "tap")
        engine.answer(sid, card_id, correct=False, elapsed_s=30.0)
        p = engine.progress(sid)
        assert len(p["feature_history"]) == 1
        assert len(p["area_history"]) == 1
        assert p["cards_seen"] >= p["cards_answered"] + p["cards_skipped"]

    def test_snapshot_file(self, tmp_path):
        engine = new_engine()
        sid = engine.create_session("alice")["session_id"]
        drive_random_session(engine, sid, random.Random(4), steps=3)
        path = tmp_path / "snap.json"
        engine.write_snapshot(path)
        snap = json.loads(path.read_text())
        assert "alice" in snap["students"]
        assert snap["sessions"][sid]["progress"] == engine.progress(sid)

    def test_periodic_snapshots_land_next_to_the_log(self, tmp_path):
        import dataclasses

        cfg = dataclasses.replace(DEFAULT_CONFIG, snapshot_every=5)
        pool = generate_item_pool(20, seed=5)
        engine = SessionEngine(pool, cfg, clock=TickClock(), log_path=tmp_path / "ev.jsonl")
        sid = engine.create_session("alice")["session_id"]
        drive_random_session(engine, sid, random.Random(4), steps=4)
        assert (tmp_path / cfg.snapshot_path).exists()
