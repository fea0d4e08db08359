"""Event-sourced session engine.

Command handlers (create_session, gesture, answer) validate requests and
make decisions — ranking, snap resolution — but never touch state
directly: they emit choice events, and the single fold function
``_apply`` is the only code that mutates sessions and students. Replaying
a persisted log therefore reproduces live state exactly, because it runs
the identical fold over the identical records.
"""

from __future__ import annotations

import copy
import json
import threading
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable

from .config import DEFAULT_CONFIG, EngineConfig
from .events import ChoiceEvent, EventLog, iter_events
from .features import SessionContext, compute_features
from .lifecycle import (
    Card,
    CardState,
    GestureSample,
    IllegalTransition,
    LifecycleEvent,
    Resolution,
    apply_lifecycle_event,
    radar_animation_enabled,
    resolve_release,
    swipe_direction,
    transform_for_dx,
)
from .radar import build_radar_model, polygon_area
from .recommender import RankingWeights, SessionQueue, StaleCardError, rank_candidates
from .student import AnswerOutcome, LearningItem, StudentState, score_estimate, update_on_answer


class UnknownSessionError(KeyError):
    pass


class UnknownCardError(KeyError):
    pass


class SessionEndedError(Exception):
    pass


def utc_millis() -> int:
    return time.time_ns() // 1_000_000


class TickClock:
    """Deterministic clock for simulation: one tick per event."""

    def __init__(self, start: int = 0):
        self._next = start

    def __call__(self) -> int:
        tick = self._next
        self._next += 1
        return tick


@dataclass
class SessionState:
    session_id: str
    student_id: str
    queue: SessionQueue
    cards: dict[str, Card] = field(default_factory=dict)
    next_seq: int = 0
    next_card_n: int = 0
    cards_seen: int = 0
    cards_skipped: int = 0
    cards_answered: int = 0
    feature_history: list[tuple[int, tuple[float, ...]]] = field(default_factory=list)
    area_history: list[float] = field(default_factory=list)
    ended: bool = False
    events: list[ChoiceEvent] = field(default_factory=list)


class SessionEngine:
    """The card stack behind both the HTTP service and the simulator."""

    def __init__(
        self,
        pool: list[LearningItem],
        cfg: EngineConfig = DEFAULT_CONFIG,
        *,
        clock: Callable[[], int] | None = None,
        log_path: str | Path | None = None,
    ):
        self.cfg = cfg
        self.pool = list(pool)
        self.item_index = {it.item_id: it for it in self.pool}
        if len(self.item_index) != len(self.pool):
            raise ValueError("item pool contains duplicate item_ids")
        self.weights = RankingWeights.from_config(cfg)
        self.clock = clock or utc_millis
        self.students: dict[str, StudentState] = {}
        self.sessions: dict[str, SessionState] = {}
        self._session_counter = 0
        self._events_appended = 0
        self._locks: dict[str, threading.RLock] = {}
        self._locks_guard = threading.Lock()
        self._token_cache: dict[tuple[str, str], dict] = {}
        self._log: EventLog | None = None
        if log_path is not None:
            path = Path(log_path)
            if path.exists():
                for event in iter_events(path):
                    self._apply(event)
            self._log = EventLog(path)

    @classmethod
    def from_events(
        cls,
        pool: list[LearningItem],
        cfg: EngineConfig = DEFAULT_CONFIG,
        events: Iterable[ChoiceEvent] = (),
    ) -> "SessionEngine":
        """Rebuild engine state by folding an event stream (no persistence)."""
        engine = cls(pool, cfg)
        for event in events:
            engine._apply(event)
        return engine

    # ------------------------------------------------------------------
    # event core

    def _record(self, event: ChoiceEvent) -> ChoiceEvent:
        """Apply an event to live state and persist it."""
        self._apply(event)
        if self._log is not None:
            self._log.append(event)
            self._events_appended += 1
            if self.cfg.snapshot_every and self._events_appended % self.cfg.snapshot_every == 0:
                self.write_snapshot(self._snapshot_path())
        return event

    def _snapshot_path(self) -> Path:
        """Relative snapshot paths live next to the event log."""
        path = Path(self.cfg.snapshot_path)
        if path.is_absolute() or self._log is None:
            return path
        return self._log.path.parent / path

    def _emit(
        self,
        session: SessionState,
        kind: str,
        *,
        card_id: str | None = None,
        item_id: str | None = None,
        payload: dict | None = None,
    ) -> ChoiceEvent:
        return self._record(
            ChoiceEvent(
                seq=session.next_seq,
                timestamp=self.clock(),
                session_id=session.session_id,
                card_id=card_id,
                item_id=item_id,
                kind=kind,
                payload=payload or {},
            )
        )

    def _apply(self, event: ChoiceEvent) -> None:
        """The fold: the only place engine state changes."""
        kind = event.kind
        if kind == "session_start":
            student_id = event.payload["student_id"]
            student = self.students.get(student_id)
            if student is None:
                student = StudentState(
                    student_id=student_id,
                    recent_correct_rate=self.cfg.initial_recent_correct_rate,
                    cr_target=self.cfg.initial_cr_target,
                )
            self.students[student_id] = replace(student, items_consumed_in_session=0)
            self.sessions[event.session_id] = SessionState(
                session_id=event.session_id,
                student_id=student_id,
                queue=SessionQueue(session_id=event.session_id),
            )
            self._session_counter += 1
        session = self.sessions[event.session_id]
        if event.seq != session.next_seq:
            raise ValueError(
                f"seq gap in session {event.session_id}: expected {session.next_seq}, got {event.seq}"
            )
        session.next_seq += 1
        session.events.append(event)

        if kind == "session_start":
            return
        if kind == "session_end":
            session.ended = True
            return
        if kind == "load":
            item = self.item_index[event.item_id]
            features = compute_features(
                self.students[session.student_id], item, self._context(session), cfg=self.cfg
            )
            session.cards[event.card_id] = Card(
                card_id=event.card_id,
                item_id=item.item_id,
                features=features,
                radar=build_radar_model(features),
            )
            session.next_card_n += 1
            return

        card = session.cards[event.card_id]
        if kind == "preload":
            card = apply_lifecycle_event(card, LifecycleEvent.PRELOAD)
            session.queue.preloaded.append(card)
        elif kind == "promote":
            head = session.queue.promote_next()
            if head is None or head.card_id != card.card_id:
                raise ValueError(f"promote of {card.card_id!r} does not match queue head")
            card = head
            session.cards_seen += 1
        elif kind == "drag":
            card = apply_lifecycle_event(card, LifecycleEvent.DRAG)
            session.queue.top = card
        elif kind == "cancel":
            card = apply_lifecycle_event(card, LifecycleEvent.RELEASE_CANCEL)
            session.queue.top = card
        elif kind == "swipe":
            card = apply_lifecycle_event(card, LifecycleEvent.RELEASE_SWIPE)
            session.queue.top = None
            session.queue.consumed_item_ids.add(card.item_id)
            session.queue.skipped_item_ids.add(card.item_id)
            session.cards_skipped += 1
        elif kind == "tap":
            card = apply_lifecycle_event(card, LifecycleEvent.TAP)
            session.queue.top = card
            student = self.students[session.student_id]
            beta = self.cfg.cr_target_beta
            target = (1.0 - beta) * student.cr_target + beta * card.features.cr
            self.students[session.student_id] = replace(
                student, cr_target=min(max(target, 0.0), 1.0)
            )
            session.feature_history.append((event.seq, card.features.normalized))
            session.area_history.append(polygon_area(card.radar))
        elif kind == "answer":
            card = apply_lifecycle_event(card, LifecycleEvent.ANSWER)
            item = self.item_index[card.item_id]
            outcome = AnswerOutcome(
                correct=bool(event.payload["correct"]),
                elapsed_s=float(event.payload["elapsed_s"]),
            )
            self.students[session.student_id] = update_on_answer(
                self.students[session.student_id], item, outcome, cfg=self.cfg
            )
            session.queue.top = None
            session.queue.consumed_item_ids.add(card.item_id)
            session.queue.previous_item = item
            session.cards_answered += 1
        else:
            raise ValueError(f"unhandled event kind {kind!r}")
        session.cards[card.card_id] = card

    def _context(self, session: SessionState) -> SessionContext:
        student = self.students[session.student_id]
        return SessionContext(
            previous_item=session.queue.previous_item,
            items_consumed=student.items_consumed_in_session,
            recent_correct_rate=student.recent_correct_rate,
        )

    # ------------------------------------------------------------------
    # decision helpers

    def _eligible_items(self, session: SessionState) -> list[LearningItem]:
        blocked = session.queue.consumed_item_ids | session.queue.queued_item_ids()
        return [it for it in self.pool if it.item_id not in blocked]

    def _ranked_refill(self, session: SessionState) -> list[LearningItem]:
        return rank_candidates(
            self.students[session.student_id],
            self._eligible_items(session),
            session.queue,
            self.weights,
            self._context(session),
            item_lookup=self.item_index,
            cfg=self.cfg,
        )

    def _fill_queue(self, session: SessionState) -> None:
        """Emit load/preload (and promote, if the top is empty) to depth."""
        want_top = session.queue.top is None
        needed = self.cfg.preload_depth + (1 if want_top else 0) - len(session.queue.preloaded)
        if needed > 0:
            for item in self._ranked_refill(session)[:needed]:
                card_id = f"c{session.next_card_n}"
                self._emit(session, "load", card_id=card_id, item_id=item.item_id)
                self._emit(session, "preload", card_id=card_id, item_id=item.item_id)
        if want_top and session.queue.preloaded:
            head = session.queue.preloaded[0]
            self._emit(session, "promote", card_id=head.card_id, item_id=head.item_id)

    # ------------------------------------------------------------------
    # commands

    def create_session(self, student_id: str, *, fill: bool = True) -> dict:
        if not isinstance(student_id, str) or not student_id.strip() or len(student_id) > 64:
            raise ValueError("student_id must be a non-empty string of at most 64 characters")
        session_id = f"s{self._session_counter:06d}"
        self._record(
            ChoiceEvent(
                seq=0,
                timestamp=self.clock(),
                session_id=session_id,
                card_id=None,
                item_id=None,
                kind="session_start",
                payload={"student_id": student_id},
            )
        )
        session = self.sessions[session_id]
        if fill:
            self._fill_queue(session)
        return {
            "session_id": session_id,
            "student_id": student_id,
            "status": self._status(session),
            "top": self._card_payload(session.queue.top),
            "preloaded_count": len(session.queue.preloaded),
        }

    def gesture(
        self,
        session_id: str,
        card_id: str,
        kind: str,
        *,
        dx: float = 0.0,
        vx: float = 0.0,
        token: str | None = None,
    ) -> dict:
        with self._session_lock(session_id):
            session = self._session(session_id)
            if token is not None:
                cached = self._token_cache.get((session_id, token))
                if cached is not None:
                    return copy.deepcopy(cached)
            card = self._top_card(session, card_id)
            sample = GestureSample(dx=dx, vx=vx)  # validates finiteness
            if kind == "drag":
                if card.state not in (CardState.TOP_IDLE, CardState.DRAGGING):
                    raise IllegalTransition(card.state, LifecycleEvent.DRAG)
                self._emit(
                    session, "drag", card_id=card.card_id, item_id=card.item_id,
                    payload={"dx": sample.dx, "vx": sample.vx},
                )
                response = {
                    "resolution": "dragging",
                    "card_id": card.card_id,
                    "transform": transform_for_dx(dx, cfg=self.cfg).to_wire(),
                }
            elif kind == "release":
                if card.state is not CardState.DRAGGING:
                    raise IllegalTransition(card.state, LifecycleEvent.RELEASE_SWIPE)
                if resolve_release(sample, cfg=self.cfg) is Resolution.SWIPED:
                    self._emit(
                        session, "swipe", card_id=card.card_id, item_id=card.item_id,
                        payload={"direction": swipe_direction(dx)},
                    )
                    if session.queue.preloaded:
                        head = session.queue.preloaded[0]
                        self._emit(session, "promote", card_id=head.card_id, item_id=head.item_id)
                    self._fill_queue(session)
                    response = {"resolution": "swiped", "direction": swipe_direction(dx)}
                else:
                    self._emit(session, "cancel", card_id=card.card_id, item_id=card.item_id)
                    response = {"resolution": "canceled"}
                response.update(self._stack_fields(session))
            elif kind == "tap":
                if card.state is not CardState.TOP_IDLE:
                    raise IllegalTransition(card.state, LifecycleEvent.TAP)
                self._emit(session, "tap", card_id=card.card_id, item_id=card.item_id)
                response = {
                    "resolution": "engaged",
                    "item_ref": card.item_id,
                    "card": self._card_payload(session.queue.top),
                }
            else:
                raise ValueError(f"gesture kind must be drag, release, or tap, got {kind!r}")
            if token is not None:
                self._token_cache[(session_id, token)] = copy.deepcopy(response)
            return response

    def answer(
        self,
        session_id: str,
        card_id: str,
        *,
        correct: bool,
        elapsed_s: float,
        token: str | None = None,
    ) -> dict:
        with self._session_lock(session_id):
            session = self._session(session_id)
            if token is not None:
                cached = self._token_cache.get((session_id, token))
                if cached is not None:
                    return copy.deepcopy(cached)
            AnswerOutcome(correct=correct, elapsed_s=elapsed_s)  # validate early
            card = self._top_card(session, card_id)
            if card.state is not CardState.ENGAGED:
                raise IllegalTransition(card.state, LifecycleEvent.ANSWER)
            self._emit(
                session, "answer", card_id=card.card_id, item_id=card.item_id,
                payload={"correct": bool(correct), "elapsed_s": float(elapsed_s)},
            )
            if session.queue.preloaded:
                head = session.queue.preloaded[0]
                self._emit(session, "promote", card_id=head.card_id, item_id=head.item_id)
            self._fill_queue(session)
            response = {"progress": self.progress(session_id)}
            response.update(self._stack_fields(session))
            if token is not None:
                self._token_cache[(session_id, token)] = copy.deepcopy(response)
            return response

    def end_session(self, session_id: str) -> dict:
        with self._session_lock(session_id):
            session = self._session(session_id)
            if not session.ended:
                self._emit(session, "session_end")
            return {"session_id": session_id, "status": "ended"}

    # ------------------------------------------------------------------
    # queries

    def stack_view(self, session_id: str) -> dict:
        with self._session_lock(session_id):
            session = self._session(session_id)
            view = {"session_id": session_id, "status": self._status(session)}
            view.update(self._stack_fields(session))
            return view

    def progress(self, session_id: str) -> dict:
        with self._session_lock(session_id):
            session = self._session(session_id)
            student = self.students[session.student_id]
            return {
                "student_id": session.student_id,
                "theta": student.theta,
                "score": score_estimate(student, cfg=self.cfg),
                "cards_seen": session.cards_seen,
                "cards_skipped": session.cards_skipped,
                "cards_answered": session.cards_answered,
                "feature_history": [[seq, list(radii)] for seq, radii in session.feature_history],
                "area_history": list(session.area_history),
            }

    def events_for(self, session_id: str) -> list[dict]:
        with self._session_lock(session_id):
            session = self._session(session_id)
            return [e.to_dict() for e in session.events]

    def write_snapshot(self, path: str | Path) -> None:
        """Point-in-time JSON dump; the log remains the source of truth."""
        snapshot = {
            "students": {
                sid: {
                    "theta": s.theta,
                    "tau": s.tau,
                    "items_consumed_in_session": s.items_consumed_in_session,
                    "recent_correct_rate": s.recent_correct_rate,
                    "cr_target": s.cr_target,
                }
                for sid, s in sorted(self.students.items())
            },
            "sessions": {
                sid: {
                    "student_id": st.student_id,
                    "status": self._status(st),
                    "next_seq": st.next_seq,
                    "progress": self.progress(sid),
                }
                for sid, st in sorted(self.sessions.items())
            },
        }
        Path(path).write_text(json.dumps(snapshot, indent=2) + "\n", encoding="utf-8")

    # ------------------------------------------------------------------
    # internals

    def _session(self, session_id: str) -> SessionState:
        session = self.sessions.get(session_id)
        if session is None:
            raise UnknownSessionError(session_id)
        return session

    def _session_lock(self, session_id: str) -> threading.RLock:
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.RLock())

    def _top_card(self, session: SessionState, card_id: str) -> Card:
        if session.ended:
            raise SessionEndedError(session.session_id)
        card = session.cards.get(card_id)
        if card is None:
            raise UnknownCardError(card_id)
        top = session.queue.top
        if top is None or top.card_id != card_id:
            raise StaleCardError(f"card {card_id!r} is not the current top")
        return top

    def _status(self, session: SessionState) -> str:
        if session.ended:
            return "ended"
        if session.queue.top is None and not session.queue.preloaded:
            return "exhausted"
        return "active"

    def _stack_fields(self, session: SessionState) -> dict:
        nxt = session.queue.preloaded[0] if session.queue.preloaded else None
        return {
            "status": self._status(session),
            "top": self._card_payload(session.queue.top),
            "next": self._card_payload(nxt),
            "preloaded_count": len(session.queue.preloaded),
        }

    def _card_payload(self, card: Card | None) -> dict | None:
        if card is None:
            return None
        return {
            "card_id": card.card_id,
            "item_id": card.item_id,
            "features": card.features.to_wire(),
            "radar": card.radar.to_wire(),
            "state": card.state.value,
            "radar_animated": radar_animation_enabled(card.state),
        }
