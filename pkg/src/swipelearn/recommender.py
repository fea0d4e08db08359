"""Candidate ranking and the per-session card queue.

Ranking is a transparent linear score over the same features the student
sees on the card: normalized expected gain, closeness of predicted
correctness to the student's revealed preference, and a penalty for
similarity to items the student skipped.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Mapping, Sequence

from .config import DEFAULT_CONFIG, EngineConfig
from .features import SessionContext, expected_score_gain, initiative
from .lifecycle import Card, CardState, LifecycleEvent, apply_lifecycle_event
from .student import LearningItem, StudentState, predict_correctness


class StaleCardError(Exception):
    """The referenced card is not the current top of the stack."""


@dataclass(frozen=True)
class RankingWeights:
    w_gain: float = 1.0
    w_fit: float = 1.0
    skip_penalty: float = 0.5

    def __post_init__(self) -> None:
        if min(self.w_gain, self.w_fit, self.skip_penalty) < 0:
            raise ValueError("ranking weights must be non-negative")

    @classmethod
    def from_config(cls, cfg: EngineConfig) -> "RankingWeights":
        return cls(w_gain=cfg.w_gain, w_fit=cfg.w_fit, skip_penalty=cfg.skip_penalty)


@dataclass
class SessionQueue:
    """Top card plus the preloaded next views, and what the session consumed."""

    session_id: str
    top: Card | None = None
    preloaded: list[Card] = field(default_factory=list)
    consumed_item_ids: set[str] = field(default_factory=set)
    skipped_item_ids: set[str] = field(default_factory=set)
    previous_item: LearningItem | None = None

    def queued_item_ids(self) -> set[str]:
        ids = {c.item_id for c in self.preloaded}
        if self.top is not None:
            ids.add(self.top.item_id)
        return ids

    def promote_next(self) -> Card | None:
        """Move the head preloaded card to the top slot (TopIdle)."""
        if not self.preloaded:
            self.top = None
            return None
        card = apply_lifecycle_event(self.preloaded.pop(0), LifecycleEvent.PROMOTE)
        self.top = card
        return card


def candidate_score(
    student: StudentState,
    item: LearningItem,
    weights: RankingWeights,
    skipped_items: Sequence[LearningItem],
    *,
    cfg: EngineConfig = DEFAULT_CONFIG,
) -> float:
    e_norm = min(max(expected_score_gain(student, item, cfg=cfg) / cfg.e_max, 0.0), 1.0)
    cr = predict_correctness(student, item)
    fit = 1.0 - abs(cr - student.cr_target)
    similarity = max((1.0 - initiative(s, item) for s in skipped_items), default=0.0)
    return weights.w_gain * e_norm + weights.w_fit * fit - weights.skip_penalty * similarity


def rank_candidates(
    student: StudentState,
    pool: Sequence[LearningItem],
    queue: SessionQueue,
    weights: RankingWeights,
    ctx: SessionContext,
    *,
    item_lookup: Mapping[str, LearningItem] | None = None,
    cfg: EngineConfig = DEFAULT_CONFIG,
) -> list[LearningItem]:
    """Pool sorted by descending score, ties broken by ascending item_id.

    The pool must already exclude consumed items. ``item_lookup`` resolves
    skipped item ids for the similarity penalty; without it skips exert no
    penalty (they are no longer in the pool).
    """
    skipped: list[LearningItem] = []
    if item_lookup is not None:
        skipped = [item_lookup[i] for i in sorted(queue.skipped_item_ids) if i in item_lookup]
    scored = [
        (candidate_score(student, it, weights, skipped, cfg=cfg), it)
        for it in pool
    ]
    scored.sort(key=lambda pair: (-pair[0], pair[1].item_id))
    return [it for _, it in scored]


def refill(
    queue: SessionQueue,
    ranked: Sequence[LearningItem],
    make_card: Callable[[LearningItem], Card],
    *,
    cfg: EngineConfig = DEFAULT_CONFIG,
) -> SessionQueue:
    """Extend the preloaded list to the configured depth from ``ranked``.

    ``ranked`` must exclude consumed and currently-queued items. Cards are
    created (features frozen) as items enter the queue, then preloaded; if
    there is no top card the first new card is promoted into it.
    """
    pending: Iterable[LearningItem] = iter(ranked)
    while len(queue.preloaded) < cfg.preload_depth + (0 if queue.top is not None else 1):
        item = next(pending, None)
        if item is None:
            break
        card = make_card(item)
        if card.state is CardState.QUEUED:
            card = apply_lifecycle_event(card, LifecycleEvent.PRELOAD)
        queue.preloaded.append(card)
    if queue.top is None and queue.preloaded:
        queue.promote_next()
    return queue


def on_choice(
    queue: SessionQueue,
    student: StudentState,
    card: Card,
    choice: str,
    *,
    ranked: Sequence[LearningItem] = (),
    make_card: Callable[[LearningItem], Card] | None = None,
    cfg: EngineConfig = DEFAULT_CONFIG,
) -> tuple[SessionQueue, StudentState]:
    """Apply a skip or engage decision for the current top card.

    Skips retire the item and promote the next preloaded card, refilling
    from ``ranked`` when a card factory is supplied. Engaging keeps the card
    active and nudges cr_target toward the card's displayed correctness
    probability; skips leave the preference untouched (a skip is ambiguous).
    """
    if queue.top is None or queue.top.card_id != card.card_id:
        raise StaleCardError(f"card {card.card_id!r} is not the current top")
    if choice == "skip":
        if card.state is CardState.TOP_IDLE:  # a skip is always a drag that completed
            card = apply_lifecycle_event(card, LifecycleEvent.DRAG)
        skipped = apply_lifecycle_event(card, LifecycleEvent.RELEASE_SWIPE)
        queue.consumed_item_ids.add(skipped.item_id)
        queue.skipped_item_ids.add(skipped.item_id)
        queue.top = None
        queue.promote_next()
        if make_card is not None:
            refill(queue, ranked, make_card, cfg=cfg)
        return queue, student
    if choice == "engage":
        engaged = apply_lifecycle_event(card, LifecycleEvent.TAP)
        queue.top = engaged
        beta = cfg.cr_target_beta
        target = (1.0 - beta) * student.cr_target + beta * engaged.features.cr
        return queue, replace(student, cr_target=min(max(target, 0.0), 1.0))
    raise ValueError(f"choice must be 'skip' or 'engage', got {choice!r}")
