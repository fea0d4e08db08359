"""Card lifecycle state machine, snap resolution, and dx-driven transforms.

All displacement values are in card widths (velocity in widths/second) so
the backend and every client resolve gestures identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .config import DEFAULT_CONFIG, EngineConfig
from .features import FeatureVector
from .radar import RadarRenderModel


class CardState(Enum):
    QUEUED = "queued"
    PRELOADED = "preloaded"
    TOP_IDLE = "top_idle"
    DRAGGING = "dragging"
    SKIPPED = "skipped"
    ENGAGED = "engaged"
    ANSWERED = "answered"


class LifecycleEvent(Enum):
    LOAD = "load"
    PRELOAD = "preload"
    PROMOTE = "promote"
    DRAG = "drag"
    RELEASE_CANCEL = "release_cancel"
    RELEASE_SWIPE = "release_swipe"
    TAP = "tap"
    ANSWER = "answer"


TERMINAL_STATES = frozenset({CardState.SKIPPED, CardState.ANSWERED})

# LOAD is card creation (the entry into QUEUED), so it never appears as a
# transition out of an existing state. DRAG self-loops: a drag in progress
# keeps reporting samples.
_TRANSITIONS: dict[tuple[CardState, LifecycleEvent], CardState] = {
    (CardState.QUEUED, LifecycleEvent.PRELOAD): CardState.PRELOADED,
    (CardState.PRELOADED, LifecycleEvent.PROMOTE): CardState.TOP_IDLE,
    (CardState.TOP_IDLE, LifecycleEvent.DRAG): CardState.DRAGGING,
    (CardState.DRAGGING, LifecycleEvent.DRAG): CardState.DRAGGING,
    (CardState.DRAGGING, LifecycleEvent.RELEASE_CANCEL): CardState.TOP_IDLE,
    (CardState.DRAGGING, LifecycleEvent.RELEASE_SWIPE): CardState.SKIPPED,
    (CardState.TOP_IDLE, LifecycleEvent.TAP): CardState.ENGAGED,
    (CardState.ENGAGED, LifecycleEvent.ANSWER): CardState.ANSWERED,
}


class IllegalTransition(Exception):
    """Raised when an event is not legal in the card's current state."""

    def __init__(self, state: CardState, event: LifecycleEvent):
        self.state = state
        self.event = event
        super().__init__(f"event {event.value!r} is illegal in state {state.value!r}")


@dataclass(frozen=True)
class Card:
    """One recommendation with its features frozen at creation time."""

    card_id: str
    item_id: str
    features: FeatureVector
    radar: RadarRenderModel
    state: CardState = CardState.QUEUED


def apply_lifecycle_event(card: Card, event: LifecycleEvent) -> Card:
    """Pure transition: returns the card in its next state or raises.

    Rejected events leave the input untouched (it is immutable anyway).
    """
    nxt = _TRANSITIONS.get((card.state, event))
    if nxt is None:
        raise IllegalTransition(card.state, event)
    return replace(card, state=nxt)


def radar_animation_enabled(state: CardState) -> bool:
    """Radar charts animate only at the front of the stack."""
    return state in (CardState.TOP_IDLE, CardState.DRAGGING)


class Resolution(Enum):
    SWIPED = "swiped"
    CANCELED = "canceled"


@dataclass(frozen=True)
class GestureSample:
    dx: float   # signed displacement, card widths
    vx: float   # signed velocity, card widths / second

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dx) and math.isfinite(self.vx)):
            raise ValueError("dx and vx must be finite")


def resolve_release(sample: GestureSample, *, cfg: EngineConfig = DEFAULT_CONFIG) -> Resolution:
    """Snap decision for a released card.

    Swipes on distance alone (|dx| past threshold) or on a fling: velocity
    past threshold in the same direction the card has moved.
    """
    if abs(sample.dx) >= cfg.swipe_dx_threshold:
        return Resolution.SWIPED
    if (
        sample.dx != 0.0
        and abs(sample.vx) >= cfg.swipe_vx_threshold
        and math.copysign(1.0, sample.vx) == math.copysign(1.0, sample.dx)
    ):
        return Resolution.SWIPED
    return Resolution.CANCELED


def swipe_direction(dx: float) -> str:
    """Analytics-only direction label; both directions mean skip."""
    return "left" if dx < 0 else "right"


@dataclass(frozen=True)
class TopTransform:
    translate_x: float   # card widths
    rotate_deg: float
    scale: float


@dataclass(frozen=True)
class NextTransform:
    scale: float
    opacity: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.opacity <= 1.0:
            raise ValueError("opacity must be in [0, 1]")


@dataclass(frozen=True)
class TransformSpec:
    top: TopTransform
    next: NextTransform

    def to_wire(self) -> dict:
        return {
            "top": {
                "translate_x": self.top.translate_x,
                "rotate_deg": self.top.rotate_deg,
                "scale": self.top.scale,
            },
            "next": {"scale": self.next.scale, "opacity": self.next.opacity},
        }


def transform_for_dx(dx: float, *, cfg: EngineConfig = DEFAULT_CONFIG) -> TransformSpec:
    """Render transforms for a drag displacement.

    The top card translates and rolls with dx; the next view grows and
    becomes opaque as the drag approaches the swipe threshold.
    """
    if not math.isfinite(dx):
        raise ValueError("dx must be finite")
    ratio = dx / cfg.swipe_dx_threshold
    rotate = cfg.max_rotation_deg * min(max(ratio, -1.0), 1.0)
    progress = min(abs(dx) / cfg.swipe_dx_threshold, 1.0)
    return TransformSpec(
        top=TopTransform(translate_x=dx, rotate_deg=rotate, scale=1.0),
        next=NextTransform(
            scale=cfg.next_scale_min + (1.0 - cfg.next_scale_min) * progress,
            opacity=cfg.next_opacity_min + (1.0 - cfg.next_opacity_min) * progress,
        ),
    )
