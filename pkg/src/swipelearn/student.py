"""Per-student latent ability model.

One-parameter logistic (Rasch) response model with Elo-style sequential
updates:

    P(correct) = 1 / (1 + exp(-(theta - b)))
    theta'     = theta + K * (outcome - P(correct))

The state is a plain value; callers own update ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .config import DEFAULT_CONFIG, EngineConfig

# Predictions are clamped into an open interval so downstream ratios and
# logs stay finite even for extreme ability/difficulty gaps.
_P_FLOOR = 1e-15
_P_CEIL = 1.0 - 1e-15


def _require_finite(name: str, value: float) -> float:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class StudentState:
    """Latent traits plus session counters that drive the feature engine."""

    student_id: str
    theta: float = 0.0                     # ability, logit scale
    tau: float = 0.0                       # speed trait, log-time scale
    items_consumed_in_session: int = 0
    recent_correct_rate: float = 0.5       # EWMA of answer outcomes
    cr_target: float = 0.7                 # preferred correctness probability

    def __post_init__(self) -> None:
        _require_finite("theta", self.theta)
        _require_finite("tau", self.tau)
        if self.items_consumed_in_session < 0:
            raise ValueError("items_consumed_in_session must be non-negative")
        if not 0.0 <= self.recent_correct_rate <= 1.0:
            raise ValueError("recent_correct_rate must be in [0, 1]")
        if not 0.0 <= self.cr_target <= 1.0:
            raise ValueError("cr_target must be in [0, 1]")


@dataclass(frozen=True)
class LearningItem:
    """Metadata for one recommendable unit; content itself is an opaque ref."""

    item_id: str
    difficulty_b: float                    # logit scale
    log_median_time_mu: float              # log-seconds
    time_limit_s: float                    # expert-recommended limit, seconds
    topic_tags: frozenset[str]

    def __post_init__(self) -> None:
        _require_finite("difficulty_b", self.difficulty_b)
        _require_finite("log_median_time_mu", self.log_median_time_mu)
        if not (math.isfinite(self.time_limit_s) and self.time_limit_s > 0):
            raise ValueError("time_limit_s must be positive")
        if not self.topic_tags:
            raise ValueError("topic_tags must be non-empty")
        object.__setattr__(self, "topic_tags", frozenset(self.topic_tags))


@dataclass(frozen=True)
class AnswerOutcome:
    correct: bool
    elapsed_s: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.elapsed_s) and self.elapsed_s > 0):
            raise ValueError("elapsed_s must be positive")


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def predict_correctness(student: StudentState, item: LearningItem) -> float:
    """Rasch probability that ``student`` answers ``item`` correctly.

    Strictly inside (0, 1); increasing in theta, decreasing in difficulty.
    """
    p = _sigmoid(student.theta - item.difficulty_b)
    return min(max(p, _P_FLOOR), _P_CEIL)


def update_on_answer(
    student: StudentState,
    item: LearningItem,
    outcome: AnswerOutcome,
    *,
    cfg: EngineConfig = DEFAULT_CONFIG,
) -> StudentState:
    """Elo step toward the observed outcome plus session bookkeeping.

    theta moves by K * (y - p); the recent-correct EWMA moves by alpha.
    """
    y = 1.0 if outcome.correct else 0.0
    p = predict_correctness(student, item)
    rate = (1.0 - cfg.ewma_alpha) * student.recent_correct_rate + cfg.ewma_alpha * y
    return replace(
        student,
        theta=student.theta + cfg.k_s * (y - p),
        recent_correct_rate=min(max(rate, 0.0), 1.0),
        items_consumed_in_session=student.items_consumed_in_session + 1,
    )


def score_from_theta(theta: float, *, cfg: EngineConfig = DEFAULT_CONFIG) -> int:
    """Map ability onto the standardized-test-like score scale."""
    raw = round(cfg.score_mid + cfg.score_per_logit * theta)
    return int(min(max(raw, cfg.score_min), cfg.score_max))


def score_estimate(student: StudentState, *, cfg: EngineConfig = DEFAULT_CONFIG) -> int:
    return score_from_theta(student.theta, cfg=cfg)
