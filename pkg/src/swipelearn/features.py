"""The five card features and their normalization to polygon radii.

Axis order is fixed as (E, Cp, Cr, O, I): expected score gain, completion
probability, correctness probability, on-time probability, initiative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import DEFAULT_CONFIG, EngineConfig
from .student import LearningItem, StudentState, predict_correctness, score_from_theta

FEATURE_ORDER = ("E", "Cp", "Cr", "O", "I")


@dataclass(frozen=True)
class FeatureVector:
    e_raw: float   # points
    cp: float
    cr: float
    o: float
    i: float
    normalized: tuple[float, float, float, float, float]

    def __post_init__(self) -> None:
        if self.e_raw < 0:
            raise ValueError("e_raw must be non-negative")
        for name in ("cp", "cr", "o", "i"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v!r}")
        if len(self.normalized) != len(FEATURE_ORDER):
            raise ValueError("normalized must hold one radius per axis")
        if any(not 0.0 <= r <= 1.0 for r in self.normalized):
            raise ValueError("normalized radii must be in [0, 1]")

    def to_wire(self) -> dict:
        return {"e": self.e_raw, "cp": self.cp, "cr": self.cr, "o": self.o, "i": self.i}


@dataclass(frozen=True)
class SessionContext:
    """What the feature engine needs to know about the session so far."""

    previous_item: LearningItem | None = None   # last item actually solved
    items_consumed: int = 0
    recent_correct_rate: float = 0.5

    def __post_init__(self) -> None:
        if self.items_consumed < 0:
            raise ValueError("items_consumed must be non-negative")


def _norm_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def expected_score_gain(
    student: StudentState,
    item: LearningItem,
    *,
    cfg: EngineConfig = DEFAULT_CONFIG,
) -> float:
    """Score points gained if the student answers this item correctly.

    The hypothetical correct answer moves theta by K * (1 - p); the gain is
    the resulting scaled-score difference, so it saturates to 0 at the score
    ceiling and is never negative.
    """
    p = predict_correctness(student, item)
    bumped = student.theta + cfg.k_s * (1.0 - p)
    return float(score_from_theta(bumped, cfg=cfg) - score_from_theta(student.theta, cfg=cfg))


def completion_probability(
    student: StudentState,
    ctx: SessionContext,
    *,
    cfg: EngineConfig = DEFAULT_CONFIG,
) -> float:
    """Probability the student keeps going after consuming the next item.

    Logistic in session fatigue (items consumed) and recent success.
    """
    x = cfg.cp_c0 - cfg.cp_c1 * ctx.items_consumed + cfg.cp_c2 * (ctx.recent_correct_rate - 0.5)
    return _sigmoid(x)


def on_time_probability(
    student: StudentState,
    item: LearningItem,
    *,
    cfg: EngineConfig = DEFAULT_CONFIG,
) -> float:
    """P(answer within the item's time limit) under a lognormal time model.

    The student's speed trait shifts the item's log-median time; sigma_t is
    the shared log-time spread.
    """
    if not item.time_limit_s > 0:
        raise ValueError("time_limit_s must be positive")
    z = (math.log(item.time_limit_s) - (item.log_median_time_mu - student.tau)) / cfg.sigma_t
    return _norm_cdf(z)


def initiative(previous: LearningItem | None, item: LearningItem) -> float:
    """How different the candidate is from the previously solved item.

    Equal-weight blend of difficulty distance (saturating at 4 logits) and
    topic-tag dissimilarity; 1.0 when nothing has been solved yet.
    """
    if previous is None:
        return 1.0
    diff = min(abs(item.difficulty_b - previous.difficulty_b) / 4.0, 1.0)
    union = item.topic_tags | previous.topic_tags
    jaccard = len(item.topic_tags & previous.topic_tags) / len(union)
    return 0.5 * diff + 0.5 * (1.0 - jaccard)


def compute_features(
    student: StudentState,
    item: LearningItem,
    ctx: SessionContext,
    *,
    cfg: EngineConfig = DEFAULT_CONFIG,
) -> FeatureVector:
    """Assemble the five features and their [0, 1] polygon radii.

    Probabilities pass through unchanged; the score gain is divided by
    e_max and clamped.
    """
    e = expected_score_gain(student, item, cfg=cfg)
    cp = completion_probability(student, ctx, cfg=cfg)
    cr = predict_correctness(student, item)
    o = on_time_probability(student, item, cfg=cfg)
    i = initiative(ctx.previous_item, item)
    e_norm = min(max(e / cfg.e_max, 0.0), 1.0)
    return FeatureVector(e_raw=e, cp=cp, cr=cr, o=o, i=i, normalized=(e_norm, cp, cr, o, i))
