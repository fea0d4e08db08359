"""Swipe-card learning item recommender.

Recommendations are shown one card at a time, each annotated with five
feature radii rendered as a pentagon; students skip by swiping or engage
by tapping, every choice lands in an append-only event log, and ranking
adapts to the revealed preferences.
"""

from .config import DEFAULT_CONFIG, EngineConfig, load_config
from .engine import SessionEngine, TickClock
from .features import FeatureVector, SessionContext, compute_features
from .lifecycle import Card, CardState, GestureSample, Resolution, resolve_release, transform_for_dx
from .radar import RadarRenderModel, build_radar_model, polygon_area
from .recommender import RankingWeights, SessionQueue, on_choice, rank_candidates, refill
from .student import AnswerOutcome, LearningItem, StudentState, predict_correctness, update_on_answer

__all__ = [
    "AnswerOutcome",
    "Card",
    "CardState",
    "DEFAULT_CONFIG",
    "EngineConfig",
    "FeatureVector",
    "GestureSample",
    "LearningItem",
    "RadarRenderModel",
    "RankingWeights",
    "Resolution",
    "SessionContext",
    "SessionEngine",
    "SessionQueue",
    "StudentState",
    "TickClock",
    "build_radar_model",
    "compute_features",
    "load_config",
    "on_choice",
    "polygon_area",
    "predict_correctness",
    "rank_candidates",
    "refill",
    "resolve_release",
    "transform_for_dx",
    "update_on_answer",
]
