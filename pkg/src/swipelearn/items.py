"""Item pool loading and synthetic pool generation."""

from __future__ import annotations

import json
import math
import random
from pathlib import Path

from .student import LearningItem

_TAG_UNIVERSE = (
    "algebra",
    "geometry",
    "reading",
    "vocab",
    "logic",
    "stats",
    "listening",
    "grammar",
)


def load_item_pool(path: str | Path) -> list[LearningItem]:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, list):
        raise ValueError(f"item pool {path} must be a JSON array")
    items = [
        LearningItem(
            item_id=str(rec["item_id"]),
            difficulty_b=float(rec["difficulty_b"]),
            log_median_time_mu=float(rec["log_median_time_mu"]),
            time_limit_s=float(rec["time_limit_s"]),
            topic_tags=frozenset(rec["topic_tags"]),
        )
        for rec in raw
    ]
    ids = [it.item_id for it in items]
    if len(set(ids)) != len(ids):
        raise ValueError("item pool contains duplicate item_ids")
    return items


def save_item_pool(items: list[LearningItem], path: str | Path) -> None:
    records = [
        {
            "item_id": it.item_id,
            "difficulty_b": it.difficulty_b,
            "log_median_time_mu": it.log_median_time_mu,
            "time_limit_s": it.time_limit_s,
            "topic_tags": sorted(it.topic_tags),
        }
        for it in items
    ]
    Path(path).write_text(json.dumps(records, indent=2) + "\n", encoding="utf-8")


def generate_item_pool(n_items: int, seed: int, *, b_spread: float = 1.3) -> list[LearningItem]:
    """Seeded synthetic pool with realistic difficulty and timing spread."""
    if n_items <= 0:
        raise ValueError("n_items must be positive")
    rng = random.Random(seed ^ 0x9E3779B9)
    items = []
    for k in range(n_items):
        mu = rng.gauss(math.log(60.0), 0.4)
        n_tags = 1 + (rng.random() < 0.4)
        tags = frozenset(rng.sample(_TAG_UNIVERSE, n_tags))
        items.append(
            LearningItem(
                item_id=f"it{k:04d}",
                difficulty_b=rng.gauss(0.0, b_spread),
                log_median_time_mu=mu,
                time_limit_s=round(math.exp(mu) * rng.uniform(1.1, 1.6), 1),
                topic_tags=tags,
            )
        )
    return items
