from __future__ import annotations

import pytest

from swipelearn.config import DEFAULT_CONFIG
from swipelearn.student import LearningItem, StudentState


@pytest.fixture
def cfg():
    return DEFAULT_CONFIG


@pytest.fixture
def student():
    return StudentState(student_id="stu")


def make_item(
    item_id: str = "it0",
    b: float = 0.0,
    mu: float = 4.0,
    limit: float = 90.0,
    tags: tuple[str, ...] = ("algebra",),
) -> LearningItem:
    return LearningItem(
        item_id=item_id,
        difficulty_b=b,
        log_median_time_mu=mu,
        time_limit_s=limit,
        topic_tags=frozenset(tags),
    )


@pytest.fixture
def item():
    return make_item()
