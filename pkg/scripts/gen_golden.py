#!/usr/bin/env python3
"""Regenerate the frontend's golden fixtures from the backend implementation.

Emits frontend/test/fixtures/ui_golden.json with:
  - the served UI config,
  - transform specs for the contract dx points,
  - a golden card radar payload plus its pixel mapping under the documented
    viewport (side 200, margin 20, y flipped).

Run from the repository root:  python3 scripts/gen_golden.py
"""

from __future__ import annotations

import json
from pathlib import Path

from swipelearn.config import DEFAULT_CONFIG
from swipelearn.engine import SessionEngine, TickClock
from swipelearn.items import generate_item_pool
from swipelearn.lifecycle import transform_for_dx

CONTRACT_DX = (-0.3, -0.15, 0.0, 0.15, 0.3)
VIEW_SIDE = 200.0
VIEW_MARGIN = 20.0


def pixel_map(vertices: list[list[float]]) -> list[list[float]]:
    """Unit mathematical frame -> pixels: center the polygon, flip y."""
    center = VIEW_SIDE / 2.0
    scale = VIEW_SIDE / 2.0 - VIEW_MARGIN
    return [[center + x * scale, center - y * scale] for x, y in vertices]


def main() -> None:
    engine = SessionEngine(generate_item_pool(12, seed=2024), DEFAULT_CONFIG, clock=TickClock())
    created = engine.create_session("golden")
    card = created["top"]
    fixture = {
        "config": DEFAULT_CONFIG.ui_payload(),
        "transforms": [
            {"dx": dx, "spec": transform_for_dx(dx, cfg=DEFAULT_CONFIG).to_wire()}
            for dx in CONTRACT_DX
        ],
        "card": card,
        "viewport": {"side": VIEW_SIDE, "margin": VIEW_MARGIN},
        "pixel_vertices": pixel_map(card["radar"]["vertices"]),
        "pixel_full_pentagon": pixel_map(
            [
                [r * c, r * s]
                for r, (c, s) in zip(
                    [1.0] * 5,
                    [
                        (0.0, 1.0),
                        (0.9510565162951536, 0.3090169943749474),
                        (0.5877852522924732, -0.8090169943749473),
                        (-0.587785252292473, -0.8090169943749475),
                        (-0.9510565162951536, 0.3090169943749472),
                    ],
                )
            ]
        ),
    }
    out = Path(__file__).resolve().parent.parent / "frontend" / "test" / "fixtures" / "ui_golden.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(fixture, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
