"""Polygon render model: feature radii to unit-frame vertices.

Data (radii, vertices) is separated from label presentation so renderers
can restyle labels without touching geometry. Coordinates use the
mathematical convention (y up, axis 0 at the top, label order clockwise);
screen mapping is the client's job.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .features import FeatureVector

DEFAULT_FEATURE_LABELS: tuple[tuple[str, str], ...] = (
    ("E", "expected score gain"),
    ("Cp", "completion probability"),
    ("Cr", "correctness probability"),
    ("O", "on-time probability"),
    ("I", "initiative"),
)

DEFAULT_GRID_RINGS: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0)


class LabelPlacement(Enum):
    OUTSIDE_VERTEX = "outside_vertex"
    LEGEND = "legend"


@dataclass(frozen=True)
class LabelStyleSpec:
    placement: LabelPlacement = LabelPlacement.OUTSIDE_VERTEX
    show_value: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.placement, LabelPlacement):
            raise ValueError(f"placement must be a LabelPlacement, got {self.placement!r}")


@dataclass(frozen=True)
class RadarRenderModel:
    axis_count: int
    labels: tuple[tuple[str, str], ...]
    radii: tuple[float, ...]
    vertices: tuple[tuple[float, float], ...]
    grid_rings: tuple[float, ...]
    label_style: LabelStyleSpec

    def to_wire(self) -> dict:
        """JSON shape embedded in card payloads; field order is contractual."""
        return {
            "axis_count": self.axis_count,
            "labels": [[short, long] for short, long in self.labels],
            "radii": list(self.radii),
            "vertices": [[x, y] for x, y in self.vertices],
            "grid_rings": list(self.grid_rings),
        }


def axis_angle(k: int, axis_count: int) -> float:
    """Angle of axis k: axis 0 points up, later axes proceed clockwise."""
    return math.pi / 2.0 - 2.0 * math.pi * k / axis_count


def radar_model_from_radii(
    radii: Sequence[float],
    labels: Sequence[tuple[str, str]] = DEFAULT_FEATURE_LABELS,
    style: LabelStyleSpec = LabelStyleSpec(),
    grid_rings: Sequence[float] = DEFAULT_GRID_RINGS,
) -> RadarRenderModel:
    n = len(labels)
    if n < 3:
        raise ValueError(f"a polygon needs at least 3 axes, got {n}")
    if len(radii) != n:
        raise ValueError(f"got {len(radii)} radii for {n} axes")
    if any(not (math.isfinite(r) and 0.0 <= r <= 1.0) for r in radii):
        raise ValueError("radii must be finite and in [0, 1]")
    vertices = tuple(
        (r * math.cos(axis_angle(k, n)), r * math.sin(axis_angle(k, n)))
        for k, r in enumerate(radii)
    )
    return RadarRenderModel(
        axis_count=n,
        labels=tuple((str(s), str(l)) for s, l in labels),
        radii=tuple(float(r) for r in radii),
        vertices=vertices,
        grid_rings=tuple(grid_rings),
        label_style=style,
    )


def build_radar_model(
    fv: FeatureVector,
    labels: Sequence[tuple[str, str]] = DEFAULT_FEATURE_LABELS,
    style: LabelStyleSpec = LabelStyleSpec(),
) -> RadarRenderModel:
    """Pentagon model for a feature vector, axes ordered (E, Cp, Cr, O, I)."""
    return radar_model_from_radii(fv.normalized, labels, style)


def polygon_area(model: RadarRenderModel) -> float:
    """Shoelace area of the vertex polygon; 0 for degenerate shapes."""
    total = 0.0
    pts = model.vertices
    for k in range(len(pts)):
        x0, y0 = pts[k]
        x1, y1 = pts[(k + 1) % len(pts)]
        total += x0 * y1 - x1 * y0
    return abs(total) / 2.0
