"""Greedy spiral word-cloud placement.

Terms are placed heaviest-first along an Archimedean spiral from the
region center; a term that finds no collision-free spot within the step
budget is reported as skipped, never dropped silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..extraction.types import WeightedTerm
from .config import FontMetrics

SPIRAL_STEPS = 2000
SPIRAL_TURN = 0.35  # radians per step


@dataclass(frozen=True)
class Region:
    x: float
    y: float
    width: float
    height: float

    def center(self) -> tuple[float, float]:
        return self.x + self.width / 2, self.y + self.height / 2

    def contains(self, box: tuple[float, float, float, float]) -> bool:
        x0, y0, x1, y1 = box
        return (x0 >= self.x and y0 >= self.y
                and x1 <= self.x + self.width and y1 <= self.y + self.height)


@dataclass(frozen=True)
class WordCloudPlacement:
    term: str
    anchor: tuple[float, float]  # box center
    fontSize: float
    rotation: int  # degrees, 0 or 90


@dataclass
class WordCloudResult:
    placements: list[WordCloudPlacement] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)


def placement_box(placement: WordCloudPlacement,
                  font: FontMetrics) -> tuple[float, float, float, float]:
    w = placement.fontSize * font.widthRatio * len(placement.term)
    h = placement.fontSize
    if placement.rotation == 90:
        w, h = h, w
    cx, cy = placement.anchor
    return cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2


def _disjoint(a: tuple[float, float, float, float],
              b: tuple[float, float, float, float]) -> bool:
    return a[2] <= b[0] or b[2] <= a[0] or a[3] <= b[1] or b[3] <= a[1]


def layout_wordcloud(terms: list[WeightedTerm], region: Region,
                     font: FontMetrics | None = None) -> WordCloudResult:
    if region.width <= 0 or region.height <= 0:
        raise ValueError("region area must be positive")
    font = font or FontMetrics()
    ordered = sorted(terms, key=lambda t: (-t.weight, t.term))
    result = WordCloudResult()
    if not ordered:
        return result

    weights = [t.weight for t in ordered]
    hi, lo = max(weights), min(weights)

    def font_size(weight: float) -> float:
        if hi == lo:
            return font.maxSize
        frac = (weight - lo) / (hi - lo)
        return font.minSize + (font.maxSize - font.minSize) * frac

    cx, cy = region.center()
    reach = math.hypot(region.width, region.height) / 2
    radius_per_step = reach / (SPIRAL_STEPS * SPIRAL_TURN)

    boxes: list[tuple[float, float, float, float]] = []
    for term in ordered:
        size = font_size(term.weight)
        placed = None
        for step in range(SPIRAL_STEPS):
            theta = step * SPIRAL_TURN
            px = cx + radius_per_step * theta * math.cos(theta)
            py = cy + radius_per_step * theta * math.sin(theta)
            for rotation in (0, 90):
                candidate = WordCloudPlacement(
                    term=term.term, anchor=(px, py),
                    fontSize=size, rotation=rotation,
                )
                box = placement_box(candidate, font)
                if not region.contains(box):
                    continue
                if all(_disjoint(box, other) for other in boxes):
                    placed = candidate
                    boxes.append(box)
                    break
            if placed is not None:
                break
        if placed is None:
            result.skipped.append(term.term)
        else:
            result.placements.append(placed)
    return result
