"""Dollar-family multistroke gesture recognizer.

Templates and candidates are normalized to a canonical form: resampled to
a fixed point count, rotated so the centroid-to-first-point direction is
zero, scaled into a square, and centered on the centroid. Rotating before
the axis-aligned scale makes the whole pipeline idempotent and cancels
input rotation exactly.

A multistroke is matched by precomputing, per template, every stroke
order and direction combination joined into one point sequence; the
candidate is joined as drawn.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from itertools import permutations, product

import numpy as np

from ..errors import DegenerateInk

RESAMPLE_N = 96
SQUARE_SIZE = 250.0
# below this bbox aspect ratio the ink counts as one-dimensional and is
# scaled uniformly, so a straight line stays a straight line
ONE_D_RATIO = 0.30
ANGLE_RANGE = math.radians(45.0)
ANGLE_PRECISION = math.radians(2.0)
_PHI = 0.5 * (-1.0 + math.sqrt(5.0))
HALF_DIAGONAL = 0.5 * math.hypot(SQUARE_SIZE, SQUARE_SIZE)
MAX_TEMPLATES_PER_CLASS = 8
# k! * 2^k joined variants per template; beyond this only the drawn order
MAX_PERMUTED_STROKES = 4

GESTURE_NAMES = ("underline", "highlightBox", "strikeDelete", "circleModify")


def _as_points(stroke) -> np.ndarray:
    """Accept [x, y] pairs or [x, y, t] triples; return float (n, 2)."""
    arr = np.asarray(stroke, dtype=float)
    if arr.ndim != 2 or arr.shape[1] not in (2, 3):
        raise DegenerateInk("a stroke must be a sequence of points")
    return arr[:, :2]


def _joined(strokes) -> np.ndarray:
    if not strokes:
        raise DegenerateInk("no strokes given")
    pts = np.vstack([_as_points(s) for s in strokes])
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.any(np.abs(np.diff(pts, axis=0)) > 1e-12, axis=1)
    return pts[keep]


def _path_length(pts: np.ndarray) -> float:
    return float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))


def _redistribute(pts: np.ndarray, n: int) -> np.ndarray:
    total = _path_length(pts)
    if total <= 0.0:
        raise DegenerateInk("ink has zero path length")
    interval = total / (n - 1)
    out = [pts[0]]
    accumulated = 0.0
    prev = pts[0]
    i = 1
    while i < len(pts):
        d = float(np.linalg.norm(pts[i] - prev))
        if accumulated + d >= interval and d > 0.0:
            t = (interval - accumulated) / d
            q = prev + t * (pts[i] - prev)
            out.append(q)
            prev = q
            accumulated = 0.0
        else:
            accumulated += d
            prev = pts[i]
            i += 1
    while len(out) < n:
        out.append(pts[-1])
    return np.asarray(out[:n])


def _resample(pts: np.ndarray, n: int) -> np.ndarray:
    # iterate to the redistribution fixed point: one pass spaces points along
    # the previous polyline, whose chords differ from the new one, so a
    # single pass is not idempotent
    out = _redistribute(pts, n)
    for _ in range(8):
        again = _redistribute(out, n)
        if float(np.max(np.abs(again - out))) < 1e-9 * max(1.0, _path_length(out)):
            return again
        out = again
    return out


def _centroid(pts: np.ndarray) -> np.ndarray:
    return pts.mean(axis=0)


def _rotate(pts: np.ndarray, angle: float, origin: np.ndarray) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    return (pts - origin) @ rot.T + origin


def _rotate_to_zero(pts: np.ndarray) -> np.ndarray:
    center = _centroid(pts)
    delta = pts[0] - center
    angle = math.atan2(delta[1], delta[0])
    if angle == 0.0:
        return pts
    return _rotate(pts, -angle, center)


def _scale_to_square(pts: np.ndarray) -> np.ndarray:
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    w, h = float(hi[0] - lo[0]), float(hi[1] - lo[1])
    longest = max(w, h)
    if longest <= 0.0:
        raise DegenerateInk("ink has zero extent")
    if min(w, h) / longest < ONE_D_RATIO:
        return pts * (SQUARE_SIZE / longest)
    return pts * np.array([SQUARE_SIZE / w, SQUARE_SIZE / h])


def normalize(strokes) -> np.ndarray:
    """Canonical (RESAMPLE_N, 2) form of a multistroke, joined in order."""
    pts = _joined(strokes)
    if len(pts) < 2:
        raise DegenerateInk("ink needs at least two distinct points")
    pts = _resample(pts, RESAMPLE_N)
    pts = _rotate_to_zero(pts)
    pts = _scale_to_square(pts)
    return pts - _centroid(pts)


@dataclass
class GestureTemplate:
    name: str
    strokes: list[np.ndarray]
    unistrokePermutations: list[np.ndarray] = field(default_factory=list)


def make_template(name: str, strokes) -> GestureTemplate:
    raw = [_as_points(s) for s in strokes]
    variants: list[np.ndarray] = []
    if len(raw) <= MAX_PERMUTED_STROKES:
        orders = permutations(range(len(raw)))
    else:
        orders = [tuple(range(len(raw)))]
    for order in orders:
        for flips in product((False, True), repeat=len(raw)):
            arranged = [raw[i][::-1] if flips[j] else raw[i] for j, i in enumerate(order)]
            variants.append(normalize(arranged))
    return GestureTemplate(name=name, strokes=raw, unistrokePermutations=variants)


@dataclass
class RecognitionResult:
    templateName: str
    score: float
    distance: float


def _path_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.mean(np.linalg.norm(a - b, axis=1)))


def _distance_at_angle(candidate: np.ndarray, template: np.ndarray, angle: float) -> float:
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    return _path_distance(candidate @ rot.T, template)


def _distance_best_angle(candidate: np.ndarray, template: np.ndarray) -> float:
    a, b = -ANGLE_RANGE, ANGLE_RANGE
    x1 = _PHI * a + (1.0 - _PHI) * b
    x2 = (1.0 - _PHI) * a + _PHI * b
    f1 = _distance_at_angle(candidate, template, x1)
    f2 = _distance_at_angle(candidate, template, x2)
    while abs(b - a) > ANGLE_PRECISION:
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = _PHI * a + (1.0 - _PHI) * b
            f1 = _distance_at_angle(candidate, template, x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = (1.0 - _PHI) * a + _PHI * b
            f2 = _distance_at_angle(candidate, template, x2)
    return min(f1, f2)


def recognize(strokes, templates: list[GestureTemplate]) -> RecognitionResult:
    """Best-matching template for the ink; ties keep registration order."""
    if not templates:
        raise ValueError("templates must be non-empty")
    candidate = normalize(strokes)
    best_name = templates[0].name
    best_dist = math.inf
    for template in templates:
        dist = min(
            _distance_best_angle(candidate, variant)
            for variant in template.unistrokePermutations
        )
        if dist < best_dist:
            best_dist = dist
            best_name = template.name
    score = 1.0 - best_dist / HALF_DIAGONAL
    return RecognitionResult(
        templateName=best_name,
        score=max(0.0, min(1.0, score)),
        distance=best_dist,
    )


def _line_stroke(x0, y0, x1, y1, n=32) -> np.ndarray:
    t = np.linspace(0.0, 1.0, n)[:, None]
    return np.array([x0, y0]) + t * np.array([x1 - x0, y1 - y0])


def _polyline(points, per_edge=16) -> np.ndarray:
    pts = [np.asarray(points[0], dtype=float)]
    for a, b in zip(points, points[1:]):
        seg = _line_stroke(a[0], a[1], b[0], b[1], per_edge)
        pts.extend(seg[1:])
    return np.asarray(pts)


def _zigzag(width: float, teeth: int, amplitude: float) -> np.ndarray:
    xs = np.linspace(0.0, width, 2 * teeth + 1)
    ys = [amplitude * (i % 2) for i in range(2 * teeth + 1)]
    return _polyline(list(zip(xs, ys)), per_edge=12)


def _ellipse(rx: float, ry: float) -> np.ndarray:
    theta = np.linspace(-0.5 * math.pi, 1.5 * math.pi, 96)
    return np.column_stack([rx * np.cos(theta), ry * np.sin(theta)])


def built_in_templates() -> list[GestureTemplate]:
    """Pre-set exemplars; several per class to cover drawing variation."""
    out: list[GestureTemplate] = []
    out.append(make_template("underline", [_line_stroke(0.0, 0.0, 200.0, 0.0, 64)]))
    for width, height in ((200.0, 120.0), (200.0, 60.0)):
        box = _polyline(
            [(0, 0), (width, 0), (width, height), (0, height), (0, 0)], per_edge=24
        )
        out.append(make_template("highlightBox", [box]))
    # amplitudes on both sides of ONE_D_RATIO: the indicative-angle tilt
    # inflates a zigzag's height, so 40+ lands on the axis-scaled side
    # while 25 stays uniform; noisy strokes flip between the two regimes
    for teeth in (3, 4, 5):
        for amplitude in (25.0, 40.0, 80.0):
            out.append(make_template("strikeDelete", [_zigzag(200.0, teeth, amplitude)]))
    out.append(make_template("circleModify", [_ellipse(100.0, 100.0)]))
    out.append(make_template("circleModify", [_ellipse(120.0, 80.0)]))
    return out


class TemplateRegistry:
    """Per-document template set: built-ins plus learned gestures.

    Learned templates are capped per class; the oldest is evicted first.
    """

    def __init__(self, templates: list[GestureTemplate] | None = None):
        self._lock = threading.Lock()
        self._builtin = list(templates) if templates is not None else built_in_templates()
        self._learned: dict[str, list[GestureTemplate]] = {}

    def add(self, name: str, strokes) -> GestureTemplate:
        template = make_template(name, strokes)
        with self._lock:
            bucket = self._learned.setdefault(name, [])
            bucket.append(template)
            if len(bucket) > MAX_TEMPLATES_PER_CLASS:
                del bucket[0]
        return template

    def all(self) -> list[GestureTemplate]:
        with self._lock:
            out = list(self._builtin)
            for name in sorted(self._learned):
                out.extend(self._learned[name])
            return out

    def count(self, name: str) -> int:
        with self._lock:
            return len(self._learned.get(name, []))
