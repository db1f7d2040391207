"""Binding recognized ink to text spans via line-band geometry.

A stroke selects at most one line: of all lines whose band contains the
stroke's vertical center, the strongest band wins (through the glyphs
beats below the baseline beats above the top), then the nearest
baseline. Multi-line selections come from several strokes grouped by
merge_multiline, not from one stroke.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import NoTextUnderStroke
from ..model.types import TextSpan

# band extension above/below the glyph box, as a fraction of line height
BAND_TOLERANCE = 0.6
# a glyph counts as covered when at least this share of its width overlaps
MIN_GLYPH_OVERLAP = 0.5
# strokes this close in time may continue one selection across lines
MERGE_WINDOW_MS = 3000.0

_BAND_PRIORITY = {"middle": 2, "bottom": 1, "top": 0}


@dataclass
class LineBox:
    """One laid-out text line with per-character x-extents."""

    lineIndex: int
    baselineY: float
    topY: float
    bottomY: float
    startOffset: int
    text: str
    extents: list[tuple[float, float]] = field(default_factory=list)

    def validate(self) -> None:
        if not (self.topY < self.baselineY <= self.bottomY):
            raise ValueError(
                f"line {self.lineIndex}: need topY < baselineY <= bottomY"
            )
        if len(self.extents) != len(self.text):
            raise ValueError(f"line {self.lineIndex}: one extent per character")

    @classmethod
    def from_dict(cls, data: dict) -> "LineBox":
        box = cls(
            lineIndex=int(data["lineIndex"]),
            baselineY=float(data["baselineY"]),
            topY=float(data["topY"]),
            bottomY=float(data["bottomY"]),
            startOffset=int(data["startOffset"]),
            text=str(data["text"]),
            extents=[(float(a), float(b)) for a, b in data["extents"]],
        )
        box.validate()
        return box

    def to_dict(self) -> dict:
        return {
            "lineIndex": self.lineIndex,
            "baselineY": self.baselineY,
            "topY": self.topY,
            "bottomY": self.bottomY,
            "startOffset": self.startOffset,
            "text": self.text,
            "extents": [list(e) for e in self.extents],
        }


def stroke_bbox(strokes) -> tuple[float, float, float, float]:
    xs: list[float] = []
    ys: list[float] = []
    for stroke in strokes:
        for point in stroke:
            xs.append(float(point[0]))
            ys.append(float(point[1]))
    if not xs:
        raise NoTextUnderStroke("empty ink")
    return min(xs), min(ys), max(xs), max(ys)


def classify_position(
    stroke_box: tuple[float, float, float, float], line: LineBox
) -> str:
    """Band of the stroke's vertical center relative to one line."""
    center_y = 0.5 * (stroke_box[1] + stroke_box[3])
    line_height = line.bottomY - line.topY
    slack = BAND_TOLERANCE * line_height
    if line.baselineY <= center_y <= line.bottomY + slack:
        return "bottom"
    if line.topY <= center_y < line.baselineY:
        return "middle"
    if line.topY - slack <= center_y < line.topY:
        return "top"
    return "none"


def _best_line(stroke_box, page_layout: list[LineBox]) -> LineBox:
    center_y = 0.5 * (stroke_box[1] + stroke_box[3])
    best: tuple[int, float, int] | None = None
    best_line: LineBox | None = None
    for line in page_layout:
        band = classify_position(stroke_box, line)
        if band == "none":
            continue
        key = (
            -_BAND_PRIORITY[band],
            abs(center_y - line.baselineY),
            line.lineIndex,
        )
        if best is None or key < best:
            best = key
            best_line = line
    if best_line is None:
        raise NoTextUnderStroke("ink is not near any text line")
    return best_line


def bind_to_spans(
    strokes, page_layout: list[LineBox], page_index: int = 0
) -> list[TextSpan]:
    """Characters under the stroke, snapped outward to word boundaries."""
    box = stroke_bbox(strokes)
    line = _best_line(box, page_layout)
    x_lo, x_hi = box[0], box[2]
    covered: list[int] = []
    for i, (gx0, gx1) in enumerate(line.extents):
        width = gx1 - gx0
        if width <= 0.0 or line.text[i].isspace():
            continue
        overlap = min(x_hi, gx1) - max(x_lo, gx0)
        if overlap >= MIN_GLYPH_OVERLAP * width:
            covered.append(i)
    if not covered:
        raise NoTextUnderStroke("no characters under the ink")
    lo, hi = covered[0], covered[-1]
    while lo > 0 and not line.text[lo - 1].isspace():
        lo -= 1
    while hi + 1 < len(line.text) and not line.text[hi + 1].isspace():
        hi += 1
    return [TextSpan(page_index, line.startOffset + lo, line.startOffset + hi + 1)]


@dataclass
class PendingSpans:
    """One bind result awaiting multi-line grouping."""

    spans: list[TextSpan]
    timeMs: float


def _line_of(span: TextSpan, page_layout: list[LineBox]) -> LineBox | None:
    for line in page_layout:
        if line.startOffset <= span.start < line.startOffset + len(line.text):
            return line
    return None


def _content_bounds(line: LineBox) -> tuple[int, int]:
    """Offsets of the first and one-past-last non-space character."""
    text = line.text
    first = 0
    while first < len(text) and text[first].isspace():
        first += 1
    last = len(text)
    while last > first and text[last - 1].isspace():
        last -= 1
    return line.startOffset + first, line.startOffset + last


def merge_multiline(
    pending: list[PendingSpans], page_layout: list[LineBox]
) -> list[list[TextSpan]]:
    """Group time-ordered selections that continue across adjacent lines.

    Two consecutive selections join when they are close in time, sit on
    adjacent lines, and the earlier one reaches its line's end or the
    later one starts at its line's start.
    """
    groups: list[list[TextSpan]] = []
    prev: PendingSpans | None = None
    for item in pending:
        joined = False
        if prev is not None and groups and item.spans and prev.spans:
            earlier = prev.spans[-1]
            later = item.spans[0]
            line_a = _line_of(earlier, page_layout)
            line_b = _line_of(later, page_layout)
            if (
                line_a is not None
                and line_b is not None
                and item.timeMs - prev.timeMs <= MERGE_WINDOW_MS
                and abs(line_b.lineIndex - line_a.lineIndex) == 1
            ):
                _, a_end = _content_bounds(line_a)
                b_start, _ = _content_bounds(line_b)
                if earlier.end >= a_end or later.start <= b_start:
                    joined = True
        if joined:
            groups[-1].extend(item.spans)
        else:
            groups.append(list(item.spans))
        prev = item
    return groups


def monospace_layout(
    text: str,
    max_chars: int = 60,
    char_width: float = 8.0,
    line_height: float = 16.0,
    ascent: float = 12.0,
) -> list[LineBox]:
    """Fixed-metrics layout of page text, wrapped at word boundaries.

    Offsets index into the original text; wrap points consume the break
    character so spans never land on swallowed whitespace.
    """
    lines: list[LineBox] = []
    pos = 0
    index = 0
    n = len(text)
    while pos < n:
        while pos < n and text[pos] in " \n":
            pos += 1
        if pos >= n:
            break
        end = min(pos + max_chars, n)
        newline = text.find("\n", pos, end)
        if newline != -1:
            end = newline
        elif end < n and text[end] not in " \n":
            back = text.rfind(" ", pos, end)
            if back > pos:
                end = back
        line_text = text[pos:end].rstrip()
        if line_text:
            top = index * line_height
            lines.append(
                LineBox(
                    lineIndex=index,
                    baselineY=top + ascent,
                    topY=top,
                    bottomY=top + line_height,
                    startOffset=pos,
                    text=line_text,
                    extents=[
                        (i * char_width, (i + 1) * char_width)
                        for i in range(len(line_text))
                    ],
                )
            )
            index += 1
        pos = end
    return lines
