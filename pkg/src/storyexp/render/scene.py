"""SVG scenes: storyline canvas, fragment arc diagram, mini-map.

Element ids double as interaction handles: line paths carry entity ids,
block groups carry fragment ids, so a client can hit-test without a
second scene format. Layer order inside the storyline is fixed:
bands < time points < lines < blocks < legend.
"""

from __future__ import annotations

import math
from xml.etree import ElementTree as ET

from ..errors import UnknownStep
from ..extraction.types import WeightedTerm
from ..model.types import EntityKind, Fragment, StoryDocument
from .config import SceneConfig
from .svg import element, fmt, svg_root, to_string
from .wordcloud import Region, layout_wordcloud, placement_box

MARGIN_LEFT = 60.0
MARGIN_TOP = 50.0
MARGIN_BOTTOM = 30.0
LEGEND_WIDTH = 160.0
PLOT_PAD = 40.0
# horizontal stub past a run's first/last step, as a fraction of a step
CAP_FRACTION = 0.35


class _Frame:
    """Maps layout coordinates (step, unit) to scene pixels."""

    def __init__(self, layout, config: SceneConfig):
        self.config = config
        ys = list(layout.y.values())
        self.y_min = min(ys) if ys else 0.0
        self.y_max = max(ys) if ys else 0.0
        steps = len(layout.steps)
        span = (steps - 1) * config.pxPerStep if steps > 1 else 0.0
        self.width = MARGIN_LEFT + span + PLOT_PAD + LEGEND_WIDTH
        self.height = max(
            200.0,
            MARGIN_TOP + (self.y_max - self.y_min) * config.pxPerUnit + MARGIN_BOTTOM,
        )
        self.cap = CAP_FRACTION * config.pxPerStep

    def x(self, step: float) -> float:
        return MARGIN_LEFT + step * self.config.pxPerStep

    def y(self, unit: float) -> float:
        return MARGIN_TOP + (unit - self.y_min) * self.config.pxPerUnit


def _line_runs(layout, line: str) -> list[list[int]]:
    present = sorted(s for (s, l) in layout.y if l == line)
    runs: list[list[int]] = []
    for s in present:
        if runs and s == runs[-1][-1] + 1:
            runs[-1].append(s)
        else:
            runs.append([s])
    return runs


def _line_path(layout, line: str, frame: _Frame) -> str:
    parts: list[str] = []
    for run in _line_runs(layout, line):
        first, last = run[0], run[-1]
        y0 = frame.y(layout.y[(first, line)])
        parts.append(f"M {fmt(frame.x(first) - frame.cap)} {fmt(y0)}")
        parts.append(f"L {fmt(frame.x(first))} {fmt(y0)}")
        for s in run[1:]:
            xa, ya = frame.x(s - 1), frame.y(layout.y[(s - 1, line)])
            xb, yb = frame.x(s), frame.y(layout.y[(s, line)])
            mid = (xb - xa) / 2
            parts.append(
                f"C {fmt(xa + mid)} {fmt(ya)} {fmt(xb - mid)} {fmt(yb)} "
                f"{fmt(xb)} {fmt(yb)}"
            )
        y1 = frame.y(layout.y[(last, line)])
        parts.append(f"L {fmt(frame.x(last) + frame.cap)} {fmt(y1)}")
    return " ".join(parts)


def _band_layer(layout, fragments, frame: _Frame,
                config: SceneConfig) -> ET.Element:
    layer = element("g", id="layer-bands")
    blocks = {b["fragmentId"]: b for b in layout.blocks}
    placed = [
        f for f in fragments
        if f.place is not None and f.id in blocks
    ]
    color_of = {
        place: config.place_color(i)
        for i, place in enumerate(sorted({f.place for f in placed}))
    }
    for fragment in sorted(placed, key=lambda f: f.id):
        block = blocks[fragment.id]
        x0 = frame.x(block["x0"]) - frame.cap
        x1 = frame.x(block["x1"]) + frame.cap
        element(
            "rect", layer,
            id=f"band-{fragment.id}",
            **{"class": "band", "data-place": fragment.place},
            x=fmt(x0), y=fmt(MARGIN_TOP - 20),
            width=fmt(x1 - x0),
            height=fmt(frame.height - MARGIN_TOP - MARGIN_BOTTOM + 20),
            fill=color_of[fragment.place], fill_opacity="0.18",
        )
    return layer


def _timepoint_layer(layout, marked_steps, frame: _Frame,
                     config: SceneConfig) -> ET.Element:
    layer = element("g", id="layer-timepoints")
    for step in marked_steps:
        if not (0 <= step < len(layout.steps)):
            raise UnknownStep(f"step {step} not in layout")
        x = frame.x(step)
        element(
            "line", layer, id=f"tick-{step}", **{"class": "timepoint"},
            x1=fmt(x), y1=fmt(MARGIN_TOP - 20),
            x2=fmt(x), y2=fmt(frame.height - MARGIN_BOTTOM),
            stroke="#ced4da", stroke_width="1",
        )
        label = ",".join(str(v) for v in sorted(layout.steps[step].sourceSteps))
        element(
            "text", layer, text=label, **{"class": "timepoint-label"},
            x=fmt(x), y=fmt(MARGIN_TOP - 26),
            font_size=fmt(config.font.labelSize), text_anchor="middle",
            fill="#868e96",
        )
    return layer


def render_time_points(layout, marked_steps: list[int],
                       config: SceneConfig | None = None) -> ET.Element:
    """Tick-and-label layer for the given steps; sits beneath the lines."""
    config = config or SceneConfig()
    config.validate()
    return _timepoint_layer(layout, marked_steps, _Frame(layout, config), config)


def render_location_bands(layout, fragments,
                          config: SceneConfig | None = None) -> ET.Element:
    """Translucent full-height bands; fragments sharing a place share a color."""
    config = config or SceneConfig()
    config.validate()
    return _band_layer(layout, fragments, _Frame(layout, config), config)


def render_storyline(layout, doc: StoryDocument,
                     config: SceneConfig | None = None) -> str:
    config = config or SceneConfig()
    config.validate()
    frame = _Frame(layout, config)

    scale = min(
        1.0,
        config.viewportWidth / frame.width,
        config.viewportHeight / frame.height,
    )
    if scale < 1.0:
        root = svg_root(config.viewportWidth, config.viewportHeight)
        scene = element("g", root, transform=f"scale({scale:.4f})")
    else:
        root = svg_root(frame.width, frame.height)
        scene = element("g", root)
    scene.set("id", "scene")

    scene.append(_band_layer(layout, doc.fragments, frame, config))
    scene.append(
        _timepoint_layer(layout, range(len(layout.steps)), frame, config)
    )

    lines = element("g", scene, id="layer-lines")
    for line in layout.line_ids():
        entity = doc.entities.get(line)
        color = config.person_color(entity.colorKey if entity else 0)
        element(
            "path", lines, id=line, **{"class": "line"},
            d=_line_path(layout, line, frame),
            fill="none", stroke=color, stroke_width="3",
        )
        label_step = min(s for (s, l) in layout.y if l == line)
        element(
            "text", lines, text=(entity.canonicalName if entity else line),
            **{"class": "line-label"},
            x=fmt(frame.x(label_step) - frame.cap - 4),
            y=fmt(frame.y(layout.y[(label_step, line)]) + 4),
            font_size=fmt(config.font.labelSize), text_anchor="end",
            fill=color,
        )

    blocks = element("g", scene, id="layer-blocks")
    for block in layout.blocks:
        group = element("g", blocks, id=block["fragmentId"],
                        **{"class": "block"})
        x0 = frame.x(block["x0"]) - frame.cap
        x1 = frame.x(block["x1"]) + frame.cap
        y0 = frame.y(block["y0"])
        y1 = frame.y(block["y1"])
        element(
            "rect", group,
            x=fmt(x0), y=fmt(y0), width=fmt(x1 - x0), height=fmt(y1 - y0),
            rx="6", fill="#ffffff", fill_opacity="0.55",
            stroke="#adb5bd", stroke_width="1",
        )
        for i, keyword in enumerate(block["keywords"]):
            element(
                "text", group, text=keyword, **{"class": "keyword"},
                x=fmt(x0 + 6),
                y=fmt(y0 + config.font.labelSize * (i + 1) + 2),
                font_size=fmt(config.font.labelSize), fill="#495057",
            )

    legend = element("g", scene, id="layer-legend")
    persons = sorted(
        (e for e in doc.entities.values() if e.kind == EntityKind.PERSON),
        key=lambda e: e.id,
    )
    lx = frame.width - LEGEND_WIDTH + 10
    for i, person in enumerate(persons):
        entry = element("g", legend, id=f"legend-{person.id}",
                        **{"class": "legend-entry"})
        y = MARGIN_TOP + i * 20
        color = config.person_color(person.colorKey)
        element("line", entry, x1=fmt(lx), y1=fmt(y), x2=fmt(lx + 24),
                y2=fmt(y), stroke=color, stroke_width="3")
        element("text", entry, text=person.canonicalName, x=fmt(lx + 30),
                y=fmt(y + 4), font_size=fmt(config.font.labelSize),
                fill="#343a40")

    if scale < 1.0:
        element(
            "text", root, id="viewport-warning", **{"class": "warning"},
            text=f"scene scaled to {scale:.2f} to fit viewport",
            x="8", y=fmt(config.viewportHeight - 8),
            font_size=fmt(config.font.labelSize), fill="#e03131",
        )
    return to_string(root)


def _arc_path(cx: float, cy: float, radius: float, start_deg: float,
              sweep_deg: float) -> str:
    start = math.radians(start_deg)
    end = math.radians(start_deg + sweep_deg)
    x0, y0 = cx + radius * math.cos(start), cy + radius * math.sin(start)
    x1, y1 = cx + radius * math.cos(end), cy + radius * math.sin(end)
    large = "1" if sweep_deg > 180 else "0"
    return (f"M {fmt(x0)} {fmt(y0)} "
            f"A {fmt(radius)} {fmt(radius)} 0 {large} 1 {fmt(x1)} {fmt(y1)}")


def render_fragment_diagram(fragment: Fragment, doc: StoryDocument,
                            config: SceneConfig | None = None,
                            terms: list[WeightedTerm] | None = None) -> str:
    config = config or SceneConfig()
    config.validate()
    width, height = 360.0, 430.0
    cx, cy = width / 2, 175.0
    outer_r, inner_r, cloud_r = 150.0, 128.0, 100.0

    root = svg_root(width, height)
    diagram = element("g", root, id=f"diagram-{fragment.id}")

    total_pages = max(1, len(doc.pages))
    pages = sorted({s.pageIndex for s in fragment.spanRange})
    coverage = (pages[-1] - pages[0] + 1) / total_pages if pages else 0.0
    sweep = 360.0 * min(1.0, coverage)
    outer = element("g", diagram, id="outer-arc",
                    **{"data-sweep": fmt(sweep)})
    if sweep >= 360.0:
        element("circle", outer, cx=fmt(cx), cy=fmt(cy), r=fmt(outer_r),
                fill="none", stroke="#495057", stroke_width="10")
    elif sweep > 0.0:
        element("path", outer, d=_arc_path(cx, cy, outer_r, -90.0, sweep),
                fill="none", stroke="#495057", stroke_width="10")

    sectors = element("g", diagram, id="inner-sectors")
    persons = list(fragment.persons)
    if persons:
        share = 360.0 / len(persons)
        for i, person_id in enumerate(persons):
            entity = doc.entities.get(person_id)
            color = config.person_color(entity.colorKey if entity else 0)
            start = -90.0 + i * share
            sector = element("g", sectors, id=f"sector-{person_id}",
                             **{"data-sweep": fmt(share)})
            if share >= 360.0:
                element("circle", sector, cx=fmt(cx), cy=fmt(cy),
                        r=fmt(inner_r), fill="none", stroke=color,
                        stroke_width="14")
            else:
                element("path", sector,
                        d=_arc_path(cx, cy, inner_r, start, share - 2.0),
                        fill="none", stroke=color, stroke_width="14")

    if terms is None:
        terms = [WeightedTerm(term=k, weight=1.0) for k in fragment.keywords]
    side = cloud_r * math.sqrt(2)
    region = Region(x=cx - side / 2, y=cy - side / 2, width=side, height=side)
    cloud_result = layout_wordcloud(terms, region, config.font)
    cloud = element(
        "g", diagram, id="cloud",
        **{"data-skipped": ",".join(cloud_result.skipped)},
    )
    for placement in cloud_result.placements:
        box = placement_box(placement, config.font)
        attrs = {
            "class": "cloud-term",
            "x": fmt(placement.anchor[0]),
            "y": fmt(placement.anchor[1] + placement.fontSize * 0.35),
            "font-size": fmt(placement.fontSize),
            "text-anchor": "middle",
            "fill": "#343a40",
            "data-box": ",".join(fmt(v) for v in box),
        }
        if placement.rotation == 90:
            attrs["transform"] = (
                f"rotate(90 {fmt(placement.anchor[0])} "
                f"{fmt(placement.anchor[1])})"
            )
        element("text", cloud, text=placement.term, **attrs)

    element(
        "text", diagram, id="summary", text=fragment.eventSummary,
        x=fmt(cx), y=fmt(cy + outer_r + 40),
        font_size=fmt(config.font.labelSize), text_anchor="middle",
        fill="#343a40",
    )
    return to_string(root)


def render_minimap(layout, viewport_window: dict,
                   config: SceneConfig | None = None) -> str:
    """Downscaled overview with a window rect reported in layout coordinates."""
    config = config or SceneConfig()
    config.validate()
    width, height, pad = 220.0, 140.0, 10.0
    root = svg_root(width, height)
    element("rect", root, id="minimap-frame", x="0.50", y="0.50",
            width=fmt(width - 1), height=fmt(height - 1),
            fill="#f8f9fa", stroke="#adb5bd")

    steps = len(layout.steps)
    ys = list(layout.y.values())
    x_hi = max(1.0, float(steps - 1))
    y_lo = min(ys) if ys else 0.0
    y_hi = max(ys) if ys else 1.0
    y_span = max(1e-9, y_hi - y_lo)

    def mx(step: float) -> float:
        return pad + (step / x_hi) * (width - 2 * pad)

    def my(unit: float) -> float:
        return pad + ((unit - y_lo) / y_span) * (height - 2 * pad)

    lines = element("g", root, id="minimap-lines")
    for line in layout.line_ids():
        for run in _line_runs(layout, line):
            points = " ".join(
                f"{fmt(mx(s))},{fmt(my(layout.y[(s, line)]))}" for s in run
            )
            element("polyline", lines, **{"class": "mini-line"},
                    points=points, fill="none", stroke="#868e96",
                    stroke_width="1")

    wx0 = max(0.0, min(float(viewport_window["x0"]), x_hi))
    wx1 = max(wx0, min(float(viewport_window["x1"]), x_hi))
    wy0 = max(y_lo, min(float(viewport_window["y0"]), y_hi))
    wy1 = max(wy0, min(float(viewport_window["y1"]), y_hi))
    element(
        "rect", root, id="minimap-window",
        **{
            "data-x0": fmt(wx0), "data-x1": fmt(wx1),
            "data-y0": fmt(wy0), "data-y1": fmt(wy1),
        },
        x=fmt(mx(wx0)), y=fmt(my(wy0)),
        width=fmt(max(2.0, mx(wx1) - mx(wx0))),
        height=fmt(max(2.0, my(wy1) - my(wy0))),
        fill="none", stroke="#1971c2", stroke_width="2",
    )
    return to_string(root)
