"""SVG rendering: storyline scene, layers, arc diagram, word cloud, minimap."""

import re
from xml.etree import ElementTree as ET

import pytest

from storyexp.errors import UnknownStep
from storyexp.extraction import WeightedTerm
from storyexp.layout import compute_layout
from storyexp.model import (
    EntityKind,
    TextSpan,
    add_entity,
    create_fragment,
    new_document,
    set_fragment_interval,
    update_fragment,
)
from storyexp.render import (
    FontMetrics,
    Region,
    SceneConfig,
    layout_wordcloud,
    placement_box,
    render_fragment_diagram,
    render_location_bands,
    render_minimap,
    render_storyline,
    render_time_points,
)

NS = "{http://www.w3.org/2000/svg}"


def strip_ns(tag: str) -> str:
    return tag.removeprefix(NS)


def parse(svg: str) -> ET.Element:
    return ET.fromstring(svg)


def find_by_id(root: ET.Element, wanted: str) -> ET.Element | None:
    for node in root.iter():
        if node.get("id") == wanted:
            return node
    return None


def two_line_story():
    doc = new_document(["once upon a time " * 20])
    a = add_entity(doc, EntityKind.PERSON, "Gerda")
    b = add_entity(doc, EntityKind.PERSON, "Kay")
    f1 = create_fragment(doc, persons=[a.id, b.id])
    set_fragment_interval(doc, f1.id, 0, 1)
    f2 = create_fragment(doc, persons=[a.id])
    set_fragment_interval(doc, f2.id, 2, 2)
    return doc


class TestStoryline:
    def test_empty_layout_renders_scaffold(self):
        doc = new_document(["text"])
        svg = render_storyline(compute_layout(doc.fragments), doc)
        root = parse(svg)
        assert strip_ns(root.tag) == "svg"
        assert find_by_id(root, "layer-lines") is not None
        assert not [n for n in root.iter() if strip_ns(n.tag) == "path"]

    def test_one_path_per_line_with_entity_ids(self):
        doc = two_line_story()
        layout = compute_layout(doc.fragments)
        root = parse(render_storyline(layout, doc))
        paths = [n for n in root.iter() if strip_ns(n.tag) == "path"]
        assert sorted(p.get("id") for p in paths) == sorted(layout.line_ids())

    def test_keywords_rendered_inside_their_block_group(self):
        doc = two_line_story()
        frag = doc.fragments[0]
        update_fragment(doc, frag.id, keywords=["matches", "cold"])
        root = parse(render_storyline(compute_layout(doc.fragments), doc))
        group = find_by_id(root, frag.id)
        texts = {n.text for n in group.iter() if strip_ns(n.tag) == "text"}
        assert {"matches", "cold"} <= texts

    def test_layer_z_order(self):
        doc = two_line_story()
        root = parse(render_storyline(compute_layout(doc.fragments), doc))
        scene = find_by_id(root, "scene")
        layers = [child.get("id") for child in scene]
        assert layers == [
            "layer-bands", "layer-timepoints", "layer-lines",
            "layer-blocks", "layer-legend",
        ]

    def test_element_ids_unique(self):
        doc = two_line_story()
        root = parse(render_storyline(compute_layout(doc.fragments), doc))
        ids = [n.get("id") for n in root.iter() if n.get("id")]
        assert len(ids) == len(set(ids))

    def test_line_paths_are_x_monotone(self):
        doc = two_line_story()
        root = parse(render_storyline(compute_layout(doc.fragments), doc))
        for node in root.iter():
            if strip_ns(node.tag) != "path" or node.get("class") != "line":
                continue
            xs = [float(m) for m in
                  re.findall(r"[ML] (-?[\d.]+)", node.get("d"))]
            curve_ends = re.findall(
                r"C [-\d. ]+? (-?[\d.]+) -?[\d.]+$", node.get("d"))
            assert xs == sorted(xs)

    def test_legend_lists_every_person(self):
        doc = two_line_story()
        add_entity(doc, EntityKind.PLACE, "River")  # not a legend entry
        root = parse(render_storyline(compute_layout(doc.fragments), doc))
        legend = find_by_id(root, "layer-legend")
        entries = [child for child in legend
                   if child.get("class") == "legend-entry"]
        persons = [e for e in doc.entities.values()
                   if e.kind == EntityKind.PERSON]
        assert len(entries) == len(persons)

    def test_block_group_per_fragment(self):
        doc = two_line_story()
        root = parse(render_storyline(compute_layout(doc.fragments), doc))
        blocks = find_by_id(root, "layer-blocks")
        assert len(list(blocks)) == len(doc.fragments)

    def test_oversized_scene_scaled_with_warning(self):
        doc = two_line_story()
        config = SceneConfig(viewportWidth=200.0, viewportHeight=120.0)
        root = parse(render_storyline(compute_layout(doc.fragments), doc,
                                      config))
        assert float(root.get("width")) == 200.0
        warning = find_by_id(root, "viewport-warning")
        assert warning is not None and "scaled" in warning.text
        scene = find_by_id(root, "scene")
        assert "scale(" in scene.get("transform", "")

    def test_fitting_scene_has_no_warning(self):
        doc = two_line_story()
        root = parse(render_storyline(compute_layout(doc.fragments), doc))
        assert find_by_id(root, "viewport-warning") is None


class TestTimePoints:
    def test_no_marked_steps_empty_layer(self):
        doc = two_line_story()
        layer = render_time_points(compute_layout(doc.fragments), [])
        assert len(list(layer)) == 0

    def test_tick_lands_on_step_x(self):
        doc = two_line_story()
        config = SceneConfig()
        layer = render_time_points(compute_layout(doc.fragments), [2], config)
        tick = find_by_id(layer, "tick-2")
        assert float(tick.get("x1")) == pytest.approx(60.0 + 2 * config.pxPerStep)

    def test_step_outside_layout_rejected(self):
        doc = two_line_story()
        with pytest.raises(UnknownStep):
            render_time_points(compute_layout(doc.fragments), [99])


class TestLocationBands:
    def _story_with_places(self, place_names):
        doc = new_document(["text"])
        hero = add_entity(doc, EntityKind.PERSON, "Hero")
        places = {
            name: add_entity(doc, EntityKind.PLACE, name).id
            for name in set(place_names)
        }
        for i, name in enumerate(place_names):
            frag = create_fragment(
                doc, persons=[hero.id],
                place=places[name] if name else None,
            )
            set_fragment_interval(doc, frag.id, i, i)
        return doc

    def test_shared_place_shares_fill(self):
        doc = self._story_with_places(["castle", "castle"])
        layer = render_location_bands(compute_layout(doc.fragments),
                                      doc.fragments)
        fills = [rect.get("fill") for rect in layer]
        assert len(fills) == 2 and len(set(fills)) == 1

    def test_distinct_places_distinct_fills(self):
        doc = self._story_with_places(["castle", "town", "river"])
        layer = render_location_bands(compute_layout(doc.fragments),
                                      doc.fragments)
        fills = [rect.get("fill") for rect in layer]
        assert len(set(fills)) == 3

    def test_no_places_no_bands(self):
        doc = two_line_story()
        layer = render_location_bands(compute_layout(doc.fragments),
                                      doc.fragments)
        assert len(list(layer)) == 0


class TestFragmentDiagram:
    def _doc_with_pages(self, n_pages):
        doc = new_document([f"page {i} text" for i in range(n_pages)])
        a = add_entity(doc, EntityKind.PERSON, "Ann")
        b = add_entity(doc, EntityKind.PERSON, "Ben")
        return doc, a, b

    def test_full_page_coverage_closes_the_arc(self):
        doc, a, _ = self._doc_with_pages(3)
        frag = create_fragment(doc, persons=[a.id], spans=[
            TextSpan(0, 0, 4), TextSpan(2, 0, 4),
        ])
        root = parse(render_fragment_diagram(frag, doc))
        outer = find_by_id(root, "outer-arc")
        assert float(outer.get("data-sweep")) == pytest.approx(360.0)
        assert strip_ns(list(outer)[0].tag) == "circle"

    def test_partial_coverage_sweep_proportional(self):
        doc, a, _ = self._doc_with_pages(4)
        frag = create_fragment(doc, persons=[a.id], spans=[TextSpan(1, 0, 4)])
        root = parse(render_fragment_diagram(frag, doc))
        outer = find_by_id(root, "outer-arc")
        assert float(outer.get("data-sweep")) == pytest.approx(90.0)

    def test_two_persons_split_the_inner_arc_evenly(self):
        doc, a, b = self._doc_with_pages(1)
        frag = create_fragment(doc, persons=[a.id, b.id])
        root = parse(render_fragment_diagram(frag, doc))
        sectors = find_by_id(root, "inner-sectors")
        sweeps = [float(s.get("data-sweep")) for s in sectors]
        assert sweeps == [180.0, 180.0]
        assert {s.get("id") for s in sectors} == \
               {f"sector-{a.id}", f"sector-{b.id}"}

    def test_no_keywords_means_empty_cloud(self):
        doc, a, _ = self._doc_with_pages(1)
        frag = create_fragment(doc, persons=[a.id])
        root = parse(render_fragment_diagram(frag, doc))
        cloud = find_by_id(root, "cloud")
        assert len(list(cloud)) == 0
        assert cloud.get("data-skipped") == ""

    def test_summary_text_present(self):
        doc, a, _ = self._doc_with_pages(1)
        frag = create_fragment(doc, persons=[a.id],
                               eventSummary="The ice broke.")
        root = parse(render_fragment_diagram(frag, doc))
        assert find_by_id(root, "summary").text == "The ice broke."


class TestWordCloud:
    FONT = FontMetrics()
    REGION = Region(x=0.0, y=0.0, width=300.0, height=200.0)

    def boxes(self, result):
        return [placement_box(p, self.FONT) for p in result.placements]

    @staticmethod
    def overlap(a, b):
        return not (a[2] <= b[0] or b[2] <= a[0]
                    or a[3] <= b[1] or b[3] <= a[1])

    def test_single_term_centered(self):
        result = layout_wordcloud([WeightedTerm("ember", 2.0)], self.REGION,
                                  self.FONT)
        (placement,) = result.placements
        assert placement.anchor == pytest.approx(self.REGION.center())
        assert result.skipped == []

    def test_equal_weights_break_ties_lexicographically(self):
        terms = [WeightedTerm("zinc", 1.0), WeightedTerm("ash", 1.0)]
        result = layout_wordcloud(terms, self.REGION, self.FONT)
        assert [p.term for p in result.placements] == ["ash", "zinc"]
        a, b = self.boxes(result)
        assert not self.overlap(a, b)

    def test_crowded_region_skips_but_never_overlaps(self):
        tiny = Region(x=0.0, y=0.0, width=60.0, height=40.0)
        terms = [WeightedTerm(f"w{i:03d}x", float(i % 7) + 1.0)
                 for i in range(100)]
        result = layout_wordcloud(terms, tiny, self.FONT)
        assert result.skipped
        assert len(result.placements) + len(result.skipped) == 100
        boxes = self.boxes(result)
        for i, a in enumerate(boxes):
            assert tiny.contains(a)
            for b in boxes[i + 1:]:
                assert not self.overlap(a, b)

    def test_font_size_monotone_in_weight(self):
        terms = [WeightedTerm("aa", 1.0), WeightedTerm("bb", 2.0),
                 WeightedTerm("cc", 4.0)]
        result = layout_wordcloud(terms, self.REGION, self.FONT)
        size = {p.term: p.fontSize for p in result.placements}
        assert size["cc"] > size["bb"] > size["aa"]
        assert size["cc"] == self.FONT.maxSize
        assert size["aa"] == self.FONT.minSize

    def test_zero_area_region_rejected(self):
        with pytest.raises(ValueError):
            layout_wordcloud([WeightedTerm("x", 1.0)],
                             Region(0.0, 0.0, 0.0, 10.0), self.FONT)

    def test_deterministic(self):
        terms = [WeightedTerm(f"term{c}", float(ord(c))) for c in "abcdef"]
        one = layout_wordcloud(terms, self.REGION, self.FONT)
        two = layout_wordcloud(terms, self.REGION, self.FONT)
        assert one.placements == two.placements


class TestMinimap:
    def test_window_covering_everything_spans_the_map(self):
        doc = two_line_story()
        layout = compute_layout(doc.fragments)
        ys = list(layout.y.values())
        window = {"x0": 0, "x1": len(layout.steps) - 1,
                  "y0": min(ys), "y1": max(ys)}
        root = parse(render_minimap(layout, window))
        rect = find_by_id(root, "minimap-window")
        lines = find_by_id(root, "minimap-lines")
        assert float(rect.get("x")) == pytest.approx(10.0)
        assert float(rect.get("width")) == pytest.approx(200.0)
        assert len(list(lines)) >= 2

    def test_out_of_range_window_clamped(self):
        doc = two_line_story()
        layout = compute_layout(doc.fragments)
        root = parse(render_minimap(layout, {"x0": -5, "x1": 999,
                                             "y0": -999, "y1": 999}))
        rect = find_by_id(root, "minimap-window")
        assert float(rect.get("data-x0")) == 0.0
        assert float(rect.get("data-x1")) == float(len(layout.steps) - 1)

    def test_window_reported_in_layout_coordinates(self):
        doc = two_line_story()
        layout = compute_layout(doc.fragments)
        root = parse(render_minimap(layout, {"x0": 1, "x1": 2,
                                             "y0": 0.0, "y1": 1.0}))
        rect = find_by_id(root, "minimap-window")
        assert float(rect.get("data-x0")) == 1.0
        assert float(rect.get("data-x1")) == 2.0
