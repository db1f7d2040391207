"""Command line pipeline: import, extract, layout, render, metrics."""

import json
import re
from importlib import resources
from xml.etree import ElementTree as ET

import pytest
from click.testing import CliRunner

from storyexp.cli import main
from storyexp.model import EntityKind, load_document

TALE = resources.files("storyexp.data") / "the_tinder_box.txt"


@pytest.fixture()
def runner():
    return CliRunner()


def run_ok(runner, *args):
    result = runner.invoke(main, list(args), catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


class TestImport:
    def test_import_writes_paginated_document(self, runner, tmp_path):
        out = tmp_path / "doc.json"
        result = run_ok(runner, "import", str(TALE), str(out))
        assert "page(s)" in result.output
        doc = load_document(out)
        assert "".join(doc.pages) == TALE.read_text(encoding="utf-8")
        assert doc.version == 1

    def test_import_missing_file_exits_2(self, runner, tmp_path):
        result = runner.invoke(
            main, ["import", str(tmp_path / "ghost.txt"),
                   str(tmp_path / "doc.json")],
        )
        assert result.exit_code == 2

    def test_import_empty_text_exits_1(self, runner, tmp_path):
        src = tmp_path / "empty.txt"
        src.write_text("   \n")
        result = runner.invoke(
            main, ["import", str(src), str(tmp_path / "doc.json")],
        )
        assert result.exit_code == 1


class TestPipeline:
    @pytest.fixture()
    def doc_path(self, runner, tmp_path):
        out = tmp_path / "tale.json"
        run_ok(runner, "import", str(TALE), str(out))
        run_ok(runner, "extract", str(out))
        return out

    def test_extract_builds_entities_and_fragments(self, runner, doc_path):
        doc = load_document(doc_path)
        assert doc.entities
        assert doc.fragments
        persons = [e for e in doc.entities.values()
                   if e.kind == EntityKind.PERSON]
        assert persons
        for frag in doc.fragments:
            assert frag.persons
            assert frag.eventSummary
            assert frag.keywords

    def test_layout_reports_metrics_line(self, runner, doc_path):
        result = run_ok(runner, "layout", str(doc_path))
        assert re.fullmatch(
            r"crossings=\d+, wiggles=\d+, whitespace=[\d.]+\n", result.output)
        doc = load_document(doc_path)
        assert doc.committedLayout is not None
        assert doc.layoutStale is False

    def test_metrics_matches_committed_layout(self, runner, doc_path):
        layout_line = run_ok(runner, "layout", str(doc_path)).output
        metrics_line = run_ok(runner, "metrics", str(doc_path)).output
        assert metrics_line == layout_line

    def test_render_scene_matches_document_counts(self, runner, doc_path,
                                                  tmp_path):
        run_ok(runner, "layout", str(doc_path))
        svg_path = tmp_path / "scene.svg"
        run_ok(runner, "render", str(doc_path), str(svg_path))
        doc = load_document(doc_path)
        root = ET.fromstring(svg_path.read_text(encoding="utf-8"))
        ns = "{http://www.w3.org/2000/svg}"
        paths = [n for n in root.iter(f"{ns}path") if n.get("class") == "line"]
        persons = {e.id for e in doc.entities.values()
                   if e.kind == EntityKind.PERSON}
        drawn = {f.id for f in doc.fragments if not f.invalid}
        assert {p.get("id") for p in paths} == \
               {p for p in persons
                if any(p in f.persons for f in doc.fragments if not f.invalid)}
        blocks = next(n for n in root.iter(f"{ns}g")
                      if n.get("id") == "layer-blocks")
        assert {g.get("id") for g in blocks} == drawn

    def test_full_run_is_deterministic(self, runner, tmp_path):
        outputs = []
        for leg in ("a", "b"):
            doc_path = tmp_path / leg / "tale.json"
            svg_path = tmp_path / leg / "scene.svg"
            doc_path.parent.mkdir()
            run_ok(runner, "--seed", "7", "import", str(TALE), str(doc_path))
            run_ok(runner, "--seed", "7", "extract", str(doc_path))
            line = run_ok(runner, "--seed", "7", "layout", str(doc_path))
            run_ok(runner, "--seed", "7", "render", str(doc_path),
                   str(svg_path))
            doc = json.loads(doc_path.read_text(encoding="utf-8"))
            doc.pop("createdAt", None)
            outputs.append((line.output, json.dumps(doc, sort_keys=True),
                            svg_path.read_bytes()))
        assert outputs[0] == outputs[1]

    def test_render_without_layout_exits_1(self, runner, doc_path, tmp_path):
        result = runner.invoke(
            main, ["render", str(doc_path), str(tmp_path / "x.svg")],
        )
        assert result.exit_code == 1

    def test_layout_on_fragmentless_document_exits_1(self, runner, tmp_path):
        src = tmp_path / "tiny.txt"
        src.write_text("Nothing happens in this text qq zz.")
        doc_path = tmp_path / "tiny.json"
        run_ok(runner, "import", str(src), str(doc_path))
        result = runner.invoke(main, ["layout", str(doc_path)])
        assert result.exit_code == 1

    def test_metrics_on_missing_document_exits_2(self, runner, tmp_path):
        result = runner.invoke(main, ["metrics", str(tmp_path / "none.json")])
        assert result.exit_code == 2
