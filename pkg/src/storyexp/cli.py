"""Batch command line: import, extract, layout, render, metrics, serve.

Exit codes: 0 success, 1 validation failure, 2 I/O failure. All
subcommands operate on the same document file format as the service.
"""

from __future__ import annotations

import os
import random
import sys
from pathlib import Path

import click

from .errors import IoError, StoryExpError
from .extraction import make_provider
from .extraction.ops import extract_entities, keyword_weights, summarize
from .layout import LayoutParams, LayoutSpec, compute_layout, layout_metrics
from .model.document import add_entity, create_fragment, new_document, update_fragment
from .model.store import load_document, save_document
from .model.types import EntityKind, EntitySource, TextSpan
from .render import SceneConfig, render_storyline
from .service.store import DocumentStore, paginate

_PROVIDER_SOURCE = {
    "rule": EntitySource.PROVIDER_RULE,
    "remoteLM": EntitySource.PROVIDER_LLM,
}


def _fail(exc: BaseException, code: int) -> None:
    click.echo(f"{type(exc).__name__}: {exc}", err=True)
    sys.exit(code)


def _guarded(fn):
    try:
        fn()
    except (IoError, OSError) as exc:
        _fail(exc, 2)
    except (StoryExpError, ValueError) as exc:
        _fail(exc, 1)


def _parse_params(pairs: tuple[str, ...]) -> LayoutParams:
    overrides: dict[str, str] = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise ValueError(f"--params expects k=v, got {pair!r}")
        overrides[key.strip()] = value.strip()
    return LayoutParams.from_overrides(overrides)


@click.group()
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for any randomized subcommand behavior.")
def main(seed: int) -> None:
    random.seed(seed)


@main.command("import")
@click.argument("text_path", type=click.Path(path_type=Path))
@click.argument("out", type=click.Path(path_type=Path))
@click.option("--title", default="", help="Document title.")
def import_cmd(text_path: Path, out: Path, title: str) -> None:
    """Read raw text, split it into pages, write a fresh document file."""
    def run() -> None:
        text = text_path.read_text(encoding="utf-8")
        if not text.strip():
            raise ValueError("input text is empty")
        doc = new_document(paginate(text), title=title or text_path.stem)
        save_document(doc, out)
        click.echo(f"imported {doc.id}: {len(doc.pages)} page(s) -> {out}")
    _guarded(run)


@main.command("extract")
@click.argument("doc_path", type=click.Path(path_type=Path))
@click.option("--provider", type=click.Choice(["rule", "remote"]),
              default="rule", show_default=True)
def extract_cmd(doc_path: Path, provider: str) -> None:
    """Run entity extraction per page and synthesize one fragment per page."""
    def run() -> None:
        doc = load_document(doc_path)
        kind = "remoteLM" if provider == "remote" else "rule"
        engine = make_provider(kind, doc.config)
        source = _PROVIDER_SOURCE[kind]

        fragments = 0
        for page_index, page in enumerate(doc.pages):
            if not page.strip():
                continue
            found = extract_entities(
                page, doc.config, engine,
                known_entities=list(doc.entities.values()),
            )
            by_kind: dict[EntityKind, list[str]] = {}
            for cand in found:
                ent_kind = EntityKind(cand.kind)
                ent = doc.find_entity_by_name(ent_kind, cand.surface)
                if ent is None:
                    ent = add_entity(doc, ent_kind, cand.surface,
                                     source=source,
                                     confidence=cand.confidence)
                by_kind.setdefault(ent_kind, []).append(ent.id)
            persons = list(dict.fromkeys(by_kind.get(EntityKind.PERSON, [])))
            if not persons:
                continue  # a fragment needs at least one person
            times = by_kind.get(EntityKind.TIME, [])
            places = by_kind.get(EntityKind.PLACE, [])
            span = TextSpan(page_index, 0, len(page))
            frag = create_fragment(
                doc, persons,
                time=times[0] if times else None,
                place=places[0] if places else None,
                spans=[span],
            )
            summary = summarize(page, [], doc.config, engine,
                                known_entities=list(doc.entities.values()))
            entities = [doc.entities[e] for e in persons]
            terms = keyword_weights(page, [], entities, doc.config)
            update_fragment(doc, frag.id, eventSummary=summary,
                            keywords=[t.term for t in terms[:3]])
            fragments += 1

        doc.version += 1
        save_document(doc, doc_path)
        click.echo(
            f"extracted {len(doc.entities)} entities, {fragments} fragments"
        )
    _guarded(run)


@main.command("layout")
@click.argument("doc_path", type=click.Path(path_type=Path))
@click.option("--params", "params_kv", multiple=True,
              help="Layout parameter override k=v; repeatable.")
def layout_cmd(doc_path: Path, params_kv: tuple[str, ...]) -> None:
    """Compute and commit the storyline layout."""
    def run() -> None:
        doc = load_document(doc_path)
        active = [f for f in doc.fragments if not f.invalid and f.persons]
        if not active:
            raise ValueError("no fragments")
        params = _parse_params(params_kv)
        spec = compute_layout(doc.fragments, params)
        doc.committedLayout = spec.to_dict()
        doc.layoutStale = False
        doc.version += 1
        save_document(doc, doc_path)
        m = spec.metrics
        click.echo(
            f"crossings={m['crossings']}, wiggles={m['wiggles']}, "
            f"whitespace={round(m['whitespace'], 6)}"
        )
    _guarded(run)


@main.command("render")
@click.argument("doc_path", type=click.Path(path_type=Path))
@click.argument("svg_out", type=click.Path(path_type=Path))
def render_cmd(doc_path: Path, svg_out: Path) -> None:
    """Render the committed layout to an SVG file."""
    def run() -> None:
        doc = load_document(doc_path)
        if doc.committedLayout is None:
            raise ValueError("no committed layout; run the layout command first")
        spec = LayoutSpec.from_dict(doc.committedLayout)
        svg = render_storyline(spec, doc, SceneConfig())
        svg_out.parent.mkdir(parents=True, exist_ok=True)
        svg_out.write_text(svg, encoding="utf-8")
        click.echo(f"wrote {svg_out}")
    _guarded(run)


@main.command("metrics")
@click.argument("doc_path", type=click.Path(path_type=Path))
def metrics_cmd(doc_path: Path) -> None:
    """Print layout quality metrics without mutating the document."""
    def run() -> None:
        doc = load_document(doc_path)
        if doc.committedLayout is not None:
            metrics = doc.committedLayout["metrics"]
        else:
            active = [f for f in doc.fragments if not f.invalid and f.persons]
            if not active:
                raise ValueError("no fragments")
            spec = compute_layout(doc.fragments, LayoutParams())
            metrics = layout_metrics(spec.orderings, spec.y)
        click.echo(
            f"crossings={metrics['crossings']}, wiggles={metrics['wiggles']}, "
            f"whitespace={round(metrics['whitespace'], 6)}"
        )
    _guarded(run)


@main.command("serve")
@click.option("--port", type=int, default=None,
              help="Listen port; defaults to STORYEXP_PORT or 8000.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data", "data_dir", type=click.Path(path_type=Path),
              default=None, help="Data root; defaults to STORYEXP_DATA.")
@click.option("--static", "static_dir", type=click.Path(path_type=Path),
              default=None, help="Optional UI bundle to serve at /.")
def serve_cmd(port: int | None, host: str, data_dir: Path | None,
              static_dir: Path | None) -> None:
    """Run the HTTP service."""
    def run() -> None:
        import uvicorn

        from .service.app import create_app

        store = DocumentStore(data_dir) if data_dir else DocumentStore()
        resolved = port or int(os.environ.get("STORYEXP_PORT", "8000"))
        app = create_app(store, static_dir=static_dir)
        uvicorn.run(app, host=host, port=resolved, log_level="warning")
    _guarded(run)


if __name__ == "__main__":
    main()
