"""HTTP API over the authoring engine.

All mutations funnel through DocumentStore.mutate (per-document lock,
version bump, atomic persist). Layout edits follow a preview/commit
protocol: preview computes on a shadow copy and never touches committed
state; commit replays the same edit script against the live document.
"""

from __future__ import annotations

import copy
import threading
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from .. import errors
from ..extraction import make_provider
from ..extraction.ops import extract_entities, keyword_weights, summarize
from ..ink.binding import LineBox, PendingSpans, bind_to_spans, merge_multiline, monospace_layout
from ..ink.recognizer import TemplateRegistry, recognize
from ..layout import LayoutParams, LayoutSpec, compute_layout, incremental_update
from ..model.document import (
    add_entity,
    apply_edit_script,
    create_fragment,
    delete_entity,
    delete_fragment,
    rename_entity,
    set_fragment_interval,
    update_fragment,
)
from ..model.store import document_to_dict
from ..model.types import Annotation, EntityKind, EntitySource, StoryDocument, TextSpan
from ..render import SceneConfig, render_storyline
from .store import DocumentStore

MAX_UPLOAD_CHARS = 2_000_000


def _doc_summary(doc: StoryDocument) -> dict[str, Any]:
    return {
        "id": doc.id,
        "title": doc.title,
        "pages": doc.pages,
        "version": doc.version,
    }


def _entity_payload(doc: StoryDocument) -> list[dict[str, Any]]:
    return [doc.entities[k].to_dict() for k in sorted(doc.entities)]


def _fragment_view(doc: StoryDocument, frag) -> tuple[str, list[TextSpan]]:
    """Fragment text joined from its spans, plus highlight spans remapped
    into the joined text's offsets."""
    page_highlights = [
        s for a in doc.annotations if a.gesture == "highlightBox"
        for s in a.spans
    ]
    parts: list[str] = []
    highlights: list[TextSpan] = []
    offset = 0
    for span in frag.spanRange:
        chunk = doc.pages[span.pageIndex][span.start:span.end]
        for h in page_highlights:
            if (h.pageIndex == span.pageIndex
                    and h.start < span.end and span.start < h.end):
                lo = max(h.start, span.start) - span.start + offset
                hi = min(h.end, span.end) - span.start + offset
                highlights.append(TextSpan(span.pageIndex, lo, hi))
        parts.append(chunk)
        offset += len(chunk) + 1  # the joining space
    return " ".join(parts), highlights


def _shadow_layout(doc: StoryDocument, edits: list[dict[str, Any]],
                   params: LayoutParams) -> LayoutSpec:
    shadow = copy.deepcopy(doc)
    changed = apply_edit_script(shadow, edits)
    if doc.committedLayout is not None:
        prev = LayoutSpec.from_dict(doc.committedLayout)
        return incremental_update(prev, set(changed), shadow.fragments, params)
    return compute_layout(shadow.fragments, params)


def create_app(store: DocumentStore | None = None,
               scene_config: SceneConfig | None = None,
               static_dir: str | Path | None = None) -> FastAPI:
    store = store or DocumentStore()
    scene = scene_config or SceneConfig()
    app = FastAPI(title="storyexp")

    registries: dict[str, TemplateRegistry] = {}
    registries_lock = threading.Lock()
    # last underline per (doc, page), for the multi-line merge window
    pending: dict[tuple[str, int], tuple[str, PendingSpans]] = {}
    pending_lock = threading.Lock()

    def registry_for(doc_id: str) -> TemplateRegistry:
        with registries_lock:
            return registries.setdefault(doc_id, TemplateRegistry())

    @app.exception_handler(errors.StoryExpError)
    async def engine_error(request: Request, exc: errors.StoryExpError):
        status = 400
        payload: dict[str, Any] = {"error": type(exc).__name__, "detail": str(exc)}
        if isinstance(exc, (errors.UnknownDocument, errors.UnknownEntity,
                            errors.UnknownFragment)):
            status = 404
        elif isinstance(exc, errors.OverlapConflict):
            status = 409
            payload["conflicts"] = [
                {"entityId": e, "step": s, "fragmentA": a, "fragmentB": b}
                for e, s, a, b in exc.conflicts
            ]
        elif isinstance(exc, (errors.DegenerateInk, errors.NoTextUnderStroke)):
            status = 422
        elif isinstance(exc, errors.ProviderUnavailable):
            status = 503
        elif isinstance(exc, (errors.IoError, errors.CorruptDocument)):
            status = 500
        return JSONResponse(payload, status_code=status)

    @app.exception_handler(ValueError)
    async def value_error(request: Request, exc: ValueError):
        return JSONResponse(
            {"error": "ValueError", "detail": str(exc)}, status_code=400
        )

    # -- documents -----------------------------------------------------------

    @app.post("/documents", status_code=201)
    def create_document(body: dict[str, Any]):
        text = body.get("text", "")
        if not isinstance(text, str) or not text.strip():
            return JSONResponse(
                {"error": "EmptyText", "detail": "document text is empty"},
                status_code=400,
            )
        if len(text) > MAX_UPLOAD_CHARS:
            return JSONResponse(
                {"error": "TooLarge",
                 "detail": f"text exceeds {MAX_UPLOAD_CHARS} characters"},
                status_code=413,
            )
        doc = store.create(text, title=str(body.get("title", "")))
        return _doc_summary(doc)

    @app.get("/documents")
    def list_documents():
        return {"documents": store.list_ids()}

    @app.get("/documents/{doc_id}")
    def get_document(doc_id: str):
        return document_to_dict(store.load(doc_id))

    # -- annotations -----------------------------------------------------------

    def _page_layout(doc: StoryDocument, page_index: int,
                     body: dict[str, Any]) -> list[LineBox]:
        spec = body.get("pageLayout") or {}
        if "lines" in spec:
            return [LineBox.from_dict(d) for d in spec["lines"]]
        mono = spec.get("monospace") or {}
        return monospace_layout(
            doc.pages[page_index],
            max_chars=int(mono.get("maxChars", 60)),
            char_width=float(mono.get("charWidth", 8.0)),
            line_height=float(mono.get("lineHeight", 16.0)),
            ascent=float(mono.get("ascent", 12.0)),
        )

    def _span_text(doc: StoryDocument, spans: list[TextSpan]) -> str:
        return " ".join(doc.pages[s.pageIndex][s.start:s.end] for s in spans)

    @app.post("/documents/{doc_id}/annotations", status_code=201)
    def post_annotation(doc_id: str, body: dict[str, Any]):
        probe = store.load(doc_id)  # 404 before touching ink
        page_index = int(body.get("pageIndex", 0))
        if not 0 <= page_index < len(probe.pages):
            raise errors.UnknownDocument(f"page {page_index} out of range")
        strokes = body.get("strokes") or []
        time_ms = float(body.get("timeMs", 0.0))

        result = recognize(strokes, registry_for(doc_id).all())
        lines = _page_layout(probe, page_index, body)
        spans = bind_to_spans(strokes, lines, page_index)

        def apply_ink(doc: StoryDocument) -> dict[str, Any]:
            gesture = result.templateName
            extra: dict[str, Any] = {}
            annotation = Annotation(
                id=doc.next_annotation_id(),
                pageIndex=page_index,
                gesture=gesture,
                score=result.score,
                strokes=[[list(map(float, p)) for p in s] for s in strokes],
                spans=list(spans),
            )
            merged_spans = list(spans)
            if gesture == "underline":
                key = (doc.id, page_index)
                with pending_lock:
                    held = pending.get(key)
                    if held is not None:
                        prev_id, prev_pending = held
                        groups = merge_multiline(
                            [prev_pending, PendingSpans(list(spans), time_ms)],
                            lines,
                        )
                        if len(groups) == 1:
                            for ann in doc.annotations:
                                if ann.id == prev_id:
                                    ann.spans = list(groups[0])
                                    merged_spans = list(groups[0])
                                    annotation.spans = []
                                    break
                    owner = annotation.id if annotation.spans else held[0]
                    pending[key] = (owner, PendingSpans(merged_spans, time_ms))
                phrase = _span_text(doc, merged_spans)
                provider = make_provider(doc.config.providerKind, doc.config)
                found = extract_entities(
                    phrase, doc.config, provider,
                    known_entities=list(doc.entities.values()),
                )
                candidates = []
                for cand in found:
                    payload = cand.to_dict()
                    if len(merged_spans) == 1 and cand.sourceSpan is not None:
                        base = merged_spans[0]
                        payload["sourceSpan"] = TextSpan(
                            base.pageIndex,
                            base.start + cand.sourceSpan.start,
                            base.start + cand.sourceSpan.end,
                        ).to_dict()
                    candidates.append(payload)
                if not candidates:
                    candidates = [{
                        "surface": phrase,
                        "kind": EntityKind.PERSON.value,
                        "confidence": 0.5,
                        "sourceSpan": merged_spans[0].to_dict(),
                    }]
                extra["candidates"] = candidates
            elif gesture == "highlightBox":
                phrase = _span_text(doc, spans)
                provider = make_provider(doc.config.providerKind, doc.config)
                found = extract_entities(
                    phrase, doc.config, provider,
                    known_entities=list(doc.entities.values()),
                )
                created = []
                for cand in found:
                    kind = EntityKind(cand.kind)
                    if doc.find_entity_by_name(kind, cand.surface) is not None:
                        continue
                    ent = add_entity(
                        doc, kind, cand.surface,
                        source=EntitySource.HIGHLIGHT_AUTO,
                        confidence=cand.confidence,
                    )
                    created.append(ent.to_dict())
                extra["entities"] = created
            elif gesture == "strikeDelete":
                phrase = _span_text(doc, spans).strip()
                target = None
                for ent in doc.entities.values():
                    if ent.matches_name(phrase):
                        target = ent
                        break
                if target is not None:
                    # annotation must not keep a reference to the entity it removed
                    invalidated = delete_entity(doc, target.id)
                    extra["deleted"] = target.id
                    extra["invalidatedFragments"] = [f.id for f in invalidated]
                else:
                    extra["deleted"] = None
            elif gesture == "circleModify":
                phrase = _span_text(doc, spans).strip()
                target = None
                for ent in doc.entities.values():
                    if ent.matches_name(phrase):
                        target = ent
                        break
                annotation.entityId = target.id if target else None
                extra["target"] = target.to_dict() if target else None
            if annotation.spans or gesture != "underline":
                doc.annotations.append(annotation)
            extra.update({
                "annotationId": annotation.id if annotation.spans else None,
                "gesture": gesture,
                "score": result.score,
                "spans": [s.to_dict() for s in merged_spans],
            })
            return extra

        doc, payload = store.mutate(doc_id, apply_ink)
        payload["version"] = doc.version
        return payload

    # -- entities ---------------------------------------------------------------

    @app.post("/documents/{doc_id}/entities", status_code=201)
    def post_entity(doc_id: str, body: dict[str, Any]):
        def run(doc: StoryDocument):
            ent = add_entity(
                doc,
                EntityKind(body["kind"]),
                str(body["name"]),
                aliases=set(body.get("aliases", [])),
                confidence=float(body.get("confidence", 1.0)),
            )
            return ent.to_dict()
        doc, ent = store.mutate(doc_id, run)
        return {"entity": ent, "version": doc.version}

    @app.get("/documents/{doc_id}/entities")
    def get_entities(doc_id: str):
        return {"entities": _entity_payload(store.load(doc_id))}

    @app.patch("/documents/{doc_id}/entities/{entity_id}")
    def patch_entity(doc_id: str, entity_id: str, body: dict[str, Any]):
        def run(doc: StoryDocument):
            if "name" in body:
                rename_entity(doc, entity_id, str(body["name"]))
            return doc.entity(entity_id).to_dict()
        doc, ent = store.mutate(doc_id, run)
        return {"entity": ent, "version": doc.version}

    @app.delete("/documents/{doc_id}/entities/{entity_id}")
    def remove_entity(doc_id: str, entity_id: str):
        def run(doc: StoryDocument):
            invalidated = delete_entity(doc, entity_id)
            return [f.id for f in invalidated]
        doc, invalidated = store.mutate(doc_id, run)
        return {"invalidatedFragments": invalidated, "version": doc.version}

    # -- fragments ---------------------------------------------------------------

    @app.post("/documents/{doc_id}/fragments", status_code=201)
    def post_fragment(doc_id: str, body: dict[str, Any]):
        def run(doc: StoryDocument):
            frag = create_fragment(
                doc,
                [str(p) for p in body.get("persons", [])],
                time=body.get("time"),
                place=body.get("place"),
                eventSummary=str(body.get("eventSummary", "")),
                spans=[TextSpan.from_dict(s) for s in body.get("spans", [])],
            )
            return frag.to_dict()
        doc, frag = store.mutate(doc_id, run)
        return {"fragment": frag, "version": doc.version}

    @app.get("/documents/{doc_id}/fragments")
    def get_fragments(doc_id: str):
        doc = store.load(doc_id)
        return {"fragments": [f.to_dict() for f in doc.fragments]}

    @app.patch("/documents/{doc_id}/fragments/{fragment_id}")
    def patch_fragment(doc_id: str, fragment_id: str, body: dict[str, Any]):
        def run(doc: StoryDocument):
            if "interval" in body:
                start, end = body["interval"]
                set_fragment_interval(doc, fragment_id, int(start), int(end))
            fields: dict[str, Any] = {}
            for key in ("persons", "keywords"):
                if key in body:
                    fields[key] = [str(v) for v in body[key]]
            if "eventSummary" in body:
                fields["eventSummary"] = str(body["eventSummary"])
            for key in ("time", "place"):
                if key in body:
                    fields[key] = body[key]
            if fields:
                update_fragment(doc, fragment_id, **fields)
            return doc.fragment(fragment_id).to_dict()
        doc, frag = store.mutate(doc_id, run)
        return {"fragment": frag, "version": doc.version}

    @app.delete("/documents/{doc_id}/fragments/{fragment_id}")
    def remove_fragment(doc_id: str, fragment_id: str):
        def run(doc: StoryDocument):
            delete_fragment(doc, fragment_id)
        doc, _ = store.mutate(doc_id, run)
        return {"version": doc.version}

    # -- extraction / summarization ------------------------------------------------

    @app.post("/documents/{doc_id}/extract")
    def extract(doc_id: str, body: dict[str, Any] | None = None):
        body = body or {}
        doc = store.load(doc_id)
        page_index = body.get("pageIndex")
        text = (
            doc.pages[int(page_index)]
            if page_index is not None else "\n".join(doc.pages)
        )
        provider = make_provider(doc.config.providerKind, doc.config)
        found = extract_entities(
            text, doc.config, provider,
            known_entities=list(doc.entities.values()),
        )
        return {"candidates": [c.to_dict() for c in found]}

    @app.post("/documents/{doc_id}/fragments/{fragment_id}/summarize")
    def summarize_fragment(doc_id: str, fragment_id: str):
        def run(doc: StoryDocument):
            frag = doc.fragment(fragment_id)
            text, highlights = _fragment_view(doc, frag)
            if not text:
                text, highlights = frag.eventSummary, []
            provider = make_provider(doc.config.providerKind, doc.config)
            summary = summarize(
                text, highlights, doc.config, provider,
                known_entities=list(doc.entities.values()),
            )
            update_fragment(doc, fragment_id, eventSummary=summary)
            return summary
        doc, summary = store.mutate(doc_id, run)
        return {"summary": summary, "version": doc.version}

    @app.get("/documents/{doc_id}/fragments/{fragment_id}/keywords")
    def fragment_keywords(doc_id: str, fragment_id: str):
        doc = store.load(doc_id)
        frag = doc.fragment(fragment_id)
        text, highlights = _fragment_view(doc, frag)
        if not text:
            return {"terms": []}
        refs = [*frag.persons, frag.time, frag.place]
        entities = [doc.entities[e] for e in refs if e and e in doc.entities]
        terms = keyword_weights(text, highlights, entities, doc.config)
        return {"terms": [
            {"term": t.term, "weight": t.weight} for t in terms
        ]}

    # -- config -----------------------------------------------------------------

    @app.get("/documents/{doc_id}/config")
    def get_config(doc_id: str):
        return store.load(doc_id).config.to_dict()

    @app.patch("/documents/{doc_id}/config")
    def patch_config(doc_id: str, body: dict[str, Any]):
        def run(doc: StoryDocument):
            cfg = doc.config
            for key, value in body.items():
                if not hasattr(cfg, key):
                    raise ValueError(f"unknown config field {key!r}")
                current = getattr(cfg, key)
                if isinstance(current, tuple):
                    value = tuple(float(v) for v in value)
                elif isinstance(current, float):
                    value = float(value)
                elif isinstance(current, int):
                    value = int(value)
                setattr(cfg, key, value)
            cfg.validate()
            return cfg.to_dict()
        doc, cfg = store.mutate(doc_id, run)
        return {"config": cfg, "version": doc.version}

    # -- layout preview / commit ---------------------------------------------------

    @app.post("/documents/{doc_id}/layout/preview")
    def layout_preview(doc_id: str, body: dict[str, Any] | None = None):
        body = body or {}
        doc = store.load(doc_id)
        edits = list(body.get("edits", []))
        params = LayoutParams.from_overrides(
            {str(k): str(v) for k, v in (body.get("params") or {}).items()}
        )
        spec = _shadow_layout(doc, edits, params)
        token = store.issue_preview(doc_id, doc.version, edits, spec.to_dict())
        return {
            "token": token.token,
            "baseDocVersion": token.baseDocVersion,
            "layout": token.layout,
            "metrics": token.layout["metrics"],
        }

    @app.post("/documents/{doc_id}/layout/commit")
    def layout_commit(doc_id: str, body: dict[str, Any]):
        token = store.take_preview(str(body.get("token", "")))
        if token is None or token.docId != doc_id:
            return JSONResponse(
                {"error": "ExpiredToken",
                 "detail": "preview token unknown, used, or expired"},
                status_code=410,
            )
        with store.lock(doc_id):
            doc = store.load(doc_id)
            if doc.version != token.baseDocVersion:
                return JSONResponse(
                    {"error": "StaleVersion",
                     "detail": f"document moved to version {doc.version}"},
                    status_code=409,
                )
            apply_edit_script(doc, token.edits)
            doc.committedLayout = token.layout
            doc.layoutStale = False
            doc.version += 1
            store.save(doc)
        return {"version": doc.version, "layout": doc.committedLayout}

    @app.get("/documents/{doc_id}/layout")
    def get_layout(doc_id: str):
        doc = store.load(doc_id)
        if doc.committedLayout is None:
            return JSONResponse(
                {"error": "NoCommittedLayout",
                 "detail": "no committed layout; run layout preview then commit"},
                status_code=409,
            )
        return {"layout": doc.committedLayout, "version": doc.version,
                "stale": doc.layoutStale}

    @app.get("/documents/{doc_id}/storyline.svg")
    def get_storyline_svg(doc_id: str):
        doc = store.load(doc_id)
        if doc.committedLayout is None:
            return JSONResponse(
                {"error": "NoCommittedLayout",
                 "detail": "no committed layout; run layout preview then commit"},
                status_code=409,
            )
        cache = store.scene_cache_path(doc_id, doc.version)
        if cache.exists():
            svg = cache.read_text(encoding="utf-8")
        else:
            layout = LayoutSpec.from_dict(doc.committedLayout)
            svg = render_storyline(layout, doc, scene)
            cache.parent.mkdir(parents=True, exist_ok=True)
            cache.write_text(svg, encoding="utf-8")
        return Response(content=svg, media_type="image/svg+xml")

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="ui")

    return app
