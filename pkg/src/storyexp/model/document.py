"""Edit operations over a StoryDocument.

Every mutation appends an OperationRecord whose payload snapshots the
post-state of the touched objects, so replaying the log on an empty
document reproduces the final entity and fragment sets. Callers serialize
writes per document; these functions assume exclusive access.
"""

from __future__ import annotations

import hashlib
from typing import Any

from ..errors import (
    DuplicateName,
    EmptyPersons,
    InvalidInterval,
    SameFragment,
    WrongEntityKind,
)
from .types import (
    Entity,
    EntityKind,
    EntitySource,
    Fragment,
    OperationRecord,
    StoryDocument,
    TextSpan,
)

# Palette indices cycle per kind so adjacent entities get distinct colors.
_PALETTE_SIZE = 8


def new_document(pages: list[str], title: str = "") -> StoryDocument:
    """Create a document whose id is derived from its text content."""
    digest = hashlib.sha256("\n".join(pages).encode("utf-8")).hexdigest()
    return StoryDocument(id=f"doc-{digest[:12]}", title=title, pages=list(pages))


def add_entity(
    doc: StoryDocument,
    kind: EntityKind,
    name: str,
    *,
    aliases: set[str] | None = None,
    source: EntitySource = EntitySource.MANUAL,
    confidence: float = 1.0,
) -> Entity:
    """Create a new entity; DuplicateName if the kind already has that name."""
    if not name:
        raise DuplicateName("entity name must be non-empty")
    if doc.find_entity_by_name(kind, name) is not None:
        raise DuplicateName(f"{kind.value} entity named {name!r} already exists")
    color = sum(1 for e in doc.entities.values() if e.kind == kind) % _PALETTE_SIZE
    ent = Entity(
        id=doc.next_entity_id(),
        kind=kind,
        canonicalName=name,
        aliases=set(aliases or ()) - {name},
        source=source,
        confidence=confidence,
        colorKey=color,
    )
    doc.entities[ent.id] = ent
    doc.log("create", ent.id, {"entity": ent.to_dict(), "entityIds": [ent.id]})
    return ent


def _check_kind(doc: StoryDocument, entity_id: str, kind: EntityKind) -> Entity:
    ent = doc.entity(entity_id)
    if ent.kind != kind:
        raise WrongEntityKind(f"{entity_id} is {ent.kind.value}, expected {kind.value}")
    return ent


def create_fragment(
    doc: StoryDocument,
    persons: list[str],
    time: str | None = None,
    place: str | None = None,
    eventSummary: str = "",
    spans: list[TextSpan] | None = None,
) -> Fragment:
    """Append a fragment; its interval starts one step after the current end.

    Narrative order approximates time order until the user drags the
    fragment somewhere else.
    """
    if not persons:
        raise EmptyPersons("a fragment needs at least one person")
    for pid in persons:
        _check_kind(doc, pid, EntityKind.PERSON)
    if time is not None:
        _check_kind(doc, time, EntityKind.TIME)
    if place is not None:
        _check_kind(doc, place, EntityKind.PLACE)

    if doc.fragments:
        step = max(f.interval[1] for f in doc.fragments) + 1
    else:
        step = 0
    frag = Fragment(
        id=doc.next_fragment_id(),
        persons=list(dict.fromkeys(persons)),
        time=time,
        place=place,
        eventSummary=eventSummary,
        spanRange=list(spans or []),
        interval=(step, step),
    )
    frag.recompute_page_range()
    doc.fragments.append(frag)
    touched = list(frag.persons) + [x for x in (time, place) if x]
    doc.log("create", frag.id, {"fragment": frag.to_dict(), "entityIds": touched})
    doc.layoutStale = True
    return frag


def rename_entity(doc: StoryDocument, entity_id: str, new_name: str) -> Entity:
    """Replace the canonical name; the old one becomes an alias.

    Fragments reference the id, so they reflect the new name on read.
    Renaming to the current name is a no-op and is not logged.
    """
    ent = doc.entity(entity_id)
    if not new_name:
        raise DuplicateName("entity name must be non-empty")
    if new_name == ent.canonicalName:
        return ent
    sibling = doc.find_entity_by_name(ent.kind, new_name)
    if sibling is not None and sibling.id != entity_id:
        raise DuplicateName(f"{ent.kind.value} entity named {new_name!r} already exists")
    ent.aliases.add(ent.canonicalName)
    ent.aliases.discard(new_name)
    ent.canonicalName = new_name
    doc.log("rename", entity_id, {"entity": ent.to_dict(), "entityIds": [entity_id]})
    return ent


def delete_entity(doc: StoryDocument, entity_id: str) -> list[Fragment]:
    """Remove an entity everywhere it is referenced.

    Fragments left with no persons are flagged invalid and returned for
    explicit resolution rather than being deleted behind the user's back.
    """
    doc.entity(entity_id)  # raises UnknownEntity
    del doc.entities[entity_id]

    invalidated: list[Fragment] = []
    touched_frag_snapshots: list[dict[str, Any]] = []
    for frag in doc.fragments:
        changed = False
        if entity_id in frag.persons:
            frag.persons = [p for p in frag.persons if p != entity_id]
            changed = True
        if frag.time == entity_id:
            frag.time = None
            changed = True
        if frag.place == entity_id:
            frag.place = None
            changed = True
        if changed:
            if not frag.persons:
                frag.invalid = True
                invalidated.append(frag)
            touched_frag_snapshots.append(frag.to_dict())

    for ann in doc.annotations:
        if ann.entityId == entity_id:
            ann.entityId = None

    doc.log(
        "delete",
        entity_id,
        {"entityIds": [entity_id], "fragments": touched_frag_snapshots},
    )
    if touched_frag_snapshots:
        doc.layoutStale = True
    return invalidated


def merge_fragments(doc: StoryDocument, id_a: str, id_b: str) -> Fragment:
    """Fold B into A: union elements, interval hull, B removed."""
    if id_a == id_b:
        raise SameFragment(f"cannot merge {id_a} with itself")
    frag_a = doc.fragment(id_a)
    frag_b = doc.fragment(id_b)

    frag_a.persons = list(dict.fromkeys(frag_a.persons + frag_b.persons))
    frag_a.keywords = list(dict.fromkeys(frag_a.keywords + frag_b.keywords))
    existing = {(s.pageIndex, s.start, s.end) for s in frag_a.spanRange}
    for span in frag_b.spanRange:
        if (span.pageIndex, span.start, span.end) not in existing:
            frag_a.spanRange.append(span)
    frag_a.interval = (
        min(frag_a.interval[0], frag_b.interval[0]),
        max(frag_a.interval[1], frag_b.interval[1]),
    )
    if frag_a.time is None:
        frag_a.time = frag_b.time
    if frag_a.place is None:
        frag_a.place = frag_b.place
    # Both summaries kept until the user re-runs summarization.
    if frag_b.eventSummary and frag_b.eventSummary != frag_a.eventSummary:
        frag_a.eventSummary = " ".join(filter(None, (frag_a.eventSummary, frag_b.eventSummary)))
    frag_a.recompute_page_range()
    frag_a.invalid = False

    doc.fragments = [f for f in doc.fragments if f.id != id_b]
    doc.log(
        "merge",
        id_a,
        {"fragment": frag_a.to_dict(), "removed": id_b, "entityIds": list(frag_a.persons)},
    )
    doc.layoutStale = True
    return frag_a


def delete_fragment(doc: StoryDocument, fragment_id: str) -> None:
    frag = doc.fragment(fragment_id)
    doc.fragments = [f for f in doc.fragments if f.id != fragment_id]
    doc.log("delete", fragment_id, {"fragmentId": fragment_id, "entityIds": list(frag.persons)})
    doc.layoutStale = True


def set_fragment_interval(
    doc: StoryDocument, fragment_id: str, start_step: int, end_step: int
) -> Fragment:
    """Drag/resize a fragment on the timeline; marks the layout stale."""
    if start_step < 0 or end_step < start_step:
        raise InvalidInterval(f"bad interval [{start_step}, {end_step}]")
    frag = doc.fragment(fragment_id)
    frag.interval = (start_step, end_step)
    doc.log(
        "drag",
        fragment_id,
        {"fragment": frag.to_dict(), "entityIds": list(frag.persons)},
    )
    doc.layoutStale = True
    return frag


def update_fragment(
    doc: StoryDocument,
    fragment_id: str,
    *,
    persons: list[str] | None = None,
    time: str | None | object = ...,
    place: str | None | object = ...,
    eventSummary: str | None = None,
    keywords: list[str] | None = None,
) -> Fragment:
    """Partial update of fragment elements (PATCH semantics)."""
    frag = doc.fragment(fragment_id)
    if persons is not None:
        if not persons:
            raise EmptyPersons("a fragment needs at least one person")
        for pid in persons:
            _check_kind(doc, pid, EntityKind.PERSON)
        frag.persons = list(dict.fromkeys(persons))
        frag.invalid = False
    if time is not ...:
        if time is not None:
            _check_kind(doc, time, EntityKind.TIME)  # type: ignore[arg-type]
        frag.time = time  # type: ignore[assignment]
    if place is not ...:
        if place is not None:
            _check_kind(doc, place, EntityKind.PLACE)  # type: ignore[arg-type]
        frag.place = place  # type: ignore[assignment]
    if eventSummary is not None:
        frag.eventSummary = eventSummary
    if keywords is not None:
        frag.keywords = list(dict.fromkeys(keywords))
    doc.log(
        "modify",
        fragment_id,
        {"fragment": frag.to_dict(), "entityIds": list(frag.persons)},
    )
    doc.layoutStale = True
    return frag


def recent_entities(doc: StoryDocument, k: int) -> list[str]:
    """Ids of the k most recently touched entities; ties by creation order.

    Entities the log never touched rank last, still in creation order.
    """
    if k <= 0:
        return []
    last_touch: dict[str, int] = {}
    for rec in doc.opLog:
        for eid in rec.payload.get("entityIds", []):
            last_touch[eid] = rec.timestamp
    creation_rank = {eid: i for i, eid in enumerate(doc.entities)}
    ordered = sorted(
        doc.entities,
        key=lambda eid: (-last_touch.get(eid, -1), creation_rank[eid]),
    )
    return ordered[:k]


def replay_oplog(records: list[OperationRecord]) -> tuple[dict[str, Entity], list[Fragment]]:
    """Rebuild the entity and fragment sets from an operation log."""
    entities: dict[str, Entity] = {}
    fragments: dict[str, Fragment] = {}
    order: list[str] = []

    def put_fragment(snapshot: dict[str, Any]) -> None:
        frag = Fragment.from_dict(snapshot)
        if frag.id not in fragments:
            order.append(frag.id)
        fragments[frag.id] = frag

    for rec in records:
        payload = rec.payload
        if "entity" in payload:
            ent = Entity.from_dict(payload["entity"])
            entities[ent.id] = ent
        if "fragment" in payload:
            put_fragment(payload["fragment"])
        for snap in payload.get("fragments", []):
            put_fragment(snap)
        if rec.kind == "delete":
            if "fragmentId" in payload:
                fragments.pop(payload["fragmentId"], None)
                if payload["fragmentId"] in order:
                    order.remove(payload["fragmentId"])
            elif "fragment" not in payload and "entity" not in payload:
                entities.pop(rec.targetId, None)
        if rec.kind == "merge":
            removed = payload.get("removed")
            if removed in fragments:
                del fragments[removed]
                order.remove(removed)

    return entities, [fragments[fid] for fid in order if fid in fragments]


def apply_edit_script(doc: StoryDocument, edits: list[dict[str, Any]]) -> list[str]:
    """Apply a storyline edit script; returns the touched fragment ids.

    Shared by the preview path (on a shadow copy) and the direct-edit
    path so both produce identical documents.
    """
    touched: list[str] = []
    for edit in edits:
        op = edit.get("op")
        if op == "setInterval":
            frag = set_fragment_interval(
                doc, edit["fragmentId"], int(edit["start"]), int(edit["end"])
            )
            touched.append(frag.id)
        elif op == "merge":
            frag = merge_fragments(doc, edit["a"], edit["b"])
            touched.extend([frag.id, edit["b"]])
        elif op == "delete":
            delete_fragment(doc, edit["fragmentId"])
            touched.append(edit["fragmentId"])
        elif op == "setKeywords":
            frag = update_fragment(doc, edit["fragmentId"], keywords=list(edit["keywords"]))
            touched.append(frag.id)
        elif op == "setSummary":
            frag = update_fragment(doc, edit["fragmentId"], eventSummary=str(edit["text"]))
            touched.append(frag.id)
        else:
            raise ValueError(f"unknown edit op {op!r}")
    return touched
