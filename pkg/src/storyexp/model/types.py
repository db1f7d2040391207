"""Document, entity and fragment data model.

Identity is id-based throughout: names are display data, so renaming an
entity propagates to every fragment that references it without touching
the fragments themselves. Operation timestamps are a per-document logical
clock (monotone integers), which keeps saved documents byte-stable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

from ..errors import CorruptDocument


class EntityKind(str, enum.Enum):
    PERSON = "person"
    TIME = "time"
    PLACE = "place"
    EVENT = "event"


class EntitySource(str, enum.Enum):
    STROKE_ANNOTATION = "strokeAnnotation"
    HIGHLIGHT_AUTO = "highlightAuto"
    PROVIDER_LLM = "providerLLM"
    PROVIDER_RULE = "providerRule"
    MANUAL = "manual"


@dataclass
class TextSpan:
    """Half-open character range [start, end) on one page.

    Offsets are code-point offsets into the page text, never bytes.
    """

    pageIndex: int
    start: int
    end: int

    def validate(self, pages: list[str] | None = None) -> None:
        if self.pageIndex < 0 or self.start < 0 or self.start >= self.end:
            raise CorruptDocument(f"invalid span {self!r}")
        if pages is not None:
            if self.pageIndex >= len(pages):
                raise CorruptDocument(f"span page {self.pageIndex} out of range")
            if self.end > len(pages[self.pageIndex]):
                raise CorruptDocument(f"span end {self.end} beyond page length")

    def overlaps(self, other: TextSpan) -> bool:
        return (
            self.pageIndex == other.pageIndex
            and self.start < other.end
            and other.start < self.end
        )

    def to_dict(self) -> dict[str, int]:
        return {"pageIndex": self.pageIndex, "start": self.start, "end": self.end}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> TextSpan:
        try:
            return cls(int(d["pageIndex"]), int(d["start"]), int(d["end"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptDocument(f"bad span record: {d!r}") from exc


@dataclass
class Entity:
    """A typed narrative element with a canonical display name.

    canonicalName is unique per (document, kind), case-insensitively.
    aliases collect superseded names; they never contain canonicalName.
    """

    id: str
    kind: EntityKind
    canonicalName: str
    aliases: set[str] = field(default_factory=set)
    source: EntitySource = EntitySource.MANUAL
    confidence: float = 1.0
    colorKey: int = 0

    def validate(self) -> None:
        if not self.canonicalName:
            raise CorruptDocument(f"entity {self.id} has empty name")
        if not 0.0 <= self.confidence <= 1.0:
            raise CorruptDocument(f"entity {self.id} confidence out of [0,1]")
        if self.canonicalName in self.aliases:
            raise CorruptDocument(f"entity {self.id} aliases contain canonical name")

    def matches_name(self, name: str) -> bool:
        folded = name.casefold()
        if self.canonicalName.casefold() == folded:
            return True
        return any(a.casefold() == folded for a in self.aliases)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "canonicalName": self.canonicalName,
            "aliases": sorted(self.aliases),
            "source": self.source.value,
            "confidence": self.confidence,
            "colorKey": self.colorKey,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Entity:
        try:
            return cls(
                id=str(d["id"]),
                kind=EntityKind(d["kind"]),
                canonicalName=str(d["canonicalName"]),
                aliases=set(d.get("aliases", [])),
                source=EntitySource(d.get("source", "manual")),
                confidence=float(d.get("confidence", 1.0)),
                colorKey=int(d.get("colorKey", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptDocument(f"bad entity record: {d!r}") from exc


@dataclass
class Fragment:
    """Basic narrative unit: who, optionally when/where, what happened.

    persons is the only mandatory element. interval is the closed
    [startStep, endStep] range on the story timeline; pageRange is the
    [first, last] page hull derived from spanRange.
    """

    id: str
    persons: list[str]
    time: str | None = None
    place: str | None = None
    eventSummary: str = ""
    keywords: list[str] = field(default_factory=list)
    spanRange: list[TextSpan] = field(default_factory=list)
    pageRange: tuple[int, int] = (0, 0)
    interval: tuple[int, int] = (0, 0)
    invalid: bool = False

    def covered_steps(self) -> range:
        return range(self.interval[0], self.interval[1] + 1)

    def recompute_page_range(self) -> None:
        if self.spanRange:
            pages = [s.pageIndex for s in self.spanRange]
            self.pageRange = (min(pages), max(pages))
        else:
            self.pageRange = (0, 0)

    def validate(self) -> None:
        if not self.persons and not self.invalid:
            raise CorruptDocument(f"fragment {self.id} has no persons")
        if self.interval[0] > self.interval[1] or self.interval[0] < 0:
            raise CorruptDocument(f"fragment {self.id} has bad interval {self.interval}")
        if self.spanRange:
            pages = [s.pageIndex for s in self.spanRange]
            if self.pageRange != (min(pages), max(pages)):
                raise CorruptDocument(
                    f"fragment {self.id} pageRange inconsistent with spans"
                )

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "persons": list(self.persons),
            "time": self.time,
            "place": self.place,
            "eventSummary": self.eventSummary,
            "keywords": list(self.keywords),
            "spanRange": [s.to_dict() for s in self.spanRange],
            "pageRange": list(self.pageRange),
            "interval": list(self.interval),
            "invalid": self.invalid,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Fragment:
        try:
            return cls(
                id=str(d["id"]),
                persons=[str(p) for p in d["persons"]],
                time=d.get("time"),
                place=d.get("place"),
                eventSummary=str(d.get("eventSummary", "")),
                keywords=[str(k) for k in d.get("keywords", [])],
                spanRange=[TextSpan.from_dict(s) for s in d.get("spanRange", [])],
                pageRange=tuple(d.get("pageRange", (0, 0))),  # type: ignore[arg-type]
                interval=tuple(d.get("interval", (0, 0))),  # type: ignore[arg-type]
                invalid=bool(d.get("invalid", False)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptDocument(f"bad fragment record: {d!r}") from exc


@dataclass
class Annotation:
    """Raw ink plus its resolved meaning."""

    id: str
    pageIndex: int
    gesture: str
    score: float
    strokes: list[list[list[float]]]  # per stroke: [x, y, t] triples
    spans: list[TextSpan] = field(default_factory=list)
    entityId: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "pageIndex": self.pageIndex,
            "gesture": self.gesture,
            "score": self.score,
            "strokes": self.strokes,
            "spans": [s.to_dict() for s in self.spans],
            "entityId": self.entityId,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Annotation:
        try:
            return cls(
                id=str(d["id"]),
                pageIndex=int(d["pageIndex"]),
                gesture=str(d["gesture"]),
                score=float(d.get("score", 0.0)),
                strokes=d.get("strokes", []),
                spans=[TextSpan.from_dict(s) for s in d.get("spans", [])],
                entityId=d.get("entityId"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptDocument(f"bad annotation record: {d!r}") from exc


@dataclass
class ExtractionConfig:
    """Knobs for entity extraction, summarization and keyword weighting."""

    trustThreshold: float = 0.6
    maxIterations: int = 3
    providerKind: str = "rule"  # "rule" | "remoteLM"
    summarySentenceBudget: int = 2
    gazetteerConfidence: float = 0.9
    patternConfidence: float = 0.7
    keywordLevelMultipliers: tuple[float, float, float] = (1.0, 2.0, 4.0)  # body, highlight, entity
    keywordLimit: int = 30

    def validate(self) -> None:
        from ..errors import InvalidConfig

        if not 0.0 <= self.trustThreshold <= 1.0:
            raise InvalidConfig(f"trustThreshold {self.trustThreshold} not in [0,1]")
        if self.maxIterations < 1:
            raise InvalidConfig("maxIterations must be >= 1")
        if self.summarySentenceBudget < 1:
            raise InvalidConfig("summarySentenceBudget must be >= 1")
        if self.providerKind not in ("rule", "remoteLM"):
            raise InvalidConfig(f"unknown providerKind {self.providerKind!r}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "trustThreshold": self.trustThreshold,
            "maxIterations": self.maxIterations,
            "providerKind": self.providerKind,
            "summarySentenceBudget": self.summarySentenceBudget,
            "gazetteerConfidence": self.gazetteerConfidence,
            "patternConfidence": self.patternConfidence,
            "keywordLevelMultipliers": list(self.keywordLevelMultipliers),
            "keywordLimit": self.keywordLimit,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> ExtractionConfig:
        try:
            cfg = cls(
                trustThreshold=float(d.get("trustThreshold", 0.6)),
                maxIterations=int(d.get("maxIterations", 3)),
                providerKind=str(d.get("providerKind", "rule")),
                summarySentenceBudget=int(d.get("summarySentenceBudget", 2)),
                gazetteerConfidence=float(d.get("gazetteerConfidence", 0.9)),
                patternConfidence=float(d.get("patternConfidence", 0.7)),
                keywordLevelMultipliers=tuple(
                    d.get("keywordLevelMultipliers", (1.0, 2.0, 4.0))
                ),  # type: ignore[arg-type]
                keywordLimit=int(d.get("keywordLimit", 30)),
            )
        except (TypeError, ValueError) as exc:
            raise CorruptDocument(f"bad config record: {d!r}") from exc
        return cfg


@dataclass
class OperationRecord:
    """One entry of the append-only per-document operation log.

    payload carries a post-state snapshot of the touched objects so the
    log replays to the final entity/fragment sets on an empty document.
    entityIds lists every entity the operation touched (recency cache).
    """

    timestamp: int
    kind: str  # create | modify | delete | merge | rename | drag
    targetId: str
    payload: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "timestamp": self.timestamp,
            "kind": self.kind,
            "targetId": self.targetId,
            "payload": self.payload,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> OperationRecord:
        try:
            return cls(
                timestamp=int(d["timestamp"]),
                kind=str(d["kind"]),
                targetId=str(d["targetId"]),
                payload=dict(d.get("payload", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptDocument(f"bad op record: {d!r}") from exc


VALID_OP_KINDS = {"create", "modify", "delete", "merge", "rename", "drag"}

SCHEMA_VERSION = 1


@dataclass
class StoryDocument:
    """The persistent session: text, annotations, entities, fragments, log."""

    id: str
    title: str
    pages: list[str] = field(default_factory=list)
    entities: dict[str, Entity] = field(default_factory=dict)
    annotations: list[Annotation] = field(default_factory=list)
    fragments: list[Fragment] = field(default_factory=list)
    config: ExtractionConfig = field(default_factory=ExtractionConfig)
    opLog: list[OperationRecord] = field(default_factory=list)
    committedLayout: dict[str, Any] | None = None
    layoutStale: bool = False
    version: int = 1
    counters: dict[str, int] = field(default_factory=dict)
    extra: dict[str, Any] = field(default_factory=dict)  # unknown keys, preserved

    # -- id / clock allocation ----------------------------------------------

    def next_clock(self) -> int:
        return self.opLog[-1].timestamp + 1 if self.opLog else 0

    def _next_numbered(self, prefix: str, existing: list[str]) -> str:
        # counter never rewinds: deleted ids stay retired so the op log
        # is unambiguous about which object a record refers to
        top = self.counters.get(prefix, 0)
        for eid in existing:
            head, _, tail = eid.rpartition("-")
            if head == prefix and tail.isdigit():
                top = max(top, int(tail))
        self.counters[prefix] = top + 1
        return f"{prefix}-{top + 1:04d}"

    def next_entity_id(self) -> str:
        return self._next_numbered("ent", list(self.entities))

    def next_fragment_id(self) -> str:
        return self._next_numbered("frg", [f.id for f in self.fragments])

    def next_annotation_id(self) -> str:
        return self._next_numbered("ann", [a.id for a in self.annotations])

    # -- lookups --------------------------------------------------------------

    def entity(self, entity_id: str) -> Entity:
        from ..errors import UnknownEntity

        ent = self.entities.get(entity_id)
        if ent is None:
            raise UnknownEntity(f"no entity {entity_id!r}")
        return ent

    def fragment(self, fragment_id: str) -> Fragment:
        from ..errors import UnknownFragment

        for frag in self.fragments:
            if frag.id == fragment_id:
                return frag
        raise UnknownFragment(f"no fragment {fragment_id!r}")

    def find_entity_by_name(self, kind: EntityKind, name: str) -> Entity | None:
        folded = name.casefold()
        for ent in self.entities.values():
            if ent.kind == kind and ent.canonicalName.casefold() == folded:
                return ent
        return None

    def log(self, kind: str, target_id: str, payload: dict[str, Any]) -> OperationRecord:
        rec = OperationRecord(self.next_clock(), kind, target_id, payload)
        self.opLog.append(rec)
        return rec

    # -- invariants -----------------------------------------------------------

    def validate(self) -> None:
        """Raise CorruptDocument on any broken invariant."""
        seen_names: set[tuple[EntityKind, str]] = set()
        for eid, ent in self.entities.items():
            if eid != ent.id:
                raise CorruptDocument(f"entity key {eid} != id {ent.id}")
            ent.validate()
            name_key = (ent.kind, ent.canonicalName.casefold())
            if name_key in seen_names:
                raise CorruptDocument(f"duplicate canonical name {ent.canonicalName!r}")
            seen_names.add(name_key)

        seen_frag_ids: set[str] = set()
        for frag in self.fragments:
            if frag.id in seen_frag_ids:
                raise CorruptDocument(f"duplicate fragment id {frag.id}")
            seen_frag_ids.add(frag.id)
            frag.validate()
            for pid in frag.persons:
                ent = self.entities.get(pid)
                if ent is None:
                    raise CorruptDocument(f"fragment {frag.id} references missing {pid}")
                if ent.kind != EntityKind.PERSON:
                    raise CorruptDocument(f"fragment {frag.id} person {pid} is {ent.kind}")
            for ref, kind in ((frag.time, EntityKind.TIME), (frag.place, EntityKind.PLACE)):
                if ref is None:
                    continue
                ent = self.entities.get(ref)
                if ent is None:
                    raise CorruptDocument(f"fragment {frag.id} references missing {ref}")
                if ent.kind != kind:
                    raise CorruptDocument(f"fragment {frag.id} {kind.value} {ref} is {ent.kind}")
            for span in frag.spanRange:
                span.validate(self.pages)

        for ann in self.annotations:
            if ann.entityId is not None and ann.entityId not in self.entities:
                raise CorruptDocument(f"annotation {ann.id} references missing {ann.entityId}")
            for span in ann.spans:
                span.validate(self.pages)

        prev = -1
        for rec in self.opLog:
            if rec.kind not in VALID_OP_KINDS:
                raise CorruptDocument(f"unknown op kind {rec.kind!r}")
            if rec.timestamp < prev:
                raise CorruptDocument("opLog timestamps decrease")
            prev = rec.timestamp

        from ..errors import InvalidConfig

        try:
            self.config.validate()
        except InvalidConfig as exc:
            raise CorruptDocument(str(exc)) from exc
