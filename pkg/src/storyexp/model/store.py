"""Document persistence: stable JSON on disk, atomic replace on save.

Serialization is key-sorted with a fixed separator style so that equal
documents produce byte-identical files. Unknown top-level keys survive a
load/save round trip, which lets newer writers add fields without older
readers destroying them.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any

from ..errors import CorruptDocument, IoError
from .types import (
    SCHEMA_VERSION,
    Annotation,
    Entity,
    ExtractionConfig,
    Fragment,
    OperationRecord,
    StoryDocument,
)

_KNOWN_KEYS = {
    "schemaVersion",
    "id",
    "title",
    "pages",
    "entities",
    "annotations",
    "fragments",
    "config",
    "opLog",
    "committedLayout",
    "layoutStale",
    "version",
    "counters",
}


def document_to_dict(doc: StoryDocument) -> dict[str, Any]:
    out: dict[str, Any] = {
        "schemaVersion": SCHEMA_VERSION,
        "id": doc.id,
        "title": doc.title,
        "pages": list(doc.pages),
        "entities": [doc.entities[eid].to_dict() for eid in sorted(doc.entities)],
        "annotations": [a.to_dict() for a in doc.annotations],
        "fragments": [f.to_dict() for f in doc.fragments],
        "config": doc.config.to_dict(),
        "opLog": [r.to_dict() for r in doc.opLog],
        "committedLayout": doc.committedLayout,
        "layoutStale": doc.layoutStale,
        "version": doc.version,
        "counters": dict(doc.counters),
    }
    for key, value in doc.extra.items():
        if key not in _KNOWN_KEYS:
            out[key] = value
    return out


def document_from_dict(data: dict[str, Any]) -> StoryDocument:
    if not isinstance(data, dict):
        raise CorruptDocument("document root must be an object")
    schema = data.get("schemaVersion")
    if schema != SCHEMA_VERSION:
        raise CorruptDocument(f"unsupported schemaVersion {schema!r}")
    try:
        entities = {}
        for raw in data.get("entities", []):
            ent = Entity.from_dict(raw)
            entities[ent.id] = ent
        doc = StoryDocument(
            id=str(data["id"]),
            title=str(data.get("title", "")),
            pages=[str(p) for p in data.get("pages", [])],
            entities=entities,
            annotations=[Annotation.from_dict(a) for a in data.get("annotations", [])],
            fragments=[Fragment.from_dict(f) for f in data.get("fragments", [])],
            config=ExtractionConfig.from_dict(data.get("config", {})),
            opLog=[OperationRecord.from_dict(r) for r in data.get("opLog", [])],
            committedLayout=data.get("committedLayout"),
            layoutStale=bool(data.get("layoutStale", False)),
            version=int(data.get("version", 1)),
            counters={str(k): int(v) for k, v in data.get("counters", {}).items()},
            extra={k: v for k, v in data.items() if k not in _KNOWN_KEYS},
        )
    except KeyError as exc:
        raise CorruptDocument(f"missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise CorruptDocument(str(exc)) from exc
    doc.validate()
    return doc


def dumps_document(doc: StoryDocument) -> str:
    return json.dumps(document_to_dict(doc), sort_keys=True, separators=(",", ": "), indent=1)


def save_document(doc: StoryDocument, path: str | Path) -> None:
    """Write atomically: temp file in the target directory, then rename.

    A crash mid-save leaves either the old file or the new one, never a
    torn mix.
    """
    path = Path(path)
    text = dumps_document(doc)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(
            prefix=path.name + ".", suffix=".tmp", dir=path.parent
        )
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(text)
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(tmp_name, path)
        except BaseException:
            try:
                os.unlink(tmp_name)
            except OSError:
                pass
            raise
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def load_document(path: str | Path) -> StoryDocument:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptDocument(f"{path}: invalid JSON: {exc}") from exc
    return document_from_dict(data)
