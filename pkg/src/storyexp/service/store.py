"""Document persistence and preview-token bookkeeping for the service.

One directory per document under the data root; writes go through the
atomic temp+rename path so a crash mid-commit never leaves a torn file.
Mutations are serialized per document with a lock and bump the version.
"""

from __future__ import annotations

import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from ..errors import UnknownDocument
from ..model.document import new_document
from ..model.store import load_document, save_document
from ..model.types import StoryDocument

PAGE_CHAR_BUDGET = 1200
PREVIEW_TTL_SECONDS = 600.0
DOCUMENT_FILENAME = "document.json"


def paginate(text: str, budget: int = PAGE_CHAR_BUDGET) -> list[str]:
    """Split text into pages of at most `budget` chars, snapped to word
    boundaries; pages concatenate back to the original text exactly."""
    if budget < 1:
        raise ValueError("page budget must be positive")
    pages: list[str] = []
    pos = 0
    n = len(text)
    while pos < n:
        if n - pos <= budget:
            pages.append(text[pos:])
            break
        cut = pos + budget
        window = text[pos:cut]
        last_break = max(window.rfind(" "), window.rfind("\n"))
        if last_break > 0:
            cut = pos + last_break + 1  # break char stays on this page
        pages.append(text[pos:cut])
        pos = cut
    return pages


@dataclass
class PreviewToken:
    token: str
    docId: str
    baseDocVersion: int
    edits: list[dict[str, Any]]
    layout: dict[str, Any]
    expiresAt: float

    def expired(self, now: float | None = None) -> bool:
        return (now if now is not None else time.time()) > self.expiresAt


@dataclass
class DocumentStore:
    root: Path = field(
        default_factory=lambda: Path(
            os.environ.get("STORYEXP_DATA", "./storyexp-data")
        )
    )

    def __post_init__(self) -> None:
        self.root = Path(self.root)
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self._previews: dict[str, PreviewToken] = {}

    # -- paths / locks ------------------------------------------------------

    def document_path(self, doc_id: str) -> Path:
        return self.root / doc_id / DOCUMENT_FILENAME

    def scene_cache_path(self, doc_id: str, version: int) -> Path:
        return self.root / doc_id / f"storyline-v{version}.svg"

    def lock(self, doc_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(doc_id, threading.Lock())

    # -- document lifecycle --------------------------------------------------

    def create(self, text: str, title: str = "") -> StoryDocument:
        doc = new_document(paginate(text), title=title)
        if self.document_path(doc.id).exists():
            # same text, same id: re-upload returns the existing session
            return self.load(doc.id)
        save_document(doc, self.document_path(doc.id))
        return doc

    def load(self, doc_id: str) -> StoryDocument:
        path = self.document_path(doc_id)
        if not path.exists():
            raise UnknownDocument(doc_id)
        return load_document(path)

    def save(self, doc: StoryDocument) -> None:
        save_document(doc, self.document_path(doc.id))

    def exists(self, doc_id: str) -> bool:
        return self.document_path(doc_id).exists()

    def list_ids(self) -> list[str]:
        if not self.root.exists():
            return []
        return sorted(
            p.parent.name for p in self.root.glob(f"*/{DOCUMENT_FILENAME}")
        )

    def mutate(self, doc_id: str, fn: Callable[[StoryDocument], Any]) -> tuple[StoryDocument, Any]:
        """Run fn on the loaded document, bump the version, persist."""
        with self.lock(doc_id):
            doc = self.load(doc_id)
            result = fn(doc)
            doc.version += 1
            self.save(doc)
            self._drop_scene_caches(doc.id, keep_version=doc.version)
        return doc, result

    def _drop_scene_caches(self, doc_id: str, keep_version: int) -> None:
        keep = self.scene_cache_path(doc_id, keep_version).name
        for stale in (self.root / doc_id).glob("storyline-v*.svg"):
            if stale.name != keep:
                stale.unlink(missing_ok=True)

    # -- preview tokens -------------------------------------------------------

    def issue_preview(self, doc_id: str, base_version: int,
                      edits: list[dict[str, Any]],
                      layout: dict[str, Any]) -> PreviewToken:
        token = PreviewToken(
            token=uuid.uuid4().hex,
            docId=doc_id,
            baseDocVersion=base_version,
            edits=edits,
            layout=layout,
            expiresAt=time.time() + PREVIEW_TTL_SECONDS,
        )
        with self._registry_lock:
            self._previews[token.token] = token
        return token

    def take_preview(self, token: str) -> PreviewToken | None:
        """Pop the token; a commit consumes it whether or not it succeeds."""
        with self._registry_lock:
            found = self._previews.pop(token, None)
        if found is None or found.expired():
            return None
        return found
