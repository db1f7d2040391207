"""Value types shared by the extraction providers."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from ..model.types import EntityKind, TextSpan

# response contract both providers must satisfy
RESPONSE_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["entities"],
    "properties": {
        "entities": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["surface", "kind", "confidence"],
                "properties": {
                    "surface": {"type": "string", "minLength": 1},
                    "kind": {"enum": ["person", "time", "place", "event"]},
                    "confidence": {"type": "number", "minimum": 0, "maximum": 1},
                },
            },
        },
        "summary": {"type": "string"},
    },
}


@dataclass
class CandidateEntity:
    """A proposed entity mention, not yet accepted into the document."""

    surface: str
    kind: EntityKind
    confidence: float
    sourceSpan: TextSpan | None = None

    def key(self) -> tuple[str, str]:
        return (self.kind.value, self.surface.casefold())

    def to_dict(self) -> dict[str, Any]:
        return {
            "surface": self.surface,
            "kind": self.kind.value,
            "confidence": self.confidence,
            "sourceSpan": self.sourceSpan.to_dict() if self.sourceSpan else None,
        }


@dataclass
class PromptPlan:
    """Deterministic provider request: role, rule chain, trusted context."""

    rolePreamble: str
    chainRules: tuple[str, ...]
    knownEntities: tuple[dict[str, Any], ...]
    trustThreshold: float
    outputSchema: dict[str, Any] = field(default_factory=lambda: RESPONSE_SCHEMA)

    def to_payload(self, text: str) -> dict[str, Any]:
        return {
            "role": self.rolePreamble,
            "rules": list(self.chainRules),
            "knownEntities": [dict(e) for e in self.knownEntities],
            "trustThreshold": self.trustThreshold,
            "text": text,
            "schema": self.outputSchema,
        }

    def to_json(self) -> str:
        data = {
            "role": self.rolePreamble,
            "rules": list(self.chainRules),
            "knownEntities": [dict(e) for e in self.knownEntities],
            "trustThreshold": self.trustThreshold,
            "schema": self.outputSchema,
        }
        return json.dumps(data, sort_keys=True, separators=(",", ":"))


@dataclass
class WeightedTerm:
    term: str
    weight: float
