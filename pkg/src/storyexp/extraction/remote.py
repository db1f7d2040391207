"""Wire client for an external language-model extraction service.

One retry, then ProviderUnavailable. There is no silent fallback to the
rule provider: a test or session that asks for the remote provider gets
remote results or an error, never quietly different data.
"""

from __future__ import annotations

import os
import threading

import httpx
import jsonschema

from ..errors import ProviderUnavailable
from ..model.types import EntityKind, ExtractionConfig, TextSpan
from .types import RESPONSE_SCHEMA, CandidateEntity, PromptPlan

REQUEST_TIMEOUT_S = 20.0
MAX_IN_FLIGHT = 2
ATTEMPTS = 2


class RemoteLMClient:
    kind = "remoteLM"

    def __init__(self, endpoint: str | None = None, token: str | None = None,
                 timeout: float = REQUEST_TIMEOUT_S,
                 transport: httpx.BaseTransport | None = None):
        self.endpoint = endpoint or os.environ.get("LM_ENDPOINT")
        self.token = token or os.environ.get("LM_TOKEN")
        self._timeout = timeout
        self._transport = transport
        self._client: httpx.Client | None = None
        self._semaphore = threading.Semaphore(MAX_IN_FLIGHT)
        self._lock = threading.Lock()

    def _http(self) -> httpx.Client:
        with self._lock:
            if self._client is None:
                self._client = httpx.Client(
                    timeout=self._timeout, transport=self._transport
                )
            return self._client

    def close(self) -> None:
        with self._lock:
            if self._client is not None:
                self._client.close()
                self._client = None

    def _post(self, payload: dict) -> dict:
        if not self.endpoint:
            raise ProviderUnavailable("LM_ENDPOINT is not configured")
        headers = {}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        last_error: Exception | None = None
        for _ in range(ATTEMPTS):
            try:
                response = self._http().post(
                    self.endpoint, json=payload, headers=headers
                )
                response.raise_for_status()
                data = response.json()
                jsonschema.validate(data, RESPONSE_SCHEMA)
                return data
            except (httpx.HTTPError, ValueError,
                    jsonschema.ValidationError) as exc:
                last_error = exc
        raise ProviderUnavailable(
            f"language-model service failed after {ATTEMPTS} attempts: {last_error}"
        ) from last_error

    def _to_candidates(self, data: dict, text: str) -> list[CandidateEntity]:
        out: list[CandidateEntity] = []
        for item in data["entities"]:
            surface = item["surface"]
            index = text.casefold().find(surface.casefold())
            span = TextSpan(0, index, index + len(surface)) if index >= 0 else None
            out.append(CandidateEntity(
                surface=surface,
                kind=EntityKind(item["kind"]),
                confidence=float(item["confidence"]),
                sourceSpan=span,
            ))
        out.sort(key=lambda c: (c.sourceSpan.start if c.sourceSpan else -1, c.surface))
        return out

    def extract(self, text: str, plan: PromptPlan) -> list[CandidateEntity]:
        with self._semaphore:
            data = self._post(plan.to_payload(text))
        return self._to_candidates(data, text)

    def refine_round(self, previous: list[CandidateEntity], marked: list[dict],
                     config: ExtractionConfig) -> list[CandidateEntity]:
        known = list(marked) + [
            {"kind": c.kind.value, "name": c.surface, "aliases": []}
            for c in previous
        ]
        payload = {
            "role": "refinement",
            "rules": ["Refine the candidate list toward a stable output."],
            "knownEntities": known,
            "trustThreshold": config.trustThreshold,
            "text": "",
            "schema": RESPONSE_SCHEMA,
        }
        with self._semaphore:
            data = self._post(payload)
        candidates = self._to_candidates(data, "")
        for cand in candidates:
            for entry in marked:
                if cand.surface.casefold() == entry["name"].casefold():
                    cand.confidence = 1.0
        return [c for c in candidates if c.confidence >= config.trustThreshold]

    def summarize(self, text: str, highlights: list[TextSpan],
                  config: ExtractionConfig, plan: PromptPlan) -> str:
        payload = plan.to_payload(text)
        payload["rules"] = list(payload["rules"]) + [
            f"Also produce a summary of at most "
            f"{config.summarySentenceBudget} sentences."
        ]
        with self._semaphore:
            data = self._post(payload)
        summary = data.get("summary")
        if not summary:
            raise ProviderUnavailable("service returned no summary")
        return summary
