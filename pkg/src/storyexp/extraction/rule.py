"""Deterministic rule-based extraction provider.

Persons come from honorific patterns and capitalized token runs that are
not merely sentence-initial; places from a gazetteer plus at/in/to cues;
times from a small regex lexicon. Event phrases are left to the user's
strokes on purpose: automatic event detection guesses too much.
"""

from __future__ import annotations

import re
from importlib import resources
from pathlib import Path

from ..errors import EmptyText
from ..model.types import EntityKind, ExtractionConfig, TextSpan
from .types import CandidateEntity, PromptPlan

STOP_WORDS = frozenset(
    """
    a an and are as at be been being but by can could did do does down for
    from had has have he her here his i if in into is it its my no not of
    on or our out over said says she so that the their them then there
    these they this those to under up upon very was we were what when
    where which who will with would you your
    """.split()
)

_HONORIFICS = (
    "Professor", "Mr.", "Mrs.", "Ms.", "Dr.", "Miss", "Sir", "Lady",
    "Madam", "Captain", "Aunt", "Uncle", "King", "Queen", "Prince",
    "Princess",
)
_HONORIFIC_RE = re.compile(
    r"\b(?:" + "|".join(re.escape(h) for h in _HONORIFICS) + r")"
    r"(?:\s+[A-Z][\w'-]*)+"
)
_CAP_RUN_RE = re.compile(r"\b[A-Z][\w'-]*(?:\s+[A-Z][\w'-]*)*")
_PLACE_CUE_RE = re.compile(
    r"\b(?:at|in|to)\s+(?:the\s+)?([A-Z][\w'-]*(?:\s+[A-Z][\w'-]*)*)"
)
_TIME_RE = re.compile(
    r"\b(?:"
    r"Monday|Tuesday|Wednesday|Thursday|Friday|Saturday|Sunday"
    r"|January|February|March|April|May|June|July|August|September"
    r"|October|November|December"
    r"|morning|noon|afternoon|evening|night|midnight|dawn|dusk"
    r"|sunset|sunrise|today|tomorrow|yesterday"
    r"|spring|summer|autumn|winter"
    r"|\d{1,2}\s+o'clock"
    r"|1[0-9]{3}|20\d{2}"
    r")\b",
    re.IGNORECASE,
)
_SENTENCE_START_RE = re.compile(r"(?:^|[.!?]\s+|\n\s*)([\"'(]?\w)")

# specificity ranks competing reads of the same surface at equal confidence
_SPECIFICITY = {"known": 4, "gazetteer": 3, "cue": 2, "time": 2, "honorific": 2, "run": 1}


def strip_article(surface: str) -> str:
    lowered = surface.casefold()
    for article in ("the ", "a ", "an "):
        if lowered.startswith(article):
            return lowered[len(article):]
    return lowered


def load_gazetteer(path: str | Path | None = None) -> dict[str, EntityKind]:
    """Map casefolded surface to kind from a kind<TAB>surface file."""
    if path is None:
        text = resources.files("storyexp.data").joinpath("gazetteer.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    table: dict[str, EntityKind] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        kind_str, _, surface = line.partition("\t")
        if not surface:
            continue
        table[surface.casefold()] = EntityKind(kind_str.strip())
    return table


def _sentence_starts(text: str) -> set[int]:
    return {m.start(1) for m in _SENTENCE_START_RE.finditer(text)}


def _find_occurrences(text: str, surface: str) -> list[tuple[int, int]]:
    pattern = re.compile(r"\b" + re.escape(surface) + r"\b", re.IGNORECASE)
    return [(m.start(), m.end()) for m in pattern.finditer(text)]


class RuleProvider:
    """Offline provider; identical inputs give identical outputs."""

    kind = "rule"

    def __init__(self, config: ExtractionConfig | None = None,
                 gazetteer_path: str | Path | None = None):
        self.config = config or ExtractionConfig()
        self.gazetteer = load_gazetteer(gazetteer_path)

    def extract(self, text: str, plan: PromptPlan) -> list[CandidateEntity]:
        if not text:
            raise EmptyText("cannot extract from empty text")
        found: dict[str, CandidateEntity] = {}
        rank: dict[str, tuple[float, int]] = {}

        def offer(surface: str, kind: EntityKind, confidence: float,
                  span: tuple[int, int], source: str) -> None:
            key = surface.casefold()
            score = (confidence, _SPECIFICITY[source])
            if key in rank:
                old = rank[key]
                if score < old:
                    return
                if score == old and span[0] >= found[key].sourceSpan.start:
                    return
            rank[key] = score
            found[key] = CandidateEntity(
                surface=surface,
                kind=kind,
                confidence=confidence,
                sourceSpan=TextSpan(0, span[0], span[1]),
            )

        for entry in plan.knownEntities:
            kind = EntityKind(entry["kind"])
            for name in [entry["name"], *entry.get("aliases", [])]:
                for span in _find_occurrences(text, name):
                    offer(entry["name"], kind, 1.0, span, "known")

        for surface_cf, kind in sorted(self.gazetteer.items()):
            for span in _find_occurrences(text, surface_cf):
                offer(text[span[0]:span[1]], kind, self.config.gazetteerConfidence,
                      span, "gazetteer")

        for m in _PLACE_CUE_RE.finditer(text):
            offer(m.group(1), EntityKind.PLACE, self.config.patternConfidence,
                  m.span(1), "cue")

        for m in _TIME_RE.finditer(text):
            offer(m.group(0), EntityKind.TIME, self.config.patternConfidence,
                  m.span(), "time")

        for m in _HONORIFIC_RE.finditer(text):
            offer(m.group(0), EntityKind.PERSON, self.config.patternConfidence,
                  m.span(), "honorific")

        starts = _sentence_starts(text)
        runs: dict[str, list[tuple[int, int]]] = {}
        for m in _CAP_RUN_RE.finditer(text):
            runs.setdefault(m.group(0), []).append(m.span())
        for surface, spans in sorted(runs.items()):
            tokens = surface.split()
            if len(tokens) == 1:
                if surface.casefold() in STOP_WORDS:
                    continue
                if all(s[0] in starts for s in spans):
                    continue
            offer(surface, EntityKind.PERSON, self.config.patternConfidence,
                  spans[0], "run")

        candidates = list(found.values())
        # drop mentions fully inside a same-kind longer mention
        kept: list[CandidateEntity] = []
        for cand in candidates:
            contained = any(
                other is not cand
                and other.kind == cand.kind
                and other.sourceSpan.start <= cand.sourceSpan.start
                and cand.sourceSpan.end <= other.sourceSpan.end
                and (other.sourceSpan.end - other.sourceSpan.start)
                > (cand.sourceSpan.end - cand.sourceSpan.start)
                for other in candidates
            )
            if not contained:
                kept.append(cand)
        kept.sort(key=lambda c: (c.sourceSpan.start, c.surface))
        return kept

    def refine_round(self, previous: list[CandidateEntity], marked: list[dict],
                     config: ExtractionConfig) -> list[CandidateEntity]:
        """One alias-unification pass; a contraction toward a fixed point."""
        marked_index: dict[str, dict] = {}
        for entry in marked:
            names = [entry["name"], *entry.get("aliases", [])]
            for name in names:
                marked_index[strip_article(name)] = entry

        merged: dict[tuple[str, str], CandidateEntity] = {}

        def put(cand: CandidateEntity) -> None:
            key = (cand.kind.value, strip_article(cand.surface))
            old = merged.get(key)
            if old is None:
                merged[key] = cand
                return
            better = cand.confidence > old.confidence or (
                cand.confidence == old.confidence
                and old.sourceSpan is not None
                and cand.sourceSpan is not None
                and cand.sourceSpan.start < old.sourceSpan.start
            )
            if better:
                if cand.sourceSpan is None:
                    cand.sourceSpan = old.sourceSpan
                merged[key] = cand
            elif old.sourceSpan is None:
                old.sourceSpan = cand.sourceSpan

        for cand in previous:
            entry = marked_index.get(strip_article(cand.surface))
            if entry is not None:
                put(CandidateEntity(
                    surface=entry["name"],
                    kind=EntityKind(entry["kind"]),
                    confidence=1.0,
                    sourceSpan=cand.sourceSpan,
                ))
            else:
                put(cand)

        present = {strip_article(c.surface) for c in merged.values()}
        for entry in marked:
            if strip_article(entry["name"]) not in present:
                put(CandidateEntity(
                    surface=entry["name"],
                    kind=EntityKind(entry["kind"]),
                    confidence=1.0,
                    sourceSpan=None,
                ))

        out = [c for c in merged.values() if c.confidence >= config.trustThreshold]
        out.sort(key=lambda c: (
            c.sourceSpan.start if c.sourceSpan else -1, c.surface))
        return out

    def summarize(self, text: str, highlights: list[TextSpan],
                  config: ExtractionConfig, plan: PromptPlan) -> str:
        if not text:
            raise EmptyText("cannot summarize empty text")
        sentences = split_sentences(text)
        entities = self.extract(text, plan)
        scored: list[tuple[float, int, str]] = []
        for idx, (start, end, sentence) in enumerate(sentences):
            mentions = 0
            for cand in entities:
                mentions += len(_find_occurrences(sentence, cand.surface))
            overlaps = sum(
                1 for h in highlights if h.start < end and start < h.end
            )
            score = 3.0 * mentions + 2.0 * overlaps + 1.0 / (1.0 + idx)
            scored.append((score, idx, sentence))
        top = sorted(scored, key=lambda s: (-s[0], s[1]))[: config.summarySentenceBudget]
        top.sort(key=lambda s: s[1])
        return " ".join(s[2].strip() for s in top)


_SENTENCE_SPLIT_RE = re.compile(r"(?<=[.!?])\s+")


def split_sentences(text: str) -> list[tuple[int, int, str]]:
    """(start, end, text) per sentence, offsets into the input."""
    out: list[tuple[int, int, str]] = []
    pos = 0
    for m in _SENTENCE_SPLIT_RE.finditer(text):
        chunk = text[pos:m.start()]
        if chunk.strip():
            out.append((pos, m.start(), chunk))
        pos = m.end()
    tail = text[pos:]
    if tail.strip():
        out.append((pos, len(text), tail))
    return out
