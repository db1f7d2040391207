"""Provider-facing extraction operations."""

from __future__ import annotations

import re

from ..errors import EmptyText
from ..model.types import Entity, ExtractionConfig, TextSpan
from .rule import STOP_WORDS, split_sentences, strip_article
from .types import RESPONSE_SCHEMA, CandidateEntity, PromptPlan, WeightedTerm

ROLE_PREAMBLE = (
    "You are a meticulous narrative analyst. You read a passage and "
    "extract its story elements as structured data."
)
KNOWLEDGE_BALANCE_CLAUSE = (
    "Few trusted entities are provided: lean on your own knowledge of "
    "narrative conventions to identify likely persons, times, and places."
)
KNOWN_FIRST_CLAUSE = (
    "A trusted entity list is provided: prefer it, reuse its exact "
    "canonical names, and add only clearly supported new entities."
)
# below this many trusted entities the prompt asks the model to fall back
# on its own knowledge
KNOWLEDGE_BALANCE_MIN = 3


def _known_entries(known_entities) -> tuple[dict, ...]:
    entries = []
    for item in known_entities:
        if isinstance(item, Entity):
            entries.append({
                "kind": item.kind.value,
                "name": item.canonicalName,
                "aliases": sorted(item.aliases),
            })
        else:
            entries.append({
                "kind": str(item["kind"]),
                "name": str(item["name"]),
                "aliases": sorted(item.get("aliases", [])),
            })
    entries.sort(key=lambda e: (e["kind"], e["name"]))
    return tuple(entries)


def build_prompt(text: str, known_entities, config: ExtractionConfig) -> PromptPlan:
    """Rule chain for one extraction request; byte-stable for equal inputs."""
    known = _known_entries(known_entities)
    rules = [
        "Step 1: list every person mentioned in the passage.",
        "Step 2: list every time expression anchoring events.",
        "Step 3: list every place where action occurs.",
        "Step 4: resolve aliases so each referent has one canonical surface.",
    ]
    if len(known) < KNOWLEDGE_BALANCE_MIN:
        rules.append(KNOWLEDGE_BALANCE_CLAUSE)
    else:
        rules.append(KNOWN_FIRST_CLAUSE)
    rules.append(
        "Step 5: emit only a JSON object matching the output schema, "
        "with a confidence in [0, 1] per entity."
    )
    return PromptPlan(
        rolePreamble=ROLE_PREAMBLE,
        chainRules=tuple(rules),
        knownEntities=known,
        trustThreshold=config.trustThreshold,
        outputSchema=RESPONSE_SCHEMA,
    )


def extract_entities(text: str, config: ExtractionConfig, provider,
                     known_entities=()) -> list[CandidateEntity]:
    """Candidates at or above the trust threshold, in text order."""
    if not text:
        raise EmptyText("cannot extract from empty text")
    plan = build_prompt(text, known_entities, config)
    candidates = provider.extract(text, plan)
    kept = [c for c in candidates if c.confidence >= config.trustThreshold]
    kept.sort(key=lambda c: (c.sourceSpan.start if c.sourceSpan else -1, c.surface))
    return kept


def refine_entities(previous: list[CandidateEntity], user_marked: list[Entity],
                    config: ExtractionConfig, provider) -> list[CandidateEntity]:
    """Iterate provider refinement until stable or the round budget ends."""
    config.validate()
    marked = [dict(e) for e in _known_entries(user_marked)]
    current = list(previous)
    previous_key = None
    for _ in range(config.maxIterations):
        current = provider.refine_round(current, marked, config)
        round_key = tuple(
            (c.kind.value, strip_article(c.surface), round(c.confidence, 9))
            for c in current
        )
        if round_key == previous_key:
            break
        previous_key = round_key
    return current


def summarize(fragment_text: str, highlights: list[TextSpan],
              config: ExtractionConfig, provider, known_entities=()) -> str:
    """At most the configured number of sentences, in document order."""
    if not fragment_text:
        raise EmptyText("cannot summarize empty text")
    plan = build_prompt(fragment_text, known_entities, config)
    return provider.summarize(fragment_text, highlights, config, plan)


_WORD_RE = re.compile(r"[A-Za-z][A-Za-z'-]*")


def keyword_weights(fragment_text: str, highlights: list[TextSpan],
                    entities, config: ExtractionConfig | None = None,
                    ) -> list[WeightedTerm]:
    """Weighted terms for the word cloud.

    Each occurrence contributes the multiplier of the strongest level it
    sits in (entity mention > highlight > body), never a product of
    levels. When more terms exist than the limit, the kept set is chosen
    by raw frequency so changing the multipliers never changes WHICH
    terms appear, only their weights and order.
    """
    if not fragment_text:
        raise EmptyText("cannot weigh keywords of empty text")
    config = config or ExtractionConfig()
    body_mult, highlight_mult, entity_mult = config.keywordLevelMultipliers

    entity_ranges: list[tuple[int, int]] = []
    for ent in entities:
        names = (
            [ent.canonicalName, *ent.aliases]
            if isinstance(ent, Entity)
            else [str(ent)]
        )
        for name in names:
            if not name:
                continue
            pattern = re.compile(r"(?<!\w)" + re.escape(name) + r"(?!\w)", re.IGNORECASE)
            entity_ranges.extend(m.span() for m in pattern.finditer(fragment_text))
    highlight_ranges = [(h.start, h.end) for h in highlights]

    def occurrence_multiplier(start: int, end: int) -> float:
        if any(s <= start and end <= e for s, e in entity_ranges):
            return entity_mult
        if any(s < end and start < e for s, e in highlight_ranges):
            return highlight_mult
        return body_mult

    weights: dict[str, float] = {}
    counts: dict[str, int] = {}
    for m in _WORD_RE.finditer(fragment_text):
        term = m.group(0).casefold()
        if term in STOP_WORDS or len(term) < 2:
            continue
        weights[term] = weights.get(term, 0.0) + occurrence_multiplier(*m.span())
        counts[term] = counts.get(term, 0) + 1

    terms = sorted(weights)
    if len(terms) > config.keywordLimit:
        terms = sorted(terms, key=lambda t: (-counts[t], t))[: config.keywordLimit]
    out = [WeightedTerm(term=t, weight=weights[t]) for t in terms]
    out.sort(key=lambda w: (-w.weight, w.term))
    return out
