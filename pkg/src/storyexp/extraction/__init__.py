"""Entity extraction, summarization, and keyword weighting."""

from .ops import (
    KNOWLEDGE_BALANCE_CLAUSE,
    build_prompt,
    extract_entities,
    keyword_weights,
    refine_entities,
    summarize,
)
from .remote import RemoteLMClient
from .rule import STOP_WORDS, RuleProvider, load_gazetteer, split_sentences
from .types import RESPONSE_SCHEMA, CandidateEntity, PromptPlan, WeightedTerm

__all__ = [
    "CandidateEntity",
    "KNOWLEDGE_BALANCE_CLAUSE",
    "PromptPlan",
    "RESPONSE_SCHEMA",
    "RemoteLMClient",
    "RuleProvider",
    "STOP_WORDS",
    "WeightedTerm",
    "build_prompt",
    "extract_entities",
    "keyword_weights",
    "load_gazetteer",
    "refine_entities",
    "split_sentences",
    "summarize",
]


def make_provider(kind: str, config=None, gazetteer_path=None):
    """Provider factory for the configured providerKind."""
    if kind == "rule":
        return RuleProvider(config=config, gazetteer_path=gazetteer_path)
    if kind == "remoteLM":
        return RemoteLMClient()
    raise ValueError(f"unknown provider kind {kind!r}")
