"""Query processing and ranked retrieval over index snapshots.

Scoring is cosine similarity between the query's TF-IDF vector and each
document's vector; channels can be queried separately or fused by a convex
combination of their per-channel scores. Non-English queries are routed
through a pluggable translator before retrieval.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from math import sqrt
from typing import Protocol

from .index import ChannelIndex, IndexSnapshot, compute_idf, tf_weight
from .textprep import PrepConfig, preprocess

CHANNEL_MODES = ("ocr", "transcript", "fused")


class EmptyQueryError(ValueError):
    """Query text has no tokens left after preprocessing."""


class TranslationError(RuntimeError):
    """Translator call failed; the query was left untouched and may be retried."""


@dataclass(frozen=True)
class Query:
    text: str
    language: str | None = None
    channel_mode: str = "fused"
    fusion_alpha: float = 0.5
    top_k: int = 10

    def __post_init__(self) -> None:
        if self.channel_mode not in CHANNEL_MODES:
            raise ValueError(
                f"channel_mode {self.channel_mode!r} not one of {CHANNEL_MODES}"
            )
        if not 0.0 <= self.fusion_alpha <= 1.0:
            raise ValueError(f"fusion_alpha {self.fusion_alpha!r} outside [0, 1]")
        if self.top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {self.top_k}")


@dataclass(frozen=True)
class RankedResult:
    """Ordered ``(video_id, score)`` pairs: scores non-increasing, ids unique."""

    entries: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple((v, float(s)) for v, s in self.entries))
        seen: set[str] = set()
        prev = None
        for video_id, score in self.entries:
            if video_id in seen:
                raise ValueError(f"duplicate video_id {video_id!r} in ranking")
            seen.add(video_id)
            if score < 0:
                raise ValueError(f"negative score {score!r} for {video_id!r}")
            if prev is not None and score > prev:
                raise ValueError("scores must be non-increasing")
            prev = score

    def video_ids(self) -> list[str]:
        return [video_id for video_id, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


class Translator(Protocol):
    def translate(self, text: str, source_language: str | None = None) -> str: ...


class IdentityTranslator:
    """Pass-through translator; keeps the pipeline exercisable offline."""

    def translate(self, text: str, source_language: str | None = None) -> str:
        return text


class StaticTranslator:
    """Exact-match dictionary translator, deterministic for fixed input.

    Unmapped queries pass through unchanged.
    """

    def __init__(self, mapping: dict[str, str]):
        self.mapping = dict(mapping)

    def translate(self, text: str, source_language: str | None = None) -> str:
        return self.mapping.get(text, text)


def needs_translation(query: Query) -> bool:
    """True for a non-English language tag, or untagged text that is mostly
    non-ASCII alphabetic (ratio strictly above 0.5)."""
    if query.language:
        return not query.language.casefold().startswith("en")
    alphabetic = [ch for ch in query.text if ch.isalpha()]
    if not alphabetic:
        return False
    non_ascii = sum(1 for ch in alphabetic if ord(ch) > 127)
    return non_ascii / len(alphabetic) > 0.5


def maybe_translate(query: Query, translator: Translator) -> Query:
    """Replace query text with its English translation when needed.

    Translator failures surface as :class:`TranslationError`; the query is
    never silently mangled.
    """
    if not needs_translation(query):
        return query
    try:
        translated = translator.translate(query.text, query.language)
    except Exception as exc:
        raise TranslationError(f"translation failed for {query.text!r}: {exc}") from exc
    return replace(query, text=translated)


def score_channel(index: ChannelIndex, query_tokens: list[str]) -> dict[str, float]:
    """Cosine scores per video id; videos with zero overlap are omitted.

    Query terms missing from the vocabulary contribute nothing to the query
    vector (and to its norm).
    """
    if not query_tokens:
        raise ValueError("query token list is empty")
    counts = Counter(query_tokens)
    query_weights: dict[str, float] = {}
    for term, count in counts.items():
        stats = index.vocabulary.get(term)
        if stats is not None:
            query_weights[term] = tf_weight(count) * compute_idf(stats.df, index.n_docs)
    if not query_weights:
        return {}
    query_norm = sqrt(sum(w * w for w in query_weights.values()))
    dots: dict[int, float] = {}
    for term, q_weight in query_weights.items():
        stats = index.vocabulary[term]
        idf = compute_idf(stats.df, index.n_docs)
        for posting in stats.postings:
            doc_weight = tf_weight(posting.term_count) * idf
            dots[posting.doc_ordinal] = dots.get(posting.doc_ordinal, 0.0) + q_weight * doc_weight
    return {
        index.doc_table[ordinal]: dot / (query_norm * index.doc_norms[ordinal])
        for ordinal, dot in dots.items()
    }


def fuse_scores(
    transcript_scores: dict[str, float],
    ocr_scores: dict[str, float],
    alpha: float,
) -> dict[str, float]:
    """Late linear fusion: ``alpha * transcript + (1 - alpha) * ocr``.

    Videos missing from one map contribute 0 on that side; videos whose fused
    score is 0 are omitted (so alpha 1.0 returns exactly the transcript map
    and alpha 0.0 exactly the OCR map).
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha {alpha!r} outside [0, 1]")
    fused: dict[str, float] = {}
    for video_id in transcript_scores.keys() | ocr_scores.keys():
        score = alpha * transcript_scores.get(video_id, 0.0) + (
            1.0 - alpha
        ) * ocr_scores.get(video_id, 0.0)
        if score > 0.0:
            fused[video_id] = score
    return fused


def rank_scores(scores: dict[str, float]) -> RankedResult:
    """Sort by score descending, breaking ties by video id ascending."""
    ordered = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return RankedResult(entries=tuple(ordered))


def compute_scores(
    snapshot: IndexSnapshot,
    tokens: list[str],
    channel_mode: str,
    alpha: float = 0.5,
) -> dict[str, float]:
    if channel_mode == "fused":
        transcript = score_channel(snapshot.channels["transcript"], tokens)
        ocr = score_channel(snapshot.channels["ocr"], tokens)
        return fuse_scores(transcript, ocr, alpha)
    if channel_mode in snapshot.channels:
        return score_channel(snapshot.channels[channel_mode], tokens)
    raise ValueError(f"snapshot has no channel {channel_mode!r}")


def search(
    snapshot: IndexSnapshot,
    query: Query,
    config: PrepConfig | None = None,
    translator: Translator | None = None,
) -> RankedResult:
    """Translate if needed, preprocess, score per channel mode, rank, truncate."""
    cfg = config if config is not None else snapshot.prep
    query = maybe_translate(query, translator if translator is not None else IdentityTranslator())
    tokens = preprocess(query.text, cfg)
    if not tokens:
        raise EmptyQueryError(f"query {query.text!r} is empty after preprocessing")
    scores = compute_scores(snapshot, tokens, query.channel_mode, query.fusion_alpha)
    ranked = rank_scores(scores)
    return RankedResult(entries=ranked.entries[: query.top_k])


def matched_query_terms(
    snapshot: IndexSnapshot,
    tokens: list[str],
    video_id: str,
    channel_mode: str,
) -> list[str]:
    """Sorted unique query terms that occur in the video on the searched channel(s)."""
    channels = ("transcript", "ocr") if channel_mode == "fused" else (channel_mode,)
    matched: set[str] = set()
    for channel in channels:
        index = snapshot.channels[channel]
        ordinal = index.ordinal_of(video_id)
        if ordinal is None:
            continue
        for term in set(tokens):
            stats = index.vocabulary.get(term)
            if stats is not None and any(p.doc_ordinal == ordinal for p in stats.postings):
                matched.add(term)
    return sorted(matched)
