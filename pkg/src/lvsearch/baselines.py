"""Degraded retrieval baselines for the comparison harness.

Three reproducible comparison methods: a seeded random ranking, retrieval
over documents randomly down-sampled to a fixed token budget (emulating
retrievers with a hard input-size cap), and retrieval over only the opening
seconds of each video (emulating short-clip methods). All randomness is
seeded explicitly; nothing draws from global state.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from typing import Sequence

from .corpus import Corpus, DEFAULT_DEDUP_THRESHOLD, DEFAULT_MIN_OCR_CONFIDENCE, head_window_video
from .index import ChannelIndex, build_index_from_tokens, channel_token_lists
from .retrieval import RankedResult
from .textprep import PrepConfig

BASELINE_KINDS = ("random", "truncated", "head_window")


@dataclass(frozen=True)
class BaselineSpec:
    kind: str
    seed: int = 0
    max_tokens: int = 512
    window_s: float = 10.0

    def __post_init__(self) -> None:
        if self.kind not in BASELINE_KINDS:
            raise ValueError(f"kind {self.kind!r} not one of {BASELINE_KINDS}")
        if self.max_tokens < 1:
            raise ValueError(f"max_tokens must be >= 1, got {self.max_tokens}")
        if self.window_s <= 0:
            raise ValueError(f"window_s must be > 0, got {self.window_s}")


def derive_seed(seed: int, key: str) -> int:
    """Stable per-document seed so truncation does not depend on corpus order."""
    digest = hashlib.sha256(f"{seed}:{key}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def random_ranking(doc_ids: Sequence[str], seed: int) -> RankedResult:
    """Uniformly random permutation of the ids, deterministic per seed; scores 0."""
    ids = list(doc_ids)
    if not ids:
        raise ValueError("doc_ids is empty")
    rng = random.Random(seed)
    rng.shuffle(ids)
    return RankedResult(entries=tuple((video_id, 0.0) for video_id in ids))


def truncate_tokens(tokens: Sequence[str], max_tokens: int, seed: int) -> list[str]:
    """Keep a uniformly random subset of ``max_tokens`` tokens in original order."""
    if max_tokens < 1:
        raise ValueError(f"max_tokens must be >= 1, got {max_tokens}")
    toks = list(tokens)
    if len(toks) <= max_tokens:
        return toks
    rng = random.Random(seed)
    keep = sorted(rng.sample(range(len(toks)), max_tokens))
    return [toks[i] for i in keep]


def build_truncated_index(
    corpus: Corpus,
    channel: str,
    config: PrepConfig | None = None,
    max_tokens: int = 512,
    seed: int = 0,
    *,
    min_confidence: float = DEFAULT_MIN_OCR_CONFIDENCE,
    dedup_threshold: float = DEFAULT_DEDUP_THRESHOLD,
) -> ChannelIndex:
    """Like a normal channel index, but each document is token-budgeted first.

    Truncation happens once, at build time, with a per-document seed derived
    from ``seed`` and the video id.
    """
    docs = channel_token_lists(
        corpus, channel, config, min_confidence=min_confidence, dedup_threshold=dedup_threshold
    )
    truncated = [
        (video_id, truncate_tokens(tokens, max_tokens, derive_seed(seed, video_id)))
        for video_id, tokens in docs
    ]
    return build_index_from_tokens(channel, truncated)


def build_head_window_corpus(corpus: Corpus, window_s: float) -> Corpus:
    """Restrict every video to content starting before ``window_s`` seconds.

    Transcript segments straddling the cutoff are kept whole; durations are
    preserved, so the result stays a valid corpus.
    """
    if window_s <= 0:
        raise ValueError(f"window_s must be > 0, got {window_s}")
    return Corpus(
        videos=tuple(head_window_video(v, window_s) for v in corpus.videos),
        metadata=dict(corpus.metadata),
    )
