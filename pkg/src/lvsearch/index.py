"""Immutable per-channel TF-IDF inverted indexes with deterministic serialization.

Weighting is sublinear term frequency, ``1 + ln(count)``, times smoothed
inverse document frequency, ``ln((1 + N) / (1 + df)) + 1``. Both factors are
strictly positive for any term that occurs at all, so a document norm is zero
exactly when the document is empty.

Snapshots serialize to a canonical JSON container (sorted keys, fixed
separators, ASCII escapes) so that identical inputs always produce
byte-identical files; a SHA-256 checksum over the payload guards integrity.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from .corpus import (
    CHANNELS,
    Corpus,
    DEFAULT_DEDUP_THRESHOLD,
    DEFAULT_MIN_OCR_CONFIDENCE,
    assemble_channel_text,
)
from .textprep import PrepConfig, preprocess

INDEX_FORMAT = "lvsearch-index"
INDEX_VERSION = 1


class IndexFormatError(ValueError):
    """Unreadable index file: wrong magic, version, or truncated content."""


class ChecksumError(IndexFormatError):
    """Index file content does not match its recorded checksum."""


def compute_idf(df: int, n_docs: int) -> float:
    """Smoothed inverse document frequency: ``ln((1 + N) / (1 + df)) + 1``.

    Strictly positive and strictly decreasing in ``df``; equals 1.0 when a
    term occurs in every document.
    """
    if df < 1 or df > n_docs:
        raise ValueError(f"df must satisfy 1 <= df <= n_docs, got df={df}, n_docs={n_docs}")
    return math.log((1 + n_docs) / (1 + df)) + 1.0


def tf_weight(count: int) -> float:
    """Sublinear term-frequency weight: 0 for absent terms, else ``1 + ln(count)``."""
    if count < 0:
        raise ValueError(f"count must be non-negative, got {count}")
    if count == 0:
        return 0.0
    return 1.0 + math.log(count)


@dataclass(frozen=True)
class Posting:
    doc_ordinal: int
    term_count: int


@dataclass(frozen=True)
class TermStats:
    df: int
    postings: tuple[Posting, ...]


@dataclass(frozen=True, eq=True)
class ChannelIndex:
    """Inverted index over one text channel of a corpus.

    ``doc_table`` lists video ids in ascending order; postings refer to
    positions in that table. ``doc_norms`` are Euclidean norms of each
    document's TF-IDF vector (0.0 for empty documents).
    """

    channel: str
    doc_table: tuple[str, ...]
    vocabulary: dict[str, TermStats]
    doc_norms: tuple[float, ...]
    n_docs: int

    def ordinal_of(self, video_id: str) -> int | None:
        lo, hi = 0, len(self.doc_table)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.doc_table[mid] < video_id:
                lo = mid + 1
            else:
                hi = mid
        if lo < len(self.doc_table) and self.doc_table[lo] == video_id:
            return lo
        return None

    def idf(self, term: str) -> float:
        stats = self.vocabulary.get(term)
        if stats is None:
            return 0.0
        return compute_idf(stats.df, self.n_docs)


def build_index_from_tokens(
    channel: str,
    documents: Sequence[tuple[str, Sequence[str]]],
) -> ChannelIndex:
    """Build a channel index from already-preprocessed ``(video_id, tokens)`` pairs."""
    if channel not in CHANNELS:
        raise ValueError(f"unknown channel {channel!r}; expected one of {CHANNELS}")
    if not documents:
        raise ValueError("cannot index an empty corpus")
    docs = sorted(documents, key=lambda item: item[0])
    doc_table = tuple(video_id for video_id, _ in docs)
    per_term: dict[str, list[Posting]] = {}
    doc_counters = [Counter(tokens) for _, tokens in docs]
    for ordinal, counter in enumerate(doc_counters):
        for term in sorted(counter):
            per_term.setdefault(term, []).append(Posting(ordinal, counter[term]))
    vocabulary = {
        term: TermStats(df=len(postings), postings=tuple(postings))
        for term, postings in per_term.items()
    }
    n_docs = len(doc_table)
    norms: list[float] = []
    for counter in doc_counters:
        acc = 0.0
        for term, count in counter.items():
            weight = tf_weight(count) * compute_idf(vocabulary[term].df, n_docs)
            acc += weight * weight
        norms.append(math.sqrt(acc))
    return ChannelIndex(
        channel=channel,
        doc_table=doc_table,
        vocabulary=vocabulary,
        doc_norms=tuple(norms),
        n_docs=n_docs,
    )


def channel_token_lists(
    corpus: Corpus,
    channel: str,
    config: PrepConfig | None = None,
    *,
    min_confidence: float = DEFAULT_MIN_OCR_CONFIDENCE,
    dedup_threshold: float = DEFAULT_DEDUP_THRESHOLD,
) -> list[tuple[str, list[str]]]:
    """Preprocessed token lists per video for one channel, sorted by video id."""
    cfg = config if config is not None else PrepConfig()
    out = []
    for video in sorted(corpus.videos, key=lambda v: v.video_id):
        text = assemble_channel_text(
            video, channel, min_confidence=min_confidence, dedup_threshold=dedup_threshold
        )
        out.append((video.video_id, preprocess(text, cfg)))
    return out


def build_index(
    corpus: Corpus,
    channel: str,
    config: PrepConfig | None = None,
    *,
    min_confidence: float = DEFAULT_MIN_OCR_CONFIDENCE,
    dedup_threshold: float = DEFAULT_DEDUP_THRESHOLD,
) -> ChannelIndex:
    """Index one channel of a corpus; deterministic for fixed inputs."""
    if not corpus.videos:
        raise ValueError("cannot index an empty corpus")
    docs = channel_token_lists(
        corpus, channel, config, min_confidence=min_confidence, dedup_threshold=dedup_threshold
    )
    return build_index_from_tokens(channel, docs)


def corpus_fingerprint(corpus: Corpus) -> str:
    """SHA-256 over the canonical JSON of all records, order-independent."""
    records = [v.to_dict() for v in sorted(corpus.videos, key=lambda v: v.video_id)]
    payload = json.dumps(records, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return hashlib.sha256(payload.encode("ascii")).hexdigest()


@dataclass(frozen=True)
class IndexSnapshot:
    """Both channel indexes plus everything needed to query them consistently.

    Embeds the preprocessing config (not just its fingerprint) so query-time
    tokenization always matches what was indexed, and the video titles so
    result rendering does not require the corpus file.
    """

    channels: dict[str, ChannelIndex]
    titles: dict[str, str]
    prep: PrepConfig
    ocr_min_confidence: float
    ocr_dedup_threshold: float
    corpus_fingerprint: str

    @property
    def prep_fingerprint(self) -> str:
        return self.prep.fingerprint()

    @property
    def n_docs(self) -> int:
        return self.channels["transcript"].n_docs


def build_snapshot(
    corpus: Corpus,
    config: PrepConfig | None = None,
    *,
    min_confidence: float = DEFAULT_MIN_OCR_CONFIDENCE,
    dedup_threshold: float = DEFAULT_DEDUP_THRESHOLD,
) -> IndexSnapshot:
    cfg = config if config is not None else PrepConfig()
    channels = {
        channel: build_index(
            corpus, channel, cfg, min_confidence=min_confidence, dedup_threshold=dedup_threshold
        )
        for channel in CHANNELS
    }
    return IndexSnapshot(
        channels=channels,
        titles={v.video_id: v.title for v in corpus.videos},
        prep=cfg,
        ocr_min_confidence=min_confidence,
        ocr_dedup_threshold=dedup_threshold,
        corpus_fingerprint=corpus_fingerprint(corpus),
    )


def _canonical_dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def _channel_payload(index: ChannelIndex) -> dict[str, Any]:
    return {
        "channel": index.channel,
        "doc_table": list(index.doc_table),
        "n_docs": index.n_docs,
        "doc_norms": list(index.doc_norms),
        "vocabulary": {
            term: [stats.df, [[p.doc_ordinal, p.term_count] for p in stats.postings]]
            for term, stats in index.vocabulary.items()
        },
    }


def _channel_from_payload(data: dict[str, Any]) -> ChannelIndex:
    vocabulary = {}
    for term, (df, postings) in data["vocabulary"].items():
        parsed = tuple(Posting(int(ordinal), int(count)) for ordinal, count in postings)
        if df != len(parsed):
            raise IndexFormatError(f"term {term!r}: df {df} != postings length {len(parsed)}")
        vocabulary[term] = TermStats(df=int(df), postings=parsed)
    return ChannelIndex(
        channel=data["channel"],
        doc_table=tuple(data["doc_table"]),
        vocabulary=vocabulary,
        doc_norms=tuple(float(x) for x in data["doc_norms"]),
        n_docs=int(data["n_docs"]),
    )


def _snapshot_payload(snapshot: IndexSnapshot) -> dict[str, Any]:
    return {
        "channels": {name: _channel_payload(ix) for name, ix in snapshot.channels.items()},
        "titles": dict(snapshot.titles),
        "prep": {
            "stopwords": sorted(snapshot.prep.stopwords),
            "min_token_len": snapshot.prep.min_token_len,
            "fold_case": snapshot.prep.fold_case,
        },
        "ocr_min_confidence": snapshot.ocr_min_confidence,
        "ocr_dedup_threshold": snapshot.ocr_dedup_threshold,
        "corpus_fingerprint": snapshot.corpus_fingerprint,
        "prep_fingerprint": snapshot.prep_fingerprint,
    }


def serialize_index(snapshot: IndexSnapshot, path: str | Path) -> int:
    """Write a snapshot to ``path``; returns bytes written.

    Identical snapshots always serialize to byte-identical files.
    """
    payload = _snapshot_payload(snapshot)
    payload_text = _canonical_dumps(payload)
    checksum = hashlib.sha256(payload_text.encode("ascii")).hexdigest()
    container = {
        "format": INDEX_FORMAT,
        "version": INDEX_VERSION,
        "checksum": checksum,
        "payload": payload,
    }
    data = _canonical_dumps(container).encode("ascii")
    Path(path).write_bytes(data)
    return len(data)


def read_index_header(path: str | Path) -> dict[str, Any]:
    """Format, version, checksum and fingerprints of an index file (validated)."""
    container = _load_container(path)
    return {
        "format": container["format"],
        "version": container["version"],
        "checksum": container["checksum"],
        "corpus_fingerprint": container["payload"]["corpus_fingerprint"],
        "prep_fingerprint": container["payload"]["prep_fingerprint"],
        "n_docs": container["payload"]["channels"]["transcript"]["n_docs"],
    }


def _load_container(path: str | Path) -> dict[str, Any]:
    try:
        raw = Path(path).read_text(encoding="ascii")
    except FileNotFoundError:
        raise
    except (UnicodeDecodeError, OSError) as exc:
        raise IndexFormatError(f"{path}: unreadable index file ({exc})") from exc
    try:
        container = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise IndexFormatError(f"{path}: truncated or malformed index file ({exc.msg})") from exc
    if not isinstance(container, dict) or container.get("format") != INDEX_FORMAT:
        raise IndexFormatError(f"{path}: not a {INDEX_FORMAT} file")
    if container.get("version") != INDEX_VERSION:
        raise IndexFormatError(
            f"{path}: unsupported version {container.get('version')!r}, "
            f"expected {INDEX_VERSION}"
        )
    if "payload" not in container or "checksum" not in container:
        raise IndexFormatError(f"{path}: missing payload or checksum")
    recomputed = hashlib.sha256(
        _canonical_dumps(container["payload"]).encode("ascii")
    ).hexdigest()
    if recomputed != container["checksum"]:
        raise ChecksumError(
            f"{path}: checksum mismatch (recorded {container['checksum'][:12]}..., "
            f"recomputed {recomputed[:12]}...)"
        )
    return container


def deserialize_index(path: str | Path) -> IndexSnapshot:
    """Load a snapshot previously written by :func:`serialize_index`."""
    container = _load_container(path)
    payload = container["payload"]
    prep = PrepConfig(
        stopwords=frozenset(payload["prep"]["stopwords"]),
        min_token_len=int(payload["prep"]["min_token_len"]),
        fold_case=bool(payload["prep"]["fold_case"]),
    )
    channels = {
        name: _channel_from_payload(data) for name, data in payload["channels"].items()
    }
    return IndexSnapshot(
        channels=channels,
        titles=dict(payload["titles"]),
        prep=prep,
        ocr_min_confidence=float(payload["ocr_min_confidence"]),
        ocr_dedup_threshold=float(payload["ocr_dedup_threshold"]),
        corpus_fingerprint=payload["corpus_fingerprint"],
    )
