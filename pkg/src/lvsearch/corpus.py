"""Corpus data model and line-delimited JSON ingestion.

A corpus is a collection of long-form videos, each carrying two text
channels: OCR tokens extracted from sampled frames, and an ASR / closed
caption transcript. Records validate their invariants on construction so
everything downstream can assume well-formed data. Values are immutable
after load and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any, Iterable

CHANNELS = ("ocr", "transcript")

# Frame sampling schedule: lectures change slides slowly, news tickers churn.
EDUCATION_FRAME_STRIDE_S = 60.0
NEWS_FRAME_STRIDE_S = 10.0

DEFAULT_MIN_OCR_CONFIDENCE = 0.3
DEFAULT_DEDUP_THRESHOLD = 0.8


class CorpusError(ValueError):
    """Invalid corpus data: broken invariant or malformed record."""


class CorpusLoadError(CorpusError):
    """A corpus file failed to load; carries every per-line failure."""

    def __init__(self, path: str | Path, failures: list[tuple[int, str]]):
        self.path = str(path)
        self.failures = list(failures)
        detail = "; ".join(f"line {n}: {msg}" for n, msg in self.failures)
        super().__init__(f"{self.path}: {detail}")


class Domain(str, Enum):
    EDUCATION = "education"
    NEWS = "news"

    @property
    def frame_stride_s(self) -> float:
        if self is Domain.EDUCATION:
            return EDUCATION_FRAME_STRIDE_S
        return NEWS_FRAME_STRIDE_S


@dataclass(frozen=True)
class OcrToken:
    text: str
    confidence: float

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise CorpusError("OCR token text is empty after trimming")
        if not 0.0 <= self.confidence <= 1.0:
            raise CorpusError(f"OCR confidence {self.confidence!r} outside [0, 1]")


@dataclass(frozen=True)
class OcrFrame:
    timestamp_s: float
    tokens: tuple[OcrToken, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.timestamp_s < 0:
            raise CorpusError(f"frame timestamp {self.timestamp_s!r} is negative")

    def token_texts(self) -> list[str]:
        return [t.text for t in self.tokens]

    def token_text_set(self) -> frozenset[str]:
        return frozenset(t.text for t in self.tokens)


@dataclass(frozen=True)
class TranscriptSegment:
    start_s: float
    end_s: float
    text: str

    def __post_init__(self) -> None:
        if self.start_s < 0:
            raise CorpusError(f"segment start {self.start_s!r} is negative")
        if self.end_s < self.start_s:
            raise CorpusError(
                f"segment end {self.end_s!r} precedes start {self.start_s!r}"
            )


@dataclass(frozen=True)
class VideoRecord:
    """One long-form video with its OCR and transcript channels.

    Invariants: positive duration, frame timestamps and segment ends within
    the duration, transcript segments sorted by start and non-overlapping.
    """

    video_id: str
    domain: Domain
    duration_s: float
    title: str = ""
    ocr_frames: tuple[OcrFrame, ...] = ()
    transcript: tuple[TranscriptSegment, ...] = ()
    reference_caption: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "ocr_frames", tuple(self.ocr_frames))
        object.__setattr__(self, "transcript", tuple(self.transcript))
        if not self.video_id:
            raise CorpusError("video_id is empty")
        if not isinstance(self.domain, Domain):
            object.__setattr__(self, "domain", Domain(self.domain))
        if self.duration_s <= 0:
            raise CorpusError(f"{self.video_id}: duration {self.duration_s!r} must be > 0")
        for frame in self.ocr_frames:
            if frame.timestamp_s > self.duration_s:
                raise CorpusError(
                    f"{self.video_id}: frame at {frame.timestamp_s}s exceeds "
                    f"duration {self.duration_s}s"
                )
        prev_end = 0.0
        for seg in self.transcript:
            if seg.start_s < prev_end:
                raise CorpusError(
                    f"{self.video_id}: transcript segments unsorted or overlapping "
                    f"near {seg.start_s}s"
                )
            if seg.end_s > self.duration_s:
                raise CorpusError(
                    f"{self.video_id}: segment ending at {seg.end_s}s exceeds "
                    f"duration {self.duration_s}s"
                )
            prev_end = seg.end_s

    def to_dict(self) -> dict[str, Any]:
        return {
            "video_id": self.video_id,
            "domain": self.domain.value,
            "duration_s": self.duration_s,
            "title": self.title,
            "ocr_frames": [
                {
                    "timestamp_s": f.timestamp_s,
                    "tokens": [{"text": t.text, "confidence": t.confidence} for t in f.tokens],
                }
                for f in self.ocr_frames
            ],
            "transcript": [
                {"start_s": s.start_s, "end_s": s.end_s, "text": s.text}
                for s in self.transcript
            ],
            "reference_caption": self.reference_caption,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "VideoRecord":
        if not isinstance(data, dict):
            raise CorpusError("record is not a JSON object")
        try:
            domain = Domain(data["domain"])
        except (KeyError, ValueError) as exc:
            raise CorpusError(f"bad domain: {data.get('domain')!r}") from exc
        try:
            frames = tuple(
                OcrFrame(
                    timestamp_s=float(f["timestamp_s"]),
                    tokens=tuple(
                        OcrToken(text=str(t["text"]), confidence=float(t["confidence"]))
                        for t in f.get("tokens", [])
                    ),
                )
                for f in data.get("ocr_frames", [])
            )
            segments = tuple(
                TranscriptSegment(
                    start_s=float(s["start_s"]), end_s=float(s["end_s"]), text=str(s["text"])
                )
                for s in data.get("transcript", [])
            )
            return cls(
                video_id=str(data["video_id"]),
                domain=domain,
                duration_s=float(data["duration_s"]),
                title=str(data.get("title", "")),
                ocr_frames=frames,
                transcript=segments,
                reference_caption=data.get("reference_caption"),
            )
        except KeyError as exc:
            raise CorpusError(f"missing field {exc.args[0]!r}") from exc
        except (TypeError, ValueError) as exc:
            if isinstance(exc, CorpusError):
                raise
            raise CorpusError(str(exc)) from exc


@dataclass
class Corpus:
    videos: tuple[VideoRecord, ...]
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.videos = tuple(self.videos)
        seen: set[str] = set()
        for v in self.videos:
            if v.video_id in seen:
                raise CorpusError(f"duplicate video_id {v.video_id!r}")
            seen.add(v.video_id)

    def __len__(self) -> int:
        return len(self.videos)

    def get(self, video_id: str) -> VideoRecord | None:
        for v in self.videos:
            if v.video_id == video_id:
                return v
        return None

    def video_ids(self) -> list[str]:
        return [v.video_id for v in self.videos]


def load_corpus(path: str | Path) -> Corpus:
    """Load a corpus from a line-delimited JSON file (one record per line).

    Every line is parsed and validated; all failures are collected and raised
    together as a :class:`CorpusLoadError` with their line numbers.
    """
    path = Path(path)
    if not path.exists():
        raise CorpusLoadError(path, [(0, "file does not exist")])
    failures: list[tuple[int, str]] = []
    videos: list[VideoRecord] = []
    seen: dict[str, int] = {}
    with path.open("r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = VideoRecord.from_dict(json.loads(line))
            except json.JSONDecodeError as exc:
                failures.append((lineno, f"malformed JSON ({exc.msg})"))
                continue
            except CorpusError as exc:
                failures.append((lineno, str(exc)))
                continue
            if record.video_id in seen:
                failures.append(
                    (lineno, f"duplicate video_id {record.video_id!r} "
                             f"(first seen on line {seen[record.video_id]})")
                )
                continue
            seen[record.video_id] = lineno
            videos.append(record)
    if failures:
        raise CorpusLoadError(path, failures)
    return Corpus(videos=tuple(videos), metadata={"source": str(path)})


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for video in corpus.videos:
            handle.write(json.dumps(video.to_dict(), ensure_ascii=False) + "\n")


def sample_frame_timestamps(
    duration_s: float,
    domain: Domain,
    stride_override: float | None = None,
) -> list[float]:
    """Timestamps ``[0, s, 2s, ...]`` strictly below ``duration_s``.

    The stride ``s`` is one frame per minute for education videos and one
    per 10 seconds for news, unless overridden. Sampling starts at t=0.
    """
    if duration_s < 0:
        raise ValueError(f"duration {duration_s!r} is negative")
    if stride_override is not None and stride_override <= 0:
        raise ValueError(f"stride override {stride_override!r} must be > 0")
    stride = stride_override if stride_override is not None else domain.frame_stride_s
    timestamps: list[float] = []
    k = 0
    while k * stride < duration_s:
        timestamps.append(k * stride)
        k += 1
    return timestamps


def filter_ocr_tokens(frame: OcrFrame, min_confidence: float = DEFAULT_MIN_OCR_CONFIDENCE) -> list[str]:
    """Token texts with confidence >= ``min_confidence``, original order kept."""
    if not 0.0 <= min_confidence <= 1.0:
        raise ValueError(f"min_confidence {min_confidence!r} outside [0, 1]")
    return [t.text for t in frame.tokens if t.confidence >= min_confidence]


def jaccard(a: frozenset[str] | set[str], b: frozenset[str] | set[str]) -> float:
    """Jaccard similarity of two token sets; two empty sets count as identical."""
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def dedup_frames(
    frames: Iterable[OcrFrame],
    jaccard_threshold: float = DEFAULT_DEDUP_THRESHOLD,
) -> list[OcrFrame]:
    """Drop frames too similar to the last kept frame.

    A frame survives iff the Jaccard similarity of its token-text set with
    the previously *kept* frame's set is below the threshold. The first
    frame always survives. Input must be sorted by timestamp.
    """
    if not 0.0 <= jaccard_threshold <= 1.0:
        raise ValueError(f"jaccard_threshold {jaccard_threshold!r} outside [0, 1]")
    frames = list(frames)
    for prev, cur in zip(frames, frames[1:]):
        if cur.timestamp_s < prev.timestamp_s:
            raise ValueError("frames are not sorted by timestamp")
    kept: list[OcrFrame] = []
    last_set: frozenset[str] | None = None
    for frame in frames:
        current = frame.token_text_set()
        if last_set is None or jaccard(current, last_set) < jaccard_threshold:
            kept.append(frame)
            last_set = current
    return kept


def assemble_channel_text(
    video: VideoRecord,
    channel: str,
    *,
    min_confidence: float = DEFAULT_MIN_OCR_CONFIDENCE,
    dedup_threshold: float = DEFAULT_DEDUP_THRESHOLD,
) -> str:
    """Flatten one channel of a video into a single string.

    OCR: confidence-filter each frame, drop near-duplicate frames, then join
    the surviving token texts in timestamp order. Transcript: join segment
    texts in start order with single spaces.
    """
    if channel == "transcript":
        segments = sorted(video.transcript, key=lambda s: (s.start_s, s.end_s))
        return " ".join(s.text for s in segments if s.text.strip())
    if channel == "ocr":
        if not 0.0 <= min_confidence <= 1.0:
            raise ValueError(f"min_confidence {min_confidence!r} outside [0, 1]")
        frames = sorted(video.ocr_frames, key=lambda f: f.timestamp_s)
        filtered = [
            OcrFrame(
                timestamp_s=f.timestamp_s,
                tokens=tuple(t for t in f.tokens if t.confidence >= min_confidence),
            )
            for f in frames
        ]
        kept = dedup_frames(filtered, dedup_threshold)
        return " ".join(text for frame in kept for text in frame.token_texts())
    raise ValueError(f"unknown channel {channel!r}; expected one of {CHANNELS}")


def head_window_video(video: VideoRecord, window_s: float) -> VideoRecord:
    """Restrict a video's channels to content starting before ``window_s``.

    Transcript segments that straddle the cutoff are kept whole; the
    duration is preserved.
    """
    return replace(
        video,
        ocr_frames=tuple(f for f in video.ocr_frames if f.timestamp_s < window_s),
        transcript=tuple(s for s in video.transcript if s.start_s < window_s),
    )
