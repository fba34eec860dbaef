"""Recall@k evaluation over query sets with known gold videos.

Produces a per-(method, channel) comparison report. Gold membership is
decided on full rankings, before any serving-time top-k truncation, so R@10
stays exact even when the engine serves fewer hits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from .baselines import (
    BaselineSpec,
    build_head_window_corpus,
    build_truncated_index,
    derive_seed,
    random_ranking,
)
from .corpus import Corpus
from .index import IndexSnapshot, build_snapshot
from .retrieval import (
    IdentityTranslator,
    Query,
    RankedResult,
    Translator,
    maybe_translate,
    rank_scores,
    score_channel,
    search,
)
from .textprep import PrepConfig, preprocess

RECALL_KS = (1, 5, 10)

# Feature labels used in rendered reports.
CHANNEL_LABELS = {"transcript": "transcripts", "ocr": "OCR", "fused": "transcripts+OCR", "-": "-"}


@dataclass(frozen=True)
class EvalCase:
    query_text: str
    gold_video_id: str
    language: str | None = None


@dataclass(frozen=True)
class ReportRow:
    method: str
    channel: str
    r1: float
    r5: float
    r10: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.r1 <= self.r5 <= self.r10 <= 100.0:
            raise ValueError(
                f"recall values must satisfy 0 <= R@1 <= R@5 <= R@10 <= 100, "
                f"got {self.r1}, {self.r5}, {self.r10}"
            )


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[ReportRow, ...]
    n_cases: int
    seeds: dict[str, int]
    config_fingerprint: str

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "n_cases": self.n_cases,
            "seeds": dict(self.seeds),
            "config_fingerprint": self.config_fingerprint,
            "rows": [
                {
                    "method": r.method,
                    "channel": r.channel,
                    "r_at_1": round(r.r1, 2),
                    "r_at_5": round(r.r5, 2),
                    "r_at_10": round(r.r10, 2),
                }
                for r in self.rows
            ],
        }

    def to_markdown(self) -> str:
        lines = [
            "| Method | Features | R@1 | R@5 | R@10 |",
            "| --- | --- | --- | --- | --- |",
        ]
        for r in self.rows:
            label = CHANNEL_LABELS.get(r.channel, r.channel)
            lines.append(
                f"| {r.method} | {label} | {r.r1:05.2f} | {r.r5:05.2f} | {r.r10:05.2f} |"
            )
        lines.append("")
        lines.append(f"{self.n_cases} cases; config {self.config_fingerprint[:12]}")
        return "\n".join(lines) + "\n"


def recall_at_k(ranked: Sequence[RankedResult], golds: Sequence[str], k: int) -> float:
    """Percentage of cases whose gold id appears within the first ``k`` entries."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if len(ranked) != len(golds):
        raise ValueError(f"{len(ranked)} rankings vs {len(golds)} golds")
    if not ranked:
        raise ValueError("no evaluation cases")
    hits = 0
    for result, gold in zip(ranked, golds):
        for video_id, _ in result.entries[:k]:
            if video_id == gold:
                hits += 1
                break
    return 100.0 * hits / len(golds)


def load_cases(path: str | Path) -> list[EvalCase]:
    """Cases file: JSON lines of {query_text, gold_video_id, language?}."""
    cases = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        data = json.loads(line)
        try:
            cases.append(
                EvalCase(
                    query_text=data["query_text"],
                    gold_video_id=data["gold_video_id"],
                    language=data.get("language"),
                )
            )
        except KeyError as exc:
            raise ValueError(f"cases line {lineno}: missing field {exc.args[0]!r}") from exc
    return cases


def _case_tokens(
    case: EvalCase, config: PrepConfig, translator: Translator
) -> list[str]:
    query = maybe_translate(
        Query(text=case.query_text, language=case.language), translator
    )
    return preprocess(query.text, config)


def _rankings_from_index(index, cases, config, translator) -> list[RankedResult]:
    out = []
    for case in cases:
        tokens = _case_tokens(case, config, translator)
        scores = score_channel(index, tokens) if tokens else {}
        out.append(rank_scores(scores))
    return out


def _row(method: str, channel: str, rankings: list[RankedResult], golds: list[str]) -> ReportRow:
    r1, r5, r10 = (recall_at_k(rankings, golds, k) for k in RECALL_KS)
    return ReportRow(method=method, channel=channel, r1=r1, r5=r5, r10=r10)


def run_benchmark(
    corpus: Corpus,
    snapshot: IndexSnapshot,
    cases: Sequence[EvalCase],
    methods: Sequence[str | BaselineSpec],
    config: PrepConfig | None = None,
    translator: Translator | None = None,
    *,
    fusion_alpha: float = 0.5,
) -> EvalReport:
    """One report row per (method, channel); deterministic given the seeds.

    ``methods`` mixes the string ``"tfidf"`` (which yields transcript, OCR and
    fused rows) with :class:`BaselineSpec` values. Random baselines consume a
    per-case seed derived from the baseline's seed and the case position.
    """
    if not cases:
        raise ValueError("no evaluation cases")
    cfg = config if config is not None else snapshot.prep
    trans = translator if translator is not None else IdentityTranslator()
    known_ids = set(corpus.video_ids())
    for case in cases:
        if case.gold_video_id not in known_ids:
            raise ValueError(f"gold video {case.gold_video_id!r} not in corpus")
    golds = [case.gold_video_id for case in cases]
    n_docs = len(corpus.videos)
    doc_ids = sorted(corpus.video_ids())

    rows: list[ReportRow] = []
    seeds: dict[str, int] = {}
    for method in methods:
        if method == "tfidf":
            for channel in ("transcript", "ocr", "fused"):
                rankings = []
                for case in cases:
                    query = Query(
                        text=case.query_text,
                        language=case.language,
                        channel_mode=channel,
                        fusion_alpha=fusion_alpha,
                        top_k=n_docs,
                    )
                    rankings.append(search(snapshot, query, cfg, trans))
                rows.append(_row("tfidf", channel, rankings, golds))
        elif isinstance(method, BaselineSpec):
            seeds[method.kind] = method.seed
            if method.kind == "random":
                rankings = [
                    random_ranking(doc_ids, derive_seed(method.seed, str(i)))
                    for i in range(len(cases))
                ]
                rows.append(_row("random", "-", rankings, golds))
            elif method.kind == "truncated":
                for channel in ("transcript", "ocr"):
                    index = build_truncated_index(
                        corpus,
                        channel,
                        cfg,
                        max_tokens=method.max_tokens,
                        seed=method.seed,
                        min_confidence=snapshot.ocr_min_confidence,
                        dedup_threshold=snapshot.ocr_dedup_threshold,
                    )
                    rankings = _rankings_from_index(index, cases, cfg, trans)
                    rows.append(_row("truncated", channel, rankings, golds))
            elif method.kind == "head_window":
                head_corpus = build_head_window_corpus(corpus, method.window_s)
                head_snapshot = build_snapshot(
                    head_corpus,
                    cfg,
                    min_confidence=snapshot.ocr_min_confidence,
                    dedup_threshold=snapshot.ocr_dedup_threshold,
                )
                for channel in ("transcript", "ocr"):
                    rankings = _rankings_from_index(
                        head_snapshot.channels[channel], cases, cfg, trans
                    )
                    rows.append(_row("head_window", channel, rankings, golds))
        else:
            raise ValueError(f"unknown method {method!r}")
    return EvalReport(
        rows=tuple(rows),
        n_cases=len(cases),
        seeds=seeds,
        config_fingerprint=snapshot.prep_fingerprint,
    )
