"""Command-line interface: ingest, index, search, baseline, eval, caption, serve."""

from __future__ import annotations

import json
import sys
from collections import Counter
from pathlib import Path

import click

from .baselines import BaselineSpec, build_head_window_corpus, build_truncated_index, random_ranking
from .captioner import (
    CaptionError,
    ExtractiveStubClient,
    HttpGenerationClient,
    default_chain,
    generate_caption,
    load_templates,
)
from .corpus import CorpusLoadError, load_corpus
from .evaluation import load_cases, run_benchmark
from .index import build_snapshot, deserialize_index, serialize_index
from .retrieval import (
    EmptyQueryError,
    IdentityTranslator,
    Query,
    StaticTranslator,
    maybe_translate,
    rank_scores,
    score_channel,
    search,
)
from .service import ServiceConfig, create_app_from_config
from .stopwords import load_stopword_file
from .textprep import PrepConfig, preprocess


def _prep_config(stopwords: str | None, min_token_len: int, fold_case: bool) -> PrepConfig:
    if stopwords:
        return PrepConfig(
            stopwords=load_stopword_file(stopwords),
            min_token_len=min_token_len,
            fold_case=fold_case,
        )
    return PrepConfig(min_token_len=min_token_len, fold_case=fold_case)


def _emit_ranking(entries, titles: dict[str, str] | None = None) -> None:
    for rank, (video_id, score) in enumerate(entries, start=1):
        row = {"rank": rank, "video_id": video_id, "score": score}
        if titles is not None:
            row["title"] = titles.get(video_id, "")
        click.echo(json.dumps(row, ensure_ascii=False))


@click.group()
def main() -> None:
    """Search, evaluate, and caption long-form videos from their text channels."""


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--validate", is_flag=True, default=False, help="Exit non-zero on any invalid line.")
def ingest(corpus_path: str, validate: bool) -> None:
    """Load a corpus file and report per-line validation failures."""
    try:
        corpus = load_corpus(corpus_path)
    except CorpusLoadError as exc:
        for lineno, message in exc.failures:
            click.echo(f"line {lineno}: {message}", err=True)
        raise SystemExit(2)
    domains = Counter(v.domain.value for v in corpus.videos)
    summary = {
        "videos": len(corpus),
        "domains": dict(sorted(domains.items())),
        "total_duration_s": sum(v.duration_s for v in corpus.videos),
        "with_captions": sum(1 for v in corpus.videos if v.reference_caption),
    }
    click.echo(json.dumps(summary, ensure_ascii=False))


@main.command(name="index")
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--stopwords", "stopwords_path", type=click.Path(), default=None)
@click.option("--min-token-len", type=int, default=1, show_default=True)
@click.option("--fold-case/--no-fold-case", default=True, show_default=True)
@click.option("--ocr-min-confidence", type=float, default=0.3, show_default=True)
@click.option("--ocr-dedup-threshold", type=float, default=0.8, show_default=True)
def index_cmd(
    corpus_path: str,
    out_path: str,
    stopwords_path: str | None,
    min_token_len: int,
    fold_case: bool,
    ocr_min_confidence: float,
    ocr_dedup_threshold: float,
) -> None:
    """Build both channel indexes and serialize the snapshot."""
    corpus = load_corpus(corpus_path)
    config = _prep_config(stopwords_path, min_token_len, fold_case)
    snapshot = build_snapshot(
        corpus, config, min_confidence=ocr_min_confidence, dedup_threshold=ocr_dedup_threshold
    )
    written = serialize_index(snapshot, out_path)
    click.echo(
        json.dumps(
            {
                "out": out_path,
                "bytes": written,
                "videos": snapshot.n_docs,
                "corpus_fingerprint": snapshot.corpus_fingerprint,
                "prep_fingerprint": snapshot.prep_fingerprint,
            }
        )
    )


@main.command(name="search")
@click.option("--index", "index_path", required=True, type=click.Path())
@click.option("--query", "query_text", required=True)
@click.option("--channel", type=click.Choice(["ocr", "transcript", "fused"]), default="fused",
              show_default=True)
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--lang", default=None)
@click.option("--top-k", type=int, default=10, show_default=True)
@click.option("--translations", "translations_path", type=click.Path(), default=None,
              help="JSON file mapping query text to English, used as a static translator.")
def search_cmd(
    index_path: str,
    query_text: str,
    channel: str,
    alpha: float,
    lang: str | None,
    top_k: int,
    translations_path: str | None,
) -> None:
    """Rank videos for a query; one JSON object per result line."""
    snapshot = deserialize_index(index_path)
    translator = IdentityTranslator()
    if translations_path:
        translator = StaticTranslator(json.loads(Path(translations_path).read_text("utf-8")))
    query = Query(
        text=query_text, language=lang, channel_mode=channel, fusion_alpha=alpha, top_k=top_k
    )
    try:
        ranked = search(snapshot, query, snapshot.prep, translator)
    except EmptyQueryError as exc:
        click.echo(str(exc), err=True)
        raise SystemExit(2)
    _emit_ranking(ranked.entries, snapshot.titles)


@main.command()
@click.option("--kind", type=click.Choice(["random", "truncated", "head"]), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-tokens", type=int, default=512, show_default=True)
@click.option("--window-s", type=float, default=10.0, show_default=True)
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--query", "query_text", default=None)
@click.option("--channel", type=click.Choice(["ocr", "transcript"]), default="transcript",
              show_default=True)
@click.option("--stopwords", "stopwords_path", type=click.Path(), default=None)
@click.option("--top-k", type=int, default=10, show_default=True)
def baseline(
    kind: str,
    seed: int,
    max_tokens: int,
    window_s: float,
    corpus_path: str,
    query_text: str | None,
    channel: str,
    stopwords_path: str | None,
    top_k: int,
) -> None:
    """Rank with a degraded method; same output format as search."""
    corpus = load_corpus(corpus_path)
    config = _prep_config(stopwords_path, 1, True)
    if kind == "random":
        ranked = random_ranking(sorted(corpus.video_ids()), seed)
        _emit_ranking(ranked.entries[:top_k])
        return
    if not query_text:
        click.echo("--query is required for truncated and head baselines", err=True)
        raise SystemExit(2)
    tokens = preprocess(query_text, config)
    if not tokens:
        click.echo("query is empty after preprocessing", err=True)
        raise SystemExit(2)
    if kind == "truncated":
        channel_index = build_truncated_index(
            corpus, channel, config, max_tokens=max_tokens, seed=seed
        )
    else:
        head_corpus = build_head_window_corpus(corpus, window_s)
        snapshot = build_snapshot(head_corpus, config)
        channel_index = snapshot.channels[channel]
    ranked = rank_scores(score_channel(channel_index, tokens))
    _emit_ranking(ranked.entries[:top_k])


@main.command(name="eval")
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--index", "index_path", required=True, type=click.Path())
@click.option("--cases", "cases_path", required=True, type=click.Path())
@click.option("--methods", default="tfidf", show_default=True,
              help="Comma-separated: tfidf, random, truncated, head.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-tokens", type=int, default=512, show_default=True)
@click.option("--window-s", type=float, default=10.0, show_default=True)
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="Report path; .md renders a table, anything else JSON.")
def eval_cmd(
    corpus_path: str,
    index_path: str,
    cases_path: str,
    methods: str,
    seed: int,
    max_tokens: int,
    window_s: float,
    alpha: float,
    out_path: str,
) -> None:
    """Compute R@1/R@5/R@10 per method and channel over a cases file."""
    corpus = load_corpus(corpus_path)
    snapshot = deserialize_index(index_path)
    cases = load_cases(cases_path)
    parsed: list = []
    for name in [m.strip() for m in methods.split(",") if m.strip()]:
        if name == "tfidf":
            parsed.append("tfidf")
        elif name == "random":
            parsed.append(BaselineSpec(kind="random", seed=seed))
        elif name == "truncated":
            parsed.append(BaselineSpec(kind="truncated", seed=seed, max_tokens=max_tokens))
        elif name == "head":
            parsed.append(BaselineSpec(kind="head_window", seed=seed, window_s=window_s))
        else:
            click.echo(f"unknown method {name!r}", err=True)
            raise SystemExit(2)
    report = run_benchmark(
        corpus, snapshot, cases, parsed, snapshot.prep, fusion_alpha=alpha
    )
    out = Path(out_path)
    if out.suffix == ".md":
        out.write_text(report.to_markdown(), encoding="utf-8")
    else:
        out.write_text(json.dumps(report.to_json_dict(), indent=2) + "\n", encoding="utf-8")
    click.echo(f"wrote {out_path} ({len(report.rows)} rows, {report.n_cases} cases)")


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--templates", "templates_dir", type=click.Path(), default=None,
              help="Directory of *.json templates; defaults to the shipped set.")
@click.option("--client", "client_kind", type=click.Choice(["stub", "external"]),
              default="stub", show_default=True)
@click.option("--max-chunk-tokens", type=int, default=3000, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--audit", "audit_path", type=click.Path(), default=None,
              help="JSONL audit log of every prompt and response.")
def caption(
    corpus_path: str,
    templates_dir: str | None,
    client_kind: str,
    max_chunk_tokens: int,
    out_path: str,
    audit_path: str | None,
) -> None:
    """Generate one caption per video from its transcript."""
    corpus = load_corpus(corpus_path)
    templates = load_templates(templates_dir)
    client = ExtractiveStubClient() if client_kind == "stub" else HttpGenerationClient()
    audit_handle = open(audit_path, "w", encoding="utf-8") if audit_path else None
    written = 0
    try:
        with open(out_path, "w", encoding="utf-8") as out:
            for video in corpus.videos:
                def audit_sink(entry: dict, _vid=video.video_id) -> None:
                    if audit_handle is not None:
                        audit_handle.write(
                            json.dumps({"video_id": _vid, **entry}, ensure_ascii=False) + "\n"
                        )

                chain = default_chain(video.domain, templates, max_chunk_tokens)
                try:
                    text = generate_caption(video, chain, client, audit_sink)
                except CaptionError as exc:
                    click.echo(f"skipping {video.video_id}: {exc}", err=True)
                    continue
                out.write(json.dumps({"video_id": video.video_id, "caption": text},
                                     ensure_ascii=False) + "\n")
                written += 1
    finally:
        if audit_handle is not None:
            audit_handle.close()
    click.echo(f"wrote {written} captions to {out_path}")


@main.command()
@click.option("--index", "index_path", required=True, type=click.Path())
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--channel", type=click.Choice(["ocr", "transcript", "fused"]), default="fused",
              show_default=True)
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--translator", default="identity", show_default=True,
              help="'identity' or 'static:<path to JSON mapping>'.")
@click.option("--max-top-k", type=int, default=50, show_default=True)
@click.option("--cors/--no-cors", default=True, show_default=True)
def serve(
    index_path: str,
    corpus_path: str,
    host: str,
    port: int,
    channel: str,
    alpha: float,
    translator: str,
    max_top_k: int,
    cors: bool,
) -> None:
    """Serve GET /v1/search, /v1/videos/{id}, /v1/health over the snapshot."""
    import uvicorn

    config = ServiceConfig(
        index_path=index_path,
        corpus_path=corpus_path,
        host=host,
        port=port,
        default_channel=channel,
        default_alpha=alpha,
        translator=translator,
        max_top_k=max_top_k,
        allow_cors=cors,
    )
    app = create_app_from_config(config)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
