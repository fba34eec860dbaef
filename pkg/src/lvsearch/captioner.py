"""Caption generation for long videos via a chunked prompt-template chain.

A video's transcript is split into fixed-size token chunks; each chunk is
summarized through a domain-specific prompt that also sees the running
summary, and a final merge prompt turns the accumulated chunk summaries into
one caption. The text-generation client is pluggable; the default is a
deterministic extractive stub so the whole pipeline runs offline.
"""

from __future__ import annotations

import json
import logging
import os
import re
import urllib.request
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Protocol

from .corpus import Domain, VideoRecord, assemble_channel_text

logger = logging.getLogger(__name__)

ROLE_CHUNK = "chunk_summary"
ROLE_MERGE = "merge"
ROLES = (ROLE_CHUNK, ROLE_MERGE)

KNOWN_PLACEHOLDERS = {"transcript_chunk", "prior_summary", "course_or_channel"}
_PLACEHOLDER_RE = re.compile(r"\{([a-z_]+)\}")

DEFAULT_MAX_CHUNK_TOKENS = 3000

AuditSink = Callable[[dict[str, str]], None]


class TemplateError(ValueError):
    """Bad template definition or unbound placeholder at render time."""


class CaptionError(RuntimeError):
    """Caption generation failed (empty transcript, client failure, bad chain)."""


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    domain: Domain
    role: str
    template_text: str

    def __post_init__(self) -> None:
        if not isinstance(self.domain, Domain):
            object.__setattr__(self, "domain", Domain(self.domain))
        if self.role not in ROLES:
            raise TemplateError(f"template {self.id!r}: role {self.role!r} not one of {ROLES}")
        unknown = self.placeholders() - KNOWN_PLACEHOLDERS
        if unknown:
            raise TemplateError(
                f"template {self.id!r} references unknown placeholders {sorted(unknown)}"
            )

    def placeholders(self) -> set[str]:
        return set(_PLACEHOLDER_RE.findall(self.template_text))


@dataclass(frozen=True)
class PromptChain:
    domain: Domain
    chunk_template: PromptTemplate
    merge_template: PromptTemplate
    max_chunk_tokens: int = DEFAULT_MAX_CHUNK_TOKENS

    def __post_init__(self) -> None:
        if self.max_chunk_tokens < 1:
            raise ValueError(f"max_chunk_tokens must be >= 1, got {self.max_chunk_tokens}")
        if self.chunk_template.role != ROLE_CHUNK:
            raise TemplateError("chunk_template must have role chunk_summary")
        if self.merge_template.role != ROLE_MERGE:
            raise TemplateError("merge_template must have role merge")
        if not (self.chunk_template.domain == self.merge_template.domain == self.domain):
            raise TemplateError("chain templates must share the chain's domain")


class GenerationClient(Protocol):
    def complete(self, prompt: str) -> str: ...


class ExtractiveStubClient:
    """Deterministic offline client: first sentence of the prompt's final block.

    Prompts built from the shipped templates put their payload (the chunk, or
    the accumulated summaries) in the last blank-line-separated block.
    """

    def __init__(self, max_words: int = 30):
        self.max_words = max_words
        self.calls: list[str] = []

    def complete(self, prompt: str) -> str:
        self.calls.append(prompt)
        blocks = [b.strip() for b in prompt.split("\n\n") if b.strip()]
        payload = blocks[-1] if blocks else ""
        match = re.search(r"(.+?[.!?])(?:\s|$)", payload)
        sentence = match.group(1) if match else payload
        words = sentence.split()
        return " ".join(words[: self.max_words])


class HttpGenerationClient:
    """Minimal external-service client; endpoint and credentials from environment.

    POSTs ``{"prompt": ...}`` to ``LVSEARCH_LLM_ENDPOINT`` with an optional
    bearer token from ``LVSEARCH_LLM_API_KEY`` and expects ``{"text": ...}``.
    """

    def __init__(self, endpoint: str | None = None, api_key: str | None = None, timeout_s: float = 60.0):
        self.endpoint = endpoint or os.environ.get("LVSEARCH_LLM_ENDPOINT", "")
        self.api_key = api_key or os.environ.get("LVSEARCH_LLM_API_KEY")
        self.timeout_s = timeout_s
        if not self.endpoint:
            raise CaptionError("no generation endpoint configured (LVSEARCH_LLM_ENDPOINT)")

    def complete(self, prompt: str) -> str:
        body = json.dumps({"prompt": prompt}).encode("utf-8")
        request = urllib.request.Request(
            self.endpoint, data=body, headers={"Content-Type": "application/json"}
        )
        if self.api_key:
            request.add_header("Authorization", f"Bearer {self.api_key}")
        with urllib.request.urlopen(request, timeout=self.timeout_s) as response:
            payload = json.loads(response.read().decode("utf-8"))
        return payload["text"]


def chunk_transcript(tokens: list[str], max_chunk_tokens: int) -> list[list[str]]:
    """Consecutive chunks of at most ``max_chunk_tokens``; concatenation is lossless.

    All chunks except possibly the last are exactly ``max_chunk_tokens`` long.
    """
    if max_chunk_tokens < 1:
        raise ValueError(f"max_chunk_tokens must be >= 1, got {max_chunk_tokens}")
    if not tokens:
        raise ValueError("token list is empty")
    return [tokens[i : i + max_chunk_tokens] for i in range(0, len(tokens), max_chunk_tokens)]


def render_prompt(template: PromptTemplate, bindings: dict[str, str]) -> str:
    """Substitute placeholders exactly once; no residual markers remain."""
    referenced = template.placeholders()
    missing = referenced - bindings.keys()
    if missing:
        raise TemplateError(
            f"template {template.id!r}: unbound placeholder {sorted(missing)[0]!r}"
        )
    extra = bindings.keys() - referenced
    if extra:
        logger.warning(
            "template %s ignores bindings %s", template.id, sorted(extra)
        )
    return _PLACEHOLDER_RE.sub(lambda m: bindings[m.group(1)], template.template_text)


def generate_caption(
    video: VideoRecord,
    chain: PromptChain,
    client: GenerationClient,
    audit: AuditSink | None = None,
) -> str:
    """One caption for one video: k chunk calls plus one merge call.

    The running summary is threaded into every chunk prompt; the merge prompt
    sees all accumulated chunk summaries.
    """
    if chain.domain != video.domain:
        raise CaptionError(
            f"{video.video_id}: domain {video.domain.value} does not match "
            f"chain domain {chain.domain.value}"
        )
    words = assemble_channel_text(video, "transcript").split()
    if not words:
        raise CaptionError(f"{video.video_id}: transcript is empty")
    chunks = chunk_transcript(words, chain.max_chunk_tokens)
    summaries: list[str] = []
    running = ""
    for i, chunk in enumerate(chunks):
        prompt = render_prompt(
            chain.chunk_template,
            {
                "transcript_chunk": " ".join(chunk),
                "prior_summary": running,
                "course_or_channel": video.title,
            },
        )
        try:
            summary = client.complete(prompt)
        except Exception as exc:
            raise CaptionError(f"{video.video_id}: generation failed on chunk {i}: {exc}") from exc
        if audit is not None:
            audit({
                "template_id": chain.chunk_template.id,
                "prompt": prompt,
                "response": summary,
            })
        summaries.append(summary)
        running = summary
    merge_prompt = render_prompt(
        chain.merge_template,
        {"prior_summary": " ".join(summaries), "course_or_channel": video.title},
    )
    try:
        caption = client.complete(merge_prompt)
    except Exception as exc:
        raise CaptionError(f"{video.video_id}: merge generation failed: {exc}") from exc
    if audit is not None:
        audit({
            "template_id": chain.merge_template.id,
            "prompt": merge_prompt,
            "response": caption,
        })
    return caption


def _template_from_dict(data: dict) -> PromptTemplate:
    try:
        return PromptTemplate(
            id=data["id"],
            domain=Domain(data["domain"]),
            role=data["role"],
            template_text=data["template_text"],
        )
    except KeyError as exc:
        raise TemplateError(f"template file missing field {exc.args[0]!r}") from exc


def load_templates(directory: str | Path | None = None) -> dict[tuple[Domain, str], PromptTemplate]:
    """Load ``*.json`` templates from a directory, or the shipped defaults."""
    templates: dict[tuple[Domain, str], PromptTemplate] = {}
    if directory is None:
        root = resources.files("lvsearch").joinpath("templates")
        entries = [p for p in root.iterdir() if p.name.endswith(".json")]
        raw = [json.loads(p.read_text(encoding="utf-8")) for p in sorted(entries, key=lambda p: p.name)]
    else:
        paths = sorted(Path(directory).glob("*.json"))
        if not paths:
            raise TemplateError(f"no *.json templates found in {directory}")
        raw = [json.loads(p.read_text(encoding="utf-8")) for p in paths]
    for data in raw:
        template = _template_from_dict(data)
        templates[(template.domain, template.role)] = template
    return templates


def default_chain(
    domain: Domain,
    templates: dict[tuple[Domain, str], PromptTemplate] | None = None,
    max_chunk_tokens: int = DEFAULT_MAX_CHUNK_TOKENS,
) -> PromptChain:
    loaded = templates if templates is not None else load_templates()
    try:
        chunk = loaded[(domain, ROLE_CHUNK)]
        merge = loaded[(domain, ROLE_MERGE)]
    except KeyError:
        raise TemplateError(f"no template pair for domain {domain.value!r}") from None
    return PromptChain(
        domain=domain, chunk_template=chunk, merge_template=merge,
        max_chunk_tokens=max_chunk_tokens,
    )
