"""Deterministic text normalization shared by indexing, querying and captioning.

Tokenization is intentionally simple and reproducible: NFC-normalize,
case-fold, and split on every maximal run of non-alphanumeric characters,
so "COVID-19" becomes ["covid", "19"]. No stemming or lemmatization.
"""

from __future__ import annotations

import hashlib
import json
import re
import unicodedata
from dataclasses import dataclass

from .stopwords import DEFAULT_STOPWORDS

# \w minus underscore: Unicode letters, digits and numeric characters.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class PrepConfig:
    stopwords: frozenset[str] = DEFAULT_STOPWORDS
    min_token_len: int = 1
    fold_case: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "stopwords", frozenset(self.stopwords))
        if self.min_token_len < 1:
            raise ValueError(f"min_token_len must be >= 1, got {self.min_token_len}")
        bad = sorted(w for w in self.stopwords if w != w.casefold())
        if bad:
            raise ValueError(f"stopwords must be lowercase; offending entries: {bad[:5]}")

    def fingerprint(self) -> str:
        payload = json.dumps(
            {
                "stopwords": sorted(self.stopwords),
                "min_token_len": self.min_token_len,
                "fold_case": self.fold_case,
            },
            sort_keys=True,
            separators=(",", ":"),
            ensure_ascii=True,
        )
        return hashlib.sha256(payload.encode("ascii")).hexdigest()


def tokenize(text: str, fold_case: bool = True) -> list[str]:
    """Split text into normalized tokens, preserving order.

    Composes the text (NFC), optionally case-folds it, and extracts maximal
    alphanumeric runs. Empty input yields an empty list.
    """
    text = unicodedata.normalize("NFC", text)
    if fold_case:
        text = text.casefold()
    return _TOKEN_RE.findall(text)


def preprocess(text: str, config: PrepConfig | None = None) -> list[str]:
    """Tokenize, then drop stopwords and tokens shorter than ``min_token_len``."""
    cfg = config if config is not None else PrepConfig()
    return [
        token
        for token in tokenize(text, cfg.fold_case)
        if len(token) >= cfg.min_token_len and token not in cfg.stopwords
    ]
