"""Default English stopword list and stopword-file loading.

The embedded list is the classic English function-word inventory plus the
contraction stems ("don", "isn", "t", ...) that survive alphanumeric
tokenization. An external file (one word per line, ``#`` comments) can
replace it wherever a :class:`~lvsearch.textprep.PrepConfig` is built.
"""

from __future__ import annotations

from pathlib import Path

DEFAULT_STOPWORDS: frozenset[str] = frozenset(
    """
    i me my myself we our ours ourselves you your yours yourself yourselves
    he him his himself she her hers herself it its itself they them their
    theirs themselves what which who whom this that these those am is are
    was were be been being have has had having do does did doing a an the
    and but if or because as until while of at by for with about against
    between into through during before after above below to from up down
    in out on off over under again further then once here there when where
    why how all any both each few more most other some such no nor not only
    own same so than too very s t can will just don should now d ll m o re
    ve y ain aren couldn didn doesn hadn hasn haven isn ma mightn mustn
    needn shan shouldn wasn weren won wouldn
    """.split()
)


def load_stopword_file(path: str | Path) -> frozenset[str]:
    """Read a stopword file: UTF-8, one token per line, ``#`` starts a comment."""
    words: set[str] = set()
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            words.add(line.casefold())
    return frozenset(words)
