"""lvsearch: TF-IDF retrieval, evaluation, and captioning for long-form video text."""

from .baselines import (
    BaselineSpec,
    build_head_window_corpus,
    build_truncated_index,
    random_ranking,
    truncate_tokens,
)
from .captioner import (
    ExtractiveStubClient,
    PromptChain,
    PromptTemplate,
    chunk_transcript,
    default_chain,
    generate_caption,
    load_templates,
    render_prompt,
)
from .corpus import (
    Corpus,
    CorpusError,
    CorpusLoadError,
    Domain,
    OcrFrame,
    OcrToken,
    TranscriptSegment,
    VideoRecord,
    assemble_channel_text,
    dedup_frames,
    filter_ocr_tokens,
    load_corpus,
    sample_frame_timestamps,
    save_corpus,
)
from .evaluation import EvalCase, EvalReport, ReportRow, recall_at_k, run_benchmark
from .index import (
    ChannelIndex,
    IndexSnapshot,
    build_index,
    build_snapshot,
    compute_idf,
    deserialize_index,
    serialize_index,
    tf_weight,
)
from .retrieval import (
    IdentityTranslator,
    Query,
    RankedResult,
    StaticTranslator,
    fuse_scores,
    maybe_translate,
    score_channel,
    search,
)
from .textprep import PrepConfig, preprocess, tokenize

__version__ = "0.1.0"
