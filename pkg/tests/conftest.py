import pytest

from lvsearch.corpus import (
    Corpus,
    Domain,
    OcrFrame,
    OcrToken,
    TranscriptSegment,
    VideoRecord,
    save_corpus,
)


def make_video(
    video_id: str,
    transcript_text: str = "",
    ocr_texts: list[list[str]] | None = None,
    domain: Domain = Domain.EDUCATION,
    duration_s: float = 600.0,
    title: str = "",
    caption: str | None = None,
    confidence: float = 0.9,
) -> VideoRecord:
    """Build a video from plain strings; OCR frames land at t=0, 30, 60, ..."""
    segments = ()
    if transcript_text:
        segments = (TranscriptSegment(0.0, min(duration_s, 60.0), transcript_text),)
    frames = ()
    if ocr_texts:
        frames = tuple(
            OcrFrame(
                timestamp_s=30.0 * i,
                tokens=tuple(OcrToken(text, confidence) for text in texts),
            )
            for i, texts in enumerate(ocr_texts)
        )
    return VideoRecord(
        video_id=video_id,
        domain=domain,
        duration_s=duration_s,
        title=title or video_id,
        ocr_frames=frames,
        transcript=segments,
        reference_caption=caption,
    )


@pytest.fixture
def toy_corpus() -> Corpus:
    """Three transcript-only documents: apple apple banana / banana cherry / cherry x3."""
    return Corpus(
        videos=(
            make_video("d1", "apple apple banana"),
            make_video("d2", "banana cherry"),
            make_video("d3", "cherry cherry cherry"),
        )
    )


def build_sample_corpus() -> Corpus:
    """A 10-video corpus with distinctive content per video.

    Exactly one video mentions corona; one pair (mx1/mx2) is crafted so the
    OCR and transcript channels rank them in opposite orders for the query
    "budget economy".
    """
    videos = (
        make_video(
            "vid-agri",
            "today we discuss agricultural practices crop rotation and soil health "
            "farmers apply rotation schedules to preserve nutrients",
            ocr_texts=[["Agricultural", "Practices"], ["Crop", "Rotation"]],
            title="Sustainable farming lecture",
            caption="Lecture on agricultural practices and crop rotation.",
        ),
        make_video(
            "vid-cluster",
            "clustering lecture partition clustering and subspace clustering methods "
            "k means assigns points to the nearest centroid",
            ocr_texts=[["Clustering", "Algorithms"], ["K", "Means"]],
            title="Clustering algorithms",
            caption="Clustering methods from partitioning to subspace approaches.",
        ),
        make_video(
            "vid-chem",
            "chemical reactions release or absorb energy exothermic and endothermic "
            "examples balance the equation first",
            ocr_texts=[["Chemical", "Reactions"]],
            title="Chemistry basics",
        ),
        make_video(
            "vid-corona",
            "corona cases rise in several regions health officials urge vaccination",
            ocr_texts=[["Corona", "Update"], ["Vaccination", "Drive"]],
            domain=Domain.NEWS,
            title="Evening health bulletin",
            caption="Bulletin covering corona case numbers and vaccination.",
        ),
        make_video(
            "vid-tennis",
            "tennis match in dubai ends after a long tiebreak the champion advances",
            ocr_texts=[["Tennis", "Dubai"], ["Final", "Score"]],
            domain=Domain.NEWS,
            title="Sports roundup",
        ),
        make_video(
            "vid-mx1",
            "the national budget was discussed in parliament",
            ocr_texts=[["budget", "economy", "budget"], ["economy", "deficit"]],
            domain=Domain.NEWS,
            title="Budget on screen",
        ),
        make_video(
            "vid-mx2",
            "economy growth and the economy budget outlook economy analysts speak",
            ocr_texts=[["budget", "report"]],
            domain=Domain.NEWS,
            title="Economy talk show",
        ),
        make_video(
            "vid-space",
            "satellite launch succeeds the orbiter reaches its transfer orbit",
            ocr_texts=[["Satellite", "Launch"]],
            domain=Domain.NEWS,
            title="Space news special",
        ),
        make_video(
            "vid-algebra",
            "linear algebra lecture eigenvalues eigenvectors and diagonalization",
            ocr_texts=[["Eigenvalues"], ["Diagonalization"]],
            title="Linear algebra lecture",
        ),
        make_video(
            "vid-weather",
            "weather forecast heavy rainfall expected across coastal districts",
            ocr_texts=[["Weather", "Alert"]],
            domain=Domain.NEWS,
            title="Weather update",
        ),
    )
    return Corpus(videos=videos)


@pytest.fixture
def sample_corpus() -> Corpus:
    return build_sample_corpus()


@pytest.fixture
def sample_corpus_path(tmp_path, sample_corpus):
    path = tmp_path / "corpus.jsonl"
    save_corpus(sample_corpus, path)
    return path
