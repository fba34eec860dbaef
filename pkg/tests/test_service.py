import json

import pytest
from fastapi.testclient import TestClient

from lvsearch.index import build_snapshot, read_index_header, serialize_index
from lvsearch.service import ServiceConfig, create_app, create_app_from_config, load_search_service


@pytest.fixture
def service_setup(tmp_path, sample_corpus, sample_corpus_path):
    index_path = tmp_path / "index.lvx"
    serialize_index(build_snapshot(sample_corpus), index_path)
    config = ServiceConfig(index_path=str(index_path), corpus_path=str(sample_corpus_path))
    return config, index_path


@pytest.fixture
def client(service_setup):
    config, _ = service_setup
    app = create_app_from_config(config)
    return TestClient(app)


class TestHealth:
    def test_ok_with_fingerprint(self, client, service_setup):
        _, index_path = service_setup
        response = client.get("/v1/health")
        assert response.status_code == 200
        body = response.json()
        assert body["status"] == "ok"
        assert body["n_videos"] == 10
        assert body["index_fingerprint"] == read_index_header(index_path)["checksum"]

    def test_503_before_snapshot_load(self):
        unloaded = TestClient(create_app(None))
        assert unloaded.get("/v1/health").status_code == 503
        assert unloaded.get("/v1/search", params={"q": "x"}).status_code == 503
        assert unloaded.get("/v1/videos/vid-agri").status_code == 503


class TestSearchEndpoint:
    def test_basic_search_contract(self, client):
        response = client.get("/v1/search", params={"q": "clustering", "channel": "transcript"})
        assert response.status_code == 200
        body = response.json()
        assert body["channel"] == "transcript"
        results = body["results"]
        assert 1 <= len(results) <= 10
        first = results[0]
        assert first["rank"] == 1
        assert first["video_id"] == "vid-cluster"
        assert first["title"] == "Clustering algorithms"
        assert first["score"] > 0
        assert "clustering" in first["matched_terms"]

    def test_corona_query_ranks_matching_video_first(self, client):
        response = client.get("/v1/search", params={"q": "corona"})
        assert response.status_code == 200
        assert response.json()["results"][0]["video_id"] == "vid-corona"

    def test_empty_query_is_400(self, client):
        assert client.get("/v1/search", params={"q": ""}).status_code == 400
        assert client.get("/v1/search").status_code == 400

    def test_punctuation_only_query_is_400(self, client):
        response = client.get("/v1/search", params={"q": ","})
        assert response.status_code == 400

    def test_stopword_only_query_is_400(self, client):
        assert client.get("/v1/search", params={"q": "the of and"}).status_code == 400

    def test_over_limit_top_k_is_400(self, client):
        response = client.get("/v1/search", params={"q": "corona", "top_k": "500"})
        assert response.status_code == 400
        assert client.get("/v1/search", params={"q": "corona", "top_k": "0"}).status_code == 400
        assert client.get("/v1/search", params={"q": "corona", "top_k": "ten"}).status_code == 400

    def test_bad_channel_is_400(self, client):
        response = client.get("/v1/search", params={"q": "corona", "channel": "video"})
        assert response.status_code == 400

    def test_bad_alpha_is_400(self, client):
        assert client.get("/v1/search", params={"q": "x", "alpha": "2"}).status_code == 400
        assert client.get("/v1/search", params={"q": "x", "alpha": "abc"}).status_code == 400

    def test_channel_toggle_changes_ranking(self, client):
        ocr = client.get("/v1/search", params={"q": "budget economy", "channel": "ocr"}).json()
        transcript = client.get(
            "/v1/search", params={"q": "budget economy", "channel": "transcript"}
        ).json()
        assert ocr["results"][0]["video_id"] != transcript["results"][0]["video_id"]

    def test_identical_requests_get_identical_bodies(self, client):
        a = client.get("/v1/search", params={"q": "budget economy", "channel": "fused"})
        b = client.get("/v1/search", params={"q": "budget economy", "channel": "fused"})
        assert a.content == b.content

    def test_matched_terms_subset_of_query_tokens(self, client):
        body = client.get("/v1/search", params={"q": "corona vaccination zebra"}).json()
        for hit in body["results"]:
            assert set(hit["matched_terms"]) <= {"corona", "vaccination", "zebra"}


class TestTranslatedSearch:
    def test_static_translator_routes_tagged_queries(self, tmp_path, service_setup):
        config, _ = service_setup
        mapping_path = tmp_path / "translations.json"
        mapping_path.write_text(
            json.dumps({"রাসায়নিক বিক্রিয়া": "chemical reactions"}), encoding="utf-8"
        )
        config.translator = f"static:{mapping_path}"
        client = TestClient(create_app_from_config(config))
        response = client.get(
            "/v1/search", params={"q": "রাসায়নিক বিক্রিয়া", "lang": "bn"}
        )
        assert response.status_code == 200
        body = response.json()
        assert body["effective_query"] == "chemical reactions"
        assert body["results"][0]["video_id"] == "vid-chem"


class TestVideoEndpoint:
    def test_known_video_returns_all_fields(self, client):
        response = client.get("/v1/videos/vid-agri")
        assert response.status_code == 200
        body = response.json()
        assert body["video_id"] == "vid-agri"
        assert body["domain"] == "education"
        assert body["duration_s"] == 600.0
        assert body["caption"].startswith("Lecture on agricultural")
        assert "Agricultural" in body["ocr_preview"]
        assert "crop rotation" in body["transcript_preview"]

    def test_unknown_video_is_404(self, client):
        assert client.get("/v1/videos/no-such-id").status_code == 404

    def test_video_without_caption_has_null_caption(self, client):
        body = client.get("/v1/videos/vid-tennis").json()
        assert body["caption"] is None

    def test_previews_truncated_to_config_length(self, service_setup):
        config, _ = service_setup
        config.preview_chars = 10
        client = TestClient(create_app_from_config(config))
        body = client.get("/v1/videos/vid-agri").json()
        assert len(body["transcript_preview"]) <= 10


class TestCors:
    def test_cors_headers_when_enabled(self, service_setup):
        config, _ = service_setup
        config.allow_cors = True
        client = TestClient(create_app_from_config(config))
        response = client.get("/v1/health", headers={"Origin": "http://localhost:5173"})
        assert response.headers.get("access-control-allow-origin") == "*"

    def test_no_cors_headers_by_default(self, client):
        response = client.get("/v1/health", headers={"Origin": "http://localhost:5173"})
        assert "access-control-allow-origin" not in response.headers


class TestStartupValidation:
    def test_mismatched_stopword_file_rejected(self, tmp_path, service_setup):
        config, _ = service_setup
        stopfile = tmp_path / "stop.txt"
        stopfile.write_text("zzzonlyword\n", encoding="utf-8")
        config.stopwords_path = str(stopfile)
        with pytest.raises(ValueError):
            load_search_service(config)
