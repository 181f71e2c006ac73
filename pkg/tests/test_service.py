from __future__ import annotations

import json
import logging
import random
from decimal import Decimal

import pytest
from fastapi.testclient import TestClient

from qsa import load_builtin
from qsa.engine import (
    WeightVector,
    auto_select,
    compare_whatif,
    recommend,
    session_with,
)
from qsa.interchange import (
    gateway_to_doc,
    model_to_doc,
    recommendation_to_doc,
    selection_to_doc,
    whatif_to_doc,
)
from qsa.model import GatewayKind
from qsa.service import create_app

DOCUMENTED_ERROR_CODES = {
    "malformed-body",
    "unknown-area",
    "unknown-attribute",
    "negative-weight",
    "unknown-gateway",
    "unknown-branch",
    "arity-violation",
    "unvalidated-model",
    "too-large-to-enumerate",
}

QA_CHOICES = ("security", "performance", "scalability", "cost", "latency", "complexity")


@pytest.fixture(scope="module")
def client():
    app = create_app(post_origins=("http://localhost:5173",))
    with TestClient(app) as test_client:
        yield test_client


def random_answers(model, rng: random.Random) -> dict[str, list[str]]:
    """Walk the frontier with random choices until no questions remain."""
    session = session_with(model, {})
    answers: dict[str, list[str]] = {}
    while session.frontier:
        gateway = model.gateway_map[session.frontier[0]]
        labels = [b.label for b in gateway.branches]
        if gateway.kind is GatewayKind.EXCLUSIVE:
            chosen = [rng.choice(labels)]
        else:
            count = rng.randint(1, len(labels))
            chosen = sorted(rng.sample(labels, count))
        answers[gateway.id] = chosen
        session = session_with(model, {**session.answers, gateway.id: chosen})
        answers = {g: list(v) for g, v in session.answers.items()}
    return answers


def random_weights(rng: random.Random) -> dict[str, str]:
    return {
        qa: rng.choice(["0", "0.5", "1", "2", "3.25"])
        for qa in rng.sample(QA_CHOICES, rng.randint(0, 4))
    }


def get_error(response) -> dict:
    body = response.json()
    assert set(body) == {"error"}
    err = body["error"]
    assert set(err) == {"status", "code", "message"}
    assert err["status"] == response.status_code
    assert err["code"] in DOCUMENTED_ERROR_CODES
    return err


# --- reads -------------------------------------------------------------------


def test_list_areas(client, catalog):
    response = client.get("/v1/areas")
    assert response.status_code == 200
    rows = response.json()
    assert [r["area"] for r in rows] == list(catalog.areas)
    assert sum(r["patterns"] for r in rows) == 63
    assert response.headers["ETag"] == f'"{catalog.checksum}"'


def test_get_model_parity(client, catalog):
    for area in catalog.areas:
        response = client.get(f"/v1/areas/{area}/model")
        assert response.status_code == 200
        assert response.json() == model_to_doc(catalog.model(area))


def test_health(client, catalog):
    body = client.get("/v1/health").json()
    assert body == {
        "status": "ok",
        "checksum": catalog.checksum,
        "models": len(catalog.areas),
    }


def test_etag_304_on_every_get(client, catalog):
    for path in ("/v1/areas", "/v1/areas/communication/model", "/v1/health"):
        first = client.get(path)
        etag = first.headers["ETag"]
        assert etag == f'"{catalog.checksum}"'
        cached = client.get(path, headers={"If-None-Match": etag})
        assert cached.status_code == 304
        assert cached.headers["ETag"] == etag
        assert not cached.content
        weak = client.get(path, headers={"If-None-Match": f"W/{etag}"})
        assert weak.status_code == 304
        star = client.get(path, headers={"If-None-Match": "*"})
        assert star.status_code == 304
        listed = client.get(path, headers={"If-None-Match": f'"stale", {etag}'})
        assert listed.status_code == 304
        miss = client.get(path, headers={"If-None-Match": '"stale"'})
        assert miss.status_code == 200


def test_unknown_area_404_everywhere(client):
    err = get_error(client.get("/v1/areas/cooking/model"))
    assert err == {
        "status": 404,
        "code": "unknown-area",
        "message": err["message"],
    }
    for endpoint in ("next-questions", "recommend", "auto-select", "compare"):
        response = client.post(f"/v1/areas/cooking/{endpoint}", json={})
        assert response.status_code == 404
        assert get_error(response)["code"] == "unknown-area"


# --- posts: parity with the engine ------------------------------------------


def test_next_questions_parity(client, catalog):
    model = catalog.model("communication")
    rng = random.Random(7)
    for _ in range(20):
        answers = random_answers(model, rng)
        # Drop a random suffix of the walk so some questions stay open.
        kept = dict(list(answers.items())[: rng.randint(0, len(answers))])
        response = client.post(
            "/v1/areas/communication/next-questions", json={"answers": kept}
        )
        assert response.status_code == 200
        session = session_with(model, kept)
        expected = {"questions": [gateway_to_doc(g) for g in session.questions()]}
        assert response.json() == json.loads(json.dumps(expected))


def test_recommend_parity_randomized(client, catalog):
    rng = random.Random(11)
    for area in catalog.areas:
        model = catalog.model(area)
        for _ in range(8):
            answers = random_answers(model, rng)
            weights_raw = random_weights(rng)
            response = client.post(
                f"/v1/areas/{area}/recommend",
                json={"answers": answers, "weights": weights_raw},
            )
            assert response.status_code == 200
            weights = WeightVector.of(weights_raw)
            expected = recommend(model, answers, weights)
            assert response.json() == {
                "recommendations": [recommendation_to_doc(r) for r in expected]
            }


def test_recommend_k_limits_results(client):
    response = client.post(
        "/v1/areas/communication/recommend",
        json={"answers": {"g1-needs": ["unified-interface"]}, "weights": {}, "k": 1},
    )
    assert response.status_code == 200
    assert len(response.json()["recommendations"]) == 1


def test_auto_select_parity(client, catalog):
    rng = random.Random(13)
    for area in catalog.areas:
        model = catalog.model(area)
        weights_raw = random_weights(rng)
        response = client.post(
            f"/v1/areas/{area}/auto-select", json={"weights": weights_raw}
        )
        assert response.status_code == 200
        expected = selection_to_doc(auto_select(model, WeightVector.of(weights_raw)))
        assert response.json() == expected


def test_compare_parity(client, catalog):
    rng = random.Random(17)
    model = catalog.model("decomposition")
    for _ in range(10):
        answers = random_answers(model, rng)
        a, b = random_weights(rng), random_weights(rng)
        response = client.post(
            "/v1/areas/decomposition/compare",
            json={"answers": answers, "weights_a": a, "weights_b": b},
        )
        assert response.status_code == 200
        expected = whatif_to_doc(
            compare_whatif(model, answers, WeightVector.of(a), WeightVector.of(b))
        )
        assert response.json() == expected


def test_compare_equal_weights_empty_diff(client):
    response = client.post(
        "/v1/areas/communication/compare",
        json={
            "answers": {"g1-needs": ["secure-channels"]},
            "weights_a": {"security": "1"},
            "weights_b": {"security": "1"},
        },
    )
    body = response.json()
    assert body["score_deltas"] == []
    assert body["rank_moves"] == []
    assert body["flipped_pairs"] == []


def test_weights_parse_as_exact_decimals(client, catalog):
    # 0.1 + 0.2 must behave as decimal, not float: a pattern improving two
    # attributes weighted 0.1 and 0.2 scores exactly "0.3".
    model = catalog.model("communication")
    pattern = model.pattern_map["quantum-teleportation"]
    improved = pattern.improves()[:2]
    weights = {improved[0]: 0.1, improved[1]: 0.2}
    response = client.post(
        "/v1/areas/communication/recommend",
        json={"answers": {"g1-needs": ["state-transfer"]}, "weights": weights},
    )
    scores = {
        r["pattern"]: r["score"] for r in response.json()["recommendations"]
    }
    assert scores["quantum-teleportation"] == "0.3"


def test_statelessness_identical_replay(client):
    payload = {
        "answers": {"g1-needs": ["secure-channels", "path-management"]},
        "weights": {"security": "2", "cost": "0.5"},
    }
    first = client.post("/v1/areas/communication/recommend", json=payload)
    # Interleave unrelated traffic, then replay.
    client.post("/v1/areas/decomposition/auto-select", json={"weights": {"cost": "1"}})
    client.get("/v1/areas")
    second = client.post("/v1/areas/communication/recommend", json=payload)
    assert first.content == second.content


# --- error taxonomy ----------------------------------------------------------


def test_engine_errors_map_to_422(client):
    cases = [
        ({"answers": {}, "weights": {"velocity": "1"}}, "unknown-attribute"),
        ({"answers": {}, "weights": {"security": "-1"}}, "negative-weight"),
        ({"answers": {"nope": ["x"]}, "weights": {}}, "unknown-gateway"),
        ({"answers": {"g1-needs": ["nope"]}, "weights": {}}, "unknown-branch"),
        ({"answers": {"g3-scenario": ["point-to-point", "collective"]},
          "weights": {}}, "arity-violation"),
    ]
    for payload, code in cases:
        payload.setdefault("answers", {})
        response = client.post("/v1/areas/communication/recommend", json=payload)
        assert response.status_code == 422, (payload, response.json())
        err = get_error(response)
        assert err["code"] == code


def test_malformed_bodies_are_400(client):
    bad_bodies = [
        "{not json",
        json.dumps({"answers": "a string"}),
        json.dumps({"answers": {"g1-needs": "not-a-list"}}),
        json.dumps({"weights": {"security": "abc"}}),
        json.dumps({"answers": {}, "weights": {}, "k": 0}),
        json.dumps({"answers": {}, "weights": {}, "k": -3}),
        json.dumps({"answers": {}, "weights": {}, "k": "many"}),
        json.dumps([1, 2, 3]),
    ]
    for body in bad_bodies:
        response = client.post(
            "/v1/areas/communication/recommend",
            content=body,
            headers={"Content-Type": "application/json"},
        )
        assert response.status_code == 400, body
        assert get_error(response)["code"] == "malformed-body"


def test_malformed_fuzz_never_5xx(client):
    rng = random.Random(23)
    fragments = [
        "{", "}", "[", "]", '"answers"', '"weights"', ":", ",",
        '"g1-needs"', '"security"', '"-1"', "null", "true", "0.5", '"\\u0000"',
    ]
    endpoints = ("next-questions", "recommend", "auto-select", "compare")
    for _ in range(150):
        blob = "".join(rng.choice(fragments) for _ in range(rng.randint(0, 12)))
        endpoint = rng.choice(endpoints)
        response = client.post(
            f"/v1/areas/communication/{endpoint}",
            content=blob,
            headers={"Content-Type": "application/json"},
        )
        assert response.status_code in (200, 400, 404, 422), (endpoint, blob)
        if response.status_code != 200:
            get_error(response)  # envelope shape and closed code set


# --- CORS and logging --------------------------------------------------------


def test_cors_reads_open_to_any_origin(client):
    response = client.get("/v1/areas", headers={"Origin": "http://elsewhere.test"})
    assert response.headers["Access-Control-Allow-Origin"] == "*"


def test_cors_posts_restricted_to_allowlist(client):
    allowed = client.post(
        "/v1/areas/communication/recommend",
        json={"answers": {}, "weights": {}},
        headers={"Origin": "http://localhost:5173"},
    )
    assert allowed.headers["Access-Control-Allow-Origin"] == "http://localhost:5173"
    blocked = client.post(
        "/v1/areas/communication/recommend",
        json={"answers": {}, "weights": {}},
        headers={"Origin": "http://elsewhere.test"},
    )
    assert "Access-Control-Allow-Origin" not in blocked.headers


def test_cors_preflight(client):
    allowed = client.options(
        "/v1/areas/communication/recommend",
        headers={
            "Origin": "http://localhost:5173",
            "Access-Control-Request-Method": "POST",
        },
    )
    assert allowed.status_code == 204
    assert allowed.headers["Access-Control-Allow-Origin"] == "http://localhost:5173"
    assert "POST" in allowed.headers["Access-Control-Allow-Methods"]
    blocked = client.options(
        "/v1/areas/communication/recommend",
        headers={
            "Origin": "http://elsewhere.test",
            "Access-Control-Request-Method": "POST",
        },
    )
    assert blocked.status_code == 204
    assert "Access-Control-Allow-Origin" not in blocked.headers
    assert "Access-Control-Allow-Methods" not in blocked.headers


def test_no_origin_no_cors_headers(client):
    response = client.get("/v1/areas")
    assert "Access-Control-Allow-Origin" not in response.headers


def test_request_log_line(client, caplog):
    with caplog.at_level(logging.INFO, logger="qsa.service"):
        client.get("/v1/health")
    lines = [r.getMessage() for r in caplog.records if r.name == "qsa.service"]
    assert any(
        line.startswith("GET /v1/health 200 ") and line.endswith("ms")
        for line in lines
    )


def test_docs_endpoints_disabled(client):
    for path in ("/docs", "/redoc", "/openapi.json"):
        assert client.get(path).status_code == 404


def test_custom_catalog_app(tmp_path, catalog):
    import shutil
    from importlib import resources

    from qsa import load_dir

    assets = resources.files("qsa.catalog") / "assets"
    shutil.copy(str(assets / "decomposition.qdm"), tmp_path / "decomposition.qdm")
    app = create_app(load_dir(tmp_path))
    with TestClient(app) as small_client:
        rows = small_client.get("/v1/areas").json()
        assert [r["area"] for r in rows] == ["decomposition"]
        assert small_client.get("/v1/areas/communication/model").status_code == 404
