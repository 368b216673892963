"""HTTP API: session flow, optimistic concurrency, durability, classify."""

import json

import pytest
from fastapi.testclient import TestClient

from claimsect.service import create_app

from test_annotation import build_inputs


@pytest.fixture()
def env(tmp_path):
    tax_path, scores_path, dataset_path = build_inputs(tmp_path)
    data_dir = tmp_path / "data"
    app = create_app(data_dir)
    client = TestClient(app)
    return {
        "client": client,
        "data_dir": data_dir,
        "taxonomy": str(tax_path),
        "scores": str(scores_path),
        "dataset": str(dataset_path),
        "tmp": tmp_path,
    }


def create_campaign(env, campaign_id="camp", **extra):
    return env["client"].post(
        "/campaigns",
        json={
            "campaign_id": campaign_id,
            "taxonomy_path": env["taxonomy"],
            "scores_path": env["scores"],
            "dataset_path": env["dataset"],
            **extra,
        },
    )


class TestHealthAndCreate:
    def test_healthz(self, env):
        resp = env["client"].get("/healthz")
        assert resp.status_code == 200
        assert resp.json()["format"] == "claimsect/v1"

    def test_create_campaign(self, env):
        resp = create_campaign(env)
        assert resp.status_code == 201
        assert resp.json()["campaign_id"] == "camp"
        assert (env["data_dir"] / "campaigns" / "camp" / "campaign.json").exists()

    def test_duplicate_campaign_409(self, env):
        assert create_campaign(env).status_code == 201
        assert create_campaign(env).status_code == 409

    def test_mismatched_scores_422_names_columns(self, env, tmp_path):
        bad_scores = tmp_path / "bad_scores.jsonl"
        bad_scores.write_text(
            json.dumps({"score_kind": "entailment", "range": [0, 1]})
            + "\n"
            + json.dumps({"doc_id": "d1", "claim_id": "other", "score": 0.5})
            + "\n"
        )
        resp = env["client"].post(
            "/campaigns",
            json={
                "campaign_id": "bad",
                "taxonomy_path": env["taxonomy"],
                "scores_path": str(bad_scores),
            },
        )
        assert resp.status_code == 422
        assert "c1" in resp.json()["detail"]

    def test_missing_file_422(self, env):
        resp = env["client"].post(
            "/campaigns",
            json={
                "campaign_id": "nofile",
                "taxonomy_path": "/nonexistent.json",
                "scores_path": env["scores"],
            },
        )
        assert resp.status_code == 422

    def test_list_campaigns(self, env):
        create_campaign(env, "a")
        create_campaign(env, "b")
        assert env["client"].get("/campaigns").json()["campaigns"] == ["a", "b"]


class TestSessionFlow:
    def test_next_is_idempotent_until_post(self, env):
        create_campaign(env)
        first = env["client"].get("/campaigns/camp/sessions/c1/next").json()
        second = env["client"].get("/campaigns/camp/sessions/c1/next").json()
        assert first["doc_id"] == second["doc_id"]
        assert first["version"] == second["version"]
        assert not first["done"]
        assert first["claim_text"] == "claim one"
        assert first["doc_text"].startswith("text ")
        assert len(first["summary"]["posterior"]["x"]) <= 101

    def test_post_advances_and_changes_item(self, env):
        create_campaign(env)
        client = env["client"]
        item = client.get("/campaigns/camp/sessions/c1/next").json()
        resp = client.post(
            "/campaigns/camp/sessions/c1/annotations",
            json={"doc_id": item["doc_id"], "entails": True, "version": item["version"]},
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["annotations_used"] == 1
        assert body["version"] == item["version"] + 1
        after = client.get("/campaigns/camp/sessions/c1/next").json()
        assert after["done"] or after["doc_id"] != item["doc_id"]

    def test_stale_version_409_state_unchanged(self, env):
        create_campaign(env)
        client = env["client"]
        item = client.get("/campaigns/camp/sessions/c1/next").json()
        ok = client.post(
            "/campaigns/camp/sessions/c1/annotations",
            json={"doc_id": item["doc_id"], "entails": True, "version": item["version"]},
        )
        assert ok.status_code == 200
        dup = client.post(
            "/campaigns/camp/sessions/c1/annotations",
            json={"doc_id": item["doc_id"], "entails": True, "version": item["version"]},
        )
        assert dup.status_code == 409
        assert (
            client.get("/campaigns/camp/sessions/c1/next").json()["version"]
            == ok.json()["version"]
        )

    def test_wrong_doc_422(self, env):
        create_campaign(env)
        client = env["client"]
        item = client.get("/campaigns/camp/sessions/c1/next").json()
        resp = client.post(
            "/campaigns/camp/sessions/c1/annotations",
            json={"doc_id": "not_the_item", "entails": True, "version": item["version"]},
        )
        assert resp.status_code == 422

    def test_unknown_claim_404(self, env):
        create_campaign(env)
        assert env["client"].get("/campaigns/camp/sessions/zz/next").status_code == 404

    def test_completed_session_410_and_done_payload(self, env):
        create_campaign(env, config={"max_annotations": 2})
        client = env["client"]
        for _ in range(2):
            item = client.get("/campaigns/camp/sessions/c1/next").json()
            client.post(
                "/campaigns/camp/sessions/c1/annotations",
                json={
                    "doc_id": item["doc_id"],
                    "entails": True,
                    "version": item["version"],
                },
            )
        done = client.get("/campaigns/camp/sessions/c1/next").json()
        assert done["done"]
        assert done["report"]["status"] == "capped"
        resp = client.post(
            "/campaigns/camp/sessions/c1/annotations",
            json={"doc_id": "x", "entails": True, "version": 99},
        )
        assert resp.status_code == 410

    def test_undo_rewinds(self, env):
        create_campaign(env)
        client = env["client"]
        item = client.get("/campaigns/camp/sessions/c1/next").json()
        posted = client.post(
            "/campaigns/camp/sessions/c1/annotations",
            json={"doc_id": item["doc_id"], "entails": False, "version": item["version"]},
        ).json()
        assert posted["annotations_used"] == 1
        undone = client.post("/campaigns/camp/undo/c1").json()
        assert undone["annotations_used"] == 0
        assert undone["version"] == posted["version"] + 1
        again = client.get("/campaigns/camp/sessions/c1/next").json()
        assert again["doc_id"] == item["doc_id"]

    def test_undo_fresh_session_409(self, env):
        create_campaign(env)
        assert env["client"].post("/campaigns/camp/undo/c1").status_code == 409


class TestDurability:
    def test_restart_replays_to_last_acknowledged(self, env):
        create_campaign(env)
        client = env["client"]
        answers = []
        for _ in range(5):
            item = client.get("/campaigns/camp/sessions/c1/next").json()
            if item["done"]:
                break
            answers.append(item["doc_id"])
            client.post(
                "/campaigns/camp/sessions/c1/annotations",
                json={"doc_id": item["doc_id"], "entails": True, "version": item["version"]},
            )
        before = client.get("/campaigns/camp/sessions/c1/next").json()

        fresh_app = create_app(env["data_dir"])
        fresh = TestClient(fresh_app)
        after = fresh.get("/campaigns/camp/sessions/c1/next").json()
        assert after["done"] == before["done"]
        if not after["done"]:
            assert after["doc_id"] == before["doc_id"]
            assert after["summary"]["median"] == before["summary"]["median"]
            assert after["summary"]["annotations_used"] == before["summary"]["annotations_used"]


class TestDashboardAndReports:
    def test_campaign_summary_statuses(self, env):
        create_campaign(env)
        client = env["client"]
        body = client.get("/campaigns/camp").json()
        assert {c["claim_id"] for c in body["claims"]} == {"c1", "c2"}
        assert all(c["status"] == "pending" for c in body["claims"])
        item = client.get("/campaigns/camp/sessions/c1/next").json()
        client.post(
            "/campaigns/camp/sessions/c1/annotations",
            json={"doc_id": item["doc_id"], "entails": True, "version": item["version"]},
        )
        body = client.get("/campaigns/camp").json()
        by_id = {c["claim_id"]: c for c in body["claims"]}
        assert by_id["c1"]["status"] == "running"
        assert by_id["c1"]["annotations_used"] == 1
        assert by_id["c2"]["status"] == "pending"

    def test_reports_route(self, env):
        create_campaign(env)
        body = env["client"].get("/campaigns/camp/reports").json()
        assert len(body["reports"]) == 2
        assert body["format"] == "claimsect/v1"

    def test_missing_campaign_404(self, env):
        assert env["client"].get("/campaigns/ghost").status_code == 404


class TestClassifyRoute:
    def test_zero_shot_classify(self, env):
        resp = env["client"].post(
            "/classify",
            json={
                "taxonomy_path": env["taxonomy"],
                "scores_path": env["scores"],
                "zero_shot": True,
            },
        )
        assert resp.status_code == 200
        preds = resp.json()["predictions"]
        assert len(preds) == 80
        assert all("classes" in p for p in preds)

    def test_classify_with_thresholds(self, env):
        resp = env["client"].post(
            "/classify",
            json={
                "taxonomy_path": env["taxonomy"],
                "scores_path": env["scores"],
                "thresholds": {"c1": 0.55, "c2": 0.4},
            },
        )
        assert resp.status_code == 200

    def test_classify_requires_threshold_source(self, env):
        resp = env["client"].post(
            "/classify",
            json={"taxonomy_path": env["taxonomy"], "scores_path": env["scores"]},
        )
        assert resp.status_code == 422
