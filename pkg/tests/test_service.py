"""HTTP API: map CRUD, live sessions, assessments, error-code contract."""

from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from hymap import dsl
from hymap.corpus import case_d, case_d_script, case_g
from hymap.elicitation import ElicitationSession
from hymap.service import build_app


@pytest.fixture()
def client(tmp_path):
    app = build_app(storage_dir=tmp_path / "storage")
    with TestClient(app) as c:
        yield c


def create_case_d(client) -> str:
    body = {"dsl": dsl.serialize(case_d().map)}
    response = client.post("/maps", json=body)
    assert response.status_code == 200
    return response.json()["id"]


class SessionDriver:
    def __init__(self, client, title=""):
        self.client = client
        created = client.post("/sessions", json={"title": title})
        assert created.status_code == 200
        data = created.json()
        self.id = data["session_id"]
        self.headers = {"Authorization": f"Bearer {data['token']}"}
        self.prompt = data["prompt"]

    def answer(self, payload, expect=200):
        response = self.client.post(
            f"/sessions/{self.id}/answer",
            json={"prompt_id": self.prompt["id"], "payload": payload},
            headers=self.headers,
        )
        assert response.status_code == expect, response.text
        if expect == 200:
            self.prompt = response.json()["prompt"]
        return response

    def finish(self):
        response = self.client.post(f"/sessions/{self.id}/finish", headers=self.headers)
        assert response.status_code == 200, response.text
        return response.json()


class TestMaps:
    def test_create_get_put(self, client):
        map_id = create_case_d(client)
        fetched = client.get(f"/maps/{map_id}")
        assert fetched.status_code == 200
        assert len(fetched.json()["nodes"]) == 5

        edited = case_d().map
        edited.substitute_node(
            edited.find_nodes_by_label("network efficiency")[0].id,
            "network throughput")
        updated = client.put(f"/maps/{map_id}", json={"dsl": dsl.serialize(edited)})
        assert updated.status_code == 200
        labels = {n["label"] for n in updated.json()["nodes"]}
        assert "network throughput" in labels
        assert updated.json()["id"] == map_id

    def test_create_from_json_body(self, client):
        body = {"map": dsl.map_to_dict(case_g().map)}
        response = client.post("/maps", json=body)
        assert response.status_code == 200
        assert len(response.json()["map"]["edges"]) == 16

    def test_parse_error_is_400_with_diagnostics(self, client):
        response = client.post("/maps", json={"dsl": "product oops"})
        assert response.status_code == 400
        body = response.json()
        assert body["code"] == "ParseError"
        assert body["diagnostics"][0]["line"] == 1

    def test_unknown_map_is_404(self, client):
        assert client.get("/maps/ghost").status_code == 404

    def test_diagnostics_and_layout(self, client):
        map_id = create_case_d(client)
        diagnostics = client.get(f"/maps/{map_id}/diagnostics").json()
        assert diagnostics["diagnostics"] == []
        assert diagnostics["report"]["band_counts"]["problems"] == 4
        layout = client.get(f"/maps/{map_id}/layout").json()
        assert layout["band_count"] == 5

    def test_hypotheses_with_prioritized_flag(self, client):
        map_id = create_case_d(client)
        plain = client.get(f"/maps/{map_id}/hypotheses").json()["hypotheses"]
        assert len(plain) == 4
        ordered = client.get(
            f"/maps/{map_id}/hypotheses", params={"prioritized": 1}
        ).json()["hypotheses"]
        assert sorted(h["id"] for h in ordered) == sorted(h["id"] for h in plain)

    def test_persistence_across_restart(self, client, tmp_path):
        map_id = create_case_d(client)
        again = build_app(storage_dir=tmp_path / "storage")
        with TestClient(again) as second:
            fetched = second.get(f"/maps/{map_id}")
            assert fetched.status_code == 200


class TestAssessments:
    def test_assess_and_summary(self, client):
        map_id = create_case_d(client)
        hyp = client.get(f"/maps/{map_id}/hypotheses").json()["hypotheses"][0]
        response = client.post(f"/hypotheses/{hyp['id']}/assessment", json={
            "map_id": map_id,
            "status": "validated",
            "risk": "high",
            "evidence": [{"source": "own_experience", "note": "field interviews"}],
        })
        assert response.status_code == 200
        table = client.get(f"/maps/{map_id}/summary").json()["summary"]
        assert table["cells"]["value"]["validated"]["high"] == 1

    def test_validated_without_evidence_400(self, client):
        map_id = create_case_d(client)
        hyp = client.get(f"/maps/{map_id}/hypotheses").json()["hypotheses"][0]
        response = client.post(f"/hypotheses/{hyp['id']}/assessment", json={
            "map_id": map_id, "status": "validated", "risk": "high", "evidence": [],
        })
        assert response.status_code == 400
        assert response.json()["code"] == "ValidatedWithoutEvidence"

    def test_unknown_hypothesis_404(self, client):
        map_id = create_case_d(client)
        response = client.post("/hypotheses/hyp-ghost/assessment", json={
            "map_id": map_id, "status": "not_validated",
        })
        assert response.status_code == 404


class TestSessions:
    def test_first_prompt_is_the_naming_question(self, client):
        driver = SessionDriver(client)
        assert driver.prompt["text"] == "What is the product/solution name?"
        assert driver.prompt["shape"] == "text"

    def test_stale_prompt_is_409(self, client):
        driver = SessionDriver(client)
        first = driver.prompt
        driver.answer("NetFix")
        response = client.post(
            f"/sessions/{driver.id}/answer",
            json={"prompt_id": first["id"], "payload": "Other"},
            headers=driver.headers,
        )
        assert response.status_code == 409

    def test_answer_retry_is_idempotent(self, client):
        driver = SessionDriver(client)
        prompt_id = driver.prompt["id"]
        first = client.post(
            f"/sessions/{driver.id}/answer",
            json={"prompt_id": prompt_id, "payload": "NetFix"},
            headers=driver.headers)
        retry = client.post(
            f"/sessions/{driver.id}/answer",
            json={"prompt_id": prompt_id, "payload": "NetFix"},
            headers=driver.headers)
        assert first.status_code == retry.status_code == 200
        assert first.json() == retry.json()
        # same prompt id with a different payload is a conflict
        conflict = client.post(
            f"/sessions/{driver.id}/answer",
            json={"prompt_id": prompt_id, "payload": "Changed"},
            headers=driver.headers)
        assert conflict.status_code == 409

    def test_domain_error_keeps_session_usable(self, client):
        driver = SessionDriver(client)
        driver.answer("NetFix")
        driver.answer(["a", "a"], expect=400)  # duplicate customer labels
        driver.answer(["a", "b"])              # same prompt still answerable
        assert driver.prompt["phase"] == "aspects"

    def test_bad_token_401(self, client):
        driver = SessionDriver(client)
        response = client.get(f"/sessions/{driver.id}/prompt",
                              headers={"Authorization": "Bearer wrong"})
        assert response.status_code == 401

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/ghost/prompt").status_code == 404

    def test_expired_session_410(self, tmp_path):
        app = build_app(storage_dir=tmp_path / "s", session_ttl=-1)
        with TestClient(app) as client:
            driver = SessionDriver(client)
            response = client.get(f"/sessions/{driver.id}/prompt",
                                  headers=driver.headers)
            assert response.status_code == 410

    def test_finish_then_session_is_gone(self, client):
        driver = SessionDriver(client)
        for event in case_d_script()[1:]:
            if event["event"] == "answer":
                driver.answer(event["payload"])
        result = driver.finish()
        assert len(result["hypotheses"]) == 4
        response = client.get(f"/sessions/{driver.id}/prompt", headers=driver.headers)
        assert response.status_code == 410

    def test_http_replay_equals_cli_replay(self, client):
        events = case_d_script()
        session, cli_result = ElicitationSession.replay(events)

        driver = SessionDriver(client)
        for event in events[1:]:
            if event["event"] == "answer":
                driver.answer(event["payload"])
        http_result = driver.finish()

        http_map = dsl.map_from_dict(http_result["map"])
        assert http_map.structurally_equal(cli_result.map)
        assert [h["generated_text"] for h in http_result["hypotheses"]] == \
               [h.generated_text for h in cli_result.hypotheses]
        # the finished map is immediately queryable
        layout = client.get(f"/maps/{http_result['map_id']}/layout")
        assert layout.status_code == 200
