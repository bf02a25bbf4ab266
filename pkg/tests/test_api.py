from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from negotia_dm.api import create_app
from negotia_dm.service import SessionStore


@pytest.fixture()
def store():
    return SessionStore()


@pytest.fixture()
def client(store):
    return TestClient(create_app(store=store))


def _create(client, **body):
    response = client.post("/sessions", json=body or {})
    assert response.status_code == 201
    return response.json()


def test_create_session_returns_greeting(client):
    created = _create(client)
    assert created["session_id"]
    assert created["system_text"] == "What can I do for you?"
    assert created["state"]["constraints"] == {}
    assert created["state"]["ended"] is False


def test_create_session_with_fixture_override(client):
    created = _create(client, fixture="f2_large.jsonl")
    response = client.post(
        f"/sessions/{created['session_id']}/utterances",
        json={"text": "I need the phone number for Anna Andersson"},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["system_text"] == (
        "There are 4345 persons matching your description. Do you know the city?"
    )
    assert body["state"]["last_count"] == 4345


def test_utterance_flow_updates_state(client):
    created = _create(client, fixture="f2_large.jsonl")
    sid = created["session_id"]
    client.post(f"/sessions/{sid}/utterances", json={"text": "I need the phone number for Anna Andersson"})
    response = client.post(f"/sessions/{sid}/utterances", json={"text": "No"})
    body = response.json()
    assert body["system_text"] == "OK. Do you know the street name?"
    assert body["state"]["declined"] == ["person_city"]


def test_get_session_transcript(client):
    created = _create(client)
    sid = created["session_id"]
    client.post(f"/sessions/{sid}/utterances", json={"text": "hello"})
    response = client.get(f"/sessions/{sid}")
    assert response.status_code == 200
    body = response.json()
    assert body["session_id"] == sid
    assert [t["speaker"] for t in body["transcript"]] == ["U", "S"]
    assert body["transcript"][0]["text"] == "hello"


def test_delete_session(client):
    sid = _create(client)["session_id"]
    assert client.delete(f"/sessions/{sid}").status_code == 204
    assert client.get(f"/sessions/{sid}").status_code == 404


def test_unknown_session_404(client):
    assert client.get("/sessions/nope").status_code == 404
    assert client.post("/sessions/nope/utterances", json={"text": "hi"}).status_code == 404


def test_invalid_body_400(client):
    sid = _create(client)["session_id"]
    response = client.post(f"/sessions/{sid}/utterances", json={"message": "hi"})
    assert response.status_code == 400


def test_invalid_domain_400(client, tmp_path):
    bad = tmp_path / "broken.xml"
    bad.write_text("<domain name='D'></domain>", encoding="utf-8")
    response = client.post("/sessions", json={"domain": str(bad)})
    assert response.status_code == 400


def test_busy_session_409(client, store):
    sid = _create(client)["session_id"]
    session = store.get(sid)
    assert session.turn_lock.acquire(blocking=False)
    try:
        response = client.post(f"/sessions/{sid}/utterances", json={"text": "hello"})
        assert response.status_code == 409
    finally:
        session.turn_lock.release()


def test_api_and_repl_paths_produce_identical_texts(client):
    # The HTTP handlers and the CLI REPL share the session store code path;
    # the same utterance sequence must yield the same system texts.
    utterances = [
        "I want the number for Anna Andersson in Gothenburg",
        "How old are they?",
        "Hm, I think she is 42 years old.",
    ]
    sid = _create(client)["session_id"]
    via_api = [
        client.post(f"/sessions/{sid}/utterances", json={"text": text}).json()["system_text"]
        for text in utterances
    ]

    local = SessionStore()
    session = local.create_session()
    via_store = [local.post_utterance(session.id, text)[0] for text in utterances]
    assert via_api == via_store
