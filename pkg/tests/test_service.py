"""HTTP service: session lifecycle, error surfaces, schema-valid responses."""

import json

import jsonschema
import pytest
from fastapi.testclient import TestClient

from exmip.bench import bundled_fixture
from exmip.generators import wdp_to_cats
from exmip.fixtures import twin_optimum_wdp
from exmip.model import write_model
from exmip.service import MAX_BODY_BYTES, create_app

CATS_TOY = """\
goods 2
bids 3
0 5 0 #
1 4 1 #
2 8 0 1 #
"""


@pytest.fixture
def client(tmp_path):
    app = create_app(data_dir=str(tmp_path))
    return TestClient(app)


def _schema(name):
    with open(f"docs/schemas/{name}.schema.json", encoding="utf-8") as fh:
        return json.load(fh)


def _session(client, family, content, name="inst"):
    r = client.post("/instances", json={"family": family, "content": content, "name": name})
    assert r.status_code == 201, r.text
    return r.json()["session_id"]


def test_create_and_solve_cats(client):
    sid = _session(client, "cats", CATS_TOY)
    r = client.post(f"/sessions/{sid}/solve", json={})
    assert r.status_code == 200
    body = r.json()
    assert body["f_star"] == pytest.approx(9.0)
    assert body["solution"]["kind"] == "auction"
    winners = [row["bid"] for row in body["solution"]["rows"] if row["selected"]]
    assert winners == [0, 1]


def test_create_and_solve_psplib(client, demo_sm_text):
    sid = _session(client, "psplib", demo_sm_text)
    r = client.post(f"/sessions/{sid}/solve", json={})
    assert r.status_code == 200
    body = r.json()
    assert body["f_star"] == pytest.approx(5.0)
    rows = body["solution"]["rows"]
    assert {row["activity"] for row in rows} == {1, 2, 3, 4, 5}
    for row in rows:
        assert set(row) >= {"activity", "start", "completion", "predecessors", "resources"}


def test_parse_error_names_section(client):
    r = client.post("/instances", json={"family": "psplib", "content": "truncated"})
    assert r.status_code == 400
    assert r.json()["section"] == "jobs"


def test_unknown_family(client):
    r = client.post("/instances", json={"family": "sudoku", "content": "x"})
    assert r.status_code == 400


def test_payload_too_large(client):
    r = client.post(
        "/instances",
        content=json.dumps({"family": "cats", "content": "x" * (MAX_BODY_BYTES + 10)}),
    )
    assert r.status_code == 413


def test_infeasible_main_problem(client):
    from exmip.model import (
        Integrality, LinearExpr, MilpModel, Relation, TaggedConstraint, Variable,
    )

    model = MilpModel(
        (Variable(0, "x", 0.0, 1.0, Integrality.BINARY),),
        (
            TaggedConstraint("a", LinearExpr.from_terms([(0, 1.0)]), Relation.GE, 1.0),
            TaggedConstraint("b", LinearExpr.from_terms([(0, 1.0)]), Relation.LE, 0.0),
        ),
        LinearExpr.from_terms([(0, 1.0)]),
    )
    sid = _session(client, "canonical", write_model(model))
    r = client.post(f"/sessions/{sid}/solve", json={})
    assert r.status_code == 422
    assert "infeasible" in r.json()["message"]


def test_explain_flow_and_schemas(client):
    sid = _session(client, "cats", CATS_TOY)
    client.post(f"/sessions/{sid}/solve", json={})
    query = {"kind": "W1", "bid": 0}
    jsonschema.validate(query, _schema("query"))
    r = client.post(f"/sessions/{sid}/explain", json={"query": query, "algorithm": "deletion"})
    assert r.status_code == 200
    body = r.json()
    assert body["case"] == "suboptimality"
    jsonschema.validate(body["graph"], _schema("reason_graph"))
    jsonschema.validate(body["iis_report"], _schema("record"))
    assert body["iis_report"]["algorithm"] == "deletion"

    # history and artifact round trip
    h = client.get(f"/sessions/{sid}/history").json()
    assert len(h) == 1 and h[0]["query"] == query
    art = client.get(f"/artifacts/{body['artifact']}")
    assert art.status_code == 200
    verify = client.post(f"/artifacts/{body['artifact']}/verify")
    assert verify.status_code == 200
    assert verify.json()["valid"] is True


def test_explain_requires_solve(client):
    sid = _session(client, "cats", CATS_TOY)
    r = client.post(f"/sessions/{sid}/explain", json={"query": {"kind": "W1", "bid": 0}})
    assert r.status_code == 409


def test_explain_unknown_entity(client):
    sid = _session(client, "cats", CATS_TOY)
    client.post(f"/sessions/{sid}/solve", json={})
    r = client.post(f"/sessions/{sid}/explain", json={"query": {"kind": "W2", "bid": 99}})
    assert r.status_code == 400
    assert r.json()["error"] == "UnknownEntityError"


def test_alternate_optimum_notice(client):
    sid = _session(client, "cats", wdp_to_cats(twin_optimum_wdp()))
    solve = client.post(f"/sessions/{sid}/solve", json={}).json()
    winner = next(row["bid"] for row in solve["solution"]["rows"] if row["selected"] and row["price"] == 5)
    r = client.post(f"/sessions/{sid}/explain", json={"query": {"kind": "W1", "bid": winner}})
    assert r.status_code == 200  # optimality is an answer, not an error
    body = r.json()
    assert body["case"] == "optimality"
    jsonschema.validate(body["notice"], _schema("notice"))
    assert "graph" not in body


def test_history_ordering_and_empty(client):
    sid = _session(client, "cats", CATS_TOY)
    assert client.get(f"/sessions/{sid}/history").json() == []
    client.post(f"/sessions/{sid}/solve", json={})
    client.post(f"/sessions/{sid}/explain", json={"query": {"kind": "W1", "bid": 0}})
    client.post(f"/sessions/{sid}/explain", json={"query": {"kind": "W2", "bid": 2}})
    h = client.get(f"/sessions/{sid}/history").json()
    assert [e["index"] for e in h] == [0, 1]


def test_unknown_session_is_404(client):
    assert client.get("/sessions/nope").status_code == 404
    assert client.get("/sessions/nope/history").status_code == 404
    assert client.post("/sessions/nope/solve", json={}).status_code == 404


def test_explain_idempotent_modulo_timing(client):
    sid = _session(client, "cats", CATS_TOY)
    client.post(f"/sessions/{sid}/solve", json={})
    body = {"query": {"kind": "W2", "bid": 2}, "algorithm": "deletion"}
    a = client.post(f"/sessions/{sid}/explain", json=body).json()
    b = client.post(f"/sessions/{sid}/explain", json=body).json()
    assert a["graph"] == b["graph"]
    assert a["artifact"] != ""  # content-addressed
    assert a["iis_report"]["constraint_ids"] == b["iis_report"]["constraint_ids"]


def test_session_isolation(client):
    sid1 = _session(client, "cats", CATS_TOY, name="a")
    sid2 = _session(client, "cats", wdp_to_cats(twin_optimum_wdp()), name="b")
    client.post(f"/sessions/{sid1}/solve", json={})
    client.post(f"/sessions/{sid2}/solve", json={})
    client.post(f"/sessions/{sid1}/explain", json={"query": {"kind": "W1", "bid": 0}})
    assert client.get(f"/sessions/{sid1}/history").json() != []
    assert client.get(f"/sessions/{sid2}/history").json() == []


def test_persistence_across_restart(tmp_path):
    app1 = create_app(data_dir=str(tmp_path))
    c1 = TestClient(app1)
    sid = _session(c1, "cats", CATS_TOY)
    c1.post(f"/sessions/{sid}/solve", json={})
    c1.post(f"/sessions/{sid}/explain", json={"query": {"kind": "W1", "bid": 0}})

    app2 = create_app(data_dir=str(tmp_path))  # fresh process, same data dir
    c2 = TestClient(app2)
    r = c2.get(f"/sessions/{sid}")
    assert r.status_code == 200
    assert r.json()["status"] == "solved"
    h = c2.get(f"/sessions/{sid}/history").json()
    assert len(h) == 1
    # artifact is still re-auditable
    digest = h[0]["artifact"]
    assert c2.post(f"/artifacts/{digest}/verify").json()["valid"] is True


def test_solve_idempotent(client):
    sid = _session(client, "cats", CATS_TOY)
    a = client.post(f"/sessions/{sid}/solve", json={}).json()
    b = client.post(f"/sessions/{sid}/solve", json={}).json()
    assert a["f_star"] == b["f_star"]


def test_bundled_fixture_loads(client):
    sid = _session(client, "cats", bundled_fixture("regions0.cats"))
    r = client.post(f"/sessions/{sid}/solve", json={})
    assert r.status_code == 200
