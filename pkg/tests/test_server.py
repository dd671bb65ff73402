"""HTTP facade: endpoint contracts, determinism, error mapping, budget."""

import math

import pytest
from fastapi.testclient import TestClient

from telefid.calio import SynthProfile, synth_snapshot
from telefid.server import create_app


@pytest.fixture(scope="module")
def client():
    snapshot = synth_snapshot(SynthProfile("grid", (3, 3), "balanced", seed=5))
    return TestClient(create_app(snapshot, budget=200))


class TestSnapshotEndpoint:
    def test_graph_and_summary(self, client):
        resp = client.get("/api/snapshot")
        assert resp.status_code == 200
        body = resp.json()
        assert body["snapshot_id"].startswith("synthetic-grid")
        assert len(body["graph"]["nodes"]) == 9
        assert len(body["graph"]["edges"]) == 12
        assert "t1_us" in body["qubits"]["0"]

    def test_unknown_route_404(self, client):
        assert client.get("/api/nonsense").status_code == 404


class TestFilterEndpoint:
    def test_admit_all_echoes_full_graph(self, client):
        resp = client.post("/api/filter", json={"thresholds": {}})
        body = resp.json()
        assert body["edge_count"] == 12
        assert body["path_count"] == len(body["paths"]) > 0

    def test_tightening_never_grows(self, client):
        loose = client.post("/api/filter", json={"thresholds": {"ero_max": 0.05}}).json()
        tight = client.post(
            "/api/filter", json={"thresholds": {"ero_max": 0.05, "e2q_max": 0.005}}
        ).json()
        assert tight["edge_count"] <= loose["edge_count"]
        assert tight["path_count"] <= loose["path_count"]


class TestRunEndpoint:
    def test_noiseless_run(self, client):
        resp = client.post("/api/run", json={"theta": 1.2, "phi": 0.4, "ns": 0.0})
        body = resp.json()
        assert body["fidelity"] == pytest.approx(1.0, abs=1e-9)
        assert body["accept"] == pytest.approx(1.0, abs=1e-9)

    def test_explicit_layout(self, client):
        paths = client.post("/api/filter", json={}).json()["paths"]
        resp = client.post(
            "/api/run",
            json={"theta": math.pi / 2, "layout": paths[0], "ns": 1.0},
        )
        assert resp.status_code == 200
        assert 0.5 < resp.json()["fidelity"] < 1.0

    def test_bad_layout_maps_to_error_code(self, client):
        resp = client.post(
            "/api/run", json={"theta": 1.0, "layout": [0, 8, 4], "ns": 1.0}
        )
        assert resp.status_code == 400
        assert resp.json()["error"] == "edge_not_in_snapshot"

    def test_bad_mode_rejected(self, client):
        resp = client.post("/api/run", json={"theta": 1.0, "mode": "imaginary"})
        assert resp.status_code == 400
        assert resp.json()["error"] == "invalid_request"


class TestDeterminism:
    def test_identical_posts_identical_bodies(self, client):
        payload = {"theta": 0.8, "phi": 0.2, "ns": 1.0}
        first = client.post("/api/waterfall", json=payload)
        second = client.post("/api/waterfall", json=payload)
        assert first.content == second.content

    def test_run_idempotent(self, client):
        payload = {"theta": 2.0, "phi": 4.0, "mode": "encoded", "ns": 1.5}
        bodies = {client.post("/api/run", json=payload).content for _ in range(3)}
        assert len(bodies) == 1


class TestWaterfallEndpoint:
    def test_report_fields(self, client):
        resp = client.post("/api/waterfall", json={"theta": math.pi / 2})
        body = resp.json()
        assert body["f_baseline"] <= body["f_after_l2"] <= body["f_after_l3"]
        assert body["delta_l2"] + body["delta_l3"] == pytest.approx(body["total"], abs=1e-12)
        assert body["optimal_pulse"]["sx"] == "drag"


class TestCascadeEndpoint:
    def test_monotone_rows(self, client):
        stages = [
            {},
            {"ero_max": 0.05},
            {"ero_max": 0.05, "e2q_max": 0.006},
        ]
        resp = client.post("/api/cascade", json={"theta": math.pi / 2, "stages": stages})
        rows = resp.json()["rows"]
        counts = [r["path_count"] for r in rows]
        assert counts == sorted(counts, reverse=True)


class TestSweepEndpoint:
    def test_rows_and_acceptance(self, client):
        resp = client.post(
            "/api/sweep",
            json={"preps": [{"theta": math.pi}], "scales": [0.5, 1.0]},
        )
        rows = resp.json()["rows"]
        assert len(rows) == 2
        assert rows[0]["accept"] > rows[1]["accept"]

    def test_budget_413(self, client):
        resp = client.post(
            "/api/sweep",
            json={
                "preps": [{"theta": 0.1 * i} for i in range(30)],
                "scales": [0.1 * i for i in range(10)],
            },
        )
        assert resp.status_code == 413
        assert resp.json()["error"] == "budget_exceeded"
