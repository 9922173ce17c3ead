"""End-to-end tests of the HTTP service against the in-process engine."""
from __future__ import annotations

import concurrent.futures
import io
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from oracles import scan_selection
from tunescope.dataset import load_csv
from tunescope.filtering import FilterState, aggregate_summary, explorer_summaries
from tunescope.sampling import choose_sample_size
from tunescope.search import exhaustive_best
from tunescope.service import ServiceConfig, create_app
from tunescope.stats import DEFAULT_CUTS
from tunescope import wire


def make_csv(rows: int = 60, seed: int = 0) -> bytes:
    rng = np.random.default_rng(seed)
    fs = ["ext2", "ext3", "ext4"]
    dev = ["hdd", "ssd"]
    lines = ["FS,Device,Throughput"]
    for _ in range(rows):
        f = rng.integers(len(fs))
        d = rng.integers(len(dev))
        value = float(100.0 + 10.0 * f + 5.0 * d + rng.normal(0, 1))
        lines.append(f"{fs[f]},{dev[d]},{value!r}")
    return ("\n".join(lines) + "\n").encode()


@pytest.fixture()
def client():
    with TestClient(create_app()) as c:
        yield c


@pytest.fixture()
def session(client):
    csv = make_csv()
    dataset_id = client.post(
        "/datasets", params={"target_column": "Throughput"}, content=csv
    ).json()["dataset_id"]
    doc = client.post("/sessions", json={"dataset_id": dataset_id}).json()
    return client, csv, dataset_id, doc


def wait_for_job(client, job_id: str, timeout: float = 10.0) -> dict:
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        body = client.get(f"/jobs/{job_id}").json()
        if body["status"] != "running":
            return body
        time.sleep(0.01)
    raise AssertionError("job did not settle in time")


class TestHealthAndDatasets:
    def test_health(self, client):
        assert client.get("/health").json() == {"status": "ok"}

    def test_upload_and_fetch_dataset(self, client):
        csv = make_csv()
        res = client.post("/datasets", params={"target_column": "Throughput"}, content=csv)
        assert res.status_code == 200
        body = res.json()
        assert body["target_name"] == "Throughput"
        assert body["row_count"] == 60
        names = [p["name"] for p in body["parameters"]]
        assert names == ["FS", "Device"]
        again = client.get(f"/datasets/{body['dataset_id']}").json()
        assert again == body

    def test_parameters_match_library_parse(self, client):
        csv = make_csv()
        body = client.post(
            "/datasets", params={"target_column": "Throughput"}, content=csv
        ).json()
        ds = load_csv(csv, "Throughput")
        assert body["parameters"] == [wire.wire_parameter(p) for p in ds.parameters]

    def test_empty_body_rejected(self, client):
        res = client.post("/datasets", params={"target_column": "t"}, content=b"")
        assert res.status_code == 400
        assert "empty" in res.json()["detail"]

    def test_bad_csv_rejected(self, client):
        res = client.post(
            "/datasets", params={"target_column": "t"}, content=b"a,t\nx,oops\n"
        )
        assert res.status_code == 400
        assert "non-numeric" in res.json()["detail"]

    def test_missing_target_column_param(self, client):
        assert client.post("/datasets", content=b"a,t\nx,1\n").status_code == 422

    def test_unknown_dataset_404(self, client):
        assert client.get("/datasets/nope").status_code == 404


class TestSessions:
    def test_create_session_document(self, session):
        client, csv, dataset_id, doc = session
        assert doc["dataset_id"] == dataset_id
        assert doc["target_name"] == "Throughput"
        assert doc["row_count"] == 60
        assert doc["sample_plan"]["reason"] == "full_small_dataset"
        assert doc["sample_plan"]["fraction"] == 1.0
        assert doc["sample_plan"]["sampled_rows"] == 60
        assert doc["sample_plan"]["ks"] is None
        assert doc["cuts"] == list(DEFAULT_CUTS)
        # Fresh filter: everything enabled and selected.
        for p in doc["filter"]["parameters"]:
            assert p["enabled"] is True
        assert len(doc["provenance"]) == 1
        first = doc["provenance"][0]
        assert first["stage"] == 1
        assert first["label"] == "dataset"
        ds = load_csv(csv, "Throughput")
        assert first["min"] == wire.wire_real(float(ds.target.min()))
        assert first["max"] == wire.wire_real(float(ds.target.max()))

    def test_get_session_round_trips(self, session):
        client, _, _, doc = session
        assert client.get(f"/sessions/{doc['session_id']}").json() == doc

    def test_unknown_dataset_rejected(self, client):
        assert client.post("/sessions", json={"dataset_id": "nope"}).status_code == 404

    def test_custom_cuts_flow_through(self, client):
        csv = make_csv()
        dataset_id = client.post(
            "/datasets", params={"target_column": "Throughput"}, content=csv
        ).json()["dataset_id"]
        doc = client.post(
            "/sessions", json={"dataset_id": dataset_id, "cuts": [10, 50, 90]}
        ).json()
        assert doc["cuts"] == [10.0, 50.0, 90.0]
        explorer = client.get(f"/sessions/{doc['session_id']}/explorer").json()
        stats = explorer["parameters"][0]["levels"][0]["stats"]
        assert stats["percentile_cuts"] == [10.0, 50.0, 90.0]

    def test_unknown_session_404(self, client):
        for path in ("", "/explorer", "/aggregate", "/provenance"):
            assert client.get(f"/sessions/nope{path}").status_code == 404


class TestExplorerAndAggregate:
    def test_explorer_matches_library(self, session):
        client, csv, _, doc = session
        ds = load_csv(csv, "Throughput")
        plan = choose_sample_size(ds, seed=0)
        expected = explorer_summaries(
            ds, FilterState.fresh(ds), plan.row_subset, DEFAULT_CUTS, 64
        )
        payload = client.get(f"/sessions/{doc['session_id']}/explorer").json()
        got = [
            level
            for group in payload["parameters"]
            for level in group["levels"]
        ]
        assert got == [wire.wire_rd_summary(s) for s in expected]
        assert payload["target_axis"]["min"] == wire.wire_real(float(ds.target.min()))
        assert payload["target_axis"]["max"] == wire.wire_real(float(ds.target.max()))

    def test_aggregate_matches_library(self, session):
        client, csv, _, doc = session
        ds = load_csv(csv, "Throughput")
        expected = wire.wire_aggregate(
            aggregate_summary(ds, FilterState.fresh(ds), None, DEFAULT_CUTS, 64)
        )
        got = client.get(f"/sessions/{doc['session_id']}/aggregate").json()
        assert got == expected


class TestFilterEndpoint:
    def test_filter_updates_everything(self, session):
        client, csv, _, doc = session
        sid = doc["session_id"]
        res = client.post(
            f"/sessions/{sid}/filter",
            json={"operations": [{"op": "set_levels", "parameter": "FS", "levels": ["ext4"]}]},
        )
        assert res.status_code == 200
        body = res.json()
        fs = next(p for p in body["filter"]["parameters"] if p["name"] == "FS")
        assert fs["selected_levels"] == ["ext4"]
        assert body["provenance_entry"]["stage"] == 2
        assert body["provenance_entry"]["label"] == "FS:ext4"

        ds = load_csv(csv, "Throughput")
        f = FilterState.fresh(ds).with_selection("FS", ("ext4",))
        rows = scan_selection(ds, f)
        assert body["aggregate"]["matched_rows"] == int(rows.sum())
        assert body["provenance_entry"]["min"] == wire.wire_real(float(ds.target[rows].min()))
        assert body["provenance_entry"]["max"] == wire.wire_real(float(ds.target[rows].max()))
        # The standalone endpoints agree with the mutation response.
        assert client.get(f"/sessions/{sid}/aggregate").json() == body["aggregate"]
        assert client.get(f"/sessions/{sid}/explorer").json() == body["explorer"]

    def test_custom_label(self, session):
        client, _, _, doc = session
        sid = doc["session_id"]
        body = client.post(
            f"/sessions/{sid}/filter",
            json={
                "operations": [{"op": "toggle_parameter", "parameter": "Device"}],
                "label": "ignore the device",
            },
        ).json()
        assert body["provenance_entry"]["label"] == "ignore the device"

    def test_bad_operation_leaves_session_unchanged(self, session):
        client, _, _, doc = session
        sid = doc["session_id"]
        before = client.get(f"/sessions/{sid}").json()
        res = client.post(
            f"/sessions/{sid}/filter",
            json={"operations": [{"op": "toggle_level", "parameter": "FS", "level": "zzz"}]},
        )
        assert res.status_code == 400
        assert client.get(f"/sessions/{sid}").json() == before

    def test_concurrent_filters_serialize(self, session):
        # Hammer one session from many threads; the provenance log must
        # come out as one consistent linear history.
        client, csv, _, doc = session
        sid = doc["session_id"]
        levels = ["ext2", "ext3", "ext4"]

        def flip(i: int):
            return client.post(
                f"/sessions/{sid}/filter",
                json={
                    "operations": [
                        {"op": "toggle_level", "parameter": "FS", "level": levels[i % 3]}
                    ],
                    "label": f"op-{i}",
                },
            )

        with concurrent.futures.ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(flip, range(12)))
        assert all(r.status_code == 200 for r in results)

        entries = client.get(f"/sessions/{sid}/provenance").json()["entries"]
        assert [e["stage"] for e in entries] == list(range(1, 14))
        labels = sorted(e["label"] for e in entries[1:])
        assert labels == sorted(f"op-{i}" for i in range(12))
        # Final filter equals the last recorded stage.
        final = client.get(f"/sessions/{sid}").json()["filter"]
        assert final == entries[-1]["filter"]
        # Every stage's bounds are recomputable from its own filter.
        ds = load_csv(csv, "Throughput")
        for e in entries:
            f = wire.parse_filter(e["filter"], ds)
            rows = scan_selection(ds, f)
            if rows.any():
                assert e["min"] == wire.wire_real(float(ds.target[rows].min()))
                assert e["max"] == wire.wire_real(float(ds.target[rows].max()))
            else:
                assert e["min"] is None and e["max"] is None


class TestRollback:
    def test_rollback_restores_filter(self, session):
        client, _, _, doc = session
        sid = doc["session_id"]
        client.post(
            f"/sessions/{sid}/filter",
            json={"operations": [{"op": "set_levels", "parameter": "FS", "levels": ["ext2"]}]},
        )
        client.post(
            f"/sessions/{sid}/filter",
            json={"operations": [{"op": "set_levels", "parameter": "Device", "levels": ["ssd"]}]},
        )
        body = client.post(f"/sessions/{sid}/rollback", json={"stage": 1}).json()
        assert body["provenance_entry"]["stage"] == 4
        assert body["provenance_entry"]["label"] == "rollback to stage 1"
        assert body["provenance_entry"]["replicated_from"] == 1
        for p in body["filter"]["parameters"]:
            assert p["enabled"] is True
        entries = client.get(f"/sessions/{sid}/provenance").json()["entries"]
        assert len(entries) == 4
        assert entries[3]["filter"] == entries[0]["filter"]
        # Explorer equals the fresh-session explorer again.
        assert body["explorer"] == client.get(f"/sessions/{sid}/explorer").json()

    def test_rollback_out_of_range(self, session):
        client, _, _, doc = session
        res = client.post(f"/sessions/{doc['session_id']}/rollback", json={"stage": 99})
        assert res.status_code == 400


class TestSearchJobs:
    def test_exhaustive_job(self, session):
        client, csv, _, doc = session
        sid = doc["session_id"]
        job_id = client.post(
            f"/sessions/{sid}/search",
            json={"algorithm": "exhaustive", "objective": "maximize_mean"},
        ).json()["job_id"]
        body = wait_for_job(client, job_id)
        assert body["status"] == "finished"
        ds = load_csv(csv, "Throughput")
        config, value = exhaustive_best(ds, "maximize_mean")
        assert body["trace"]["best_configuration"] == config
        assert body["trace"]["best_value"] == wire.wire_real(value)

    def test_simulated_annealing_job_records_steps(self, session):
        client, _, _, doc = session
        sid = doc["session_id"]
        job_id = client.post(
            f"/sessions/{sid}/search",
            json={
                "algorithm": "simulated_annealing",
                "objective": "maximize_mean",
                "budget": 25,
                "seed": 3,
            },
        ).json()["job_id"]
        body = wait_for_job(client, job_id)
        assert body["status"] == "finished"
        trace = body["trace"]
        assert len(trace["steps"]) == 25
        assert trace["total_evaluations"] == 25
        bests = [s["best_value"] for s in trace["steps"] if s["best_value"] is not None]
        assert bests == sorted(bests)
        assert trace["best_value"] == bests[-1]

    def test_random_job_deterministic_across_runs(self, session):
        client, _, _, doc = session
        sid = doc["session_id"]

        def run() -> dict:
            job_id = client.post(
                f"/sessions/{sid}/search",
                json={
                    "algorithm": "random",
                    "objective": "maximize_max",
                    "budget": 15,
                    "seed": 7,
                },
            ).json()["job_id"]
            return wait_for_job(client, job_id)["trace"]

        first, second = run(), run()
        assert first["steps"] == second["steps"]
        assert first["best_configuration"] == second["best_configuration"]

    def test_validation_errors(self, session):
        client, _, _, doc = session
        sid = doc["session_id"]
        bad = [
            {"algorithm": "exhaustive", "objective": "maximize_mode"},
            {"algorithm": "gradient", "objective": "maximize_mean"},
            {"algorithm": "random", "objective": "maximize_mean"},
            {"algorithm": "random", "objective": "maximize_mean", "budget": 0},
        ]
        for body in bad:
            assert client.post(f"/sessions/{sid}/search", json=body).status_code == 400

    def test_unknown_job_404(self, client):
        assert client.get("/jobs/nope").status_code == 404

    def test_failed_job_surfaces_error(self, client):
        # 4 parameters x 32 levels exceeds the exhaustive space cap.
        rng = np.random.default_rng(0)
        lines = ["a,b,c,d,t"]
        for i in range(200):
            cells = [f"L{rng.integers(32):02d}" for _ in range(4)]
            lines.append(",".join(cells) + f",{float(i)}")
        # Force all 32 levels to exist for every parameter.
        for j in range(32):
            lines.append(f"L{j:02d},L{j:02d},L{j:02d},L{j:02d},{float(j)}")
        csv = ("\n".join(lines) + "\n").encode()
        dataset_id = client.post(
            "/datasets", params={"target_column": "t"}, content=csv
        ).json()["dataset_id"]
        sid = client.post("/sessions", json={"dataset_id": dataset_id}).json()["session_id"]
        job_id = client.post(
            f"/sessions/{sid}/search",
            json={"algorithm": "exhaustive", "objective": "maximize_mean"},
        ).json()["job_id"]
        body = wait_for_job(client, job_id)
        assert body["status"] == "failed"
        assert "space" in body["error"]


class TestImportanceEndpoint:
    def test_scores_and_recovery(self, session):
        client, csv, _, doc = session
        body = client.post(
            f"/sessions/{doc['session_id']}/importance",
            json={"fractions": [0.5, 1.0], "repeats": 10, "seed": 0},
        ).json()
        assert body["parameters"] == ["FS", "Device"]
        assert body["ranking"][0] == "FS"
        assert [p["fraction"] for p in body["recovery"]] == [0.5, 1.0]
        full = next(p for p in body["recovery"] if p["fraction"] == 1.0)
        assert full["top1"] == 1.0

    def test_bad_fraction_rejected(self, session):
        client, _, _, doc = session
        res = client.post(
            f"/sessions/{doc['session_id']}/importance",
            json={"fractions": [2.0], "repeats": 2},
        )
        assert res.status_code == 400


class TestImportExport:
    def test_import_as_copy_restores_state(self, session):
        client, _, _, doc = session
        sid = doc["session_id"]
        client.post(
            f"/sessions/{sid}/filter",
            json={"operations": [{"op": "set_levels", "parameter": "FS", "levels": ["ext3"]}]},
        )
        client.post(f"/sessions/{sid}/rollback", json={"stage": 1})
        client.post(
            f"/sessions/{sid}/filter",
            json={"operations": [{"op": "toggle_parameter", "parameter": "Device"}]},
        )
        exported = client.get(f"/sessions/{sid}").json()

        restored = dict(exported, session_id="restored-copy")
        res = client.post("/sessions/import", json=restored)
        assert res.status_code == 200
        body = res.json()
        assert body["session_id"] == "restored-copy"
        assert body["filter"] == exported["filter"]
        assert body["provenance"] == exported["provenance"]
        assert body["sample_plan"] == exported["sample_plan"]
        # The restored session behaves like the original.
        a = client.get(f"/sessions/{sid}/explorer").json()
        b = client.get("/sessions/restored-copy/explorer").json()
        assert a == b

    def test_import_into_fresh_service(self, session):
        client, csv, _, doc = session
        sid = doc["session_id"]
        client.post(
            f"/sessions/{sid}/filter",
            json={"operations": [{"op": "set_levels", "parameter": "Device", "levels": ["hdd"]}]},
        )
        exported = client.get(f"/sessions/{sid}").json()

        with TestClient(create_app(ServiceConfig())) as other:
            new_dataset = other.post(
                "/datasets", params={"target_column": "Throughput"}, content=csv
            ).json()["dataset_id"]
            document = dict(exported, dataset_id=new_dataset)
            res = other.post("/sessions/import", json=document)
            assert res.status_code == 200
            restored = res.json()
            assert restored["filter"] == exported["filter"]
            got = other.get(f"/sessions/{sid}/aggregate").json()
            expected = client.get(f"/sessions/{sid}/aggregate").json()
            assert got == expected

    def test_duplicate_import_conflicts(self, session):
        client, _, _, doc = session
        exported = client.get(f"/sessions/{doc['session_id']}").json()
        assert client.post("/sessions/import", json=exported).status_code == 409

    def test_malformed_document_rejected(self, session):
        client, _, _, doc = session
        assert client.post("/sessions/import", json={"nope": 1}).status_code == 400
        exported = client.get(f"/sessions/{doc['session_id']}").json()
        broken = dict(exported, session_id="x", provenance=[{"stage": 5}])
        assert client.post("/sessions/import", json=broken).status_code == 400

    def test_import_unknown_dataset(self, session):
        client, _, _, doc = session
        exported = client.get(f"/sessions/{doc['session_id']}").json()
        doc2 = dict(exported, session_id="y", dataset_id="missing")
        assert client.post("/sessions/import", json=doc2).status_code == 404
