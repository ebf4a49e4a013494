"""HTTP API: endpoint contracts, error envelopes, snapshot-swap semantics."""

import json
import threading

import pytest
from fastapi.testclient import TestClient

from crashboard import emit
from crashboard.config import AppConfig
from crashboard.service import SnapshotHolder, create_app
from crashboard.synth import calibrated_spec, simple_spec, write_dataset

from conftest import (
    boundaries_geojson_text,
    build_synth_snapshot,
    crash,
    crash_csv_text,
    hundred_row_fixture,
    snapshot_from,
    square_boundary,
)


@pytest.fixture
def empty_client():
    return TestClient(create_app(AppConfig()))


@pytest.fixture
def loaded():
    """App + holder with a synthetic snapshot already published."""
    holder = SnapshotHolder()
    snapshot = build_synth_snapshot(simple_spec(seed=55, n_crashes=400, tribal_fraction=0.4))
    holder.publish(snapshot)
    app = create_app(AppConfig(admin_token="sekrit"), holder)
    return TestClient(app), holder, snapshot


class TestSnapshotEndpoint:
    def test_503_before_ingest(self, empty_client):
        response = empty_client.get("/api/v1/snapshot")
        assert response.status_code == 503
        assert response.json()["code"] == "no_snapshot"

    def test_info_fields(self, loaded):
        client, _, snapshot = loaded
        body = client.get("/api/v1/snapshot").json()
        assert body["snapshot_id"] == snapshot.snapshot_id
        assert body["record_count"] == 400
        assert body["tribal_count"] <= body["record_count"]

    def test_byte_identical_between_calls(self, loaded):
        client, _, _ = loaded
        assert client.get("/api/v1/snapshot").content == client.get("/api/v1/snapshot").content

    def test_hundred_row_fixture_record_count(self, tmp_path):
        crash_path = tmp_path / "crashes.csv"
        crash_path.write_text(crash_csv_text(hundred_row_fixture()))
        boundaries_path = tmp_path / "b.geojson"
        boundaries_path.write_text(
            boundaries_geojson_text([square_boundary("T1", "Tribe One", 0, 0)])
        )
        holder = SnapshotHolder()
        holder.load_files(str(crash_path), None, str(boundaries_path))
        client = TestClient(create_app(AppConfig(), holder))
        assert client.get("/api/v1/snapshot").json()["record_count"] == 97


class TestBoundariesEndpoint:
    def test_geojson_with_snapshot_id(self, loaded):
        client, _, snapshot = loaded
        body = client.get("/api/v1/boundaries").json()
        assert body["type"] == "FeatureCollection"
        assert body["snapshot_id"] == snapshot.snapshot_id
        assert len(body["features"]) == len(snapshot.boundaries)
        ids = [f["properties"]["tribe_id"] for f in body["features"]]
        assert ids == list(snapshot.tribe_ids())
        ring = body["features"][0]["geometry"]["coordinates"][0]
        assert ring[0] == ring[-1]


class TestSummary:
    def test_matches_library(self, loaded):
        client, _, snapshot = loaded
        body = client.get("/api/v1/summary", params={"scope": "tribal"}).json()
        assert body == json.loads(json.dumps(emit.build_summary(snapshot, scope="tribal")))

    def test_unknown_tribe_id_400(self, loaded):
        client, _, _ = loaded
        response = client.get("/api/v1/summary", params={"tribe_id": "unknown-tribe"})
        assert response.status_code == 400
        assert response.json()["param"] == "tribe_id"

    def test_bad_severity_group_400(self, loaded):
        client, _, _ = loaded
        response = client.get("/api/v1/summary", params={"severity_group": "XY"})
        assert response.status_code == 400
        assert response.json()["param"] == "severity_group"

    def test_inverted_years_400(self, loaded):
        client, _, _ = loaded
        response = client.get(
            "/api/v1/summary", params={"year_from": "2021", "year_to": "2019"}
        )
        assert response.status_code == 400

    def test_table_marginal_seed(self):
        # tribal severity layout: 465 KAB of 3396 -> rate 13.7
        records = []
        for j in range(3396):
            codes = ("A",) if j < 108 else (("B",) if j < 465 else ("O",))
            records.append(crash(f"m{j}", severity_persons=codes, tribal_code="T1"))
        snapshot = snapshot_from(records, [square_boundary("T1", "Tribe One", 0, 0)])
        holder = SnapshotHolder()
        holder.publish(snapshot)
        client = TestClient(create_app(AppConfig(), holder))
        body = client.get("/api/v1/summary", params={"scope": "tribal"}).json()
        assert body["kab_rate"] == pytest.approx(13.7, abs=0.05)


class TestRankingsEndpoint:
    def test_matches_library(self, loaded):
        client, _, snapshot = loaded
        body = client.get("/api/v1/tribes/rankings").json()
        assert body == json.loads(json.dumps(emit.build_rankings(snapshot)))

    def test_empty_snapshot_empty_rows(self):
        holder = SnapshotHolder()
        holder.publish(snapshot_from([], []))
        client = TestClient(create_app(AppConfig(), holder))
        assert client.get("/api/v1/tribes/rankings").json()["rows"] == []


class TestBreakdownAndCrashTypes:
    def test_breakdown_matches_library(self, loaded):
        client, _, snapshot = loaded
        for dimension in ("sex", "age_group", "key_factor", "road_category", "road"):
            body = client.get(
                "/api/v1/breakdown", params={"dimension": dimension, "scope": "tribal"}
            ).json()
            if dimension == "road":
                want = emit.build_road_table(snapshot, scope="tribal")
            else:
                want = emit.build_breakdown(snapshot, dimension, scope="tribal")
            assert body == json.loads(json.dumps(want))

    def test_bad_dimension_400(self, loaded):
        client, _, _ = loaded
        response = client.get("/api/v1/breakdown", params={"dimension": "hair_color"})
        assert response.status_code == 400
        assert response.json()["param"] == "dimension"

    def test_crash_types_sorted(self, loaded):
        client, _, _ = loaded
        body = client.get("/api/v1/crash-types", params={"weight": "kab", "n": 10}).json()
        percents = [row["tribal_percent"] for row in body["rows"]]
        assert percents == sorted(percents, reverse=True)
        assert len(body["rows"]) <= 10

    def test_crash_types_matches_library(self, loaded):
        client, _, snapshot = loaded
        body = client.get("/api/v1/crash-types", params={"weight": "kab", "n": 5}).json()
        assert body == json.loads(json.dumps(emit.build_crash_types(snapshot, n=5, weight="kab")))


class TestHotspotsEndpoint:
    def test_uniformish_data_returns_featurecollection(self, loaded):
        client, _, _ = loaded
        body = client.get("/api/v1/hotspots", params={"cell": "0.5", "radius": "1"}).json()
        assert body["type"] == "FeatureCollection"
        assert body["cell_size"] == 0.5

    def test_bad_cell_400(self, loaded):
        client, _, _ = loaded
        response = client.get("/api/v1/hotspots", params={"cell": "-1"})
        assert response.status_code == 400
        assert response.json()["param"] == "cell"


class TestCrashesEndpoint:
    def test_empty_bbox_zero_points(self, loaded):
        client, _, _ = loaded
        body = client.get("/api/v1/crashes", params={"bbox": "0,0,0.0001,0.0001"}).json()
        assert body["points"] == []

    def test_pagination_walks_everything(self, loaded):
        client, _, snapshot = loaded
        seen = []
        cursor = None
        while True:
            params = {"limit": "37"}
            if cursor:
                params["cursor"] = cursor
            body = client.get("/api/v1/crashes", params=params).json()
            seen.extend(p["id"] for p in body["points"])
            cursor = body["next_cursor"]
            if cursor is None:
                break
        located = [r.crash_id for r in snapshot.records if r.location is not None]
        assert seen == located

    def test_stale_cursor_rejected(self, loaded):
        client, _, _ = loaded
        response = client.get("/api/v1/crashes", params={"cursor": "snap-9999-zz:0"})
        assert response.status_code == 400
        assert response.json()["code"] == "stale_cursor"


class TestAdminReload:
    def make_files(self, tmp_path, seed, name):
        out = tmp_path / name
        out.mkdir()
        write_dataset(
            simple_spec(seed=seed, n_crashes=60, tribal_fraction=0.3),
            out / "crashes.csv", out / "persons.csv", out / "boundaries.geojson",
        )
        return out

    def test_requires_token(self, loaded, tmp_path):
        client, _, _ = loaded
        response = client.post("/api/v1/admin/reload", json={})
        assert response.status_code == 401

    def test_reload_swaps_snapshot(self, loaded, tmp_path):
        client, _, old = loaded
        files = self.make_files(tmp_path, 60, "x")
        response = client.post(
            "/api/v1/admin/reload",
            headers={"X-Admin-Token": "sekrit"},
            json={
                "crash_csv_path": str(files / "crashes.csv"),
                "persons_csv_path": str(files / "persons.csv"),
                "boundaries_path": str(files / "boundaries.geojson"),
            },
        )
        assert response.status_code == 200
        assert response.json()["snapshot_id"] != old.snapshot_id
        assert client.get("/api/v1/snapshot").json()["record_count"] == 60

    def test_failed_reload_keeps_old_snapshot(self, loaded):
        client, _, old = loaded
        response = client.post(
            "/api/v1/admin/reload",
            headers={"X-Admin-Token": "sekrit"},
            json={"crash_csv_path": "/no/such/file.csv", "boundaries_path": "/none.geojson"},
        )
        assert response.status_code == 422
        assert response.json()["code"] == "ingest_failed"
        assert client.get("/api/v1/snapshot").json()["snapshot_id"] == old.snapshot_id


class TestSnapshotSwapConsistency:
    def test_concurrent_queries_never_mix_snapshots(self, tmp_path):
        """Flip-flop reloads while readers hammer /summary; every response
        must be internally consistent with exactly one fixture."""
        fixtures = {}
        for seed, name in ((1, "a"), (2, "b")):
            out = tmp_path / name
            out.mkdir()
            write_dataset(
                simple_spec(seed=seed, n_crashes=40 + seed * 17, tribal_fraction=0.4),
                out / "crashes.csv", out / "persons.csv", out / "boundaries.geojson",
            )
            fixtures[name] = out

        holder = SnapshotHolder()
        app = create_app(AppConfig(admin_token="tok"), holder)
        admin = TestClient(app)

        def reload_fixture(name):
            files = fixtures[name]
            response = admin.post(
                "/api/v1/admin/reload",
                headers={"X-Admin-Token": "tok"},
                json={
                    "crash_csv_path": str(files / "crashes.csv"),
                    "persons_csv_path": str(files / "persons.csv"),
                    "boundaries_path": str(files / "boundaries.geojson"),
                },
            )
            assert response.status_code == 200
            return response.json()

        info = reload_fixture("a")
        valid_pairs = {}  # snapshot_id -> (record_count, tribal_count)
        valid_pairs[info["snapshot_id"]] = (info["record_count"], info["tribal_count"])

        errors = []
        responses = []
        lock = threading.Lock()

        def worker():
            client = TestClient(app)
            for _ in range(25):
                body = client.get("/api/v1/summary").json()
                info_body = client.get("/api/v1/snapshot").json()
                with lock:
                    responses.append((body["snapshot_id"], body["total"]))
                    responses.append(
                        (info_body["snapshot_id"], info_body["record_count"])
                    )

        threads = [threading.Thread(target=worker) for _ in range(8)]
        for t in threads:
            t.start()
        for i in range(10):
            info = reload_fixture("a" if i % 2 else "b")
            valid_pairs[info["snapshot_id"]] = (info["record_count"], info["tribal_count"])
        for t in threads:
            t.join()

        assert len(responses) == 8 * 25 * 2
        for snapshot_id, total in responses:
            assert snapshot_id in valid_pairs, f"unknown snapshot {snapshot_id}"
            assert total == valid_pairs[snapshot_id][0], (
                f"mixed response: {snapshot_id} with total {total}"
            )
        if errors:
            raise AssertionError(errors)


class TestRandomizedLibraryEquivalence:
    def test_api_equals_library_for_many_param_sets(self, loaded):
        import random

        client, _, snapshot = loaded
        rng = random.Random(2024)
        tribe_ids = snapshot.tribe_ids()
        from crashboard.filters import QueryFilter
        from crashboard.records import SeverityGroup, UrbanRural

        for _ in range(40):
            params = {}
            kwargs = {}
            if rng.random() < 0.5:
                params["scope"] = "tribal"
            if rng.random() < 0.3:
                params["tribe_id"] = rng.choice(tribe_ids)
                params["scope"] = "tribal"
            if rng.random() < 0.4:
                group = rng.choice(["KA", "KAB", "ALL"])
                params["severity_group"] = group
                kwargs["severity_group"] = SeverityGroup(group)
            if rng.random() < 0.3:
                area = rng.choice(["urban", "rural"])
                params["urban_rural"] = area
                kwargs["urban_rural"] = UrbanRural(area)
            if rng.random() < 0.3:
                cls = rng.choice(["highway", "non_highway"])
                params["road_class"] = cls
                kwargs["road_class"] = cls
            filters = QueryFilter(**kwargs)
            scope = params.get("scope", "statewide")
            tribe_id = params.get("tribe_id")

            body = client.get("/api/v1/summary", params=params).json()
            want = emit.build_summary(snapshot, scope=scope, tribe_id=tribe_id, filters=filters)
            assert body == json.loads(json.dumps(want)), params
