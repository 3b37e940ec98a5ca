import json

import pytest
from fastapi.testclient import TestClient

from setxtab.service import create_app

FIG3_CSV = "Input,Output\nMusic;Family,Fun;Resp\nTraffic,Resp\nTraffic,Fun;Resp\n"


@pytest.fixture
def client():
    return TestClient(create_app())


def upload_fig3(client) -> str:
    response = client.post(
        "/datasets",
        json={
            "name": "fig3",
            "content": FIG3_CSV,
            "format": {
                "universe_a": ["Music", "Family", "Traffic"],
                "universe_b": ["Fun", "Resp", "Loud"],
            },
        },
    )
    assert response.status_code == 201
    return response.json()["id"]


class TestCatalogAndHandles:
    def test_route_table(self, client):
        body = client.get("/").json()
        paths = {(r["method"], r["path"]) for r in body["routes"]}
        assert ("POST", "/datasets/{id}/aggregate") in paths
        assert ("POST", "/generate") in paths

    def test_upload_and_list(self, client):
        ds = upload_fig3(client)
        listed = client.get("/datasets").json()["datasets"]
        assert [d["id"] for d in listed] == [ds]
        handle = client.get(f"/datasets/{ds}").json()
        assert handle["n"] == 3
        assert handle["universes"]["a"]["elements"] == ["Music", "Family", "Traffic"]

    def test_unknown_dataset_404(self, client):
        response = client.post("/datasets/ds-9999/aggregate", json={})
        assert response.status_code == 404
        assert response.json()["code"] == "UnknownDataset"

    def test_malformed_body_400(self, client):
        ds = upload_fig3(client)
        response = client.post(
            f"/datasets/{ds}/aggregate",
            content=b"{not json",
            headers={"content-type": "application/json"},
        )
        assert response.status_code == 400
        assert response.json()["code"] == "ParseError"


class TestAggregateEndpoint:
    def test_fig3_quarter(self, client):
        ds = upload_fig3(client)
        body = client.post(f"/datasets/{ds}/aggregate", json={"config": {}}).json()
        cells = {
            (c["col"], c["row"], c["k"], c["l"]): (c["num"], c["den"])
            for c in body["aggregate"]["cells"]
        }
        assert cells[("Music", "Fun", 1, 1)] == (1, 4)
        assert body["rank"] is None and body["deviation"] is None

    def test_invalid_cap_422(self, client):
        ds = upload_fig3(client)
        response = client.post(
            f"/datasets/{ds}/aggregate", json={"config": {"cap_a": 0}}
        )
        assert response.status_code == 422
        assert response.json()["code"] == "InvalidCap"

    def test_generate_s1_collapsed_diagonal_dominates(self, client):
        created = client.post("/generate", json={"variant": "S1", "n": 1000, "seed": 7})
        assert created.status_code == 201
        ds = created.json()["id"]
        config = {
            "collapsed_a": ["a1", "a2", "a3", "a4"],
            "collapsed_b": ["b1", "b2", "b3", "b4"],
        }
        body = client.post(f"/datasets/{ds}/aggregate", json={"config": config}).json()
        cells = {
            (c["col"], c["row"]): c["num"] / c["den"]
            for c in body["aggregate"]["cells"]
            if c["col"] and c["row"]
        }
        for i in range(1, 5):
            diag = cells[(f"a{i}", f"b{i}")]
            for j in range(1, 5):
                if j != i:
                    assert diag > cells[(f"a{j}", f"b{i}")]

    def test_transform_maps_included(self, client):
        ds = upload_fig3(client)
        ranked = client.post(
            f"/datasets/{ds}/aggregate", json={"config": {"transform": "rank-std"}}
        ).json()
        assert ranked["rank"]["mode"] == "standard"
        deviated = client.post(
            f"/datasets/{ds}/aggregate", json={"config": {"transform": "deviation"}}
        ).json()
        assert deviated["deviation"]["log_span"] >= 0.1

    def test_csv_content_negotiation(self, client):
        ds = upload_fig3(client)
        response = client.post(
            f"/datasets/{ds}/aggregate",
            json={"config": {}},
            headers={"accept": "text/csv"},
        )
        assert response.headers["content-type"].startswith("text/csv")
        assert response.text.startswith("col,row,k,l,num,den,value\n")

    def test_repeat_request_byte_identical(self, client):
        ds = upload_fig3(client)
        first = client.post(f"/datasets/{ds}/aggregate", json={"config": {}})
        second = client.post(f"/datasets/{ds}/aggregate", json={"config": {}})
        assert first.content == second.content


class TestDetailAndCombinations:
    def test_detail_endpoint(self, client):
        ds = upload_fig3(client)
        body = client.post(
            f"/datasets/{ds}/detail",
            json={"selection": {"a": "Traffic", "b": "Resp"}},
        ).json()
        by_key = {(c["k"], c["l"]): c for c in body["cells"]}
        assert by_key[(0, 1)]["item_count"] == 1
        assert by_key[(0, 1)]["hist_b"] == [1, 1, 0]

    def test_combinations_endpoint(self, client):
        ds = upload_fig3(client)
        body = client.post(
            f"/datasets/{ds}/combinations",
            json={"cell": {"col": "Traffic", "row": "Resp", "k": 0, "l": 1}},
        ).json()
        assert body["total"] == {"num": 1, "den": 2, "value": "0.5"}
        assert body["entries"] == [
            {"a": ["Traffic"], "b": ["Fun", "Resp"], "items": 1,
             "weight": {"num": 1, "den": 2, "value": "0.5"}}
        ]

    def test_invalid_selection_422(self, client):
        ds = upload_fig3(client)
        response = client.post(
            f"/datasets/{ds}/detail", json={"selection": {"a": "Nope", "b": "Resp"}}
        )
        assert response.status_code == 422


class TestBrushEndpoint:
    def test_true_brush_overlay_equals_base(self, client):
        ds = upload_fig3(client)
        brush = {"type": "items", "ids": [0, 1, 2]}
        body = client.post(
            f"/datasets/{ds}/brush", json={"brush": brush, "config": {}}
        ).json()
        assert body["brushed"] == body["base"]
        assert body["item_ids"] == [0, 1, 2]

    def test_heatmap_brush_ids(self, client):
        ds = upload_fig3(client)
        brush = {"type": "heatmap", "a": "Traffic", "b": "Resp"}
        body = client.post(
            f"/datasets/{ds}/brush", json={"brush": brush, "config": {}}
        ).json()
        assert body["item_ids"] == [1, 2]


class TestPersistence:
    def test_datasets_reload_from_directory(self, tmp_path):
        app = create_app(tmp_path)
        with TestClient(app) as client:
            ds = upload_fig3(client)
        fresh = TestClient(create_app(tmp_path))
        handle = fresh.get(f"/datasets/{ds}")
        assert handle.status_code == 200
        assert handle.json()["n"] == 3


class TestViewTransforms:
    def test_negation_parameter(self, client):
        ds = upload_fig3(client)
        body = client.post(
            f"/datasets/{ds}/aggregate",
            json={"config": {}, "negate_b": ["Resp"]},
        ).json()
        universe = body["aggregate"]["universes"]["b"]
        assert universe["negated"] == [False, True, False]
        # i2 had {Resp} alone: negating Resp empties it
        empty_marginal = [
            m for m in body["aggregate"]["marginal_b"] if m["element"] is None
        ]
        assert empty_marginal[0]["item_count"] == 1

    def test_negation_is_per_request(self, client):
        ds = upload_fig3(client)
        client.post(f"/datasets/{ds}/aggregate", json={"config": {}, "negate_b": ["Resp"]})
        plain = client.post(f"/datasets/{ds}/aggregate", json={"config": {}}).json()
        assert plain["aggregate"]["universes"]["b"]["negated"] == [False, False, False]

    def test_order_parameter_reorders_axes(self, client):
        ds = upload_fig3(client)
        body = client.post(
            f"/datasets/{ds}/aggregate",
            json={"config": {}, "order_a": ["Traffic", "Music", "Family"]},
        ).json()
        axis = [e["element"] for e in body["aggregate"]["axes"]["a"]]
        assert axis == [None, "Traffic", "Music", "Family"]
