#!/usr/bin/env python3
"""Capture canned API responses for the front-end test suite.

Replays the exact requests the UI issues during the smoke tests against an
in-process service instance and freezes the responses. Request keys use the
same stable stringify as the TypeScript mock transport.

Run from anywhere with the setxtab package installed:
    python3 frontend/scripts/make_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient
from setxtab.service import create_app

OUT = Path(__file__).resolve().parent.parent / "fixtures" / "s1.json"

DEFAULT_CONFIG = {
    "counting": "item",
    "cap_a": None,
    "cap_b": None,
    "collapsed_a": [],
    "collapsed_b": [],
    "show_empty_a": True,
    "show_empty_b": True,
    "transform": "raw",
    "color_scale": "neutral",
}


def stable(value) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def main() -> None:
    client = TestClient(create_app())
    fixtures = {}

    def record(method: str, path: str, body=None):
        key = f"{method} {path} {stable(body if body is not None else None)}"
        if method == "GET":
            response = client.get(path)
        else:
            response = client.post(path, json=body)
        assert response.status_code in (200, 201), (path, response.status_code, response.text)
        fixtures[key] = response.json()
        return fixtures[key]

    generate_body = {"variant": "S1", "n": 2000, "seed": 7}
    handle = record("POST", "/generate", generate_body)
    ds = handle["id"]

    record("GET", "/datasets")
    record("POST", f"/datasets/{ds}/aggregate", {"config": DEFAULT_CONFIG})

    collapsed = dict(DEFAULT_CONFIG, collapsed_a=["a1"])
    record("POST", f"/datasets/{ds}/aggregate", {"config": collapsed})

    record(
        "POST",
        f"/datasets/{ds}/brush",
        {"brush": {"type": "heatmap", "a": "a1", "b": "b1"}, "config": DEFAULT_CONFIG},
    )
    record(
        "POST",
        f"/datasets/{ds}/combinations",
        {"cell": {"col": "a1", "row": "b1", "k": 1, "l": 1}, "config": DEFAULT_CONFIG},
    )
    record(
        "POST",
        f"/datasets/{ds}/detail",
        {"selection": {"a": "a1", "b": "b1", "config": DEFAULT_CONFIG}},
    )

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({"dataset": ds, "fixtures": fixtures}, indent=1, sort_keys=True))
    print(f"wrote {OUT} ({len(fixtures)} fixtures)")


if __name__ == "__main__":
    main()
