#!/usr/bin/env python3
"""Capture real API payloads as frontend test fixtures."""

from __future__ import annotations

import json
import pathlib

from fastapi.testclient import TestClient

from heisenbn.api import create_app

ROOT = pathlib.Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "src" / "heisenbn" / "data" / "fixtures"
OUT = ROOT / "frontend" / "tests" / "fixtures"


def scenario_body(name: str) -> dict:
    doc = json.loads((FIXTURES / name).read_text("utf-8"))
    doc.pop("format_version")
    return doc


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)

    def write(name: str, payload) -> None:
        (OUT / name).write_text(json.dumps(payload, indent=2) + "\n", "utf-8")
        print(f"wrote frontend/tests/fixtures/{name}")

    with TestClient(create_app()) as client:
        scen_a = scenario_body("scenario_a.json")
        sid = client.post("/sessions", json={"scenario": scen_a}).json()["session_id"]
        write("session_create.json",
              {"session_id": sid, "kind": "scenario", "version": 0})
        write("session_info.json", client.get(f"/sessions/{sid}").json())
        write("predict_a.json", client.get(f"/sessions/{sid}/predict").json())
        write("whatif_verification_veryhigh.json",
              client.post(f"/sessions/{sid}/whatif",
                          json={"node": "verification_quality",
                                "state": "VeryHigh"}).json())
        write("whatif_verification_verylow.json",
              client.post(f"/sessions/{sid}/whatif",
                          json={"node": "verification_quality",
                                "state": "VeryLow"}).json())
        write("sensitivity_a.json",
              client.get(f"/sessions/{sid}/sensitivity",
                         params={"target": "field_defects_T",
                                 "inputs": "verification_quality,certification_type,"
                                           "usage_level"}).json())

        zero = scenario_body("scenario_a.json")
        zero["usage_level"] = {"None": 1.0}
        sid0 = client.post("/sessions", json={"scenario": zero}).json()["session_id"]
        write("predict_zero_usage.json", client.get(f"/sessions/{sid0}/predict").json())

        write("rating_scales.json", client.get("/rating-scales").json())
        write("error_unknown_target.json",
              client.get(f"/sessions/{sid}/sensitivity",
                         params={"target": "not_a_node"}).json())


if __name__ == "__main__":
    main()
