"""Regenerate the UI test fixtures from the real backend.

Run from the repository root:

    python3 frontend/test/make_fixtures.py

The fixtures are actual HTTP response bodies of the service for the
copy-dependency dataset, so UI tests assert against genuine backend
output rather than hand-typed numbers.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from fastapi.testclient import TestClient

sys.path.insert(0, str(Path(__file__).resolve().parents[2] / "tests"))
from conftest import make_copy_addresses  # noqa: E402

from v6scout.addrset import Dataset  # noqa: E402
from v6scout.pipeline import analyze_dataset  # noqa: E402
from v6scout.service import create_app  # noqa: E402

OUT = Path(__file__).parent / "fixtures"


def main() -> None:
    model = analyze_dataset(Dataset.from_iterable(make_copy_addresses(), label="copy"))
    client = TestClient(create_app(model))
    OUT.mkdir(exist_ok=True)
    fixtures = {
        "model.json": client.get("/model"),
        "query_prior.json": client.post("/query", json={"evidence": {}}),
        "query_child_g1.json": client.post("/query", json={"evidence": {"G": "G1"}}),
        "generate_n5.json": client.post(
            "/generate", json={"n": 5, "evidence": {}, "seed": 7}
        ),
    }
    for name, response in fixtures.items():
        assert response.status_code == 200, (name, response.status_code)
        (OUT / name).write_bytes(response.content)
        print(f"wrote {name} ({len(response.content)} bytes)")
    # sanity: the conditioning loop the UI test replays
    body = json.loads((OUT / "query_child_g1.json").read_text())
    c_col = next(s for s in body["segments"] if s["label"] == "C")
    c1 = next(c for c in c_col["codes"] if c["id"] == "C1")
    assert c1["p_display"] == "100%", c1
    print("conditioning sanity ok: C1 renders at 100% given G=G1")


if __name__ == "__main__":
    main()
