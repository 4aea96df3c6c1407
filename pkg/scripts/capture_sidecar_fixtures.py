#!/usr/bin/env python3
"""Regenerate the captured wire-protocol fixtures in sidecar/fixtures/.

Each fixture is one request/response pair recorded from the mock service,
so the JSON schema in sidecar/PROTOCOL.md always has a live example. The
capture is deterministic; rerunning this script must be a no-op diff.
"""

from __future__ import annotations

import base64
import json
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

from focus360_sidecar import SidecarConfig, create_app

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "sidecar" / "fixtures"

WIDTH, HEIGHT = 16, 8


def tiny_frame_b64() -> str:
    rng = np.random.default_rng(2026)
    pixels = rng.integers(0, 256, size=(HEIGHT, WIDTH, 3), dtype=np.uint8)
    raw = f"P6\n{WIDTH} {HEIGHT}\n255\n".encode("ascii") + pixels.tobytes()
    return base64.b64encode(raw).decode("ascii")


def main() -> None:
    config = SidecarConfig(
        mode="mock", disc_lon=0.0, disc_lat=0.0, disc_radius=0.5, track_step=0.2
    )
    frame = tiny_frame_b64()
    captures: list[tuple[str, str, str, dict | None]] = [
        ("health", "GET", "/health", None),
        ("parse_ok", "POST", "/parse", {"text": "0:12 - 0:25 : the farthest turtle"}),
        ("parse_no_intervals", "POST", "/parse", {"text": "hello"}),
        ("detect_ok", "POST", "/detect",
         {"frame": frame, "description": "disc lon=0 lat=0 r=0.5"}),
        ("detect_not_found", "POST", "/detect",
         {"frame": frame, "description": "a turtle"}),
        ("detect_missing_frame", "POST", "/detect", {"description": "x"}),
        ("track_init", "POST", "/track/init", {"frame": frame, "bbox": [4, 2, 11, 5]}),
        ("track_next", "POST", "/track/next", {"session_id": "s000001", "frame": frame}),
        ("track_next_unknown_session", "POST", "/track/next",
         {"session_id": "nope", "frame": frame}),
    ]

    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    with TestClient(create_app(config)) as client:
        for name, method, path, body in captures:
            if method == "GET":
                resp = client.get(path)
            else:
                resp = client.post(path, json=body)
            fixture = {
                "request": {"method": method, "path": path, "body": body},
                "response": {"status": resp.status_code, "body": resp.json()},
            }
            out = FIXTURE_DIR / f"{name}.json"
            out.write_text(json.dumps(fixture, indent=2) + "\n")
            print(f"wrote {out} ({resp.status_code})")


if __name__ == "__main__":
    main()
