"""HTTP service exposing parse / detect / track for the focus360 renderer.

All payloads are JSON. Frames travel as base64-encoded PPM P6 byte
streams; masks travel run-length encoded over row-major bit order.

Two modes, chosen at startup:

* ``mock``  - deterministic stand-ins for the three model stages: the
  roadmap grammar for /parse, and a configured spherical disc for
  /detect and /track. /track advances the disc by ``track_step``
  radians of longitude per call, so identical request sequences yield
  byte-identical responses.
* ``model`` - placeholder for real detection/tracking/parsing models;
  every model endpoint answers 501 until weights are wired in.
"""

from __future__ import annotations

import base64
import itertools
import re
import threading
from dataclasses import dataclass

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import grammar, mockmath

_DISC_RE = re.compile(
    r"^\s*disc\s+lon=(?P<lon>-?\d+(?:\.\d+)?)\s+lat=(?P<lat>-?\d+(?:\.\d+)?)"
    r"\s+r=(?P<r>\d+(?:\.\d+)?)\s*$"
)


@dataclass(frozen=True)
class SidecarConfig:
    """Startup configuration; the disc fields matter only in mock mode."""

    mode: str = "mock"  # mock | model
    disc_lon: float = 0.0
    disc_lat: float = 0.0
    disc_radius: float = 0.2
    track_step: float = 0.0  # radians of longitude per /track/next call

    def __post_init__(self) -> None:
        if self.mode not in ("mock", "model"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not 0.0 < self.disc_radius <= np.pi:
            raise ValueError("disc_radius must be in (0, pi]")


class _BadPayload(ValueError):
    """Maps to a 400 response."""


def _decode_wire_frame(value: object) -> tuple[int, int]:
    """Validate a base64 P6 payload and return (width, height)."""
    if not isinstance(value, str):
        raise _BadPayload("frame must be a base64 string")
    try:
        raw = base64.b64decode(value, validate=True)
    except (ValueError, TypeError) as exc:
        raise _BadPayload(f"frame is not valid base64: {exc}") from exc
    m = re.match(rb"^P6\s+(\d+)\s+(\d+)\s+255\s", raw)
    if m is None:
        raise _BadPayload("frame does not decode to a P6 raster")
    width, height = int(m.group(1)), int(m.group(2))
    if len(raw) - m.end() != width * height * 3:
        raise _BadPayload("frame pixel payload has the wrong size")
    return width, height


def _wire_mask(bits: np.ndarray) -> dict:
    height, width = bits.shape
    return {
        "width": width,
        "height": height,
        "runs": mockmath.rle_encode(bits),
    }


def _error(status: int, reason: str) -> JSONResponse:
    return JSONResponse({"error": reason}, status_code=status)


async def _json_body(request: Request) -> dict:
    try:
        body = await request.json()
    except Exception as exc:
        raise _BadPayload(f"body is not valid JSON: {exc}") from exc
    if not isinstance(body, dict):
        raise _BadPayload("body must be a JSON object")
    return body


def create_app(config: SidecarConfig | None = None) -> FastAPI:
    config = config or SidecarConfig()
    app = FastAPI(title="focus360 sidecar", docs_url=None, redoc_url=None)

    sessions: dict[str, int] = {}  # session_id -> /track/next calls so far
    lock = threading.Lock()
    ids = itertools.count(1)

    @app.exception_handler(_BadPayload)
    async def _bad_payload(request: Request, exc: _BadPayload):
        return _error(400, str(exc))

    @app.get("/health")
    async def health():
        return {"status": "ok"}

    @app.post("/parse")
    async def parse(request: Request):
        body = await _json_body(request)
        if "text" not in body or not isinstance(body["text"], str):
            raise _BadPayload("missing string field 'text'")
        if config.mode == "model":
            return _error(501, "model mode has no weights loaded")
        try:
            return {"csv": grammar.parse_to_csv(body["text"])}
        except grammar.ExtractionError as exc:
            return _error(422, str(exc))

    @app.post("/detect")
    async def detect(request: Request):
        body = await _json_body(request)
        if "frame" not in body:
            raise _BadPayload("missing field 'frame'")
        width, height = _decode_wire_frame(body["frame"])
        if not isinstance(body.get("description"), str):
            raise _BadPayload("missing string field 'description'")
        if config.mode == "model":
            return _error(501, "model mode has no weights loaded")
        m = _DISC_RE.match(body["description"])
        if m is None:
            return _error(404, "target not found")
        bits = mockmath.rasterize_disc(
            width, height, float(m.group("lon")), float(m.group("lat")), float(m.group("r"))
        )
        ys, xs = np.nonzero(bits)
        if xs.size == 0:
            return _error(404, "target not found")
        bbox = [int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max())]
        return {"bbox": bbox, "score": 1.0}

    @app.post("/track/init")
    async def track_init(request: Request):
        body = await _json_body(request)
        if "frame" not in body:
            raise _BadPayload("missing field 'frame'")
        width, height = _decode_wire_frame(body["frame"])
        bbox = body.get("bbox")
        if (
            not isinstance(bbox, list)
            or len(bbox) != 4
            or not all(isinstance(x, int) for x in bbox)
        ):
            raise _BadPayload("bbox must be a list of 4 integers")
        if not (0 <= bbox[0] <= bbox[2] < width and 0 <= bbox[1] <= bbox[3] < height):
            raise _BadPayload("bbox out of frame bounds")
        if config.mode == "model":
            return _error(501, "model mode has no weights loaded")
        bits = mockmath.rasterize_disc(
            width, height, config.disc_lon, config.disc_lat, config.disc_radius
        )
        with lock:
            session_id = f"s{next(ids):06d}"
            sessions[session_id] = 0
        return {"session_id": session_id, "mask": _wire_mask(bits)}

    @app.post("/track/next")
    async def track_next(request: Request):
        body = await _json_body(request)
        if not isinstance(body.get("session_id"), str):
            raise _BadPayload("missing string field 'session_id'")
        if "frame" not in body:
            raise _BadPayload("missing field 'frame'")
        width, height = _decode_wire_frame(body["frame"])
        if config.mode == "model":
            return _error(501, "model mode has no weights loaded")
        with lock:
            if body["session_id"] not in sessions:
                return _error(410, "unknown or expired session")
            sessions[body["session_id"]] += 1
            calls = sessions[body["session_id"]]
        lon = config.disc_lon + config.track_step * calls
        bits = mockmath.rasterize_disc(
            width, height, lon, config.disc_lat, config.disc_radius
        )
        if not bits.any():
            return {"missing": True}
        return {"mask": _wire_mask(bits)}

    return app
