"""Target resolution: turn script entries into per-frame masks.

Three interchangeable providers supply masks:

* ``file``      - precomputed PGM masks named ``mask_e<entry>_f<frame>.pgm``
                  (frame index zero-padded to 6 digits);
* ``synthetic`` - a spherical disc moving at a constant longitude rate,
                  rasterized deterministically per frame;
* ``remote``    - a client for the detection/tracking sidecar service.

A hold policy bridges short dropouts by reusing the last mask; once the
gap exceeds ``max_hold_frames`` the target deactivates for the rest of
its entry.
"""

from __future__ import annotations

import base64
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import requests

from . import media
from .geom import (
    DegenerateMaskError,
    Direction,
    EmptyMaskError,
    RasterDims,
    TargetGeometry,
    _ang,
    dir_grid,
    mask_to_geometry,
)
from .media import FrameBuffer, MaskBuffer, MediaError, VideoMeta, frame_time
from .script import Script, ScriptEntry

SIDECAR_URL_ENV = "FOCUS360_SIDECAR_URL"

MISSING = None  # sentinel meaning "no mask for this frame"


class TargetNotFound(Exception):
    """Initial detection failed; the entry is skipped, rendering continues."""


class ProtocolError(Exception):
    """Remote provider received a malformed or unexpected response."""


@dataclass(frozen=True)
class TargetState:
    entry_index: int
    frame_index: int
    mask: MaskBuffer
    geometry: TargetGeometry
    held: bool = False


@dataclass(frozen=True)
class HoldPolicy:
    max_hold_frames: int = 3

    def __post_init__(self) -> None:
        if self.max_hold_frames < 0:
            raise ValueError("max_hold_frames must be >= 0")


@dataclass(frozen=True)
class DiscTrajectory:
    """Spherical disc sweeping in longitude at a constant rate."""

    lon: float = 0.0
    lat: float = 0.0
    radius: float = 0.2
    rate: float = 0.0  # radians of longitude per second

    def center_at(self, dt: float) -> Direction:
        return Direction.from_lonlat(self.lon + self.rate * dt, self.lat)


def rasterize_disc(dims: RasterDims, center: Direction, radius: float) -> np.ndarray:
    """Binary mask of pixels whose center lies within the angular disc."""
    return _ang(dir_grid(dims), center.as_array()) <= radius


@dataclass(frozen=True)
class ProviderConfig:
    kind: str  # file | synthetic | remote
    mask_dir: Path | None = None
    trajectory: DiscTrajectory = field(default_factory=DiscTrajectory)
    endpoint: str | None = None
    timeout: float = 30.0

    def __post_init__(self) -> None:
        if self.kind not in ("file", "synthetic", "remote"):
            raise ValueError(f"unknown provider kind {self.kind!r}")
        if self.kind == "file" and self.mask_dir is None:
            raise ValueError("file provider needs mask_dir")


def mask_filename(entry_index: int, frame_index: int) -> str:
    return f"mask_e{entry_index}_f{frame_index:06d}.pgm"


class FileMaskProvider:
    """Serves precomputed masks from a directory."""

    def __init__(self, mask_dir: Path, entry_index: int, entry: ScriptEntry):
        self.mask_dir = Path(mask_dir)
        self.entry_index = entry_index

    def init(self, first_frame: FrameBuffer, frame_index: int) -> TargetState:
        state = self._load(first_frame.dims, frame_index)
        if state is None:
            raise TargetNotFound(
                f"entry {self.entry_index}: no mask for first frame {frame_index}"
            )
        return state

    def next(self, frame: FrameBuffer, frame_index: int) -> TargetState | None:
        return self._load(frame.dims, frame_index)

    def _load(self, dims: RasterDims, frame_index: int) -> TargetState | None:
        path = self.mask_dir / mask_filename(self.entry_index, frame_index)
        if not path.exists():
            return MISSING
        mask = media.read_mask(path, dims)
        if mask.empty:
            return MISSING
        return TargetState(
            self.entry_index, frame_index, mask, mask_to_geometry(mask.bits, dims)
        )


class SyntheticDiscProvider:
    """Deterministic moving-disc target; needs no external data."""

    def __init__(self, trajectory: DiscTrajectory, entry_index: int, entry: ScriptEntry, fps: float):
        self.trajectory = trajectory
        self.entry_index = entry_index
        self.entry = entry
        self.fps = fps

    def init(self, first_frame: FrameBuffer, frame_index: int) -> TargetState:
        state = self.next(first_frame, frame_index)
        if state is None:
            raise TargetNotFound(f"entry {self.entry_index}: disc rasterizes to nothing")
        return state

    def next(self, frame: FrameBuffer, frame_index: int) -> TargetState | None:
        dt = frame_time(frame_index, self.fps) - self.entry.start
        center = self.trajectory.center_at(dt)
        bits = rasterize_disc(frame.dims, center, self.trajectory.radius)
        if not bits.any():
            return MISSING
        mask = MaskBuffer(frame.dims, bits)
        return TargetState(
            self.entry_index, frame_index, mask, mask_to_geometry(bits, frame.dims)
        )


def encode_frame_b64(frame: FrameBuffer) -> str:
    """Base64 of the exact PPM P6 byte stream (the sidecar WireFrame form)."""
    header = f"P6\n{frame.dims.width} {frame.dims.height}\n255\n".encode("ascii")
    return base64.b64encode(header + frame.pixels.tobytes()).decode("ascii")


def rle_encode(bits: np.ndarray) -> list[list[int]]:
    """Run-length encode a binary mask over row-major bit order."""
    flat = np.asarray(bits, dtype=bool).ravel()
    padded = np.concatenate([[False], flat, [False]])
    changes = np.flatnonzero(padded[1:] != padded[:-1])
    starts, ends = changes[0::2], changes[1::2]
    return [[int(s), int(e - s)] for s, e in zip(starts, ends)]


def rle_decode(runs: list[list[int]], dims: RasterDims) -> np.ndarray:
    """Inverse of `rle_encode`; validates ordering and bounds."""
    flat = np.zeros(dims.pixel_count, dtype=bool)
    prev_end = 0
    for run in runs:
        if len(run) != 2:
            raise ProtocolError(f"bad RLE run {run!r}")
        start, length = run
        if length <= 0 or start < prev_end or start + length > flat.size:
            raise ProtocolError(f"RLE run out of order or bounds: {run!r}")
        flat[start : start + length] = True
        prev_end = start + length
    return flat.reshape(dims.height, dims.width)


class RemoteProvider:
    """Client for the sidecar's detect/track wire protocol."""

    def __init__(
        self,
        endpoint: str,
        entry_index: int,
        entry: ScriptEntry,
        timeout: float = 30.0,
        session: requests.Session | None = None,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.entry_index = entry_index
        self.entry = entry
        self.timeout = timeout
        self.http = session or requests.Session()
        self.session_id: str | None = None
        self.detect_score: float | None = None

    def _post(self, path: str, payload: dict) -> requests.Response:
        try:
            return self.http.post(
                f"{self.endpoint}{path}", json=payload, timeout=self.timeout
            )
        except requests.RequestException as exc:
            raise ProtocolError(f"{path}: {exc}") from exc

    def init(self, first_frame: FrameBuffer, frame_index: int) -> TargetState:
        frame_b64 = encode_frame_b64(first_frame)
        resp = self._post(
            "/detect", {"frame": frame_b64, "description": self.entry.description}
        )
        if resp.status_code == 404:
            raise TargetNotFound(
                f"entry {self.entry_index}: detection failed for "
                f"{self.entry.description!r}"
            )
        if resp.status_code != 200:
            raise TargetNotFound(
                f"entry {self.entry_index}: /detect returned {resp.status_code}"
            )
        try:
            body = resp.json()
            bbox = [int(x) for x in body["bbox"]]
            self.detect_score = float(body["score"])
        except (KeyError, TypeError, ValueError) as exc:
            raise TargetNotFound(f"entry {self.entry_index}: malformed /detect reply") from exc

        resp = self._post("/track/init", {"frame": frame_b64, "bbox": bbox})
        if resp.status_code != 200:
            raise TargetNotFound(
                f"entry {self.entry_index}: /track/init returned {resp.status_code}"
            )
        try:
            body = resp.json()
            self.session_id = str(body["session_id"])
            mask_bits = self._decode_mask(body["mask"], first_frame.dims)
        except ProtocolError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise TargetNotFound(
                f"entry {self.entry_index}: malformed /track/init reply"
            ) from exc
        if not mask_bits.any():
            raise TargetNotFound(f"entry {self.entry_index}: empty initial mask")
        mask = MaskBuffer(first_frame.dims, mask_bits)
        return TargetState(
            self.entry_index, frame_index, mask,
            mask_to_geometry(mask_bits, first_frame.dims),
        )

    def next(self, frame: FrameBuffer, frame_index: int) -> TargetState | None:
        if self.session_id is None:
            raise ProtocolError("next() before successful init()")
        resp = self._post(
            "/track/next",
            {"session_id": self.session_id, "frame": encode_frame_b64(frame)},
        )
        if resp.status_code != 200:
            raise ProtocolError(f"/track/next returned {resp.status_code}")
        try:
            body = resp.json()
        except ValueError as exc:
            raise ProtocolError("non-JSON /track/next reply") from exc
        if body.get("missing"):
            return MISSING
        try:
            bits = self._decode_mask(body["mask"], frame.dims)
        except (KeyError, TypeError) as exc:
            raise ProtocolError("malformed /track/next reply") from exc
        if not bits.any():
            return MISSING
        mask = MaskBuffer(frame.dims, bits)
        return TargetState(
            self.entry_index, frame_index, mask, mask_to_geometry(bits, frame.dims)
        )

    @staticmethod
    def _decode_mask(wire: dict, dims: RasterDims) -> np.ndarray:
        if int(wire["width"]) != dims.width or int(wire["height"]) != dims.height:
            raise ProtocolError("wire mask dims do not match the video")
        return rle_decode(wire["runs"], dims)


def make_provider(
    config: ProviderConfig, entry_index: int, entry: ScriptEntry, fps: float
):
    if config.kind == "file":
        return FileMaskProvider(config.mask_dir, entry_index, entry)
    if config.kind == "synthetic":
        return SyntheticDiscProvider(config.trajectory, entry_index, entry, fps)
    endpoint = config.endpoint or os.environ.get(SIDECAR_URL_ENV)
    if not endpoint:
        raise ValueError(
            f"remote provider needs an endpoint (--sidecar-url or ${SIDECAR_URL_ENV})"
        )
    return RemoteProvider(endpoint, entry_index, entry, timeout=config.timeout)


@dataclass
class EntryDiagnostics:
    entry_index: int
    description: str
    detected: int = 0
    held: int = 0
    deactivated: int = 0
    skipped: bool = False
    detect_score: float | None = None
    messages: list[str] = field(default_factory=list)

    def summary(self) -> str:
        status = "skipped" if self.skipped else "ok"
        line = (
            f"entry {self.entry_index} ({self.description!r}): {status}, "
            f"detected={self.detected} held={self.held} deactivated={self.deactivated}"
        )
        if self.detect_score is not None:
            line += f" score={self.detect_score:.3f}"
        return line


@dataclass
class Timeline:
    """Per-frame target states plus per-entry diagnostics."""

    states: list[list[TargetState]]
    diagnostics: list[EntryDiagnostics]

    @property
    def any_skipped(self) -> bool:
        return any(d.skipped for d in self.diagnostics)


def _entry_frames(entry: ScriptEntry, meta: VideoMeta) -> list[int]:
    return [
        f for f in range(meta.frame_count) if entry.contains(frame_time(f, meta.fps))
    ]


def resolve_timeline(
    script: Script,
    meta: VideoMeta,
    provider_config: ProviderConfig,
    hold: HoldPolicy,
    frame_loader=None,
) -> Timeline:
    """Run every entry's provider over its frames and assemble the timeline.

    A failed entry is recorded in diagnostics and skipped; it never aborts
    the rest of the render. `frame_loader` defaults to reading frames from
    the manifest and exists so synthetic pipelines can inject frames.
    """
    if frame_loader is None:
        frame_loader = lambda index: media.read_frame(meta, index)

    states: list[list[TargetState]] = [[] for _ in range(meta.frame_count)]
    diagnostics: list[EntryDiagnostics] = []

    for entry_index, entry in enumerate(script.entries):
        diag = EntryDiagnostics(entry_index, entry.description)
        diagnostics.append(diag)
        frames = _entry_frames(entry, meta)
        if not frames:
            diag.messages.append("no frames fall inside the interval")
            continue
        try:
            provider = make_provider(provider_config, entry_index, entry, meta.fps)
            state = provider.init(frame_loader(frames[0]), frames[0])
        except (TargetNotFound, MediaError, EmptyMaskError, DegenerateMaskError) as exc:
            diag.skipped = True
            diag.messages.append(str(exc))
            continue
        diag.detect_score = getattr(provider, "detect_score", None)
        states[frames[0]].append(state)
        diag.detected += 1
        last_state = state
        gap = 0
        for f in frames[1:]:
            try:
                state = provider.next(frame_loader(f), f)
            except ProtocolError as exc:
                diag.messages.append(f"frame {f}: {exc}")
                state = MISSING
            except (MediaError, DegenerateMaskError) as exc:
                diag.messages.append(f"frame {f}: {exc}")
                state = MISSING
            if state is not None:
                states[f].append(state)
                diag.detected += 1
                last_state = state
                gap = 0
                continue
            gap += 1
            if gap <= hold.max_hold_frames:
                held = TargetState(
                    entry_index, f, last_state.mask, last_state.geometry, held=True
                )
                states[f].append(held)
                diag.held += 1
            else:
                diag.deactivated = len(frames) - frames.index(f)
                diag.messages.append(
                    f"frame {f}: gap exceeded max_hold_frames={hold.max_hold_frames}; "
                    "deactivating for the rest of the entry"
                )
                break
    return Timeline(states=states, diagnostics=diagnostics)
