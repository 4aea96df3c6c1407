"""Frame-sequence I/O: manifest parsing and bit-exact PPM/PGM rasters.

The tool is deliberately codec-free: input and output are numbered binary
netpbm frames described by a small ``key = value`` manifest. Container
decode/encode happens outside the tool (e.g. ffmpeg image2 sequences).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geom import RasterDims


class MediaError(Exception):
    pass


class MissingKeyError(MediaError):
    def __init__(self, key: str):
        super().__init__(f"manifest is missing key {key!r}")
        self.key = key


class BadValueError(MediaError):
    def __init__(self, key: str, reason: str):
        super().__init__(f"bad value for {key!r}: {reason}")
        self.key = key


class FormatError(MediaError):
    pass


class DimsMismatchError(MediaError):
    pass


@dataclass(frozen=True)
class VideoMeta:
    width: int
    height: int
    fps: float
    frame_count: int
    frame_pattern: str  # printf-style, e.g. frame_%06d.ppm
    base_dir: Path

    @property
    def dims(self) -> RasterDims:
        return RasterDims(self.width, self.height)

    def frame_path(self, index: int) -> Path:
        return self.base_dir / (self.frame_pattern % index)


@dataclass(frozen=True)
class FrameBuffer:
    dims: RasterDims
    pixels: np.ndarray  # (height, width, 3) uint8

    def __post_init__(self) -> None:
        if self.pixels.shape != (self.dims.height, self.dims.width, 3):
            raise ValueError("pixel array shape does not match dims")
        if self.pixels.dtype != np.uint8:
            raise ValueError("pixels must be uint8")


@dataclass(frozen=True)
class MaskBuffer:
    dims: RasterDims
    bits: np.ndarray  # (height, width) bool

    def __post_init__(self) -> None:
        if self.bits.shape != (self.dims.height, self.dims.width):
            raise ValueError("bit array shape does not match dims")

    @property
    def empty(self) -> bool:
        return not self.bits.any()


_MANIFEST_KEYS = ("width", "height", "fps", "frame_count", "frame_pattern")


def read_manifest(path: str | Path) -> VideoMeta:
    """Parse a ``key = value`` manifest describing a frame sequence."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise MediaError(f"cannot read manifest: {exc}") from exc
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise FormatError(f"manifest line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    for key in _MANIFEST_KEYS:
        if key not in values:
            raise MissingKeyError(key)

    def _int(key: str, minimum: int) -> int:
        try:
            n = int(values[key])
        except ValueError as exc:
            raise BadValueError(key, str(exc)) from exc
        if n < minimum:
            raise BadValueError(key, f"must be >= {minimum}, got {n}")
        return n

    width = _int("width", 2)
    height = _int("height", 1)
    frame_count = _int("frame_count", 1)
    try:
        fps = float(values["fps"])
    except ValueError as exc:
        raise BadValueError("fps", str(exc)) from exc
    if fps <= 0:
        raise BadValueError("fps", f"must be > 0, got {fps}")
    pattern = values["frame_pattern"]
    try:
        pattern % 0
    except (TypeError, ValueError) as exc:
        raise BadValueError("frame_pattern", str(exc)) from exc
    if width != 2 * height:
        warnings.warn(
            f"non-equirectangular aspect {width}x{height}; expected width = 2 * height",
            stacklevel=2,
        )
    return VideoMeta(width, height, fps, frame_count, pattern, path.parent)


def _read_netpbm(path: str | Path, magic: bytes) -> tuple[int, int, bytes]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise MediaError(f"cannot read {path}: {exc}") from exc
    if not data.startswith(magic):
        raise FormatError(f"{path}: expected magic {magic.decode()!r}")
    # header tokens: magic, width, height, maxval; '#' comments allowed
    pos = len(magic)
    tokens: list[int] = []
    while len(tokens) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError(f"{path}: truncated header")
        try:
            tokens.append(int(data[start:pos]))
        except ValueError as exc:
            raise FormatError(f"{path}: bad header token") from exc
    pos += 1  # single whitespace byte after maxval
    width, height, maxval = tokens
    if maxval != 255:
        raise FormatError(f"{path}: maxval must be 255, got {maxval}")
    return width, height, data[pos:]


def read_frame(meta: VideoMeta, index: int) -> FrameBuffer:
    """Load one PPM P6 frame, checked against the manifest dims."""
    if not 0 <= index < meta.frame_count:
        raise IndexError(f"frame index {index} outside [0, {meta.frame_count})")
    path = meta.frame_path(index)
    width, height, payload = _read_netpbm(path, b"P6")
    if (width, height) != (meta.width, meta.height):
        raise DimsMismatchError(
            f"{path}: frame is {width}x{height}, manifest says {meta.width}x{meta.height}"
        )
    expected = width * height * 3
    if len(payload) < expected:
        raise FormatError(f"{path}: payload truncated ({len(payload)} < {expected})")
    pixels = np.frombuffer(payload[:expected], dtype=np.uint8).reshape(height, width, 3)
    return FrameBuffer(RasterDims(width, height), pixels.copy())


def write_frame(frame: FrameBuffer, path: str | Path) -> None:
    """Emit exactly ``P6\\n<W> <H>\\n255\\n`` + raw RGB bytes."""
    header = f"P6\n{frame.dims.width} {frame.dims.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + frame.pixels.tobytes())


def read_mask(path: str | Path, dims: RasterDims) -> MaskBuffer:
    """Load a PGM P5 mask; samples >= 128 are set."""
    width, height, payload = _read_netpbm(path, b"P5")
    if (width, height) != (dims.width, dims.height):
        raise DimsMismatchError(
            f"{path}: mask is {width}x{height}, expected {dims.width}x{dims.height}"
        )
    expected = width * height
    if len(payload) < expected:
        raise FormatError(f"{path}: payload truncated ({len(payload)} < {expected})")
    samples = np.frombuffer(payload[:expected], dtype=np.uint8).reshape(height, width)
    return MaskBuffer(dims, samples >= 128)


def write_mask(mask: MaskBuffer, path: str | Path) -> None:
    write_gray(np.where(mask.bits, 255, 0).astype(np.uint8), path)


def write_gray(samples: np.ndarray, path: str | Path) -> None:
    """Emit a PGM P5 with maxval 255 from a (H, W) uint8 array."""
    height, width = samples.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + samples.astype(np.uint8).tobytes())


def frame_time(index: int, fps: float) -> float:
    """Timestamp of a frame in seconds."""
    if index < 0:
        raise ValueError("frame index must be >= 0")
    return index / fps
