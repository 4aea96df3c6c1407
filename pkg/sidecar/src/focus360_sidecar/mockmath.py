"""Deterministic spherical-disc math for mock mode.

The renderer's synthetic target provider rasterizes discs with exactly
these formulas; keeping the arithmetic identical (same operations, same
order) makes mock-tracking masks bit-identical to that provider, which
the protocol conformance tests rely on. Pixel centers sit at +0.5,
longitude spans [-pi, pi) along x, latitude [+pi/2, -pi/2] down the rows.
"""

from __future__ import annotations

import math

import numpy as np


def dir_grid(width: int, height: int) -> np.ndarray:
    """All pixel-center unit direction vectors, shape (height, width, 3)."""
    u = np.arange(width, dtype=np.float64)
    v = np.arange(height, dtype=np.float64)
    lon = 2.0 * np.pi * (u + 0.5) / width - np.pi
    lat = np.pi / 2.0 - np.pi * (v + 0.5) / height
    cos_lat = np.cos(lat)[:, None]
    out = np.empty((height, width, 3), dtype=np.float64)
    out[:, :, 0] = cos_lat * np.cos(lon)[None, :]
    out[:, :, 1] = cos_lat * np.sin(lon)[None, :]
    out[:, :, 2] = np.sin(lat)[:, None]
    return out


def lonlat_dir(lon: float, lat: float) -> np.ndarray:
    return np.array(
        [
            math.cos(lat) * math.cos(lon),
            math.cos(lat) * math.sin(lon),
            math.sin(lat),
        ],
        dtype=np.float64,
    )


def angular_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    dot = np.sum(a * b, axis=-1)
    cross = np.cross(a, b)
    return np.arctan2(np.linalg.norm(cross, axis=-1), dot)


def rasterize_disc(width: int, height: int, lon: float, lat: float, radius: float) -> np.ndarray:
    """Binary mask of pixel centers within `radius` of (lon, lat)."""
    return angular_distance(dir_grid(width, height), lonlat_dir(lon, lat)) <= radius


def rle_encode(bits: np.ndarray) -> list[list[int]]:
    """Run-length encoding over row-major bit order: [start, length] pairs."""
    flat = np.asarray(bits, dtype=bool).ravel()
    padded = np.concatenate([[False], flat, [False]])
    changes = np.flatnonzero(padded[1:] != padded[:-1])
    starts, ends = changes[0::2], changes[1::2]
    return [[int(s), int(e - s)] for s, e in zip(starts, ends)]


def rle_decode(runs: list[list[int]], width: int, height: int) -> np.ndarray:
    flat = np.zeros(width * height, dtype=bool)
    prev_end = 0
    for start, length in runs:
        if length <= 0 or start < prev_end or start + length > flat.size:
            raise ValueError(f"RLE run out of order or bounds: [{start}, {length}]")
        flat[start : start + length] = True
        prev_end = start + length
    return flat.reshape(height, width)
