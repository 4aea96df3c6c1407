import base64

import numpy as np
import pytest

from focus360_sidecar import mockmath


@pytest.mark.parametrize("seed", range(20))
def test_rle_roundtrip_random(seed):
    rng = np.random.default_rng(seed)
    h, w = int(rng.integers(1, 20)), int(rng.integers(1, 40))
    bits = rng.random((h, w)) < rng.uniform(0.05, 0.95)
    assert np.array_equal(mockmath.rle_decode(mockmath.rle_encode(bits), w, h), bits)


def test_rle_empty_and_full():
    empty = np.zeros((3, 5), dtype=bool)
    full = np.ones((3, 5), dtype=bool)
    assert mockmath.rle_encode(empty) == []
    assert mockmath.rle_encode(full) == [[0, 15]]
    assert np.array_equal(mockmath.rle_decode([], 5, 3), empty)
    assert np.array_equal(mockmath.rle_decode([[0, 15]], 5, 3), full)


def test_rle_decode_rejects_bad_runs():
    with pytest.raises(ValueError):
        mockmath.rle_decode([[0, 0]], 4, 1)
    with pytest.raises(ValueError):
        mockmath.rle_decode([[2, 2], [1, 1]], 8, 1)
    with pytest.raises(ValueError):
        mockmath.rle_decode([[6, 4]], 8, 1)


def test_base64_frame_roundtrip():
    rng = np.random.default_rng(7)
    pixels = rng.integers(0, 256, size=(4, 8, 3), dtype=np.uint8)
    raw = b"P6\n8 4\n255\n" + pixels.tobytes()
    assert base64.b64decode(base64.b64encode(raw)) == raw


def test_disc_rasterization_matches_brute_force():
    w, h = 32, 16
    bits = mockmath.rasterize_disc(w, h, 0.5, -0.2, 0.4)
    center = mockmath.lonlat_dir(0.5, -0.2)
    for y in range(h):
        for x in range(w):
            lon = 2.0 * np.pi * (x + 0.5) / w - np.pi
            lat = np.pi / 2.0 - np.pi * (y + 0.5) / h
            ang = float(
                mockmath.angular_distance(mockmath.lonlat_dir(lon, lat), center)
            )
            assert bits[y, x] == (ang <= 0.4)
