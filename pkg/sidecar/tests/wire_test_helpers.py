import base64

import numpy as np


def make_frame_b64(width: int, height: int, seed: int = 0) -> str:
    """Deterministic random P6 frame as the base64 wire form."""
    rng = np.random.default_rng(seed)
    pixels = rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8)
    raw = f"P6\n{width} {height}\n255\n".encode("ascii") + pixels.tobytes()
    return base64.b64encode(raw).decode("ascii")
