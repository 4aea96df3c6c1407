"""Independent, loop-based reference implementations the fast paths are checked against."""

from __future__ import annotations

import math

import numpy as np

from focus360.effects import EffectConfig, gaussian_kernel, shade_pixel
from focus360.geom import RasterDims, dir_grid, _ang


def brute_force_field(dims: RasterDims, mask: np.ndarray) -> np.ndarray:
    """Exact min-over-mask angular distance, O(pixels x mask pixels)."""
    dirs = dir_grid(dims)
    best = np.full((dims.height, dims.width), np.inf)
    for v, u in zip(*np.nonzero(mask)):
        best = np.minimum(best, _ang(dirs, dirs[v, u]))
    return best


def direct_blur(pixels: np.ndarray, sigma: float) -> np.ndarray:
    """Direct 2-D convolution: horizontal wrap, vertical clamp. Slow on purpose."""
    kernel1d = gaussian_kernel(sigma)
    kernel = np.outer(kernel1d, kernel1d)
    r = kernel1d.size // 2
    h, w, _ = pixels.shape
    out = np.zeros_like(pixels, dtype=np.float64)
    for v in range(h):
        for u in range(w):
            acc = np.zeros(3)
            for dv in range(-r, r + 1):
                vv = min(max(v + dv, 0), h - 1)
                for du in range(-r, r + 1):
                    uu = (u + du) % w
                    acc += kernel[dv + r, du + r] * pixels[vv, uu]
            out[v, u] = acc
    return out


def reference_compose(
    pixels: np.ndarray, field: np.ndarray, g: float, cfg: EffectConfig
) -> np.ndarray:
    """Naive single-threaded compositor: direct blur + per-pixel shade_pixel."""
    src = pixels.astype(np.float64)
    sigma = cfg.resolve_sigma(pixels.shape[1])
    blurred = direct_blur(src, sigma)
    h, w, _ = pixels.shape
    out = np.zeros_like(src)
    for v in range(h):
        for u in range(w):
            out[v, u] = shade_pixel(
                tuple(src[v, u]), tuple(blurred[v, u]), float(field[v, u]), g, cfg
            )
    return np.floor(np.clip(out, 0.0, 255.0) + 0.5).astype(np.uint8)


def oracle_shade(c, b, d, g, cfg: EffectConfig):
    """Straight-line scalar arithmetic for the four-effect chain."""
    x = (d - cfg.theta_in) / (cfg.theta_out - cfg.theta_in)
    x = 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)
    s = x * x * (3.0 - 2.0 * x)
    sg = s * g
    out = []
    c1 = [c[i] + sg * (b[i] - c[i]) for i in range(3)]
    y = 0.2126 * c1[0] + 0.7152 * c1[1] + 0.0722 * c1[2]
    sat = 1.0 - cfg.k_gray * sg
    c2 = [sat * c1[i] + (1.0 - sat) * y for i in range(3)]
    dark = 1.0 - cfg.k_dark * sg
    c3 = [c2[i] * dark for i in range(3)]
    if d > 0.0:
        hx = d / cfg.w_halo
        hx = 1.0 if hx > 1.0 else hx
        halo = 1.0 - cfg.k_halo * g * (1.0 - hx * hx * (3.0 - 2.0 * hx))
    else:
        halo = 1.0
    for i in range(3):
        val = c3[i] * halo
        val = 0.0 if val < 0.0 else (255.0 if val > 255.0 else val)
        out.append(int(math.floor(val + 0.5)))
    return tuple(out)
