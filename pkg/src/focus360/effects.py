"""Effect intensity math and frame composition.

All four effects are driven by one scalar per pixel: the focus-field
surplus D. The composite order is blur -> fade-to-gray -> radial
darkening -> halo darkening, computed in float64 with a single clamp and
round-half-up quantization at the end, so pixels with D = 0 (or a zero
global ramp) come out byte-identical to the input.

The radial-darkening strength is capped below 1, keeping a nonzero
brightness floor: even a viewer facing away from the target sees a dimmed
scene, never a black one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.ndimage import correlate1d

from .geom import FocusField
from .media import DimsMismatchError, FrameBuffer
from .script import ScriptEntry

# Rec. 709 luma coefficients
_LUMA_R = 0.2126
_LUMA_G = 0.7152
_LUMA_B = 0.0722

FIELD_MODES = ("centroid", "mask")


@dataclass(frozen=True)
class EffectConfig:
    """Every numeric knob of the four effects.

    theta_in/theta_out bound the spatial falloff band (radians of surplus
    angle); sigma_max is the blur std-dev in pixels, None meaning width/256.
    """

    theta_in: float = 0.05
    theta_out: float = 1.0
    sigma_max: float | None = None
    k_gray: float = 0.8
    k_dark: float = 0.6
    k_halo: float = 0.5
    w_halo: float = 0.08
    ramp_tau: float = 0.5
    field_mode: str = "centroid"

    def __post_init__(self) -> None:
        if not self.theta_in < self.theta_out:
            raise ValueError("theta_in must be < theta_out")
        if self.sigma_max is not None and self.sigma_max < 0:
            raise ValueError("sigma_max must be >= 0")
        if not 0.0 <= self.k_gray <= 1.0:
            raise ValueError("k_gray must be in [0, 1]")
        if not 0.0 <= self.k_dark < 1.0:
            raise ValueError("k_dark must be in [0, 1); 1 would allow full black")
        if not 0.0 <= self.k_halo <= 1.0:
            raise ValueError("k_halo must be in [0, 1]")
        if self.w_halo <= 0:
            raise ValueError("w_halo must be > 0")
        if self.ramp_tau < 0:
            raise ValueError("ramp_tau must be >= 0")
        if self.field_mode not in FIELD_MODES:
            raise ValueError(f"field_mode must be one of {FIELD_MODES}")

    def resolve_sigma(self, width: int) -> float:
        return self.sigma_max if self.sigma_max is not None else width / 256.0

    def with_overrides(self, **kwargs) -> "EffectConfig":
        return replace(self, **kwargs)


def smoothstep(x):
    """Cubic ease x^2 (3 - 2x); caller clamps x to [0, 1]."""
    return x * x * (3.0 - 2.0 * x)


def falloff(d, theta_in: float, theta_out: float):
    """Spatial intensity s in [0, 1]: 0 inside theta_in, 1 beyond theta_out."""
    x = np.clip((d - theta_in) / (theta_out - theta_in), 0.0, 1.0)
    return smoothstep(x)


def ramp(t: float, entry: ScriptEntry, tau: float) -> float:
    """Temporal ease-in/out of the global intensity over one interval."""
    eff = min(tau, (entry.end - entry.start) / 2.0)
    if eff <= 0.0:
        return 1.0
    if t < entry.start + eff:
        x = max(0.0, (t - entry.start) / eff)
        return float(smoothstep(min(x, 1.0)))
    if t > entry.end - eff:
        x = max(0.0, (entry.end - t) / eff)
        return float(smoothstep(min(x, 1.0)))
    return 1.0


def frame_intensity(t: float, entries: list[ScriptEntry], tau: float) -> float:
    """Global ramp g for a frame: max over the active entries, 0 if none."""
    active = [e for e in entries if e.contains(t)]
    if not active:
        return 0.0
    return max(ramp(t, e, tau) for e in active)


def gaussian_kernel(sigma: float) -> np.ndarray:
    """1-D Gaussian truncated at radius ceil(3 sigma), normalized to sum 1."""
    radius = math.ceil(3.0 * sigma)
    if sigma <= 0.0 or radius == 0:
        return np.ones(1, dtype=np.float64)
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    w = np.exp(-(offsets * offsets) / (2.0 * sigma * sigma))
    return w / w.sum()


def blur_float(pixels: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian on a float64 (H, W, 3) array.

    Horizontal pass wraps in longitude; vertical pass clamps at the poles.
    """
    kernel = gaussian_kernel(sigma)
    if kernel.size == 1:
        return pixels.copy()
    out = correlate1d(pixels, kernel, axis=1, mode="grid-wrap")
    out = correlate1d(out, kernel, axis=0, mode="nearest")
    return out


def blur_pass(frame: FrameBuffer, sigma: float) -> FrameBuffer:
    """Quantized blur of a whole frame; sigma = 0 is the identity."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    blurred = blur_float(frame.pixels.astype(np.float64), sigma)
    return FrameBuffer(frame.dims, quantize(blurred))


def shade_pixel(
    c: tuple[float, float, float],
    blurred: tuple[float, float, float],
    d: float,
    g: float,
    cfg: EffectConfig,
) -> tuple[float, float, float]:
    """Apply the four-effect chain to one float RGB pixel.

    Scalar twin of `compose_frame`'s vectorized path; the two must agree
    bit-for-bit, which the test suite asserts.
    """
    s = float(falloff(d, cfg.theta_in, cfg.theta_out))
    sg = s * g
    r = c[0] + sg * (blurred[0] - c[0])
    gr = c[1] + sg * (blurred[1] - c[1])
    b = c[2] + sg * (blurred[2] - c[2])
    y = _LUMA_R * r + _LUMA_G * gr + _LUMA_B * b
    sat = 1.0 - cfg.k_gray * sg
    r = sat * r + (1.0 - sat) * y
    gr = sat * gr + (1.0 - sat) * y
    b = sat * b + (1.0 - sat) * y
    dark = 1.0 - cfg.k_dark * sg
    r, gr, b = r * dark, gr * dark, b * dark
    if d > 0.0:
        h = 1.0 - cfg.k_halo * g * (1.0 - smoothstep(min(d / cfg.w_halo, 1.0)))
    else:
        h = 1.0
    return (r * h, gr * h, b * h)


def quantize(pixels: np.ndarray) -> np.ndarray:
    """Clamp to [0, 255] and round half up to uint8."""
    return np.floor(np.clip(pixels, 0.0, 255.0) + 0.5).astype(np.uint8)


def compose_frame(
    frame: FrameBuffer, field: FocusField | None, g: float, cfg: EffectConfig
) -> FrameBuffer:
    """Composite all four effects onto one frame.

    With no field or g = 0 the input is passed through byte-identically and
    the blur pass is skipped.
    """
    if field is not None and field.dims != frame.dims:
        raise DimsMismatchError("focus field dims do not match frame dims")
    if field is None or g == 0.0:
        return FrameBuffer(frame.dims, frame.pixels.copy())

    src = frame.pixels.astype(np.float64)
    blurred = blur_float(src, cfg.resolve_sigma(frame.dims.width))
    d = field.values[:, :, None]
    s = falloff(d, cfg.theta_in, cfg.theta_out)
    sg = s * g
    c1 = src + sg * (blurred - src)
    y = _LUMA_R * c1[:, :, 0] + _LUMA_G * c1[:, :, 1] + _LUMA_B * c1[:, :, 2]
    sat = 1.0 - cfg.k_gray * sg
    c2 = sat * c1 + (1.0 - sat) * y[:, :, None]
    c3 = c2 * (1.0 - cfg.k_dark * sg)
    halo = np.where(
        d > 0.0,
        1.0 - cfg.k_halo * g * (1.0 - smoothstep(np.minimum(d / cfg.w_halo, 1.0))),
        1.0,
    )
    return FrameBuffer(frame.dims, quantize(c3 * halo))


def field_to_gray(field: FocusField) -> np.ndarray:
    """Debug rendering of a focus field: min(255, round(D / pi * 255))."""
    return np.minimum(255, np.floor(field.values / math.pi * 255.0 + 0.5)).astype(np.uint8)
