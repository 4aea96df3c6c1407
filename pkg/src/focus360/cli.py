"""Command-line front end: render, parse-script, bench.

Configuration is a flat ``key = value`` file in the same style as the
video manifest; command-line flags override file values. Rendering is a
bounded pipeline (reader -> compose workers -> in-order writer) that is
byte-deterministic for any thread count.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import effects, geom, locate, media, script as script_mod
from .effects import EffectConfig
from .geom import FocusField, RasterDims
from .locate import DiscTrajectory, HoldPolicy, ProviderConfig, Timeline
from .media import FrameBuffer, VideoMeta, frame_time
from .script import Script

_EFFECT_KEYS = (
    "theta_in", "theta_out", "sigma_max", "k_gray", "k_dark", "k_halo",
    "w_halo", "ramp_tau", "field_mode",
)


@dataclass
class RunConfig:
    manifest: Path
    script: Path
    out_dir: Path
    provider: ProviderConfig
    effect: EffectConfig
    threads: int = 1
    hold: HoldPolicy = HoldPolicy()
    dump_field: bool = False

    def __post_init__(self) -> None:
        if self.out_dir.resolve() == self.manifest.parent.resolve():
            raise ValueError("output directory must be distinct from the input directory")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


def parse_kv_file(path: Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}: expected 'key = value', got {line!r}")
        values[key.strip()] = value.strip()
    return values


def load_script(path: Path) -> Script:
    """Auto-detect roadmap vs CSV by the CSV header on the first line."""
    text = path.read_text(encoding="utf-8")
    first = text.lstrip().splitlines()[0] if text.strip() else ""
    if first.strip().startswith("start_seconds"):
        return script_mod.from_csv(text)
    return script_mod.parse_roadmap(text)


def frame_field(
    states: list[locate.TargetState], dims: RasterDims, mode: str
) -> FocusField | None:
    if not states:
        return None
    if mode == "mask":
        return geom.focus_field_mask(dims, [st.mask.bits for st in states])
    return geom.focus_field_centroid(dims, [st.geometry for st in states])


def render_sequence(
    meta: VideoMeta,
    script: Script,
    timeline: Timeline,
    cfg: EffectConfig,
    threads: int,
    frame_loader,
    frame_writer,
    field_writer=None,
) -> float:
    """Compose every frame and emit them in index order; returns wall seconds."""
    entries = list(script.entries)

    def compose_one(index: int):
        frame = frame_loader(index)
        t = frame_time(index, meta.fps)
        g = effects.frame_intensity(t, entries, cfg.ramp_tau)
        states = timeline.states[index]
        field = frame_field(states, meta.dims, cfg.field_mode) if g > 0.0 else None
        out = effects.compose_frame(frame, field, g, cfg)
        return index, out, field

    start = time.perf_counter()
    if threads == 1:
        results = map(compose_one, range(meta.frame_count))
        for index, out, field in results:
            frame_writer(index, out)
            if field_writer is not None and field is not None:
                field_writer(index, field)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for index, out, field in pool.map(compose_one, range(meta.frame_count)):
                frame_writer(index, out)
                if field_writer is not None and field is not None:
                    field_writer(index, field)
    return time.perf_counter() - start


def cmd_render(config: RunConfig) -> int:
    try:
        meta = media.read_manifest(config.manifest)
        script = load_script(config.script)
    except (media.MediaError, script_mod.ScriptError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    config.out_dir.mkdir(parents=True, exist_ok=True)
    timeline = locate.resolve_timeline(script, meta, config.provider, config.hold)

    def writer(index: int, frame: FrameBuffer) -> None:
        media.write_frame(frame, config.out_dir / (meta.frame_pattern % index))

    field_writer = None
    if config.dump_field:
        def field_writer(index: int, field: FocusField) -> None:
            media.write_gray(
                effects.field_to_gray(field), config.out_dir / f"field_{index:06d}.pgm"
            )

    elapsed = render_sequence(
        meta, script, timeline, config.effect, config.threads,
        lambda i: media.read_frame(meta, i), writer, field_writer,
    )

    for diag in timeline.diagnostics:
        print(diag.summary())
        for msg in diag.messages:
            print(f"  {msg}")
    fps = meta.frame_count / elapsed if elapsed > 0 else float("inf")
    print(
        f"rendered {meta.frame_count} frames ({meta.width}x{meta.height}) "
        f"in {elapsed:.2f} s ({fps:.2f} fps, {config.threads} thread(s))"
    )
    return 2 if timeline.any_skipped else 0


def cmd_parse_script(path: Path) -> int:
    try:
        parsed = script_mod.parse_roadmap(path.read_text(encoding="utf-8"))
    except script_mod.ScriptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(script_mod.to_csv(parsed))
    return 0


def synthetic_frame(index: int, dims: RasterDims) -> FrameBuffer:
    """Deterministic bench content: smooth gradients plus a moving stripe."""
    h, w = dims.height, dims.width
    u = np.arange(w, dtype=np.float64)[None, :]
    v = np.arange(h, dtype=np.float64)[:, None]
    r = (u / w * 255.0) + 0.0 * v
    g = (v / h * 255.0) + 0.0 * u
    b = ((u + v + 7.0 * index) % w) / w * 255.0
    pixels = np.stack(np.broadcast_arrays(r, g, b), axis=-1)
    return FrameBuffer(dims, np.floor(pixels).astype(np.uint8))


def cmd_bench(width: int, height: int, frames: int, threads: int, repeats: int) -> int:
    dims = RasterDims(width, height)
    meta = VideoMeta(width, height, 30.0, frames, "bench_%06d.ppm", Path("."))
    script = Script((script_mod.ScriptEntry(0.0, frames / 30.0 + 1.0, "bench disc"),))
    provider = ProviderConfig(
        kind="synthetic", trajectory=DiscTrajectory(0.0, 0.0, 0.25, 0.3)
    )
    cfg = EffectConfig()
    loader = lambda i: synthetic_frame(i, dims)
    timeline = locate.resolve_timeline(
        script, meta, provider, HoldPolicy(), frame_loader=loader
    )

    def run(nthreads: int) -> tuple[float, list[bytes]]:
        best = float("inf")
        outputs: list[bytes] = []
        for _ in range(repeats):
            sink: dict[int, bytes] = {}
            elapsed = render_sequence(
                meta, script, timeline, cfg, nthreads, loader,
                lambda i, f: sink.__setitem__(i, f.pixels.tobytes()),
            )
            best = min(best, elapsed)
            outputs = [sink[i] for i in range(frames)]
        return best, outputs

    t1, out1 = run(1)
    tn, outn = run(threads)
    identical = out1 == outn
    fps1 = frames / t1
    fpsn = frames / tn
    speedup = t1 / tn
    print(f"bench {width}x{height} x {frames} frames, best of {repeats} repetition(s)")
    print(f"  1 thread : {t1:.3f} s  ({fps1:.2f} fps)")
    print(f"  {threads} threads: {tn:.3f} s  ({fpsn:.2f} fps)")
    print(f"  speedup  : {speedup:.2f}x")
    print(f"  outputs byte-identical across thread counts: {identical}")
    return 0 if identical else 1


def _build_provider(values: dict) -> ProviderConfig:
    kind = values.get("provider", "file")
    trajectory = DiscTrajectory(
        lon=float(values.get("disc_lon", 0.0)),
        lat=float(values.get("disc_lat", 0.0)),
        radius=float(values.get("disc_radius", 0.2)),
        rate=float(values.get("disc_rate", 0.0)),
    )
    mask_dir = values.get("mask_dir")
    return ProviderConfig(
        kind=kind,
        mask_dir=Path(mask_dir) if mask_dir else None,
        trajectory=trajectory,
        endpoint=values.get("sidecar_url") or os.environ.get(locate.SIDECAR_URL_ENV),
        timeout=float(values.get("timeout", 30.0)),
    )


def _build_effects(values: dict) -> EffectConfig:
    kwargs = {}
    for key in _EFFECT_KEYS:
        if key in values and values[key] is not None:
            kwargs[key] = values[key] if key == "field_mode" else float(values[key])
    return EffectConfig(**kwargs)


_TRUE_STRINGS = ("1", "true", "yes", "on")


def build_run_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config:
        values.update(parse_kv_file(Path(args.config)))
    for key, val in vars(args).items():
        if val is not None and key not in ("command", "config", "func"):
            values[key] = val
    for required in ("manifest", "script", "out_dir"):
        if required not in values:
            raise ValueError(f"missing required setting {required!r}")
    dump = values.get("dump_field", False)
    if isinstance(dump, str):
        dump = dump.lower() in _TRUE_STRINGS
    return RunConfig(
        manifest=Path(values["manifest"]),
        script=Path(values["script"]),
        out_dir=Path(values["out_dir"]),
        provider=_build_provider(values),
        effect=_build_effects(values),
        threads=int(values.get("threads", 1)),
        hold=HoldPolicy(int(values.get("max_hold_frames", 3))),
        dump_field=bool(dump),
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="focus360",
        description="Attention-guidance effect renderer for equirectangular 360 video",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_render = sub.add_parser("render", help="render a frame sequence with effects")
    p_render.add_argument("--config", help="key = value config file; flags override")
    p_render.add_argument("--manifest", help="input manifest path")
    p_render.add_argument("--script", help="roadmap or CSV script path")
    p_render.add_argument("--out-dir", dest="out_dir", help="output directory")
    p_render.add_argument("--provider", choices=("file", "synthetic", "remote"))
    p_render.add_argument("--mask-dir", dest="mask_dir")
    p_render.add_argument("--sidecar-url", dest="sidecar_url")
    p_render.add_argument("--threads", type=int)
    p_render.add_argument("--max-hold-frames", dest="max_hold_frames", type=int)
    p_render.add_argument("--dump-field", dest="dump_field", action="store_const", const=True)
    p_render.add_argument("--field-mode", dest="field_mode", choices=effects.FIELD_MODES)
    for key in ("theta_in", "theta_out", "sigma_max", "k_gray", "k_dark",
                "k_halo", "w_halo", "ramp_tau", "disc_lon", "disc_lat",
                "disc_radius", "disc_rate", "timeout"):
        p_render.add_argument(f"--{key.replace('_', '-')}", dest=key, type=float)

    p_parse = sub.add_parser("parse-script", help="roadmap -> CSV on stdout")
    p_parse.add_argument("path")

    p_bench = sub.add_parser("bench", help="synthetic throughput benchmark")
    p_bench.add_argument("--width", type=int, default=1024)
    p_bench.add_argument("--height", type=int, default=512)
    p_bench.add_argument("--frames", type=int, default=20)
    p_bench.add_argument("--threads", type=int, default=4)
    p_bench.add_argument("--repeats", type=int, default=2)

    args = parser.parse_args(argv)
    if args.command == "parse-script":
        return cmd_parse_script(Path(args.path))
    if args.command == "bench":
        return cmd_bench(args.width, args.height, args.frames, args.threads, args.repeats)
    try:
        config = build_run_config(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return cmd_render(config)


if __name__ == "__main__":
    sys.exit(main())
