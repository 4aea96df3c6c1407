"""Run the sidecar: python -m focus360_sidecar --mock --port 8600"""

from __future__ import annotations

import argparse

import uvicorn

from .app import SidecarConfig, create_app


def main(argv: list[str] | None = None) -> None:
    parser = argparse.ArgumentParser(
        prog="focus360-sidecar",
        description="Parse / detect / track service for the focus360 renderer",
    )
    mode = parser.add_mutually_exclusive_group()
    mode.add_argument("--mock", dest="mode", action="store_const", const="mock",
                      help="deterministic mock mode (default)")
    mode.add_argument("--model", dest="mode", action="store_const", const="model",
                      help="model mode (answers 501 until weights are wired in)")
    parser.set_defaults(mode="mock")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8600)
    parser.add_argument("--disc-lon", type=float, default=0.0,
                        help="mock disc center longitude, radians")
    parser.add_argument("--disc-lat", type=float, default=0.0,
                        help="mock disc center latitude, radians")
    parser.add_argument("--disc-radius", type=float, default=0.2,
                        help="mock disc angular radius, radians")
    parser.add_argument("--track-step", type=float, default=0.0,
                        help="mock longitude advance per /track/next call, radians")
    args = parser.parse_args(argv)

    app = create_app(
        SidecarConfig(
            mode=args.mode,
            disc_lon=args.disc_lon,
            disc_lat=args.disc_lat,
            disc_radius=args.disc_radius,
            track_step=args.track_step,
        )
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


if __name__ == "__main__":
    main()
