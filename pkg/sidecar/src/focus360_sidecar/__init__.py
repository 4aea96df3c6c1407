"""Model service for the focus360 renderer with a deterministic mock mode."""

from .app import SidecarConfig, create_app

__all__ = ["SidecarConfig", "create_app"]
__version__ = "0.1.0"
