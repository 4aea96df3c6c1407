"""focus360: attention-guidance effect renderer for equirectangular 360 video."""

from .effects import EffectConfig, compose_frame
from .geom import Direction, FocusField, RasterDims, TargetGeometry
from .media import FrameBuffer, MaskBuffer, VideoMeta
from .script import Script, ScriptEntry

__all__ = [
    "Direction",
    "EffectConfig",
    "FocusField",
    "FrameBuffer",
    "MaskBuffer",
    "RasterDims",
    "Script",
    "ScriptEntry",
    "TargetGeometry",
    "VideoMeta",
    "compose_frame",
]

__version__ = "0.1.0"
