"""Kinodynamic footstep planning for bipeds on the linear inverted pendulum."""

from .core import Config, KinematicParams, Pose2, normalize_angle, to_global, to_local
from .kernels import BACKEND
from .lipm import LipmParams, LocomotionParams

__all__ = [
    "BACKEND",
    "Config",
    "KinematicParams",
    "LipmParams",
    "LocomotionParams",
    "Pose2",
    "normalize_angle",
    "to_global",
    "to_local",
]

__version__ = "0.1.0"
