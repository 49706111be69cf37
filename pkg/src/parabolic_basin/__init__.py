"""Numerical laboratory for cubic maps z + a z^2 + z^3 with a parabolic fixed point at 0."""

from .angles import RationalAngle, cyclic_order, theta_pm
from .config import RunConfig
from .cubic import CubicMap, Cycle, OrbitClass, check_assumption1

__all__ = ["RationalAngle", "cyclic_order", "theta_pm", "CubicMap", "Cycle", "OrbitClass", "check_assumption1",
           "RunConfig"]
