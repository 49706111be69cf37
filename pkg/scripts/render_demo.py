"""Render A* with rays, the E0 lines, a k=3 access and its depth-1 piece; then the a=0 control."""
import sys
from pathlib import Path

from parabolic_basin.cubic import CubicMap
from parabolic_basin.render import Overlay, RenderSpec, render, save_render

out = Path(sys.argv[1] if len(sys.argv) > 1 else "out/demo")

overlays = [Overlay("ray", a) for a in ("0", "1/2", "1/3", "1/6")]
overlays += [Overlay("equipotential", 1.0), Overlay("e0"), Overlay("access", (3, "+")), Overlay("chart", 8)]
spec = RenderSpec(0j, 3.2, (480, 480), 400, tuple(overlays))
res = render(CubicMap(0.3 + 1.1j), spec)
print(res.report(), end="")
print(save_render(res, out, "a_star")["image"])

ctrl = render(CubicMap(0j), RenderSpec(0j, 3.2, (481, 481), 400, (Overlay("ray", "0"), Overlay("ray", "1/2"))))
print(ctrl.report(), end="")
print(save_render(ctrl, out, "a_zero")["image"])
