"""Raster images of the filled Julia set with curve overlays, written as binary PPM."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .angles import RationalAngle
from .boettcher import RayTracer, equipotential, green_array, landing_point
from .cubic import CubicMap
from .curves import TracedCurve, write_curves

OVERLAY_KINDS = ("ray", "equipotential", "e0", "access", "piece", "chart")

OVERLAY_COLOURS = {
    "ray": (255, 64, 64),
    "equipotential": (255, 255, 255),
    "e0": (64, 255, 64),
    "access": (255, 160, 0),
    "piece": (255, 0, 255),
    "chart": (0, 255, 255),
}


@dataclass(frozen=True)
class Overlay:
    """One overlay request.

    kind  arg
    ray   angle (p/q)
    equipotential  level v
    e0    ignored (E0(1) and the figure-eight)
    access  (k, sign)
    piece   (z, n, k, sign)
    chart   depth
    """

    kind: str
    arg: object = None

    def __post_init__(self):
        if self.kind not in OVERLAY_KINDS:
            raise ValueError(f"unknown overlay kind {self.kind!r}")

    def label(self) -> str:
        return f"{self.kind}:{self.arg}"


@dataclass(frozen=True)
class RenderSpec:
    center: complex = 0j
    width: float = 4.0
    pixels: tuple = (400, 400)
    max_iter: int = 500
    overlays: tuple = ()

    def __post_init__(self):
        w, h = self.pixels
        if int(w) < 2 or int(h) < 2:
            raise ValueError("need at least 2x2 pixels")
        if not self.width > 0:
            raise ValueError("width must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        object.__setattr__(self, "pixels", (int(w), int(h)))
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "overlays", tuple(self.overlays))

    @property
    def height(self) -> float:
        w, h = self.pixels
        return self.width * (h - 1) / (w - 1)

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        """Pixel-centre coordinates; symmetric about the centre in exact arithmetic.

        x_i = cx + (width/2)(2i - (n-1))/(n-1), so the offsets of pixels i and n-1-i are
        exact negatives of each other.
        """
        w, h = self.pixels
        ox = (self.width / 2) * (2 * np.arange(w) - (w - 1)) / (w - 1)
        oy = (self.height / 2) * ((h - 1) - 2 * np.arange(h)) / (h - 1)  # row 0 at the top
        return ox, oy

    def grid(self) -> np.ndarray:
        ox, oy = self.axes()
        return (self.center.real + ox)[None, :] + 1j * (self.center.imag + oy)[:, None]

    def to_pixel(self, z) -> tuple[np.ndarray, np.ndarray]:
        """Fractional (column, row) of points z."""
        w, h = self.pixels
        z = np.asarray(z, dtype=complex)
        col = (z.real - self.center.real) / self.width * (w - 1) + (w - 1) / 2
        row = (h - 1) / 2 - (z.imag - self.center.imag) / self.height * (h - 1)
        return col, row


# -- classification layer -------------------------------------------------------


@dataclass(frozen=True)
class Classification:
    codes: np.ndarray  # 0 bounded/undecided, 1 parabolic basin, 2 escaping, 3 hits 0
    times: np.ndarray


def classify_grid(fmap: CubicMap, spec: RenderSpec) -> Classification:
    codes, when = fmap.classify_points(spec.grid(), spec.max_iter)
    return Classification(codes, when)


def colourize(fmap: CubicMap, spec: RenderSpec, cls: Classification) -> np.ndarray:
    h, w = cls.codes.shape
    img = np.zeros((h, w, 3), dtype=np.uint8)
    basin = cls.codes == 1
    if basin.any():
        t = cls.times[basin].astype(float)
        s = np.log1p(t) / np.log1p(max(1.0, float(t.max())))
        img[basin] = np.stack([40 + 60 * s, 60 + 120 * s, 120 + 135 * s], axis=-1).astype(np.uint8)
    esc = cls.codes == 2
    if esc.any():
        G, _ = green_array(fmap, spec.grid()[esc])
        s = np.clip(np.log1p(G) / np.log1p(max(1e-12, float(G.max()))), 0, 1)
        img[esc] = np.stack([200 * (1 - s) + 30, 180 * (1 - s) + 30, 120 * (1 - s) + 30], axis=-1).astype(np.uint8)
    img[cls.codes == 3] = (255, 255, 0)
    return img


def draw_polyline(img: np.ndarray, spec: RenderSpec, pts, colour) -> int:
    """Rasterize a polyline by dense sampling; returns the number of pixels set."""
    pts = np.asarray(pts, dtype=complex)
    h, w = img.shape[:2]
    col, row = spec.to_pixel(pts)
    n = 0
    for i in range(pts.size - 1):
        seg = max(1, int(np.ceil(max(abs(col[i + 1] - col[i]), abs(row[i + 1] - row[i])) * 2)))
        if seg > 4 * (w + h):  # off-screen excursion, clip by sampling the visible part only
            seg = 4 * (w + h)
        s = np.linspace(0.0, 1.0, seg + 1)
        c = np.rint(col[i] + s * (col[i + 1] - col[i])).astype(np.int64)
        r = np.rint(row[i] + s * (row[i + 1] - row[i])).astype(np.int64)
        ok = (c >= 0) & (c < w) & (r >= 0) & (r < h)
        img[r[ok], c[ok]] = colour
        n += int(ok.sum())
    return n


def write_ppm(path, img: np.ndarray) -> None:
    h, w = img.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(img, dtype=np.uint8).tobytes())


def read_ppm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P6":
        raise ValueError("not a binary PPM")
    w, h = int(parts[1]), int(parts[2])
    return np.frombuffer(parts[4], dtype=np.uint8)[: w * h * 3].reshape(h, w, 3)


# -- overlays -----------------------------------------------------------------


class _Context:
    """Lazily built shared objects for overlay construction."""

    def __init__(self, fmap: CubicMap):
        self.fmap = fmap
        self._tracer = None
        self._partition = None
        self._graphs = {}

    @property
    def tracer(self) -> RayTracer:
        if self._tracer is None:
            self._tracer = RayTracer(self.fmap)
        return self._tracer

    @property
    def partition(self):
        if self._partition is None:
            from .partition import build_partition

            self._partition = build_partition(self.fmap)
            self._tracer = self._partition.tracer
        return self._partition

    def graph(self, k: int, sign):
        key = (k, str(sign))
        if key not in self._graphs:
            from .puzzles import build_graph

            self._graphs[key] = build_graph(self.partition, k, sign)
        return self._graphs[key]


def ray_overlay(fmap: CubicMap, angle, tracer: RayTracer | None = None, v_low: float = 1e-4) -> TracedCurve:
    """The traced ray down to potential v_low with its landing point appended."""
    tracer = tracer or RayTracer(fmap)
    angle = RationalAngle.of(angle)
    c = tracer.trace(angle, v_low)
    land = landing_point(fmap, angle, tracer)
    return TracedCurve(c.label, np.append(c.points, land.point), np.append(c.params, 0.0),
                       {"angle": angle, "landing": land.point, "landing_converged": land.converged})


def build_overlay(ctx: _Context, ov: Overlay) -> list:
    f = ctx.fmap
    if ov.kind == "ray":
        return [ray_overlay(f, ov.arg, ctx.tracer)]
    if ov.kind == "equipotential":
        return [equipotential(f, float(ov.arg), 1024)]
    if ov.kind == "e0":
        p = ctx.partition
        return list(p.s0_curves) + list(p.s1_curves)
    if ov.kind == "access":
        from .accesses import build_access

        k, sign = ov.arg
        return [build_access(ctx.partition, int(k), sign).to_curve()]
    if ov.kind == "piece":
        from .puzzles import puzzle_piece

        z, n, k, sign = ov.arg
        piece = puzzle_piece(ctx.graph(int(k), sign), complex(z), int(n))
        c = piece.circuit
        return [TracedCurve(f"PIECE depth={n}", c, np.arange(c.size, dtype=float), {})]
    if ov.kind == "chart":
        from .itinerary import boundary_chart

        return [boundary_chart(ctx.partition, int(ov.arg)).to_curve()]
    raise ValueError(ov.kind)


@dataclass
class RenderResult:
    image: np.ndarray
    classification: Classification
    curves: list = field(default_factory=list)
    omissions: list = field(default_factory=list)  # (overlay label, error text)

    def report(self) -> str:
        lines = [f"RENDER pixels={self.image.shape[1]}x{self.image.shape[0]}"]
        for name, code in (("basin", 1), ("escaping", 2), ("bounded", 0), ("hits_zero", 3)):
            lines.append(f"pixels_{name} = {int((self.classification.codes == code).sum())}")
        for c in self.curves:
            lines.append(f"overlay {c.label} npoints={c.points.size}")
        for lab, err in self.omissions:
            lines.append(f"omitted {lab}: {err}")
        return "\n".join(lines) + "\n"


def render(fmap: CubicMap, spec: RenderSpec) -> RenderResult:
    cls = classify_grid(fmap, spec)
    img = colourize(fmap, spec, cls)
    ctx = _Context(fmap)
    res = RenderResult(img, cls)
    for ov in spec.overlays:
        try:
            curves = build_overlay(ctx, ov)
        except Exception as exc:  # failures become omissions
            res.omissions.append((ov.label(), f"{type(exc).__name__}: {exc}"))
            continue
        for c in curves:
            draw_polyline(img, spec, c.points, OVERLAY_COLOURS[ov.kind])
            res.curves.append(c)
    return res


def save_render(res: RenderResult, out_dir, stem: str = "render") -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"image": out / f"{stem}.ppm", "curves": out / f"{stem}_curves.txt", "report": out / f"{stem}_report.txt"}
    write_ppm(paths["image"], res.image)
    with open(paths["curves"], "w") as fh:
        write_curves(res.curves, fh)
    paths["report"].write_text(res.report())
    return paths
