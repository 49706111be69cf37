"""Graphs Gamma(theta) built on a periodic access, their pull-backs and puzzle pieces.

Gamma(theta) = E_inf(1) + E0(1) + the k iterates of the access (off the petal) + the k iterates
of an external ray landing at the access landing point. Gamma_n is the union of the pull-backs
f^-j(Gamma), j <= n; pieces are the bounded faces of the planar arrangement, obtained by
noding all polylines and polygonizing (shapely).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import shapely
from shapely.geometry import LineString, MultiLineString, Point, Polygon
from shapely.ops import polygonize, unary_union

from .accesses import AccessCurve, BranchSelectionFailure, _parse_sign, build_access
from .angles import RationalAngle
from .boettcher import boettcher_inverse, equipotential
from .curves import TracedCurve
from .fatou import inverse_fatou
from .geometry import near_polyline
from .itinerary import boundary_point
from .partition import PartitionGraph

EQUIPOTENTIAL_LEVEL = 1.0
LANDING_MATCH = 2e-4
SNAP = 1e-7
ARC_BUDGET = 64
MAX_DEPTH = 8
MARGIN_TOL = 1e-6
MAX_INSERT = 60
DUPLICATE_TOL = 1e-6


class NoLandingRayFound(RuntimeError):
    pass


class PullbackExplosion(RuntimeError):
    pass


class OnGraph(ValueError):
    pass


# -- the graph ----------------------------------------------------------------


@dataclass
class PuzzleGraph:
    partition: PartitionGraph = field(repr=False)
    k: int
    sign: int
    access: AccessCurve = field(repr=False)
    zeta: RationalAngle
    ray_candidates: tuple
    curves: tuple = field(repr=False)
    _levels: dict = field(default_factory=dict, repr=False)

    @property
    def fmap(self):
        return self.partition.fmap

    @property
    def cycle(self) -> list:
        x = self.access.landing.point
        out = [x]
        for _ in range(self.k - 1):
            out.append(self.fmap.eval(out[-1]))
        return out

    def polylines(self, n: int) -> list:
        """Polylines of f^-n(Gamma) (not the union)."""
        if n not in self._levels:
            if n == 0:
                self._levels[0] = [c.points for c in self.curves]
            else:
                prev = self.polylines(n - 1)
                pulled = pull_back_polylines(self.fmap, prev)
                # Gamma is forward invariant off the petal: sheets retracing lower-depth curves are dropped
                self._levels[n] = [p for p in pulled if not _retraces(p, self.graph(n - 1))]
                if len(self._levels[n]) > ARC_BUDGET * 3**n * len(self.curves):
                    raise PullbackExplosion(f"{len(self._levels[n])} arcs at depth {n}")
        return self._levels[n]

    def graph(self, n: int) -> list:
        """Gamma_n: the union of the pull-backs of depth 0..n."""
        out = []
        for j in range(n + 1):
            out.extend(self.polylines(j))
        return out

    def faces(self, n: int) -> list:
        key = ("faces", n)
        if key not in self._levels:
            self._levels[key] = arrangement_faces(self.graph(n))
        return self._levels[key]


def _probe_landing(tracer, angle, n_div=32):
    return complex(tracer.ray_points(angle, n_div)[-1])


def select_ray(partition: PartitionGraph, x: complex, k: int, tol: float = LANDING_MATCH):
    """Angles of tripling period exactly k whose ray lands within tol of x, and the nearest misses."""
    tracer = partition.tracer
    q = 3**k - 1
    hits, misses = [], []
    for j in range(1, q):
        t = RationalAngle(j, q)
        if t.orbit_period(3) != (0, k):
            continue
        d = abs(_probe_landing(tracer, t) - x)
        (hits if d < tol else misses).append((d, t))
    if not hits:
        misses.sort(key=lambda p: p[0])
        raise NoLandingRayFound(f"no period-{k} ray lands at {x:.6g}; nearest: "
                                + ", ".join(f"{t} ({d:.2g})" for d, t in misses[:3]))
    hits.sort(key=lambda p: p[0])
    return [t for _, t in hits]


def _ray_to(partition: PartitionGraph, angle: RationalAngle, x: complex, v_top: float) -> np.ndarray:
    tracer = partition.tracer
    n = 16
    while True:
        pts = tracer.ray_points(angle, n)
        if abs(pts[-1] - x) < 1e-6 or n >= 64:
            break
        n *= 2
    pot = tracer.potentials(n)
    keep = pot <= v_top
    pts = pts[keep]
    near = np.nonzero(np.abs(pts - x) < 1e-5)[0]
    if near.size:
        pts = pts[: near[0] + 1]
    return np.append(pts, x)


def _clip_off_petal(partition: PartitionGraph, pts: np.ndarray, depth: float = 0.02) -> np.ndarray:
    """Tail of pts from its last point well inside the petal, so that the cut crosses E0(1)."""
    phi = partition.chart.evaluate(pts)
    inside = np.nonzero(np.real(phi) > 1.0 + depth)[0]
    if inside.size == 0:
        return pts
    return pts[inside[-1]:]


def build_graph(partition: PartitionGraph, k: int, sign, access: AccessCurve | None = None,
                n_equipotential: int = 1024) -> PuzzleGraph:
    sigma = _parse_sign(sign)
    access = access or build_access(partition, k, sigma)
    fmap, chart = partition.fmap, partition.chart
    x = access.landing.point
    cands = select_ray(partition, x, k)
    zeta = cands[0]
    v = EQUIPOTENTIAL_LEVEL
    curves = [equipotential(fmap, v, n_equipotential)]
    e1 = partition.s0_curves[0]
    pts = np.concatenate([[0j], e1.points, [0j]])
    # the critical value f(c0) sits on E0(1) at t = 0: make it exact for the pull-backs
    i0 = int(np.argmin(np.abs(e1.params))) + 1
    pts[i0] = fmap.eval(fmap.c0)
    curves.append(TracedCurve("LineE0(1)", pts, np.arange(pts.size, dtype=float), {"level": 1}))
    # the access starts on E0(1): prepend a point just inside the petal
    t0 = access.meta["t0"]
    inner = inverse_fatou(chart, complex(1.05, sigma * t0))
    gam = np.concatenate([[inner], access.points])
    xi = x
    for i in range(k):
        w = gam if i == 0 else fmap.iterate(gam, i)
        w = _clip_off_petal(partition, w)
        w[-1] = xi
        curves.append(TracedCurve(f"ACCESS k={k} iterate={i}", w, np.arange(w.size, dtype=float),
                                  {"k": k, "sign": sigma, "iterate": i}))
        angle = zeta.times(3**i)
        r = _ray_to(partition, angle, xi, 1.5 * v)
        curves.append(TracedCurve(f"ExternalRay({angle})", r, np.arange(r.size, dtype=float),
                                  {"angle": angle}))
        xi = fmap.eval(xi)
    return PuzzleGraph(partition, k, sigma, access, zeta, tuple(cands), tuple(curves))


# -- pull-backs ---------------------------------------------------------------


def _retraces(p: np.ndarray, curves: list, tol: float = DUPLICATE_TOL, share: float = 0.5) -> bool:
    probe = p[np.linspace(0, p.size - 1, min(p.size, 64)).astype(int)]
    on = np.zeros(probe.size, dtype=bool)
    for c in curves:
        on |= near_polyline(probe, c, tol)
        if on.mean() > share:
            return True
    return False


def _split_at(pts: np.ndarray, marks: list, tol: float = 1e-12) -> list:
    """Split a polyline at samples equal to any mark; each piece oriented with the mark last."""
    idx = [i for i in range(pts.size) if any(abs(pts[i] - m) <= tol * max(1.0, abs(m)) for m in marks)]
    if not idx:
        return [pts]
    cuts = sorted(set([0] + idx + [pts.size - 1]))
    pieces = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        seg = pts[a:b + 1]
        if seg.size < 2:
            continue
        if a in idx and b not in idx:
            seg = seg[::-1]
        pieces.append(seg)
    return pieces


def _pull_sheet(fmap, pts: np.ndarray, root: complex, critical_values, ambiguity: float = 0.5) -> np.ndarray:
    """Continuous preimage of pts starting at root, inserting image-plane midpoints where needed."""
    out = [root]
    src = list(pts)
    i = 1
    inserted = 0
    while i < len(src):
        w = src[i]
        roots = fmap.preimages(np.array([w]))[0]
        d = np.abs(roots - out[-1])
        order = np.argsort(d)
        crit = any(abs(w - cv) < 1e-9 for cv in critical_values)
        if not crit and d[order[0]] > ambiguity * d[order[1]]:
            if inserted > MAX_INSERT * len(pts):
                raise BranchSelectionFailure("pull-back does not resolve near a critical value")
            src.insert(i, 0.5 * (src[i - 1] + w))
            inserted += 1
            continue
        out.append(roots[order[0]])
        i += 1
    return np.array(out)


def pull_back_polylines(fmap, polylines: list) -> list:
    cvs = [complex(fmap.eval(c)) for c in fmap.critical_points()]
    out = []
    for pts in polylines:
        for piece in _split_at(np.asarray(pts, dtype=complex), cvs):
            for root in fmap.preimages(np.array([piece[0]]))[0]:
                out.append(_pull_sheet(fmap, piece, complex(root), cvs))
    return _snap(out)


def _snap(polylines: list, tol: float = SNAP) -> list:
    """Merge polyline endpoints closer than tol so junctions are exact."""
    ends = []
    for p in polylines:
        ends.extend([p[0], p[-1]])
    reps: list = []
    for e in ends:
        if not any(abs(e - r) < tol for r in reps):
            reps.append(e)
    reps_a = np.array(reps)
    out = []
    for p in polylines:
        p = p.copy()
        for j in (0, -1):
            r = reps_a[np.argmin(np.abs(reps_a - p[j]))]
            if abs(r - p[j]) < tol:
                p[j] = r
        out.append(p)
    return out


# -- faces --------------------------------------------------------------------


def _linestring(pts) -> LineString | None:
    pts = np.asarray(pts, dtype=complex)
    keep = np.concatenate([[True], np.abs(np.diff(pts)) > 0])
    pts = pts[keep]
    if pts.size < 2:
        return None
    return LineString(np.column_stack([pts.real, pts.imag]))


def arrangement_faces(polylines: list) -> list:
    lines = [ls for ls in (_linestring(p) for p in polylines) if ls is not None]
    noded = unary_union(MultiLineString(lines))
    faces = list(polygonize(noded))
    return faces


@dataclass(frozen=True)
class PuzzlePiece:
    depth: int
    polygon: Polygon = field(repr=False)
    anchor: complex
    boundary_arcs: tuple = field(default=(), repr=False)

    def contains(self, z) -> bool:
        return bool(self.polygon.contains(Point(complex(z).real, complex(z).imag)))

    @property
    def circuit(self) -> np.ndarray:
        xy = np.asarray(self.polygon.exterior.coords)
        return xy[:, 0] + 1j * xy[:, 1]

    @property
    def diameter(self) -> float:
        c = self.circuit
        hull = self.polygon.convex_hull
        xy = np.asarray(hull.exterior.coords) if hull.geom_type == "Polygon" else np.asarray(hull.coords)
        h = xy[:, 0] + 1j * xy[:, 1]
        return float(np.abs(h[:, None] - h[None, :]).max()) if h.size else 0.0

    def to_text(self) -> str:
        lines = [f"PIECE depth={self.depth} arcs={len(self.boundary_arcs)}"]
        for arc in self.boundary_arcs:
            lines.append(f"  {arc.label} samples={arc.points.size}")
        lines.append(f"  anchor {self.anchor.real:.17g} {self.anchor.imag:.17g}")
        return "\n".join(lines)


def _boundary_arcs(graph: PuzzleGraph, poly: Polygon, n: int) -> tuple:
    """Split the exterior circuit into runs along the same source polyline."""
    ring = np.asarray(poly.exterior.coords)
    z = ring[:, 0] + 1j * ring[:, 1]
    src = graph.graph(n)
    labels = graph_labels(graph, n)
    lines = [_linestring(p) for p in src]
    tree = shapely.STRtree([ls for ls in lines if ls is not None])
    index = [i for i, ls in enumerate(lines) if ls is not None]
    mids = 0.5 * (z[:-1] + z[1:])
    owner = []
    for m in mids:
        j = tree.nearest(Point(m.real, m.imag))
        owner.append(index[int(j)])
    arcs = []
    start = 0
    for i in range(1, len(owner) + 1):
        if i == len(owner) or owner[i] != owner[start]:
            seg = z[start:i + 1]
            arcs.append(TracedCurve(labels[owner[start]], seg, np.arange(seg.size, dtype=float), {}))
            start = i
    return tuple(arcs)


def graph_labels(graph: PuzzleGraph, n: int) -> list:
    base = [c.label for c in graph.curves]
    out = []
    for j in range(n + 1):
        count = len(graph.polylines(j))
        per = max(1, count // max(1, len(base)))
        if j == 0:
            out.extend(base)
        else:
            out.extend(f"PULLBACK depth={j} #{i}" for i in range(count))
    return out


def puzzle_piece(graph: PuzzleGraph, z: complex, n: int, tube: float = 1e-9) -> PuzzlePiece:
    """The depth-n piece containing z (a bounded face of Gamma_n)."""
    if n > MAX_DEPTH:
        raise ValueError(f"depth {n} exceeds the ceiling {MAX_DEPTH}")
    z = complex(z)
    p = Point(z.real, z.imag)
    lines = [_linestring(q) for q in graph.graph(n)]
    if min(ls.distance(p) for ls in lines if ls is not None) < tube:
        raise OnGraph(f"{z} lies on the depth-{n} graph")
    for face in graph.faces(n):
        if face.contains(p):
            return PuzzlePiece(n, face, z, _boundary_arcs(graph, face, n))
    raise OnGraph(f"{z} is in no bounded face of the depth-{n} graph")


def anchor_point(graph: PuzzleGraph) -> complex:
    """The preimage of beta on the boundary of B on the side of the access: Theta = 3/4 or 1/4."""
    return boundary_point(graph.partition, RationalAngle(3, 4) if graph.sign > 0 else RationalAngle(1, 4))


# -- containment --------------------------------------------------------------


@dataclass(frozen=True)
class Containment:
    kind: str  # CompactlyContained | Touching | Overlapping | Disjoint
    margin: float
    points: tuple = ()

    def __str__(self):
        return f"{self.kind}(margin={self.margin:.3g})"


def check_containment(outer: PuzzlePiece, inner: PuzzlePiece, tol: float = MARGIN_TOL) -> Containment:
    po, pi = outer.polygon, inner.polygon
    margin = float(po.boundary.distance(pi.boundary))
    near = tuple(complex(*pt.coords[0]) for pt in shapely.ops.nearest_points(po.boundary, pi.boundary))
    if po.buffer(1e-12).covers(pi):
        if margin > tol:
            return Containment("CompactlyContained", margin, near)
        return Containment("Touching", margin, near)
    if not po.intersects(pi) or po.intersection(pi).area == 0.0:
        return Containment("Disjoint", margin, near)
    return Containment("Overlapping", margin, near)


def nesting_report(graph: PuzzleGraph, z: complex, n_max: int, visit_pieces: dict | None = None) -> dict:
    """Pieces P_n(z) for n <= n_max, consecutive containment and diameters.

    visit_pieces maps a name to a depth-1 piece; the report lists the iterates f^j(z),
    j < n_max, lying in each.
    """
    pieces, relation = [], []
    for n in range(n_max + 1):
        pieces.append(puzzle_piece(graph, z, n))
    for n in range(1, n_max + 1):
        relation.append(str(check_containment(pieces[n - 1], pieces[n])))
    visits = {}
    if visit_pieces:
        orbit = [complex(z)]
        for _ in range(n_max):
            orbit.append(complex(graph.fmap.eval(orbit[-1])))
        for name, piece in visit_pieces.items():
            visits[name] = [j for j, w in enumerate(orbit) if piece.contains(w)]
    return {"pieces": pieces, "containment": relation, "diameters": [p.diameter for p in pieces],
            "visits": visits}


# -- the distinguished pieces ---------------------------------------------------


class NoQualifyingPiece(RuntimeError):
    pass


def _piece(graph: PuzzleGraph, face: Polygon, n: int) -> PuzzlePiece:
    rp = face.representative_point()
    return PuzzlePiece(n, face, complex(rp.x, rp.y), _boundary_arcs(graph, face, n))


def zero_piece(graph: PuzzleGraph, n: int = 0, tol: float = 1e-9) -> PuzzlePiece:
    """The depth-n piece off the petal with 0 in its closure."""
    f = graph.fmap
    inside_petal = f.eval(f.eval(f.c0))  # phi = 2
    origin = Point(0.0, 0.0)
    for face in graph.faces(n):
        if face.boundary.distance(origin) < tol and not face.contains(Point(inside_petal.real, inside_petal.imag)):
            return _piece(graph, face, n)
    raise NoQualifyingPiece("no piece off the petal touches 0")


def step_one_piece(graph: PuzzleGraph, chart_depth: int = 6, tol: float = MARGIN_TOL) -> PuzzlePiece:
    """A depth-1 piece meeting the half of B on the far side (Delta1 for +, Delta0 for -) whose
    closure avoids 0 and the last access iterate f^(k-1)(gamma).

    When several qualify, the one holding the preimage of beta on that side is preferred.
    """
    from .itinerary import boundary_chart

    part = graph.partition
    bc = boundary_chart(part, chart_depth)
    half = [(t, z) for t, z in zip(bc.angles, bc.points)
            if (float(t) > 0.5 if graph.sign > 0 else 0.0 < float(t) < 0.5)]
    last = _linestring(graph.curves[2 + 2 * (graph.k - 1)].points)
    origin = Point(0.0, 0.0)
    anchor = anchor_point(graph)
    found = []
    for face in graph.faces(1):
        if not any(face.contains(Point(z.real, z.imag)) for _, z in half):
            continue
        if face.boundary.distance(origin) < tol or face.boundary.distance(last) < tol:
            continue
        found.append(face)
    if not found:
        raise NoQualifyingPiece(
            f"k={graph.k}: every depth-1 piece on that side has 0 or f^(k-1)(gamma) in its closure")
    found.sort(key=lambda f: not f.contains(Point(anchor.real, anchor.imag)))
    return _piece(graph, found[0], 1)
