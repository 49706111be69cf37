"""Polyline geometry on complex arrays: distances, crossings, intersections, containment."""

from __future__ import annotations

import numpy as np


def point_segment_distance(z, a, b):
    """Distance from points z to segments [a, b] (broadcasting)."""
    d = b - a
    dd = (d.real**2 + d.imag**2)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = ((z - a) * np.conj(d)).real / dd
    t = np.where(dd > 0, np.clip(t, 0.0, 1.0), 0.0)
    return np.abs(z - (a + t * d))


def distance_to_polyline(z, poly, chunk: int = 4096):
    """Minimum distance from each point of z to the polyline ``poly``."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    poly = np.asarray(poly, dtype=complex)
    if poly.size == 1:
        return np.abs(z - poly[0])
    a, b = poly[:-1], poly[1:]
    out = np.full(z.shape, np.inf)
    for s in range(0, a.size, chunk):
        dd = point_segment_distance(z[:, None], a[None, s:s + chunk], b[None, s:s + chunk])
        out = np.minimum(out, dd.min(axis=1))
    return out


def near_polyline(z, poly, r: float, block: int = 64):
    """Boolean mask: points of z within distance r of the polyline.

    Segments are grouped in blocks; only blocks whose bounding box lies within r of a point
    are measured exactly.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    poly = np.asarray(poly, dtype=complex)
    out = np.zeros(z.shape, dtype=bool)
    n = poly.size - 1
    if n < 1:
        return np.abs(z - poly[0]) <= r
    starts = np.arange(0, n, block)
    lo_x = np.array([poly[s:s + block + 1].real.min() for s in starts]) - r
    hi_x = np.array([poly[s:s + block + 1].real.max() for s in starts]) + r
    lo_y = np.array([poly[s:s + block + 1].imag.min() for s in starts]) - r
    hi_y = np.array([poly[s:s + block + 1].imag.max() for s in starts]) + r
    hit = ((z.real[:, None] >= lo_x) & (z.real[:, None] <= hi_x)
           & (z.imag[:, None] >= lo_y) & (z.imag[:, None] <= hi_y))
    for k in np.nonzero(hit.any(axis=0))[0]:
        rows = np.nonzero(hit[:, k] & ~out)[0]
        if rows.size == 0:
            continue
        seg = poly[starts[k]:starts[k] + block + 1]
        d = point_segment_distance(z[rows, None], seg[None, :-1], seg[None, 1:]).min(axis=1)
        out[rows[d <= r]] = True
    return out


def hausdorff_one_sided(src, dst):
    """max over src points of the distance to the polyline dst."""
    return float(distance_to_polyline(src, dst).max())


def _cross(u, v):
    return u.real * v.imag - u.imag * v.real


def segments_intersect(p1, p2, q1, q2, eps: float = 0.0) -> bool:
    d1 = _cross(q2 - q1, p1 - q1)
    d2 = _cross(q2 - q1, p2 - q1)
    d3 = _cross(p2 - p1, q1 - p1)
    d4 = _cross(p2 - p1, q2 - p1)
    return (d1 * d2 < -eps) and (d3 * d4 < -eps)


def polyline_intersections(P, Q, exclude_near=None, tol: float = 0.0):
    """Proper crossings between polylines P and Q as (i, j) segment index pairs.

    Segments with an endpoint within ``tol`` of any point in ``exclude_near`` are skipped.
    """
    P = np.asarray(P, dtype=complex)
    Q = np.asarray(Q, dtype=complex)
    a, b = P[:-1], P[1:]
    c, d = Q[:-1], Q[1:]
    # bounding-box prefilter
    axmin = np.minimum(a.real, b.real)
    axmax = np.maximum(a.real, b.real)
    aymin = np.minimum(a.imag, b.imag)
    aymax = np.maximum(a.imag, b.imag)
    cxmin = np.minimum(c.real, d.real)
    cxmax = np.maximum(c.real, d.real)
    cymin = np.minimum(c.imag, d.imag)
    cymax = np.maximum(c.imag, d.imag)
    hits = []
    for i in range(a.size):
        m = (cxmax >= axmin[i]) & (cxmin <= axmax[i]) & (cymax >= aymin[i]) & (cymin <= aymax[i])
        js = np.nonzero(m)[0]
        if js.size == 0:
            continue
        d1 = _cross(d[js] - c[js], a[i] - c[js])
        d2 = _cross(d[js] - c[js], b[i] - c[js])
        d3 = _cross(b[i] - a[i], c[js] - a[i])
        d4 = _cross(b[i] - a[i], d[js] - a[i])
        ok = (d1 * d2 < 0) & (d3 * d4 < 0)
        for j in js[ok]:
            if exclude_near is not None:
                near = np.asarray(exclude_near)
                ends = np.array([a[i], b[i], c[j], d[j]])
                if np.min(np.abs(ends[:, None] - near[None, :])) < tol:
                    continue
            hits.append((i, int(j)))
    return hits


def self_intersections(P, tol: float = 0.0):
    """Proper crossings of a polyline with itself (non-adjacent segments)."""
    P = np.asarray(P, dtype=complex)
    hits = []
    n = P.size - 1
    a, b = P[:-1], P[1:]
    for i in range(n):
        js = np.arange(i + 2, n)
        if js.size == 0:
            continue
        d1 = _cross(b[js] - a[js], a[i] - a[js])
        d2 = _cross(b[js] - a[js], b[i] - a[js])
        d3 = _cross(b[i] - a[i], a[js] - a[i])
        d4 = _cross(b[i] - a[i], b[js] - a[i])
        ok = (d1 * d2 < -tol) & (d3 * d4 < -tol)
        hits.extend((i, int(j)) for j in js[ok])
    return hits


def points_in_polygon(z, poly):
    """Even-odd crossing count of a horizontal ray from each z against the closed polygon."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    poly = np.asarray(poly, dtype=complex)
    if poly[0] != poly[-1]:
        poly = np.append(poly, poly[0])
    x0, y0 = poly[:-1].real, poly[:-1].imag
    x1, y1 = poly[1:].real, poly[1:].imag
    inside = np.zeros(z.shape, dtype=bool)
    zx, zy = z.real, z.imag
    chunk = max(1, 2_000_000 // max(1, x0.size))
    for s in range(0, z.size, chunk):
        px = zx[s:s + chunk, None]
        py = zy[s:s + chunk, None]
        cond = (y0 > py) != (y1 > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
        crossing = cond & (px < xint)
        inside[s:s + chunk] = (np.count_nonzero(crossing, axis=1) % 2) == 1
    return inside


def winding_number(z, closed_poly) -> int:
    poly = np.asarray(closed_poly, dtype=complex)
    if poly[0] != poly[-1]:
        poly = np.append(poly, poly[0])
    ang = np.angle((poly[1:] - z) / (poly[:-1] - z))
    return int(round(ang.sum() / (2 * np.pi)))


def polygon_area(closed_poly) -> float:
    p = np.asarray(closed_poly, dtype=complex)
    if p[0] != p[-1]:
        p = np.append(p, p[0])
    return 0.5 * float(np.sum(p[:-1].real * p[1:].imag - p[1:].real * p[:-1].imag))


def diameter(pts) -> float:
    pts = np.asarray(pts, dtype=complex)
    if pts.size < 2:
        return 0.0
    if pts.size > 4000:
        from scipy.spatial import ConvexHull

        xy = np.column_stack([pts.real, pts.imag])
        try:
            pts = pts[ConvexHull(xy).vertices]
        except Exception:
            pass
    return float(np.abs(pts[:, None] - pts[None, :]).max())


def polyline_length(pts) -> float:
    return float(np.abs(np.diff(np.asarray(pts))).sum())
