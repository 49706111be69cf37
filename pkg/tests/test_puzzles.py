import numpy as np
import pytest
import shapely
from fractions import Fraction
from shapely.geometry import Point, Polygon, box

from parabolic_basin.puzzles import (MARGIN_TOL, NoQualifyingPiece, OnGraph, PuzzlePiece, _linestring,
                                     arrangement_faces, check_containment, puzzle_piece, step_one_piece, zero_piece)


def _piece(poly, depth=0):
    rp = poly.representative_point()
    return PuzzlePiece(depth, poly, complex(rp.x, rp.y))


# -- containment outcomes on synthetic pieces ----------------------------------


def test_containment_compact():
    c = check_containment(_piece(box(0, 0, 4, 4)), _piece(box(1, 1, 2, 2)))
    assert c.kind == "CompactlyContained"
    assert c.margin == pytest.approx(1.0)


def test_containment_touching():
    c = check_containment(_piece(box(0, 0, 4, 4)), _piece(box(0, 1, 2, 2)))
    assert c.kind == "Touching"
    assert c.margin == 0.0


def test_containment_disjoint_and_overlapping():
    assert check_containment(_piece(box(0, 0, 1, 1)), _piece(box(2, 2, 3, 3))).kind == "Disjoint"
    assert check_containment(_piece(box(0, 0, 1, 1)), _piece(box(1, 0, 2, 1))).kind == "Disjoint"
    assert check_containment(_piece(box(0, 0, 2, 2)), _piece(box(1, 1, 3, 3))).kind == "Overlapping"


def test_containment_margin_below_tolerance_is_touching():
    c = check_containment(_piece(box(0, 0, 4, 4)), _piece(box(1e-8, 1, 2, 2)), tol=1e-6)
    assert c.kind == "Touching"


def test_arrangement_faces_of_a_grid():
    lines = [np.array([0, 2]) + 1j * y for y in (0, 1, 2)] + [x + 1j * np.array([0, 2]) for x in (0, 1, 2)]
    faces = arrangement_faces(lines)
    assert len(faces) == 4
    assert sum(f.area for f in faces) == pytest.approx(4.0)


# -- the graphs at A* -------------------------------------------------------------


@pytest.mark.parametrize("k,s,zeta", [(2, "+", Fraction(1, 8)), (2, "-", Fraction(3, 8)),
                                      (3, "+", Fraction(1, 26)), (3, "-", Fraction(6, 13))])
def test_ray_angle_lands_at_access(graphs_star, k, s, zeta):
    g = graphs_star[(k, s)]
    assert g.zeta.fraction == zeta
    # tripling period exactly k
    assert (zeta * 3**k) % 1 == zeta
    assert all((zeta * 3**j) % 1 != zeta for j in range(1, k))


@pytest.mark.parametrize("k,s", [(2, "+"), (3, "-")])
def test_graph_is_forward_invariant(graphs_star, fmap_star, k, s):
    g = graphs_star[(k, s)]
    gamma0 = shapely.union_all([_linestring(q) for q in g.graph(0)])
    err = 0.0
    for q in g.polylines(1):
        w = fmap_star.eval(q)
        err = max(err, max(gamma0.distance(Point(z.real, z.imag)) for z in w[::3]))
    assert err < 1e-5


@pytest.mark.parametrize("k,s", [(2, "+"), (3, "+")])
def test_cycle_closes(graphs_star, fmap_star, k, s):
    g = graphs_star[(k, s)]
    cyc = g.cycle
    assert len(cyc) == k
    assert abs(fmap_star.eval(cyc[-1]) - cyc[0]) < 1e-5


def test_depth_one_refines_depth_zero(graphs_star):
    g = graphs_star[(3, "+")]
    f0, f1 = g.faces(0), g.faces(1)
    assert len(f1) > len(f0)
    # every depth-1 face lies in one depth-0 face
    for face in f1:
        rp = face.representative_point()
        owners = [F for F in f0 if F.contains(rp)]
        assert len(owners) == 1
        assert owners[0].buffer(1e-7).covers(face)


def test_zero_piece_touches_origin(graphs_star):
    g = graphs_star[(3, "+")]
    p0 = zero_piece(g)
    assert p0.polygon.boundary.distance(Point(0, 0)) < 1e-9
    assert p0.depth == 0


@pytest.mark.parametrize("s", "+-")
def test_step_one_piece_k3_compactly_contained(graphs_star, s):
    g = graphs_star[(3, s)]
    c = check_containment(zero_piece(g), step_one_piece(g), MARGIN_TOL)
    assert c.kind == "CompactlyContained"
    assert c.margin > MARGIN_TOL


@pytest.mark.parametrize("s", "+-")
def test_step_one_piece_k2_does_not_exist(graphs_star, s):
    with pytest.raises(NoQualifyingPiece):
        step_one_piece(graphs_star[(2, s)])


def test_puzzle_piece_lookup(graphs_star):
    g = graphs_star[(3, "+")]
    p1 = step_one_piece(g)
    q = puzzle_piece(g, p1.anchor, 1)
    assert q.polygon.equals(p1.polygon)
    assert q.boundary_arcs
    with pytest.raises(OnGraph):
        puzzle_piece(g, 0j, 1)
    with pytest.raises(ValueError):
        puzzle_piece(g, p1.anchor, 99)


def test_piece_text(graphs_star):
    txt = zero_piece(graphs_star[(3, "-")]).to_text()
    assert txt.startswith("PIECE depth=0")
    assert "anchor" in txt
