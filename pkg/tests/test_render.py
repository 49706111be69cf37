import numpy as np
import pytest

from parabolic_basin.cubic import CubicMap
from parabolic_basin.render import (Overlay, RenderSpec, classify_grid, draw_polyline, ray_overlay, read_ppm, render,
                                    save_render, write_ppm)


def test_axes_symmetric():
    spec = RenderSpec(0j, 3.0, (41, 31))
    ox, oy = spec.axes()
    assert np.array_equal(ox, -ox[::-1])
    assert np.array_equal(oy, -oy[::-1])
    col, row = spec.to_pixel(spec.grid())
    assert np.allclose(col, np.arange(41)[None, :])
    assert np.allclose(row, np.arange(31)[:, None])


def test_a0_classification_point_symmetric():
    # z -> -z conjugates z + z^3 to itself
    cls = classify_grid(CubicMap(0j), RenderSpec(0j, 3.0, (81, 81), 300))
    assert np.array_equal(cls.codes, cls.codes[::-1, ::-1])
    assert np.array_equal(cls.times, cls.times[::-1, ::-1])
    assert (cls.codes == 1).any() and (cls.codes == 2).any()


def test_a0_rays_land_at_origin():
    f = CubicMap(0j)
    for angle in ("0", "1/2"):
        c = ray_overlay(f, angle)
        assert abs(c.points[-1]) < 1e-3


def test_render_deterministic(tmp_path):
    spec = RenderSpec(0j, 3.0, (48, 40), 200, (Overlay("ray", "1/3"), Overlay("equipotential", 1.0)))
    f = CubicMap(0.3 + 1.1j)
    p1 = save_render(render(f, spec), tmp_path / "a")
    p2 = save_render(render(f, spec), tmp_path / "b")
    for key in ("image", "curves", "report"):
        assert p1[key].read_bytes() == p2[key].read_bytes()


def test_failed_overlay_is_reported_not_raised():
    spec = RenderSpec(0j, 3.0, (20, 20), 50, (Overlay("access", (3, "+")),))
    res = render(CubicMap(0j), spec)
    assert len(res.omissions) == 1
    assert res.omissions[0][0] == "access:(3, '+')"
    assert "omitted access" in res.report()
    assert res.curves == []


def test_unknown_overlay_rejected():
    with pytest.raises(ValueError):
        Overlay("spiral")
    with pytest.raises(ValueError):
        RenderSpec(pixels=(1, 5))


def test_ppm_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    img = rng.integers(0, 256, size=(7, 11, 3), dtype=np.uint8)
    write_ppm(tmp_path / "x.ppm", img)
    assert np.array_equal(read_ppm(tmp_path / "x.ppm"), img)
    assert (tmp_path / "x.ppm").read_bytes().startswith(b"P6\n11 7\n255\n")


def test_draw_polyline_diagonal():
    spec = RenderSpec(0j, 2.0, (11, 11))
    img = np.zeros((11, 11, 3), dtype=np.uint8)
    n = draw_polyline(img, spec, np.array([-1 - 1j, 1 + 1j]), (9, 9, 9))
    assert n > 0
    assert all(img[10 - i, i, 0] == 9 for i in range(11))
