import io

import numpy as np
import pytest

from parabolic_basin.cubic import CubicMap, check_assumption1
from parabolic_basin.scan import HEADER, GridSpec, assumption_status, classify_critical_orbits, scan, table_text

KINDS = ["OtherBounded", "ConvergesToParabolic", "EscapesToInfinity", "HitsZeroExactly"]


def test_default_grid_contains_reference_points():
    vals = GridSpec().values()
    assert vals.size == 41 * 41
    assert np.any(vals == 0)
    assert np.any(vals == 0.3 + 1.1j)


def test_vectorized_matches_scalar_check():
    vals = GridSpec(-1.5, 1.5, -1.5, 1.5, 9, 9).values()
    codes, _ = classify_critical_orbits(vals, 20000)
    for a, cc in zip(vals, codes):
        ref = check_assumption1(CubicMap(complex(a)), 20000)
        status, reason = assumption_status(complex(a), cc)
        assert (status, reason) == (ref.status, ref.reason), a


def test_iteration_counts_match_scalar():
    vals = np.array([0.3 + 1.1j, -0.7 + 0.4j, 1.2 - 0.9j])
    codes, when = classify_critical_orbits(vals, 5000)
    for a, cc, ww in zip(vals, codes, when):
        f = CubicMap(a)
        for z, c, w in zip(f.raw_critical_points(), cc, ww):
            oc = f.classify_orbit(z, 5000)
            assert oc.kind.value == KINDS[int(c)]
            assert oc.witness_iterations == w


def test_zero_cell_violated():
    rows = scan(GridSpec(-0.1, 0.1, -0.1, 0.1, 3, 3), 2000, landing=False)
    zero = [r for r in rows if r.a == 0][0]
    assert zero.status == "Violated"
    assert zero.reason.startswith("a=0")


def test_small_parameters_both_in_basin():
    rows = scan(GridSpec(-0.2, 0.2, -0.2, 0.2, 5, 5), 100_000, landing=False)
    assert any(r.reason == "both in basin" for r in rows)


def test_table_format_and_landing_column():
    rows = scan(GridSpec(0.3, 0.3, 1.1, 1.1, 1, 1), landing=True)
    text = table_text(rows)
    lines = text.splitlines()
    assert lines[0].split("\t") == HEADER
    cells = lines[1].split("\t")
    assert cells[2] == "Satisfied"
    assert float(cells[-1]) < 1e-4


def test_grid_spec_rejects_empty():
    with pytest.raises(ValueError):
        GridSpec(n_re=0)
