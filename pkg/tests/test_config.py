import dataclasses

import pytest
from hypothesis import given, strategies as st

from parabolic_basin import boettcher, fatou
from parabolic_basin.config import RunConfig, parse_a, restore

finite = st.floats(-10, 10, allow_nan=False)
positive = st.floats(1e-300, 1e300, allow_nan=False, allow_infinity=False)


def test_defaults_mirror_module_constants():
    cfg = RunConfig()
    for (mod, name), v in cfg.constants().items():
        mod_obj = __import__(f"parabolic_basin.{mod}", fromlist=[name])
        assert getattr(mod_obj, name) == v


def test_every_numeric_module_constant_is_named():
    named = set(RunConfig().constants())
    assert ("boettcher", "CESARO_TOL") in named
    assert ("puzzles", "MARGIN_TOL") in named
    assert ("renorm", "BLOWUP_THRESHOLD") in named
    assert len(named) >= 45


@given(finite, finite, positive, st.integers(0, 2**31), st.text("abc_/", min_size=1, max_size=8))
def test_round_trip(re, im, tol, seed, out):
    cfg = RunConfig(a=complex(re, im), cesaro_tol=tol, seed=seed, out_dir=out)
    text = cfg.to_text()
    back = RunConfig.from_text(text)
    assert back == cfg
    assert back.to_text() == text


def test_negative_tolerance_rejected():
    with pytest.raises(ValueError):
        RunConfig(geometric_tol=-1e-6)
    with pytest.raises(ValueError):
        RunConfig.from_text("newton_tol = -1\n")


def test_unknown_key_rejected():
    with pytest.raises(ValueError):
        RunConfig.from_text("nonsense = 3\n")


def test_file_round_trip(tmp_path):
    cfg = RunConfig(a=-0.5 + 0.25j)
    p = tmp_path / "run.cfg"
    cfg.save(p)
    assert RunConfig.load(p) == cfg
    assert p.read_text().splitlines()[0] == "a = -0.5,0.25"


def test_apply_and_restore():
    cfg = dataclasses.replace(RunConfig(), cesaro_tol=3e-3, newton_steps=7)
    old = cfg.apply()
    try:
        assert boettcher.CESARO_TOL == 3e-3
        assert fatou.NEWTON_STEPS == 7
    finally:
        restore(old)
    assert boettcher.CESARO_TOL == RunConfig().cesaro_tol


def test_parse_a():
    assert parse_a("0.3,1.1") == 0.3 + 1.1j
    assert parse_a(" -1 , 0 ") == -1
    assert parse_a("1+2j") == 1 + 2j
