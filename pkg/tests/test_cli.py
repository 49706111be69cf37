import pytest

from parabolic_basin.cli import main


def test_render_writes_outputs(tmp_path, capsys):
    rc = main(["render", "--out", str(tmp_path), "--pixels", "32x24", "--max-iter", "100",
               "--overlay", "ray:1/3", "--overlay", "equipotential:1"])
    assert rc == 0
    assert "pixels_basin" in capsys.readouterr().out
    for name in ("render.ppm", "render_curves.txt", "render_report.txt"):
        assert (tmp_path / name).exists()


def test_render_bad_overlay_exit_2(tmp_path, capsys):
    assert main(["render", "--out", str(tmp_path), "--overlay", "spiral:3"]) == 2
    assert "render request error" in capsys.readouterr().err


def test_trace_ray(tmp_path, capsys):
    assert main(["trace-ray", "--out", str(tmp_path), "--angle", "1/3"]) == 0
    out = capsys.readouterr().out
    assert "converged: true" in out
    assert (tmp_path / "ray_1_3.txt").exists()


def test_theta_of_point(tmp_path, capsys):
    assert main(["theta", "--out", str(tmp_path), "--z=-0.154,-1.045", "--digits", "12", "--wake"]) == 0
    out = capsys.readouterr().out
    # 0.111...1 in base 2: the orbit of the free critical point never leaves one side
    assert "digits: 111111111111" in out
    assert "wake:" in out


def test_negative_tolerance_is_config_error(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("landing_tol = -1.0\n")
    assert main(["verify", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "config error" in capsys.readouterr().err


def test_verify_gated_at_a0(tmp_path, capsys):
    assert main(["verify", "--a", "0,0", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "gated" in out
    assert "Violated" in out
    assert (tmp_path / "verify_report.txt").read_text() == out


def test_scan_small_box(tmp_path, capsys):
    assert main(["scan", "--out", str(tmp_path), "--box", "0.2,0.4,1.0,1.2", "--n", "3", "--no-landing"]) == 0
    lines = (tmp_path / "scan.tsv").read_text().splitlines()
    assert lines[0].split("\t")[0] == "re_a"
    assert len(lines) == 10


def test_unknown_command_exits():
    with pytest.raises(SystemExit):
        main(["frobnicate"])
