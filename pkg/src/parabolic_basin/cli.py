"""Command line entry point: ``parabolic-basin <command> [flags]``."""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .config import RunConfig, parse_a


def _overlay(text: str):
    """kind[:arg]; e.g. ray:1/2, equipotential:1, e0, access:3,+, piece:0.1,0.2;1;3;+, chart:8."""
    from .render import Overlay

    kind, _, arg = text.partition(":")
    if kind == "ray":
        return Overlay("ray", arg)
    if kind == "equipotential":
        return Overlay("equipotential", float(arg))
    if kind == "e0":
        return Overlay("e0")
    if kind == "access":
        k, s = arg.split(",")
        return Overlay("access", (int(k), s))
    if kind == "piece":
        z, n, k, s = arg.split(";")
        return Overlay("piece", (parse_a(z), int(n), int(k), s))
    if kind == "chart":
        return Overlay("chart", int(arg))
    return Overlay(kind, arg or None)  # rejected by Overlay


def _config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    kw = {}
    if args.a is not None:
        kw["a"] = parse_a(args.a)
    if args.out is not None:
        kw["out_dir"] = args.out
    if args.seed is not None:
        kw["seed"] = args.seed
    return replace(cfg, **kw) if kw else cfg


def _out(cfg: RunConfig) -> Path:
    p = Path(cfg.out_dir)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _partition(cfg):
    from .cubic import CubicMap
    from .partition import build_partition

    return build_partition(CubicMap(cfg.a))


# -- commands ---------------------------------------------------------------------


def cmd_render(cfg, args) -> int:
    from .cubic import CubicMap
    from .render import RenderSpec, render, save_render

    try:
        w, h = (int(x) for x in args.pixels.split("x"))
        spec = RenderSpec(parse_a(args.center), args.width, (w, h), args.max_iter,
                          tuple(_overlay(o) for o in args.overlay))
    except ValueError as exc:
        print(f"render request error: {exc}", file=sys.stderr)
        return 2
    res = render(CubicMap(cfg.a), spec)
    paths = save_render(res, _out(cfg))
    print(res.report(), end="")
    print(f"image: {paths['image']}")
    return 0


def cmd_trace_ray(cfg, args) -> int:
    from .boettcher import RayTracer, landing_point
    from .cubic import CubicMap
    from .curves import write_curves

    f = CubicMap(cfg.a)
    tr = RayTracer(f)
    curve = tr.trace(args.angle, args.v_low)
    land = landing_point(f, args.angle, tr)
    path = _out(cfg) / f"ray_{args.angle.replace('/', '_')}.txt"
    with open(path, "w") as fh:
        write_curves([curve], fh)
    print(f"angle: {args.angle}")
    print(f"landing: {land.point.real:.12g} {land.point.imag:.12g}")
    print(f"converged: {str(land.converged).lower()} mode={land.mode} residual={land.residual:.3e}")
    print(f"curve: {path}")
    return 0


def cmd_fatou(cfg, args) -> int:
    from .curves import write_curves

    part = _partition(cfg)
    ch, f = part.chart, part.fmap
    print(f"c0: {f.c0.real:.12g} {f.c0.imag:.12g}")
    print(f"phi(f(c0)): {ch.extended(f.eval(f.c0))[0]:.12g}")
    if args.z:
        z = parse_a(args.z)
        phi, dphi = ch.extended(z)
        print(f"phi({z}): {phi.real:.15g} {phi.imag:.15g}")
        print(f"phi'({z}): {dphi.real:.15g} {dphi.imag:.15g}")
    path = _out(cfg) / "e0_curves.txt"
    with open(path, "w") as fh:
        write_curves(list(part.s0_curves) + list(part.s1_curves), fh)
    print(f"curves: {path}")
    return 0


def cmd_theta(cfg, args) -> int:
    from .curves import write_curves
    from .itinerary import jordan_certificate, theta_of, wake_of

    part = _partition(cfg)
    if args.z:
        z = parse_a(args.z)
        th = theta_of(part, z, args.digits)
        print(f"theta: {th}  kind={th.kind}")
        print("digits: " + "".join(str(d) for d in th.digits))
        if args.wake:
            _, pair = wake_of(part, z, args.digits)
            print(f"wake: {pair}")
        return 0
    cert = jordan_certificate(part, args.depth)
    print(cert.to_text(), end="")
    path = _out(cfg) / f"boundary_depth{args.depth}.txt"
    with open(path, "w") as fh:
        write_curves([cert.chart.to_curve()], fh)
    print(f"curve: {path}")
    return 0 if cert.ok else 1


def cmd_access(cfg, args) -> int:
    from .accesses import build_access, check_simple, y_order_matches
    from .curves import write_curves
    from .itinerary import theta_of

    part = _partition(cfg)
    acc = build_access(part, args.k, args.sign)
    x = acc.landing.point
    th = theta_of(part, x, 2 * args.k)
    simple = check_simple(part, acc)
    print(f"angle: {acc.angle}")
    print(f"legs: {len(acc.legs)}")
    print(f"landing: {x.real:.12g} {x.imag:.12g}")
    print(f"periodic_residual: {abs(part.fmap.iterate(x, args.k) - x):.3e}")
    print(f"theta(landing): {th}")
    print(f"y_order_matches: {str(y_order_matches(acc)).lower()}")
    print(f"self_intersections: {simple['self_intersections']} iterate_crossings: {simple['iterate_crossings']}")
    path = _out(cfg) / f"access_k{args.k}{'p' if args.sign == '+' else 'm'}.txt"
    with open(path, "w") as fh:
        write_curves([acc.to_curve()], fh)
    print(f"curve: {path}")
    return 0


def cmd_puzzle(cfg, args) -> int:
    from .puzzles import MARGIN_TOL, build_graph, check_containment, puzzle_piece, step_one_piece, zero_piece

    part = _partition(cfg)
    g = build_graph(part, args.k, args.sign)
    print(f"zeta: {g.zeta}")
    if args.z:
        p = puzzle_piece(g, parse_a(args.z), args.depth)
        print(p.to_text())
        return 0
    p0 = zero_piece(g)
    print("P0: " + p0.to_text())
    try:
        p1 = step_one_piece(g)
    except Exception as exc:
        print(f"P1: none ({type(exc).__name__}: {exc})")
        return 1
    print("P1: " + p1.to_text())
    c = check_containment(p0, p1, MARGIN_TOL)
    print(f"containment: {c.kind} margin={c.margin:.3e}")
    return 0 if c.kind == "CompactlyContained" else 1


def cmd_verify(cfg, args) -> int:
    from .verify import run_verify

    rep = run_verify(cfg, quick=args.quick)
    text = rep.to_text()
    print(text, end="")
    (_out(cfg) / "verify_report.txt").write_text(text)
    return rep.exit_code


def cmd_scan(cfg, args) -> int:
    from .scan import GridSpec, scan, table_text

    lo_re, hi_re, lo_im, hi_im = (float(x) for x in args.box.split(","))
    grid = GridSpec(lo_re, hi_re, lo_im, hi_im, args.n, args.n)
    rows = scan(grid, cfg.assumption_budget, landing=not args.no_landing)
    text = table_text(rows)
    path = _out(cfg) / "scan.tsv"
    path.write_text(text)
    n_sat = sum(r.status == "Satisfied" for r in rows)
    print(f"cells: {len(rows)} satisfied: {n_sat}")
    print(f"table: {path}")
    return 0


COMMANDS = {
    "render": cmd_render, "trace-ray": cmd_trace_ray, "fatou": cmd_fatou, "theta": cmd_theta,
    "access": cmd_access, "puzzle": cmd_puzzle, "verify": cmd_verify, "scan": cmd_scan,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", help="parameter as re,im")
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int)

    p = argparse.ArgumentParser(prog="parabolic-basin", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("render", parents=[common], help="image of K(f) with overlays")
    r.add_argument("--center", default="0,0")
    r.add_argument("--width", type=float, default=3.0)
    r.add_argument("--pixels", default="400x400")
    r.add_argument("--max-iter", type=int, default=500)
    r.add_argument("--overlay", action="append", default=[],
                   help="ray:p/q | equipotential:v | e0 | access:k,sign | piece:z;n;k;sign | chart:depth")

    t = sub.add_parser("trace-ray", parents=[common], help="external ray and its landing point")
    t.add_argument("--angle", default="0")
    t.add_argument("--v-low", type=float, default=1e-4)

    fa = sub.add_parser("fatou", parents=[common], help="Fatou coordinate and the E0 lines")
    fa.add_argument("--z")

    th = sub.add_parser("theta", parents=[common], help="itinerary of a point, or a boundary chart")
    th.add_argument("--z")
    th.add_argument("--depth", type=int, default=8)
    th.add_argument("--digits", type=int, default=32)
    th.add_argument("--wake", action="store_true")

    ac = sub.add_parser("access", parents=[common], help="periodic access of angle +-1/(2^k-1)")
    ac.add_argument("--k", type=int, default=3)
    ac.add_argument("--sign", choices=["+", "-"], default="+")

    pz = sub.add_parser("puzzle", parents=[common], help="puzzle pieces and the annulus check")
    pz.add_argument("--k", type=int, default=3)
    pz.add_argument("--sign", choices=["+", "-"], default="+")
    pz.add_argument("--depth", type=int, default=1)
    pz.add_argument("--z")

    v = sub.add_parser("verify", parents=[common], help="run the invariant suites")
    v.add_argument("--quick", action="store_true")

    s = sub.add_parser("scan", parents=[common], help="single-critical-point condition over a parameter grid")
    s.add_argument("--box", default="-2,2,-2,2", help="re_min,re_max,im_min,im_max")
    s.add_argument("--n", type=int, default=41)
    s.add_argument("--no-landing", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return COMMANDS[args.command](cfg, args)


if __name__ == "__main__":
    sys.exit(main())
