"""Scan a box of parameters for the single-critical-point-in-the-basin condition."""
import argparse

from parabolic_basin.scan import GridSpec, scan, table_text

ap = argparse.ArgumentParser()
ap.add_argument("--box", default="-2,2,-2,2")
ap.add_argument("--n", type=int, default=41)
ap.add_argument("--landing", action="store_true", help="also land ray 0 for every Satisfied cell (slow)")
ap.add_argument("--out", default="scan.tsv")
args = ap.parse_args()

lo_re, hi_re, lo_im, hi_im = (float(x) for x in args.box.split(","))
rows = scan(GridSpec(lo_re, hi_re, lo_im, hi_im, args.n, args.n), landing=args.landing)
with open(args.out, "w") as fh:
    fh.write(table_text(rows))
counts = {}
for r in rows:
    counts[r.status] = counts.get(r.status, 0) + 1
print(counts, "->", args.out)
