"""Empirical shift intervals for the nested identity, r = 2..rmax (non-square).

For each r the grid is centred at sqrt(r)/2; the output lists the passing
range and its offsets from the centre, which shows whether the interval is
symmetric.

    python3 scripts/scan_intervals.py --rmax 12 --cap 20000 --step 1/400
"""
import argparse
from fractions import Fraction

from almost_golomb.nested import scan_interval
from almost_golomb.qfield import QuadExpr
from almost_golomb.sawtooth import is_square


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rmax", type=int, default=10)
    ap.add_argument("--cap", type=int, default=10_000)
    ap.add_argument("--step", default="1/200")
    ap.add_argument("--half-width", default="2/5")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    step, hw = Fraction(args.step), Fraction(args.half_width)
    k = int(hw / step)
    print("r,centre,first_pass,last_pass,left_extent,right_extent,contiguous")
    for r in range(2, args.rmax + 1):
        if is_square(r):
            continue
        centre = QuadExpr(0, Fraction(1, 2), r)
        grid = [centre + j * step for j in range(-k, k + 1)]
        b = scan_interval(r, grid, args.cap, threads=args.threads).boundaries()
        if b.get("first_pass") is None:
            print(f"{r},{float(centre):.4f},,,,,")
            continue
        lo, hi = b["first_pass"], b["last_pass"]
        print(f"{r},{float(centre):.4f},{float(lo):.4f},{float(hi):.4f},"
              f"{float(centre - lo):.4f},{float(hi - centre):.4f},{b['contiguous']}")


if __name__ == "__main__":
    main()
