"""Compare complexity and repetitivity rows of one Fibonacci sample at W and 2W."""
import argparse
import csv
import sys

from aperiodic_lab.exact import display
from aperiodic_lab.generators import gen_fibonacci_integer
from aperiodic_lab.patches import complexity_profile
from aperiodic_lab.repetitivity import repetitivity_profile


def rows(W, grid):
    X = gen_fibonacci_integer(W)
    maps = {}
    comp = complexity_profile(X, grid, maps=maps)
    rep = repetitivity_profile(X, grid, maps=maps)
    return comp.rows, rep.rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--W", type=int, default=1000)
    ap.add_argument("--tmax", type=int, help="largest radius (default W/4)")
    args = ap.parse_args()
    tmax = args.tmax or args.W // 4
    grid = list(range(2, tmax + 1))
    ca, ra = rows(args.W, grid)
    cb, rb = rows(2 * args.W, grid)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["T", "N_W", "N_2W", "M_W", "M_2W", "valid_W", "agree"])
    for a, b, x, y in zip(ca, cb, ra, rb):
        agree = a.count == b.count and x.bracket.exact == y.bracket.exact
        out.writerow([display(a.T), a.count, b.count, display(x.bracket.exact), display(y.bracket.exact),
                      x.valid, agree])


if __name__ == "__main__":
    main()
