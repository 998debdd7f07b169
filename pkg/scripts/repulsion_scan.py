"""Repulsion ratio times T for periodic controls and an aperiodic sample.

Periodic sets give a constant product (the period); a linearly repetitive
aperiodic set gives a product growing linearly in T.
"""
import argparse
import csv
import sys

from aperiodic_lab.certificates import repulsion_ratio
from aperiodic_lab.exact import display_sqrt
from aperiodic_lab.generators import gen_fibonacci_integer, gen_lattice, gen_periodic_superlattice
from aperiodic_lab.patches import count_patches


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--W", type=int, default=400)
    ap.add_argument("--tmax", type=int, default=100)
    args = ap.parse_args()
    sets = {
        "lattice": gen_lattice(1, 1, args.W),
        "superlattice": gen_periodic_superlattice([0, "1/3"], 1, args.W),
        "fibonacci": gen_fibonacci_integer(args.W),
    }
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["set", "T", "types", "ratio", "ratio_times_T"])
    for name, X in sets.items():
        for T in range(2, args.tmax + 1):
            n, occ = count_patches(X, T)
            r = repulsion_ratio(X, T, occ)
            if r.infinite:
                out.writerow([name, T, n, "inf", "inf"])
            else:
                out.writerow([name, T, n, display_sqrt(r.ratio_sq), display_sqrt(r.distance_sq)])


if __name__ == "__main__":
    main()
