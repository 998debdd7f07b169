"""Run ``analyze`` over every generator at a few window sizes.

Writes one report directory per (generator, W) under ``--out``.
"""
import argparse
from pathlib import Path

from aperiodic_lab.cli import main as cli

SETS = {
    "lattice-1d": ["--set", "lattice", "--d", "1"],
    "lattice-2d": ["--set", "lattice", "--d", "2"],
    "fibonacci-int": ["--set", "fibonacci-int"],
    "fibonacci-cp": ["--set", "fibonacci-cp", "--c", "0"],
    "block2d": ["--set", "block2d", "--symbol", "A"],
    "superlattice": ["--set", "superlattice", "--motif", "0;1/3", "--cell", "1"],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs")
    ap.add_argument("--W1", nargs="+", type=int, default=[250, 500])
    ap.add_argument("--W2", nargs="+", type=int, default=[64, 128])
    args = ap.parse_args()
    root = Path(args.out)
    for name, flags in SETS.items():
        two_d = name in ("lattice-2d", "block2d")
        for W in args.W2 if two_d else args.W1:
            run = root / f"{name}-W{W}"
            src = run / "pointset.json"
            cli(["generate", *flags, "--W", str(W), "-o", str(src)])
            code = cli(["verify", str(src), "--out", str(run)])
            cli(["analyze", str(src), "--out", str(run)])
            print(f"{name} W={W}: verify exit {code}")


if __name__ == "__main__":
    main()
