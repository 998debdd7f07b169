"""Command line: ``aperiodic-lab {generate,analyze,verify,oracle}``.

Exit code 1 means a check failed; usage or input errors exit with 2.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from .certificates import certify, packing_covering
from .config import GENERATORS, ConfigError, RunConfig
from .exact import display, display_sqrt
from .generators import GeneratorError
from .patches import (WindowExhausted, complexity_csv, count_patches, count_patches_bruteforce, first_difference,
                      same_grouping)
from .pointset import PointSetError, load_pointset
from .repetitivity import repetitivity_csv

log = logging.getLogger("aperiodic_lab")

ORACLE_LIMITS = {1: 200, 2: 64}


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aperiodic-lab", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="mode", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--threads", type=int, help="worker threads (default: $APERIODIC_LAB_THREADS or 1)")
    common.add_argument("--out", dest="output_dir", help="output directory")

    g = sub.add_parser("generate", parents=[common], help="write a canonical point set file")
    g.add_argument("--set", dest="generator", choices=GENERATORS)
    g.add_argument("--W", dest="window_radius")
    g.add_argument("--d", type=int)
    g.add_argument("--spacing")
    g.add_argument("--c")
    g.add_argument("--symbol")
    g.add_argument("--motif", help="points separated by ';', coordinates by ','")
    g.add_argument("--cell", help="cell side lengths separated by ','")
    g.add_argument("-o", "--output", help="output file (default: <out>/<set>-W<W>.json)")

    for name, text in (("analyze", "write complexity, repetitivity and certificate reports"),
                       ("verify", "run every check and exit 1 on failure"),
                       ("oracle", "compare the fast patch counter with the brute-force scan")):
        a = sub.add_parser(name, parents=[common], help=text)
        a.add_argument("pointset")
        a.add_argument("--T-grid", dest="T_grid", help="'lo:hi[:step]' or comma list")
        a.add_argument("--grid-step", dest="grid_step", help="covering grid step h (2D)")
        a.add_argument("--probes", type=int)
        a.add_argument("--allow-shallow-window", dest="allow_shallow_window", action="store_true", default=None)
        if name == "oracle":
            a.add_argument("--force", action="store_true", help="ignore the default window limits")
            a.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return p


def _config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    over = {k: getattr(args, k, None) for k in ("window_radius", "T_grid", "grid_step", "probes", "output_dir",
                                                  "threads", "allow_shallow_window", "generator")}
    over["mode"] = args.mode
    if args.mode == "generate":
        over["params"] = {k: getattr(args, k) for k in ("d", "spacing", "c", "symbol", "motif", "cell")}
    cfg = cfg.merged(over)
    cfg.validate()
    return cfg


def _out(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate(cfg: RunConfig, args) -> int:
    if cfg.generator is None:
        raise UsageError("--set is required")
    X = cfg.build()
    if args.output:
        path = Path(args.output)
    else:
        path = _out(cfg) / f"{cfg.generator}-W{display(X.window_radius)}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(X.to_json())
    print(f"wrote {path}: {len(X)} points, d={X.d}")
    if len(X) >= 2:
        dp = packing_covering(X, cfg.h())
        lo, hi = dp.covering.display()
        print(f"packing radius {display_sqrt(dp.packing_sq)}, covering radius in [{lo}, {hi}]")
    return 0


def _load(args):
    try:
        return load_pointset(args.pointset)
    except FileNotFoundError as exc:
        raise UsageError(f"no such file: {args.pointset}") from exc


def _report(cfg: RunConfig, X):
    return certify(X, cfg.grid(X), probes=cfg.probes, grid_step=cfg.h(),
                   allow_shallow=cfg.allow_shallow_window, threads=cfg.threads)


def cmd_analyze(cfg: RunConfig, args) -> int:
    X = _load(args)
    rep = _report(cfg, X)
    out = _out(cfg)
    counts = {r.T: r.count for r in rep.complexity.rows}
    (out / "complexity.csv").write_text(complexity_csv(rep.complexity))
    (out / "repetitivity.csv").write_text(repetitivity_csv(rep.repetitivity, counts))
    (out / "certificates.json").write_text(rep.dumps())
    (out / "certificates.txt").write_text(rep.render_text())
    flagged = sum(not r.valid for r in rep.repetitivity.rows)
    print(f"wrote reports to {out}")
    if flagged:
        print(f"warning: {flagged} repetitivity rows flagged window too small")
    return 0


def cmd_verify(cfg: RunConfig, args) -> int:
    X = _load(args)
    rep = _report(cfg, X)
    out = _out(cfg)
    doc = {"passed": rep.passed, "verdicts": {k: v.to_json() for k, v in rep.verdicts.items()}}
    (out / "verdicts.json").write_text(json.dumps(doc, indent=2) + "\n")
    for k, v in rep.verdicts.items():
        print(f"{k:22s} {v.status:12s} {v.note}")
    if rep.period is not None:
        print("periodic signature: period " + ", ".join(display(c) for c in rep.period))
    return 0 if rep.passed else 1


def _corrupt(occ):
    """Move one center into another group (test hook for the oracle harness)."""
    first, *rest = occ.entries
    moved, *remaining = occ.entries[first]
    if rest:
        occ.entries[rest[0]] = sorted([*occ.entries[rest[0]], moved])
    else:
        occ.entries[b"fault"] = [moved]
    if remaining:
        occ.entries[first] = remaining
    else:
        del occ.entries[first]


def cmd_oracle(cfg: RunConfig, args) -> int:
    X = _load(args)
    limit = ORACLE_LIMITS[X.d]
    if not args.force and X.window_radius > limit:
        raise UsageError(f"window radius exceeds the oracle limit {limit} for d={X.d} (use --force)")
    grid = cfg.grid(X)
    status = 0
    t0 = time.perf_counter()
    for T in grid:
        n_fast, fast = count_patches(X, T, threads=cfg.threads)
        if args.inject_fault and T == grid[0]:
            _corrupt(fast)
            n_fast = len(fast)
        n_slow, slow = count_patches_bruteforce(X, T)
        if n_fast != n_slow or not same_grouping(fast, slow):
            diff = first_difference(fast, slow)
            center, patch = diff if diff else (None, None)
            where = "" if center is None else f" at center {[display(c) for c in X.points[center]]}"
            key = "" if patch is None else f", patch with {len(patch)} points"
            print(f"MISMATCH T={display(T)}: fast {n_fast} vs oracle {n_slow}{where}{key}")
            status = 1
            break
        log.info("T=%s: %d types agree", display(T), n_fast)
    if status == 0:
        print(f"oracle agreement on {len(grid)} radii in {time.perf_counter() - t0:.1f}s")
    return status


COMMANDS = {"generate": cmd_generate, "analyze": cmd_analyze, "verify": cmd_verify, "oracle": cmd_oracle}


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = _config(args)
        return COMMANDS[args.mode](cfg, args)
    except (UsageError, ConfigError, GeneratorError, PointSetError, WindowExhausted, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
