"""Run configuration shared by the command line and the experiment scripts."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path

from .exact import QNum, parse_number, q_floor
from .generators import (gen_block_substitution_2d, gen_fibonacci_cut_project, gen_fibonacci_integer,
                         gen_lattice, gen_periodic_superlattice)
from .pointset import PointSet

__all__ = ["RunConfig", "ConfigError", "parse_grid", "default_grid", "GENERATORS"]

GENERATORS = ("lattice", "fibonacci-int", "fibonacci-cp", "block2d", "superlattice")
MODES = ("generate", "analyze", "verify", "oracle")


class ConfigError(ValueError):
    pass


def _num(text) -> QNum:
    try:
        return parse_number(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not an exact number: {text!r}") from exc


def parse_grid(spec) -> list:
    """``"2:50"``, ``"2:50:2"`` (inclusive range) or ``"2,3,5/2"`` / a list."""
    if isinstance(spec, (list, tuple)):
        return [_num(v) for v in spec]
    spec = str(spec).strip()
    if ":" in spec:
        parts = [_num(p) for p in spec.split(":")]
        if len(parts) not in (2, 3):
            raise ConfigError(f"bad grid range {spec!r}")
        lo, hi = parts[0], parts[1]
        step = parts[2] if len(parts) == 3 else QNum(1)
        if not step > 0:
            raise ConfigError("grid step must be positive")
        out, t = [], lo
        while t <= hi:
            out.append(t)
            t = t + step
        return out
    return [_num(p) for p in spec.split(",") if p.strip()]


def default_grid(X: PointSet) -> list:
    """Integer grid up to W/8; 2D grids use step 2 from 4."""
    tmax = q_floor(X.window_radius / 8)
    if X.d == 1:
        return [QNum(t) for t in range(2, tmax + 1)]
    return [QNum(t) for t in range(4, tmax + 1, 2)]


@dataclass
class RunConfig:
    mode: str = "analyze"
    generator: str | None = None
    params: dict = field(default_factory=dict)
    window_radius: str | None = None
    T_grid: str | list | None = None
    grid_step: str | None = None
    probes: int = 128
    output_dir: str = "."
    threads: int | None = None
    allow_shallow_window: bool = False

    @classmethod
    def from_file(cls, path: str | Path) -> RunConfig:
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)

    def merged(self, overrides: dict) -> RunConfig:
        data = asdict(self)
        for k, v in overrides.items():
            if v is None:
                continue
            if k == "params":
                data["params"] = {**data["params"], **{pk: pv for pk, pv in v.items() if pv is not None}}
            else:
                data[k] = v
        return RunConfig(**data)

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.probes < 100:
            raise ConfigError("probes must be at least 100")
        if self.threads is not None and self.threads < 1:
            raise ConfigError("threads must be positive")
        if self.grid_step is not None and not Fraction(str(self.grid_step)) > 0:
            raise ConfigError("grid step must be positive")

    def grid(self, X: PointSet) -> list:
        return default_grid(X) if self.T_grid is None else parse_grid(self.T_grid)

    def h(self) -> Fraction | None:
        if self.grid_step is None:
            return None
        try:
            return Fraction(str(self.grid_step))
        except ValueError as exc:
            raise ConfigError(f"grid step is not rational: {self.grid_step!r}") from exc

    def build(self) -> PointSet:
        """Run the configured generator."""
        if self.window_radius is None:
            raise ConfigError("window radius is required")
        W = _num(self.window_radius)
        p = self.params
        g = self.generator
        if g == "lattice":
            return gen_lattice(int(p.get("d", 1)), Fraction(str(p.get("spacing", 1))), W)
        if g == "fibonacci-int":
            return gen_fibonacci_integer(W)
        if g == "fibonacci-cp":
            return gen_fibonacci_cut_project(_num(p.get("c", 0)), W)
        if g == "block2d":
            return gen_block_substitution_2d(str(p.get("symbol", "A")), W)
        if g == "superlattice":
            motif = p.get("motif", "0")
            if isinstance(motif, str):
                motif = [[c for c in m.split(",")] for m in motif.split(";")]
            cell = p.get("cell", "1")
            if isinstance(cell, str):
                cell = cell.split(",")
            motif = [tuple(Fraction(str(c)) for c in m) for m in motif]
            return gen_periodic_superlattice(motif, tuple(Fraction(str(c)) for c in cell), W)
        raise ConfigError(f"unknown generator {g!r}; choose from {', '.join(GENERATORS)}")
