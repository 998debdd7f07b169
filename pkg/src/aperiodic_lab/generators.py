"""Window samples of concrete Delone sets.

Periodic controls are lattices and superlattices.  The aperiodic linearly
repetitive examples are Fibonacci chains, built either by substitution or by
cut and project, plus one letter class of the chair substitution on the
square grid.  All coordinates are exact.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact import TAU, QNum, as_qnum, q_ceil, q_floor
from .pointset import PointSet

__all__ = [
    "gen_lattice",
    "gen_fibonacci_integer",
    "fibonacci_word",
    "gen_fibonacci_cut_project",
    "gen_block_substitution_2d",
    "chair_coloring",
    "CHAIR_LETTERS",
    "gen_periodic_superlattice",
    "GeneratorError",
]


class GeneratorError(ValueError):
    pass


def _frac(x) -> Fraction:
    if isinstance(x, QNum):
        return x.to_fraction()
    return Fraction(x)


def gen_lattice(d: int, spacing, W) -> PointSet:
    """All points of ``(spacing * Z)^d`` in the closed ball ``B(0, W)``."""
    spacing = _frac(spacing)
    W = as_qnum(W)
    if spacing <= 0:
        raise GeneratorError("spacing must be positive")
    if W < QNum.from_fraction(spacing):
        raise GeneratorError("empty window")
    kmax = q_floor(W / QNum.from_fraction(spacing))
    ks = range(-kmax, kmax + 1)
    pts = [tuple(k * spacing for k in idx) for idx in itertools.product(ks, repeat=d)]
    return PointSet.build(d, pts, W, {"generator": "lattice", "d": d, "spacing": str(spacing)})


def fibonacci_word(min_span: int) -> str:
    """Iterate a -> ab, b -> a from ``a`` until the weighted span (a=2, b=1) exceeds ``min_span``."""
    w = "a"
    while 2 * w.count("a") + w.count("b") <= min_span:
        w = "".join("ab" if c == "a" else "a" for c in w)
    return w


def gen_fibonacci_integer(W) -> PointSet:
    """Left endpoints of a Fibonacci word with letter lengths a=2, b=1.

    The word is recentred so that the point nearest its midpoint becomes the
    origin; all coordinates are integers.
    """
    W = as_qnum(W)
    if W < 2:
        raise GeneratorError("window radius must be at least 2")
    Wf = q_floor(W)
    word = fibonacci_word(4 * Wf + 4)
    lengths = [2 if c == "a" else 1 for c in word]
    ends = list(itertools.accumulate(lengths, initial=0))
    span = ends[-1]
    starts = ends[:-1]
    # nearest to span/2, ties to the left
    centre = min(starts, key=lambda s: (abs(2 * s - span), s))
    pts = [(s - centre,) for s in starts if abs(s - centre) <= Wf]
    return PointSet.build(1, pts, W, {"generator": "fibonacci-int", "word_length": len(word), "origin_index": starts.index(centre)})


def gen_fibonacci_cut_project(c, W) -> PointSet:
    """Points ``x = a + b*tau`` whose conjugate ``a + b*(1 - tau)`` lies in ``[c, c + tau)``.

    With acceptance window of length tau the gaps are exactly 1 and tau.
    """
    c = as_qnum(c)
    W = as_qnum(W)
    if not c.is_rational:
        raise GeneratorError("window offset must be rational")
    # x is about c + b*sqrt5, so |b| is bounded by (W + |c| + 2) / 2
    bmax = q_ceil((W + abs(c) + 2) / 2) + 1
    pts = []
    for b in range(-bmax, bmax + 1):
        # conjugate = m - b*tau with m = a + b; need c + b*tau <= m < c + (b+1)*tau
        lo = c + b * TAU
        hi = c + (b + 1) * TAU
        m = q_ceil(lo)
        while QNum(m) < hi:
            x = QNum(m - b, b, 1)
            if abs(x) <= W:
                pts.append((x,))
            m += 1
    return PointSet.build(1, pts, W, {"generator": "fibonacci-cp", "c": str(c)})


# Chair substitution in arrowed-square form.  Letters are the four diagonal
# arrow directions; a square with arrow s splits into four, the two squares on
# the arrow's diagonal keep s and the two others point away from the centre.
CHAIR_LETTERS = "ABCD"
_DIRS = {"A": (1, 1), "B": (-1, 1), "C": (-1, -1), "D": (1, -1)}
_BY_DIR = {v: k for k, v in _DIRS.items()}


def _chair_tables() -> dict:
    tables = {}
    for dx in (0, 1):
        for dy in (0, 1):
            q = (2 * dx - 1, 2 * dy - 1)
            row = []
            for letter in CHAIR_LETTERS:
                s = _DIRS[letter]
                if q == s or q == (-s[0], -s[1]):
                    row.append(CHAIR_LETTERS.index(letter))
                else:
                    row.append(CHAIR_LETTERS.index(_BY_DIR[q]))
            tables[(dx, dy)] = np.array(row, dtype=np.int8)
    return tables


_CHAIR = _chair_tables()


def chair_supertile(level: int, seed: str = "A") -> np.ndarray:
    """Letter indices of the level-``level`` supertile; ``grid[x, y]``, y pointing up."""
    grid = np.array([[CHAIR_LETTERS.index(seed)]], dtype=np.int8)
    for _ in range(level):
        n = grid.shape[0]
        out = np.empty((2 * n, 2 * n), dtype=np.int8)
        for (dx, dy), table in _CHAIR.items():
            out[dx::2, dy::2] = table[grid]
        grid = out
    return grid


def _chair_level(W: int) -> int:
    level = 0
    while (1 << level) < 4 * W + 2:
        level += 1
    return level


def chair_coloring(W) -> dict:
    """All four letter classes on ``Z^2 ∩ B(0, W)``, origin at the supertile centre."""
    Wf = q_floor(as_qnum(W))
    grid = chair_supertile(_chair_level(Wf))
    half = grid.shape[0] // 2
    out = {}
    for x in range(-Wf, Wf + 1):
        for y in range(-Wf, Wf + 1):
            if x * x + y * y <= Wf * Wf:
                out[(x, y)] = CHAIR_LETTERS[grid[x + half, y + half]]
    return out


def gen_block_substitution_2d(symbol: str, W) -> PointSet:
    """Integer points carrying ``symbol`` in a chair supertile, recentred on one of them."""
    if symbol not in CHAIR_LETTERS:
        raise GeneratorError(f"unknown symbol {symbol!r}; alphabet is {CHAIR_LETTERS}")
    W = as_qnum(W)
    Wf = q_floor(W)
    if Wf < 1:
        raise GeneratorError("empty window")
    level = _chair_level(Wf)
    grid = chair_supertile(level)
    n = grid.shape[0]
    xs, ys = np.nonzero(grid == CHAIR_LETTERS.index(symbol))
    mid = n // 2
    d2 = (xs - mid) ** 2 + (ys - mid) ** 2
    order = np.lexsort((ys, xs, d2))
    cx, cy = int(xs[order[0]]), int(ys[order[0]])
    xs = xs - cx
    ys = ys - cy
    keep = xs * xs + ys * ys <= Wf * Wf
    pts = [(int(x), int(y)) for x, y in zip(xs[keep], ys[keep])]
    return PointSet.build(2, pts, W, {"generator": "block2d", "symbol": symbol, "level": level, "centre": [cx, cy]})


def gen_periodic_superlattice(motif: Sequence, cell, W) -> PointSet:
    """``motif + (cell_1 Z x ... x cell_d Z)`` inside ``B(0, W)``.

    ``cell`` holds the side lengths of an axis-aligned period box; every motif
    point must lie in ``[0, cell_k)`` along each axis.
    """
    W = as_qnum(W)
    if isinstance(cell, (int, Fraction, str, QNum)):
        cell = (cell,)
    cell = tuple(_frac(c) for c in cell)
    d = len(cell)
    motif = [tuple(_frac(c) for c in (m if isinstance(m, (tuple, list)) else (m,))) for m in motif]
    if not motif:
        raise GeneratorError("empty motif")
    for m in motif:
        if len(m) != d:
            raise GeneratorError("motif dimension does not match cell")
        if any(not (0 <= mk < ck) for mk, ck in zip(m, cell)):
            raise GeneratorError("motif larger than cell")
    Wfr = Fraction(q_floor(W) + 1)
    ranges = [range(-math.ceil(Wfr / ck) - 1, math.ceil(Wfr / ck) + 2) for ck in cell]
    pts = []
    for idx in itertools.product(*ranges):
        for m in motif:
            pts.append(tuple(mk + k * ck for mk, k, ck in zip(m, idx, cell)))
    prov = {"generator": "superlattice", "motif": [[str(c) for c in m] for m in motif], "cell": [str(c) for c in cell]}
    return PointSet.build(d, pts, W, prov)
