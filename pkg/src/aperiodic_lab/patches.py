"""T-patches up to translation and the windowed patch-counting function.

``count_patches`` has two optimized routes: an occupancy-bitmask route for
rational coordinates (vectorized, integer only) and a spatial-hash route for
coordinates involving tau.  ``count_patches_bruteforce`` is the independent
quadratic oracle.  The windowed count only sees centers whose T-ball lies in
the sample window, so it is a lower bound for the count of the infinite set.
"""
from __future__ import annotations

import csv
import functools
import hashlib
import io
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .exact import QNum, as_qnum, display, int_array_check, q_ceil, q_floor
from .pointset import PointSet, _lex_cmp

__all__ = [
    "Patch",
    "OccurrenceMap",
    "Profile",
    "ComplexityRow",
    "WindowExhausted",
    "default_threads",
    "eligible_centers",
    "eligible_indices",
    "patch_at",
    "count_patches",
    "count_patches_bruteforce",
    "complexity_profile",
    "complexity_csv",
    "same_grouping",
    "first_difference",
]

LOWER_BOUND_NOTE = (
    "windowed count: only centers whose T-ball lies inside the sample window are used, "
    "so the reported count is a lower bound for the patch count of the infinite set"
)


class WindowExhausted(ValueError):
    pass


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("APERIODIC_LAB_THREADS", "1")))
    except ValueError:
        return 1


def default_hasher(data: bytes) -> bytes:
    return hashlib.blake2b(data, digest_size=16).digest()


@dataclass(frozen=True)
class Patch:
    """``(X - x) ∩ B(0, T)`` as a sorted tuple of displacement vectors."""

    radius: QNum
    displacements: tuple

    def __len__(self) -> int:
        return len(self.displacements)


@dataclass
class OccurrenceMap:
    """Groups of center indices (into ``X.points``) sharing one T-patch.

    ``entries`` maps the canonical serialization of a patch to its sorted
    center indices; groups are ordered by their first center.
    """

    X: PointSet
    T: QNum
    entries: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def groups(self) -> list:
        return list(self.entries.values())

    def centers(self, key) -> list:
        return [self.X.points[i] for i in self.entries[key]]

    def patch(self, key) -> Patch:
        return patch_at(self.X, self.X.points[self.entries[key][0]], self.T, check=False)

    def partition(self) -> frozenset:
        return frozenset(frozenset(g) for g in self.entries.values())

    def key_of(self, index: int):
        for k, g in self.entries.items():
            if index in g:
                return k
        raise KeyError(index)


def _group(keys: Iterable[tuple[int, bytes]], hasher: Callable[[bytes], bytes]) -> dict:
    """Group (center, serialization) pairs by exact serialization equality.

    Buckets are addressed by ``hasher``; a collision between different
    serializations lands in the same bucket and is split by the exact compare.
    """
    buckets: dict = {}
    for idx, ser in keys:
        bucket = buckets.setdefault(hasher(ser), [])
        for entry in bucket:
            if entry[0] == ser:
                entry[1].append(idx)
                break
        else:
            bucket.append((ser, [idx]))
    groups = [entry for bucket in buckets.values() for entry in bucket]
    groups.sort(key=lambda e: e[1][0])
    return {ser: sorted(idx) for ser, idx in groups}


def eligible_indices(X: PointSet, T) -> list:
    T = as_qnum(T)
    rem = X.window_radius - T
    if rem < 0:
        raise WindowExhausted("window exhausted")
    F = X.frame
    if F.ints is not None:
        bound = F.int_bound_sq(rem)
        sq = (F.ints * F.ints).sum(axis=1)
        int_array_check(sq)
        return np.nonzero(sq <= bound)[0].tolist()
    bound = F.bound_sq(rem)
    return [i for i in range(F.n) if F.norm_sign(i, bound) <= 0]


def eligible_centers(X: PointSet, T) -> list:
    """Points whose closed T-ball lies inside the sample window."""
    return [X.points[i] for i in eligible_indices(X, T)]


def _sorted_patch(X: PointSet, disps: Iterable[tuple], T: QNum) -> Patch:
    pts = [X.frame.to_point(v) for v in disps]
    pts.sort(key=functools.cmp_to_key(_lex_cmp))
    return Patch(T, tuple(pts))


def patch_at(X: PointSet, x: Sequence, T, check: bool = True) -> Patch:
    T = as_qnum(T)
    x = tuple(as_qnum(c) for c in x)
    i = X.index.get(x)
    if i is None:
        raise ValueError(f"{x} is not a point of the set")
    if check:
        rem = X.window_radius - T
        if rem < 0 or X.frame.norm_sign(i, X.frame.bound_sq(rem)) > 0:
            raise ValueError(f"{x} is not eligible at radius {T}: its ball leaves the window")
    F = X.frame
    if F.ints is not None:
        diff = F.ints - F.ints[i]
        sq = (diff * diff).sum(axis=1)
        int_array_check(sq)
        js = np.nonzero(sq <= F.int_bound_sq(T))[0].tolist()
    else:
        bound = F.bound_sq(T)
        js = [j for j in range(F.n) if F.disp_sign(i, j, bound) <= 0]
    return _sorted_patch(X, [F.displacement(i, j) for j in js], T)


# --- bitmask route (rational coordinates) -----------------------------------

def _disk_offsets(d: int, L: int) -> np.ndarray:
    r = math.isqrt(L)
    axis = np.arange(-r, r + 1, dtype=np.int64)
    if d == 1:
        offs = axis[:, None]
    else:
        gx, gy = np.meshgrid(axis, axis, indexing="ij")
        offs = np.stack([gx.ravel(), gy.ravel()], axis=1)
    sq = (offs * offs).sum(axis=1)
    int_array_check(sq)
    return offs[sq <= L]


def _bitmask_keys(X: PointSet, T: QNum, centers: list, threads: int) -> list:
    F = X.frame
    Z = F.ints
    L = F.int_bound_sq(T)
    offs = _disk_offsets(X.d, L)
    r = math.isqrt(L)
    lo = Z.min(axis=0) - r
    hi = Z.max(axis=0) + r
    shape = (hi - lo + 1).tolist()
    occ = np.zeros(shape, dtype=bool)
    occ[tuple((Z - lo).T)] = True
    occ = occ.ravel()
    # row-major linear addressing into the flattened occupancy grid
    strides = np.array([int(np.prod(shape[k + 1:])) for k in range(len(shape))], dtype=np.int64)
    zlin = (Z - lo) @ strides
    olin = offs @ strides
    cidx = np.asarray(centers, dtype=np.int64)
    m = max(1, len(offs))
    chunk = max(1, 4_000_000 // m)

    def work(start: int) -> list:
        sel = cidx[start:start + chunk]
        bits = np.take(occ, zlin[sel][:, None] + olin[None, :])
        packed = np.packbits(bits, axis=1)
        return [(int(c), row.tobytes()) for c, row in zip(sel, packed)]

    starts = range(0, len(cidx), chunk)
    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(work, starts))
    else:
        parts = [work(s) for s in starts]
    return [kv for part in parts for kv in part]


# --- spatial-hash route (any exact coordinates) -----------------------------

def _grid_keys(X: PointSet, T: QNum, centers: list) -> list:
    F = X.frame
    cell = max(QNum(1), T / 4) * F.den
    span = q_ceil(T * F.den / cell)
    cells: dict = {}
    keys = []
    for i, pr in enumerate(F.pairs):
        key = tuple(q_floor(QNum(pr[k], pr[k + 1], 1) / cell) for k in range(0, len(pr), 2))
        keys.append(key)
        cells.setdefault(key, []).append(i)
    bound = F.bound_sq(T)
    steps = list(itertools.product(range(-span, span + 1), repeat=X.d))
    out = []
    for i in centers:
        base = keys[i]
        disps = []
        for st in steps:
            for j in cells.get(tuple(b + s for b, s in zip(base, st)), ()):
                if F.disp_sign(i, j, bound) <= 0:
                    disps.append(F.displacement(i, j))
        disps.sort()
        out.append((i, repr(tuple(disps)).encode()))
    return out


def count_patches(X: PointSet, T, *, method: str = "auto", hasher: Callable[[bytes], bytes] | None = None,
                  centers: Sequence[int] | None = None, threads: int | None = None) -> tuple[int, OccurrenceMap]:
    """Number of distinct T-patches among eligible centers, with their occurrences.

    ``centers`` restricts the count to a subset of eligible center indices
    (used for restricted-monotonicity checks).  ``method`` is ``"auto"``,
    ``"bitmask"`` or ``"grid"``.
    """
    T = as_qnum(T)
    elig = eligible_indices(X, T)
    if centers is not None:
        allowed = set(elig)
        bad = [c for c in centers if c not in allowed]
        if bad:
            raise ValueError(f"centers {bad[:3]} are not eligible at radius {T}")
        elig = sorted(centers)
    if not elig:
        raise WindowExhausted("window exhausted: no eligible centers")
    if method == "auto":
        method = "bitmask" if X.frame.ints is not None else "grid"
    if method == "bitmask":
        if X.frame.ints is None:
            raise ValueError("bitmask route needs rational coordinates of moderate size")
        keys = _bitmask_keys(X, T, elig, threads or default_threads())
    elif method == "grid":
        keys = _grid_keys(X, T, elig)
    else:
        raise ValueError(f"unknown method {method!r}")
    entries = _group(keys, hasher or default_hasher)
    return len(entries), OccurrenceMap(X, T, entries)


def count_patches_bruteforce(X: PointSet, T, centers: Sequence[int] | None = None) -> tuple[int, OccurrenceMap]:
    """Quadratic oracle: full scan per center, pairwise patch comparison, no hashing."""
    T = as_qnum(T)
    F = X.frame
    elig = eligible_indices(X, T) if centers is None else sorted(centers)
    if not elig:
        raise WindowExhausted("window exhausted: no eligible centers")
    patches = []
    if F.rational:
        # scaled integer coordinates, plain Python ints
        pts = [pr[0::2] for pr in F.pairs]
        L = F.int_bound_sq(T)
        for i in elig:
            if X.d == 1:
                (px,) = pts[i]
                disp = [(qx - px,) for (qx,) in pts if (qx - px) * (qx - px) <= L]
            else:
                px, py = pts[i]
                disp = []
                for qx, qy in pts:
                    dx = qx - px
                    dy = qy - py
                    if dx * dx + dy * dy <= L:
                        disp.append((dx, dy))
            patches.append(tuple(sorted(disp)))
    else:
        bound = F.bound_sq(T)
        for i in elig:
            disp = [F.displacement(i, j) for j in range(F.n) if F.disp_sign(i, j, bound) <= 0]
            patches.append(tuple(sorted(disp)))
    reps: list = []
    members: list = []
    for i, p in zip(elig, patches):
        for k, r in enumerate(reps):
            if r == p:
                members[k].append(i)
                break
        else:
            reps.append(p)
            members.append([i])
    entries = {repr(r).encode(): m for r, m in zip(reps, members)}
    return len(entries), OccurrenceMap(X, T, entries)


def same_grouping(a: OccurrenceMap, b: OccurrenceMap) -> bool:
    return len(a) == len(b) and a.partition() == b.partition()


def first_difference(a: OccurrenceMap, b: OccurrenceMap):
    """A center whose group differs between the two maps, with its patch from ``a``; None if equal."""
    by_b = {}
    for g in b.entries.values():
        fs = frozenset(g)
        for i in g:
            by_b[i] = fs
    for key, g in a.entries.items():
        fs = frozenset(g)
        for i in g:
            if by_b.get(i) != fs:
                return i, a.patch(key)
    for g in b.entries.values():
        for i in g:
            if not any(i in ga for ga in a.entries.values()):
                return i, None
    return None


# --- profiles ----------------------------------------------------------------

@dataclass(frozen=True)
class ComplexityRow:
    T: QNum
    count: int
    normalized: QNum  # count / T^d


@dataclass
class Profile:
    """Rows of a measured function of T, ``T`` strictly increasing."""

    kind: str
    d: int
    rows: list
    notes: list = field(default_factory=list)

    def values(self) -> dict:
        return {r.T: r for r in self.rows}


def _check_grid(X: PointSet, T_grid: Sequence, allow_shallow: bool) -> list:
    grid = [as_qnum(T) for T in T_grid]
    if not grid:
        raise ValueError("empty T grid")
    for s, t in zip(grid, grid[1:]):
        if not s < t:
            raise ValueError("T grid must be strictly increasing")
    if not allow_shallow and grid[-1] > X.window_radius / 2:
        raise ValueError("T grid exceeds W/2 (allow_shallow_window overrides)")
    return grid


def complexity_profile(X: PointSet, T_grid: Sequence, *, allow_shallow: bool = False,
                       maps: dict | None = None, **kwargs) -> Profile:
    """Windowed counts for each T of the grid, plus count / T^d.

    When ``maps`` is a dict it is filled with the OccurrenceMap of every row.
    """
    grid = _check_grid(X, T_grid, allow_shallow)
    rows = []
    for T in grid:
        n, occ = count_patches(X, T, **kwargs)
        if maps is not None:
            maps[T] = occ
        rows.append(ComplexityRow(T, n, QNum(n) / T ** X.d))
    return Profile("complexity", X.d, rows, [LOWER_BOUND_NOTE])


def complexity_csv(profile: Profile) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["T", "value_lo", "value_hi", "normalized"])
    for r in profile.rows:
        w.writerow([display(r.T), r.count, r.count, display(r.normalized)])
    return buf.getvalue()


def complexity_json(profile: Profile) -> dict:
    return {
        "kind": "complexity",
        "dimension": profile.d,
        "notes": profile.notes,
        "rows": [{"T": str(r.T), "count": r.count, "normalized": str(r.normalized)} for r in profile.rows],
    }
