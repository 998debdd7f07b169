"""Constant estimates and the executable proof checklist.

Every check here is a finite-window consistency test: it can show that a
sample behaves like an aperiodic linearly repetitive set (or like a periodic
one), never prove it.  Packing radius convention: ``r`` is half the minimum
nearest-neighbor distance, so open balls of radius ``r`` meet at most one
point.
"""
from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact import (QNum, as_qnum, display, display_sqrt, int_array_check, q_floor, sq_dist, sqrt_bounds,
                    sqrt_exact, zsign)
from .patches import (LOWER_BOUND_NOTE, OccurrenceMap, Profile, _check_grid, complexity_json, complexity_profile,
                      count_patches)
from .pointset import PointSet
from .repetitivity import (Bracket, CoveringQuery, _cover_1d_ints, _max_cover_2d, _nroot_lower, covering_radius_1d,
                           covering_radius_2d, default_grid_step, repetitivity_json, repetitivity_profile)

__all__ = [
    "DeloneParams",
    "RepulsionRow",
    "RepulsionSummary",
    "DensityBound",
    "Verdict",
    "ChainCheck",
    "LiminfReport",
    "CertificateReport",
    "WindowTooSmall",
    "packing_covering",
    "detect_period",
    "repulsion_ratio",
    "repulsion_constant",
    "repulsion_window_check",
    "density_bound",
    "complexity_chain_check",
    "lr_constant",
    "dr_constant",
    "liminf_report",
    "certify",
    "halton_probes",
]

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


class WindowTooSmall(ValueError):
    pass


# --- helpers -----------------------------------------------------------------

def _closest_pair_rows(Z: np.ndarray):
    """Exact closest pair of an int array of points (rows), as (sq, i, j)."""
    n = len(Z)
    if n < 2:
        return None
    order = np.lexsort(Z.T[::-1])
    P = Z[order]
    best = None
    for k in range(1, n):
        d = P[k:] - P[:-k]
        sq = (d * d).sum(axis=1)
        int_array_check(sq)
        j = int(np.argmin(sq))
        if best is None or int(sq[j]) < best[0]:
            best = (int(sq[j]), int(order[j]), int(order[j + k]))
        lead = d[:, 0]
        if int((lead * lead).min()) >= best[0]:
            # sorted on the first axis: later shifts are no closer
            break
    i, j = sorted(best[1:])
    return best[0], i, j


def _closest_pair(X: PointSet, idx: Sequence[int]):
    """(sq distance as QNum, i, j) of the closest pair among ``idx``; None if fewer than two."""
    if len(idx) < 2:
        return None
    F = X.frame
    if F.ints is not None:
        res = _closest_pair_rows(F.ints[list(idx)])
        sq, a, b = res
        return QNum(sq, 0, F.den * F.den), idx[a], idx[b]
    if X.d == 1:
        # points are sorted, so the closest pair is consecutive
        best = None
        for i, j in zip(idx, idx[1:]):
            v = X.points[j][0] - X.points[i][0]
            sq = v * v
            if best is None or sq < best[0]:
                best = (sq, i, j)
        return best
    best = None
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            sq = sq_dist(X.points[idx[a]], X.points[idx[b]])
            if best is None or sq < best[0]:
                best = (sq, idx[a], idx[b])
    return best


def _pt(p) -> list:
    return [str(c) for c in p]


def _in_range(T: QNum, lo: QNum, hi: QNum) -> bool:
    return lo <= T <= hi


def _root(q_sq: QNum) -> QNum:
    """Exact root when rational, otherwise a rational lower bound."""
    r = sqrt_exact(q_sq)
    if r is not None:
        return r
    return QNum.from_fraction(sqrt_bounds(q_sq)[0])


# --- Delone parameters ---------------------------------------------------------

@dataclass(frozen=True)
class DeloneParams:
    """Packing radius (squared, exact) and covering radius bracket of a sample."""

    packing_sq: QNum
    covering: Bracket
    witness: tuple = ()

    @property
    def packing(self) -> QNum:
        """Exact packing radius when rational, otherwise a rational lower bound."""
        return _root(self.packing_sq)

    def to_json(self) -> dict:
        return {
            "convention": "packing radius = half the minimum nearest-neighbor distance",
            "packing_radius_sq": str(self.packing_sq),
            "packing_radius_display": display_sqrt(self.packing_sq),
            "covering_radius": self.covering.to_json(),
            "covering_radius_display": list(self.covering.display()),
            "closest_pair": [_pt(p) for p in self.witness],
        }


def packing_covering(X: PointSet, grid_step=None) -> DeloneParams:
    if len(X) < 2:
        raise ValueError("need at least two points")
    sq, i, j = _closest_pair(X, list(range(len(X))))
    rho = X.window_radius / 2
    F = X.frame
    if X.d == 1:
        if F.ints is not None:
            cov = Bracket.point(_cover_1d_ints(F.ints[:, 0], rho, F.den))
        else:
            cov = Bracket.point(covering_radius_1d(CoveringQuery(X.points, rho)))
    else:
        h = Fraction(grid_step) if grid_step is not None else min(default_grid_step(rho), Fraction(1, 2))
        if F.ints is not None:
            cov = _max_cover_2d([F.ints], F.den, rho, h)
        else:
            cov = covering_radius_2d(CoveringQuery(X.points, rho, h))
    return DeloneParams(sq / 4, cov, (X.points[i], X.points[j]))


# --- periods -----------------------------------------------------------------

def _positive(v: Sequence[int]) -> bool:
    for c in v:
        if c:
            return c > 0
    return False


def detect_period(X: PointSet, max_norm) -> tuple | None:
    """Shortest translation ``t`` with ``0 < |t| <= max_norm`` consistent with the window.

    Only ``t`` with positive leading coordinate is returned (``-t`` is then a
    period too).  Candidates are the differences ``y - x0`` for the point
    ``x0`` nearest the origin; a period must map ``x0`` into the set.  The
    test region is ``B(0, W - max_norm)``.
    """
    m = as_qnum(max_norm)
    if m > X.window_radius / 4:
        raise ValueError("max_norm must be at most W/4")
    F = X.frame
    region = X.window_radius - m
    rbound = F.bound_sq(region)
    mbound = F.bound_sq(m)
    if F.ints is not None:
        Z = F.ints
        nsq = (Z * Z).sum(axis=1)
        int_array_check(nsq)
        region_mask = nsq <= F.int_bound_sq(region)
        if not region_mask.any():
            return None
        x0 = int(np.lexsort((*Z.T[::-1], nsq))[0])
        diffs = Z - Z[x0]
        dsq = (diffs * diffs).sum(axis=1)
        L = F.int_bound_sq(m)
        cand = [(int(dsq[k]), tuple(int(c) for c in diffs[k])) for k in np.nonzero((dsq > 0) & (dsq <= L))[0]]
        cand = sorted(c for c in cand if _positive(c[1]))
        members = {tuple(r) for r in Z.tolist()}
        inside = Z[region_mask]
        RB = F.int_bound_sq(region)
        for _, t in cand:
            tv = np.array(t, dtype=np.int64)
            fwd = inside + tv
            if not all(tuple(r) in members for r in fwd.tolist()):
                continue
            back = Z - tv
            bsq = (back * back).sum(axis=1)
            int_array_check(bsq)
            need = back[bsq <= RB]
            if all(tuple(r) in members for r in need.tolist()):
                return F.to_point(tuple(v for c in t for v in (c, 0)))
        return None
    # tau coordinates: exact pair arithmetic
    in_region = [i for i in range(F.n) if F.norm_sign(i, rbound) <= 0]
    if not in_region:
        return None
    members = set(F.pairs)
    x0 = min(in_region, key=lambda i: _norm_key_vec(F.pairs[i]))
    cands = []
    for j in range(F.n):
        if j != x0 and F.disp_sign(x0, j, mbound) <= 0:
            t = F.displacement(x0, j)
            if _positive_real(F, t):
                cands.append(t)
    cands.sort(key=_norm_key_vec)
    for t in cands:
        ok = all(tuple(a + b for a, b in zip(F.pairs[i], t)) in members for i in in_region)
        if ok:
            for i in range(F.n):
                back = tuple(a - b for a, b in zip(F.pairs[i], t))
                s = _vec_norm_sign(back, rbound)
                if s <= 0 and back not in members:
                    ok = False
                    break
        if ok:
            return F.to_point(t)
    return None


class _Real:
    """Sort key wrapping ``a + b*tau`` with exact comparison."""

    __slots__ = ("a", "b")

    def __init__(self, a: int, b: int):
        self.a, self.b = a, b

    def __lt__(self, other: "_Real") -> bool:
        return zsign(self.a - other.a, self.b - other.b) < 0

    def __eq__(self, other) -> bool:
        return self.a == other.a and self.b == other.b


def _vec_norm(v: Sequence[int]) -> tuple:
    sa = sb = 0
    for k in range(0, len(v), 2):
        a, b = v[k], v[k + 1]
        sa += a * a + b * b
        sb += 2 * a * b + b * b
    return sa, sb


def _vec_norm_sign(v: Sequence[int], bound: QNum) -> int:
    sa, sb = _vec_norm(v)
    return zsign(sa * bound.den - bound.a, sb * bound.den - bound.b)


def _norm_key_vec(v):
    sa, sb = _vec_norm(v)
    return (_Real(sa, sb), tuple(_Real(v[k], v[k + 1]) for k in range(0, len(v), 2)))


def _positive_real(F, v) -> bool:
    for k in range(0, len(v), 2):
        s = zsign(v[k], v[k + 1])
        if s:
            return s > 0
    return False


# --- repulsion -----------------------------------------------------------------

@dataclass(frozen=True)
class RepulsionRow:
    """Smallest distance between distinct centers of equal T-patches, relative to T."""

    T: QNum
    ratio_sq: QNum | None          # None: every patch type occurs once
    witness: tuple = ()

    @property
    def infinite(self) -> bool:
        return self.ratio_sq is None

    @property
    def distance_sq(self) -> QNum | None:
        return None if self.ratio_sq is None else self.ratio_sq * self.T * self.T

    def to_json(self) -> dict:
        return {
            "T": str(self.T),
            "ratio_sq": None if self.ratio_sq is None else str(self.ratio_sq),
            "ratio_display": display_sqrt(self.ratio_sq),
            "witness": [_pt(p) for p in self.witness],
        }


def repulsion_ratio(X: PointSet, T, occ: OccurrenceMap | None = None) -> RepulsionRow:
    T = as_qnum(T)
    if not T > 1:
        raise ValueError("repulsion is only defined for T > 1")
    if occ is None:
        _, occ = count_patches(X, T)
    best = None
    for g in occ.entries.values():
        res = _closest_pair(X, g)
        if res is not None and (best is None or res[0] < best[0]):
            best = res
    if best is None:
        return RepulsionRow(T, None)
    sq, i, j = best
    return RepulsionRow(T, sq / (T * T), (X.points[i], X.points[j]))


def _range_min(rows, lo: QNum, hi: QNum, attr: str):
    vals = [getattr(r, attr) for r in rows if _in_range(r.T, lo, hi) and getattr(r, attr) is not None]
    return min(vals) if vals else None


@dataclass(frozen=True)
class RepulsionSummary:
    value_sq: QNum | None            # min over grid of the squared ratio
    rows: tuple
    trend: str                       # "bounded below" | "decaying" | "undetermined"
    upper_min_sq: QNum | None
    lower_min_sq: QNum | None

    @property
    def value(self) -> QNum | None:
        return None if self.value_sq is None else _root(self.value_sq)

    def to_json(self) -> dict:
        return {
            "value_sq": None if self.value_sq is None else str(self.value_sq),
            "value_display": display_sqrt(self.value_sq),
            "trend": self.trend,
            "min_sq_top_half": None if self.upper_min_sq is None else str(self.upper_min_sq),
            "min_sq_second_quarter": None if self.lower_min_sq is None else str(self.lower_min_sq),
            "rows": [r.to_json() for r in self.rows],
        }


def repulsion_constant(X: PointSet, T_grid: Sequence, maps: dict | None = None) -> RepulsionSummary:
    """Minimum repulsion ratio over the grid, with a trend classification.

    The trend compares the minimum over ``[T_max/2, T_max]`` with the minimum
    over ``[T_max/4, T_max/2]``: a drop of more than 25% is the ``c/T`` decay
    of a periodic set, otherwise the ratio is bounded below.
    """
    grid = [as_qnum(T) for T in T_grid]
    if any(not T > 1 for T in grid):
        raise ValueError("grid values must exceed 1")
    rows = tuple(repulsion_ratio(X, T, (maps or {}).get(T)) for T in grid)
    finite = [r.ratio_sq for r in rows if r.ratio_sq is not None]
    value = min(finite) if finite else None
    tmax = grid[-1]
    up = _range_min(rows, tmax / 2, tmax, "ratio_sq")
    low = _range_min(rows, tmax / 4, tmax / 2, "ratio_sq")
    if up is None and low is None:
        trend = "bounded below" if value is None else "undetermined"
    elif up is None:
        trend = "bounded below"
    elif low is None:
        trend = "undetermined"
    else:
        trend = "bounded below" if up >= QNum(9, 0, 16) * low else "decaying"
    return RepulsionSummary(value, rows, trend, up, low)


# --- verdicts ------------------------------------------------------------------

@dataclass
class Verdict:
    status: str
    evidence: list = field(default_factory=list)
    note: str = ""

    def to_json(self) -> dict:
        return {"status": self.status, "note": self.note, "evidence": self.evidence}


def repulsion_window_check(X: PointSet, repulsion: RepulsionSummary, delone: DeloneParams,
                           lin_rep: QNum | None) -> Verdict:
    """No equal-patch pair may have distance in ``[r, T / ((L + 1)(1/r + 1))]``.

    ``L`` is the linear repetitivity constant and ``r`` the packing radius.

    Only the closest equal-patch pair of each T matters: every distinct pair is
    at least ``2r`` apart.  A pair inside the window is the local period that
    the repulsion argument rules out for aperiodic sets.
    """
    if lin_rep is None:
        return Verdict(INCONCLUSIVE, note="no valid repetitivity rows, linear repetitivity constant unavailable")
    r_exact = sqrt_exact(delone.packing_sq)
    r_lo, r_hi = sqrt_bounds(delone.packing_sq)
    evidence = []
    status = PASS
    for row in repulsion.rows:
        if row.ratio_sq is None:
            evidence.append({"T": str(row.T), "closest_equal_pair_sq": None, "in_window": False})
            continue
        d_sq = row.distance_sq
        T = row.T
        factor = lin_rep + 1
        if r_exact is not None:
            bound = T * r_exact / (factor * (r_exact + 1))
            inside = d_sq <= bound * bound and d_sq >= delone.packing_sq
            decided = True
        else:
            # bound grows with r, so bracket it
            b_lo = T * QNum.from_fraction(r_lo) / (factor * (QNum.from_fraction(r_lo) + 1))
            b_hi = T * QNum.from_fraction(r_hi) / (factor * (QNum.from_fraction(r_hi) + 1))
            if d_sq <= b_lo * b_lo:
                inside, decided = True, True
            elif d_sq > b_hi * b_hi:
                inside, decided = False, True
            else:
                inside, decided = False, False
            bound = b_hi
        ev = {"T": str(T), "closest_equal_pair_sq": str(d_sq), "upper_end": str(bound),
              "upper_end_display": display(bound), "in_window": inside}
        if inside:
            ev["witness"] = [_pt(p) for p in row.witness]
            status = FAIL
        if not decided and status == PASS:
            status = INCONCLUSIVE
        evidence.append(ev)
    note = "closest equal-patch pair compared with the contradiction window of the repulsion argument"
    return Verdict(status, evidence, note)


# --- density -----------------------------------------------------------------

def _radical_inverse(i: int, base: int) -> Fraction:
    f, out = Fraction(1, base), Fraction(0)
    while i:
        i, r = divmod(i, base)
        out += r * f
        f /= base
    return out


PROBE_GRID = 64


def halton_probes(d: int, radius: QNum, count: int) -> list:
    """Deterministic low-discrepancy probe points in ``B(0, radius)`` on the grid ``Z^d / 64``."""
    R = as_qnum(radius)
    Rf = Fraction(q_floor(R * PROBE_GRID), PROBE_GRID)
    bases = (2, 3)[:d]
    out = []
    i = 1
    R2 = R * R
    while len(out) < count:
        u = [_radical_inverse(i, b) for b in bases]
        p = tuple(Fraction(math.floor((2 * x - 1) * Rf * PROBE_GRID), PROBE_GRID) for x in u)
        i += 1
        if QNum.from_fraction(sum(c * c for c in p)) <= R2:
            out.append(p)
    return out


@dataclass(frozen=True)
class DensityBound:
    value: QNum | None            # min count / T^d over rows T >= threshold
    threshold: QNum | None        # smallest T from which the minimum is stable
    rows: tuple                   # (T, min with n probes, min with 2n probes, stable)
    probes: int

    def to_json(self) -> dict:
        return {
            "value": None if self.value is None else str(self.value),
            "value_display": display(self.value) if self.value is not None else None,
            "threshold": None if self.threshold is None else str(self.threshold),
            "probes": self.probes,
            "rows": [{"T": str(T), "min_n": str(a), "min_2n": str(b), "stable": s} for T, a, b, s in self.rows],
        }


def _ball_counts(X: PointSet, probes: list, grid: list) -> np.ndarray:
    """counts[p, t] = #(X ∩ B(probe_p, T_t)), exact."""
    F = X.frame
    out = np.zeros((len(probes), len(grid)), dtype=np.int64)
    if F.ints is not None and int(np.abs(F.ints).max(initial=0)) * PROBE_GRID < (1 << 28):
        S = PROBE_GRID * F.den
        Zs = F.ints * PROBE_GRID
        bounds = np.array([q_floor((T * S) * (T * S)) for T in grid], dtype=np.int64)
        for k, p in enumerate(probes):
            P = np.array([int(c * S) for c in p], dtype=np.int64)
            diff = Zs - P
            sq = np.sort((diff * diff).sum(axis=1))
            int_array_check(sq, bounds)
            out[k] = np.searchsorted(sq, bounds, side="right")
        return out
    if X.d != 1:
        for k, p in enumerate(probes):
            pq = tuple(QNum.from_fraction(c) for c in p)
            for t, T in enumerate(grid):
                out[k, t] = sum(1 for x in X.points if sq_dist(x, pq) <= T * T)
        return out
    vals = [p[0] for p in X.points]
    for k, p in enumerate(probes):
        c = QNum.from_fraction(p[0])
        for t, T in enumerate(grid):
            out[k, t] = bisect.bisect_right(vals, c + T) - bisect.bisect_left(vals, c - T)
    return out


def density_bound(X: PointSet, T_grid: Sequence, probes: int = 128) -> DensityBound:
    """Lower bound for ``#(X ∩ B(p, T)) / T^d`` over probe centers ``p``.

    Each row is evaluated with ``probes`` and ``2*probes`` points; the
    threshold is the smallest grid T from which every larger row is positive
    and its minimum moves by at most 10% when the probe count doubles.
    """
    if probes < 100:
        raise ValueError("at least 100 probes are required")
    grid = [as_qnum(T) for T in T_grid if as_qnum(T) <= X.window_radius / 2]
    pts = halton_probes(X.d, X.window_radius / 2, 2 * probes)
    counts = _ball_counts(X, pts, grid)
    rows = []
    for t, T in enumerate(grid):
        norm = T ** X.d
        m1 = QNum(int(counts[:probes, t].min())) / norm
        m2 = QNum(int(counts[:, t].min())) / norm
        stable = m2 > 0 and m1 <= QNum(11, 0, 10) * m2
        rows.append((T, m1, m2, stable))
    threshold = None
    for k in range(len(rows) - 1, -1, -1):
        if not rows[k][3]:
            break
        threshold = rows[k][0]
    value = None
    if threshold is not None:
        value = min(r[2] for r in rows if r[0] >= threshold)
    return DensityBound(value, threshold, tuple(rows), probes)


# --- complexity chain --------------------------------------------------------

@dataclass
class ChainCheck:
    verdict: Verdict
    complexity_constant: QNum | None       # density bound * (repulsion/3)^d
    complexity_threshold: QNum | None      # 3 * density threshold / repulsion


def complexity_chain_check(X: PointSet, profile: Profile, maps: dict, repulsion: RepulsionSummary,
                           density: DensityBound) -> ChainCheck:
    """Re-run the counting argument row by row.

    (i)  patches centred in ``B(0, kT/3)`` are pairwise different,
    (ii) the count is at least the number of points in that ball,
    (iii) above the complexity threshold ``3 * t / k`` the count is at least
         ``c * T^d`` with ``c = a * (k/3)^d``,
    where ``k`` is the repulsion constant and ``a`` the density bound valid
    from radius ``t`` on.
    (ii) follows from (i) but is checked on its own.
    """
    if repulsion.value_sq is None or density.value is None or density.threshold is None:
        return ChainCheck(Verdict(INCONCLUSIVE, note="repulsion or density constant unavailable"), None, None)
    k_sq = repulsion.value_sq
    d = X.d
    k = _root(k_sq)                      # exact when rational, else a lower bound
    lam = density.value * (k_sq / 9 if d == 2 else k / 3)
    threshold = 3 * density.threshold / k
    F = X.frame
    evidence = []
    status = PASS
    applicable = 0
    for row in profile.rows:
        T = row.T
        occ = maps[T]
        ball_sq = k_sq * T * T / 9
        ball = _ball_indices(F, ball_sq)
        owner = {}
        for key, g in occ.entries.items():
            for i in g:
                owner[i] = key
        unobserved = [i for i in ball if i not in owner]
        keys = [owner[i] for i in ball if i in owner]
        distinct = not unobserved and len(set(keys)) == len(keys)
        counting = row.count >= len(ball)
        ev = {"T": str(T), "ball_radius_sq": str(ball_sq), "ball_points": len(ball), "count": row.count,
              "pairwise_different": distinct, "counting": counting}
        ok = distinct and counting
        if T >= threshold:
            applicable += 1
            vol = lam * T ** d
            ev["volume_bound"] = str(vol)
            ev["volume"] = QNum(row.count) >= vol
            ok = ok and ev["volume"]
        if not ok:
            status = FAIL
        evidence.append(ev)
    if status == PASS and applicable == 0:
        status = INCONCLUSIVE
    note = f"complexity threshold {display(threshold)}; rows at or above it: {applicable}"
    return ChainCheck(Verdict(status, evidence, note), lam, threshold)


def _ball_indices(F, radius_sq: QNum) -> list:
    bound = radius_sq * F.den * F.den
    if F.ints is None:
        return [i for i in range(F.n) if F.norm_sign(i, bound) <= 0]
    nsq = (F.ints * F.ints).sum(axis=1)
    int_array_check(nsq)
    return np.nonzero(nsq <= q_floor(bound))[0].tolist()


# --- repetitivity constants ----------------------------------------------------

def _valid(rows):
    return [r for r in rows if r.valid]


def lr_constant(rep_rows: Sequence) -> QNum:
    """Max over valid rows of ``M_hi / T``."""
    rows = _valid(rep_rows)
    if not rows:
        raise WindowTooSmall("window too small: no valid repetitivity rows")
    return max(r.bracket.hi_upper() / r.T for r in rows)


def dr_constant(rep_rows: Sequence, counts: dict, d: int) -> QNum:
    """Max over valid rows of ``M_hi / N^(1/d)``, the root bounded from below."""
    rows = _valid(rep_rows)
    if not rows:
        raise WindowTooSmall("window too small: no valid repetitivity rows")
    return max(r.bracket.hi_upper() / _nroot_lower(counts[r.T], d) for r in rows)


@dataclass(frozen=True)
class LiminfReport:
    min_top: QNum             # min count/T^d over [T_max/2, T_max]
    min_lower: QNum | None    # same over [T_max/4, T_max/2]
    stable: bool

    @property
    def positive(self) -> bool:
        return self.min_top > 0

    def to_json(self) -> dict:
        return {"min_top_half": str(self.min_top), "min_top_half_display": display(self.min_top),
                "min_second_quarter": None if self.min_lower is None else str(self.min_lower),
                "stable": self.stable, "positive": self.positive}


def liminf_report(profile: Profile) -> LiminfReport:
    tmax = profile.rows[-1].T
    top = [r.normalized for r in profile.rows if _in_range(r.T, tmax / 2, tmax)]
    low = [r.normalized for r in profile.rows if _in_range(r.T, tmax / 4, tmax / 2)]
    mt = min(top)
    ml = min(low) if low else None
    stable = ml is not None and ml > 0 and abs(mt - ml) <= ml / 4
    return LiminfReport(mt, ml, stable)


def _sub(rows, lo, hi):
    return [r for r in rows if _in_range(r.T, lo, hi)]


# --- full report ---------------------------------------------------------------

@dataclass
class CertificateReport:
    delone: DeloneParams
    repulsion: RepulsionSummary
    density: DensityBound
    complexity_constant: QNum | None
    complexity_threshold: QNum | None
    lr_constant: QNum | None
    dr_constant: QNum | None
    period: tuple | None
    liminf: LiminfReport
    verdicts: dict
    complexity: Profile
    repetitivity: Profile
    config: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.status != FAIL for v in self.verdicts.values())

    def to_json(self) -> dict:
        q = lambda v: None if v is None else str(v)
        return {
            "notes": [LOWER_BOUND_NOTE,
                      "all constants are finite-window estimates; verdicts test consistency, they do not prove "
                      "aperiodicity or linear repetitivity",
                      "repetitivity is measured over balls centred in B(0, (W-T)/2)"],
            "config": self.config,
            "delone": self.delone.to_json(),
            "repulsion_constant": self.repulsion.to_json(),
            "density_constant": self.density.to_json(),
            "complexity_constant": q(self.complexity_constant),
            "complexity_threshold": q(self.complexity_threshold),
            "linear_repetitivity_constant": q(self.lr_constant),
            "dense_repetitivity_constant": q(self.dr_constant),
            "period": None if self.period is None else _pt(self.period),
            "liminf": self.liminf.to_json(),
            "verdicts": {k: v.to_json() for k, v in self.verdicts.items()},
            "complexity": complexity_json(self.complexity),
            "repetitivity": repetitivity_json(self.repetitivity),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    def render_text(self) -> str:
        s = []
        s.append("Delone parameters")
        s.append(f"  packing radius r   = {display_sqrt(self.delone.packing_sq)}")
        lo, hi = self.delone.covering.display()
        s.append(f"  covering radius R  in [{lo}, {hi}]")
        s.append("Repulsion of equal patches")
        s.append(f"  repulsion constant = {display_sqrt(self.repulsion.value_sq)} ({self.repulsion.trend})")
        s.append(f"  period             = {'none found' if self.period is None else _pt(self.period)}")
        s.append(f"  contradiction window check: {self.verdicts['repulsion_window'].status}")
        s.append("Complexity lower bound")
        s.append(f"  density constant   = {display(self.density.value) if self.density.value is not None else 'n/a'}"
                 f" from T >= {display(self.density.threshold) if self.density.threshold is not None else 'n/a'}")
        s.append(f"  complexity constant= {display(self.complexity_constant) if self.complexity_constant is not None else 'n/a'}"
                 f" from T >= {display(self.complexity_threshold) if self.complexity_threshold is not None else 'n/a'}")
        s.append(f"  chain check: {self.verdicts['complexity_chain'].status}")
        s.append("Dense repetitivity")
        s.append(f"  linear repetitivity constant = {display(self.lr_constant) if self.lr_constant is not None else 'n/a'}")
        s.append(f"  dense repetitivity constant  = {display(self.dr_constant) if self.dr_constant is not None else 'n/a'}")
        s.append(f"  liminf of count/T^d (top half) = {display(self.liminf.min_top)}, stable: {self.liminf.stable}")
        s.append("Verdicts")
        for k, v in self.verdicts.items():
            s.append(f"  {k:22s} {v.status}")
        return "\n".join(s) + "\n"


def certify(X: PointSet, T_grid: Sequence, *, probes: int = 128, grid_step=None, max_period=None,
            allow_shallow: bool = False, threads: int | None = None) -> CertificateReport:
    """Run every estimate and check on one sample."""
    grid = _check_grid(X, T_grid, allow_shallow)
    maps: dict = {}
    comp = complexity_profile(X, grid, allow_shallow=allow_shallow, maps=maps, threads=threads)
    rep = repetitivity_profile(X, grid, maps=maps, grid_step=grid_step, allow_shallow=allow_shallow)
    counts = {r.T: r.count for r in comp.rows}
    delone = packing_covering(X)
    rgrid = [T for T in grid if T > 1]
    repulsion = repulsion_constant(X, rgrid, maps)
    density = density_bound(X, grid, probes)
    mp = as_qnum(max_period) if max_period is not None else X.window_radius / 4
    period = detect_period(X, mp)
    verdicts = {}

    verdicts["non_periodicity"] = Verdict(
        PASS if period is None else FAIL,
        [] if period is None else [{"period": _pt(period)}],
        f"no translation of norm <= {display(mp)} maps the window sample to itself" if period is None
        else "periodic signature: a translation maps the window sample to itself")

    verdicts["repulsion_trend"] = Verdict(
        PASS if repulsion.trend == "bounded below" else (FAIL if repulsion.trend == "decaying" else INCONCLUSIVE),
        [r.to_json() for r in repulsion.rows],
        f"equal-patch distance / T is {repulsion.trend}")

    try:
        lin_rep = lr_constant(rep.rows)
        dense_rep = dr_constant(rep.rows, counts, X.d)
    except WindowTooSmall:
        lin_rep = dense_rep = None
    verdicts["repulsion_window"] = repulsion_window_check(X, repulsion, delone, lin_rep)

    chain = complexity_chain_check(X, comp, maps, repulsion, density)
    verdicts["complexity_chain"] = chain.verdict

    tmax = grid[-1]
    top, low = _sub(rep.rows, tmax / 2, tmax), _sub(rep.rows, tmax / 4, tmax / 2)
    ev = [{"T": str(r.T), "M_hi": str(r.bracket.hi_upper()), "valid": r.valid, "count": counts[r.T]} for r in rep.rows]
    if _valid(top) and _valid(low):
        lr_top, lr_low = lr_constant(top), lr_constant(low)
        verdicts["linear_repetitivity"] = Verdict(
            PASS if lr_top <= 2 * lr_low else FAIL, ev,
            f"max M/T: top half {display(lr_top)}, second quarter {display(lr_low)}")
        dr_top, dr_low = dr_constant(top, counts, X.d), dr_constant(low, counts, X.d)
        ok = dr_low / 2 <= dr_top <= 2 * dr_low
        verdicts["dense_repetitivity"] = Verdict(
            PASS if ok else FAIL, ev,
            f"max M/N^(1/d): top half {display(dr_top)}, second quarter {display(dr_low)} (factor 2 band)")
    else:
        note = "window too small: no valid repetitivity rows in one of the grid ranges"
        verdicts["linear_repetitivity"] = Verdict(INCONCLUSIVE, ev, note)
        verdicts["dense_repetitivity"] = Verdict(INCONCLUSIVE, ev, note)

    lim = liminf_report(comp)
    if lim.min_lower is None:
        lim_status = INCONCLUSIVE
    else:
        lim_status = PASS if (lim.positive and lim.stable) else FAIL
    verdicts["complexity_liminf"] = Verdict(
        lim_status, [lim.to_json()],
        "min count/T^d over the top half, stable within 25% against the second quarter")

    config = {"T_grid": [str(T) for T in grid], "probes": probes, "max_period": str(mp),
              "grid_step": None if grid_step is None else str(Fraction(grid_step)),
              "window_radius": str(X.window_radius), "points": len(X)}
    return CertificateReport(delone, repulsion, density, chain.complexity_constant, chain.complexity_threshold,
                             lin_rep, dense_rep, period, lim, verdicts, comp, rep, config)
