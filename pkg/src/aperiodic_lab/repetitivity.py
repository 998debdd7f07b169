"""Windowed repetitivity function: covering radii of occurrence sets.

For one patch type the smallest admissible ball radius is the covering radius
of its occurrence set.  The estimate measures it over balls centred in
``B(0, rho)`` with ``rho = (W - T) / 2`` and is trusted only when it does not
exceed ``(W - T) / 2``, so no unseen occurrence outside the eligible region
could have served a query ball.
"""
from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import ndimage

from .exact import (QNum, as_qnum, display, display_sqrt, int_array_check, q_ceil, q_floor, qsign,
                    sq_dist, sqrt_bounds)
from .patches import OccurrenceMap, Profile, count_patches
from .pointset import PointSet

__all__ = [
    "Bracket",
    "CoveringQuery",
    "RepetitivityRow",
    "covering_radius_1d",
    "covering_radius_2d",
    "repetitivity_at",
    "repetitivity_profile",
    "repetitivity_csv",
    "default_grid_step",
]

WINDOW_TOO_SMALL = "window too small"


@dataclass(frozen=True)
class Bracket:
    """Interval ``[lo, hi]`` with ``lo = sqrt(lo_sq)`` and ``hi = sqrt(hi_base_sq) + sqrt(slack_sq)``.

    Endpoints are kept in this exact form; ``lo_lower`` / ``hi_upper`` give
    rational bounds for arithmetic on constants.  In d=1 the covering radius
    is exact and stored in ``exact`` with a degenerate bracket.
    """

    lo_sq: QNum
    hi_base_sq: QNum
    slack_sq: QNum
    exact: QNum | None = None

    @classmethod
    def point(cls, value: QNum) -> Bracket:
        return cls(value * value, value * value, QNum(0), value)

    @property
    def tight(self) -> bool:
        """True when the width is exactly the grid slack ``sqrt(slack_sq)``."""
        return self.hi_base_sq == self.lo_sq

    def hi_upper(self, bits: int = 64) -> QNum:
        if self.exact is not None:
            return self.exact
        _, a = sqrt_bounds(self.hi_base_sq, bits)
        _, s = sqrt_bounds(self.slack_sq, bits)
        return QNum.from_fraction(a + s)

    def lo_lower(self, bits: int = 64) -> QNum:
        if self.exact is not None:
            return self.exact
        lo, _ = sqrt_bounds(self.lo_sq, bits)
        return QNum.from_fraction(lo)

    def ge_lo(self, v_sq: QNum) -> bool:
        """``sqrt(v_sq) >= lo``."""
        return v_sq >= self.lo_sq

    def le_hi(self, v_sq: QNum) -> bool:
        """``sqrt(v_sq) <= hi``, decided exactly."""
        s, hb = self.slack_sq, self.hi_base_sq
        if v_sq <= s:
            return True
        # sqrt(v) - sqrt(s) <= sqrt(hb)  <=>  v + s - hb <= 2 sqrt(v s)
        lhs = v_sq + s - hb
        if qsign(lhs) <= 0:
            return True
        return lhs * lhs <= 4 * v_sq * s

    def contains_sq(self, v_sq: QNum) -> bool:
        return self.ge_lo(v_sq) and self.le_hi(v_sq)

    def hi_le(self, c: QNum) -> bool:
        """``hi <= c`` for ``c >= 0``, decided exactly."""
        if self.exact is not None:
            return self.exact <= c
        s, hb = self.slack_sq, self.hi_base_sq
        if qsign(c) < 0 or c * c < s:
            return False
        # sqrt(hb) <= c - sqrt(s)  <=>  2 c sqrt(s) <= c^2 + s - hb
        rhs = c * c + s - hb
        if qsign(rhs) < 0:
            return False
        return 4 * c * c * s <= rhs * rhs

    def display(self) -> tuple[str, str]:
        if self.exact is not None:
            v = display(self.exact)
            return v, v
        return display_sqrt(self.lo_sq), display(self.hi_upper())

    def to_json(self) -> dict:
        out = {"lo_sq": str(self.lo_sq), "hi_base_sq": str(self.hi_base_sq), "slack_sq": str(self.slack_sq)}
        if self.exact is not None:
            out["exact"] = str(self.exact)
        out["hi_upper"] = str(self.hi_upper())
        return out


@dataclass(frozen=True)
class CoveringQuery:
    centers: Sequence
    eval_radius: QNum
    grid_step: Fraction = Fraction(1, 8)

    def __post_init__(self):
        if not self.centers:
            raise ValueError("empty center set")
        if qsign(as_qnum(self.eval_radius)) <= 0:
            raise ValueError("evaluation radius must be positive")
        if Fraction(self.grid_step) <= 0:
            raise ValueError("grid step must be positive")


def covering_radius_1d(q: CoveringQuery) -> QNum:
    """Exact covering radius of the centers over ``[-rho, rho]``.

    The distance to the nearest center is maximal either at an endpoint of
    the interval or at the midpoint of two consecutive centers.
    """
    rho = as_qnum(q.eval_radius)
    vals = sorted((as_qnum(c[0]) if isinstance(c, tuple) else as_qnum(c)) for c in q.centers)
    best = QNum(0)
    for s, t in zip(vals, vals[1:]):
        mid2 = s + t
        if -2 * rho <= mid2 <= 2 * rho:
            best = max(best, (t - s) / 2)
    for e in (-rho, rho):
        k = bisect.bisect_left(vals, e)
        dist = min((abs(vals[j] - e) for j in (k - 1, k) if 0 <= j < len(vals)))
        best = max(best, dist)
    return best


def _cover_1d_ints(s: np.ndarray, rho: QNum, den: int) -> QNum:
    # s: sorted int64 centers in units of 1/den
    e = rho * den
    best = QNum(0)
    if len(s) > 1:
        sums = s[:-1] + s[1:]
        gaps = np.diff(s)
        int_array_check(sums, gaps)
        mask = (sums >= q_ceil(-2 * e)) & (sums <= q_floor(2 * e))
        if mask.any():
            best = QNum(int(gaps[mask].max()), 0, 2 * den)
    for end in (-e, e):
        k = int(np.searchsorted(s, q_floor(end), side="right"))
        cands = [abs(QNum(int(s[j])) - end) for j in (k - 1, k) if 0 <= j < len(s)]
        best = max(best, min(cands) / den)
    return best


def _grid_unit(h: Fraction, den: int) -> Fraction:
    a, b = Fraction(h), Fraction(1, den)
    return Fraction(math.gcd(a.numerator * b.denominator, b.numerator * a.denominator),
                    a.denominator * b.denominator)


def _cover_2d_ints(Z: np.ndarray, den: int, rho: QNum, h: Fraction) -> Bracket:
    g = _grid_unit(h, den)
    to_g = Fraction(1, den) / g          # center units -> grid units
    stride = int(Fraction(h) / g)
    Zg = Z.astype(np.int64) * int(to_g)
    rho_g = rho / QNum.from_fraction(g)
    h_g = stride
    reach = max(int(np.abs(Zg).max()), q_ceil(rho_g) + h_g)
    # node index 0 sits at coordinate -B; B is a multiple of the stride so nodes hit the origin
    B = -(-reach // stride) * stride
    n = 2 * B + 1
    field_ = np.ones((n, n), dtype=np.uint8)
    field_[Zg[:, 0] + B, Zg[:, 1] + B] = 0
    idx = ndimage.distance_transform_edt(field_, return_distances=False, return_indices=True)
    node = np.arange(0, n, stride)
    fx = idx[0][np.ix_(node, node)].astype(np.int64)
    fy = idx[1][np.ix_(node, node)].astype(np.int64)
    gx = (node - B)[:, None]
    gy = (node - B)[None, :]
    # exact squared distance to the returned center, recomputed in integers
    dsq = (gx - (fx - B)) ** 2 + (gy - (fy - B)) ** 2
    nsq = gx * gx + gy * gy
    int_array_check(dsq, nsq)
    g2 = QNum.from_fraction(g * g)
    in_lo = nsq <= q_floor(rho_g * rho_g)
    in_hi = nsq <= q_floor((rho_g + h_g) * (rho_g + h_g))
    lo = int(dsq[in_lo].max()) if in_lo.any() else 0
    hb = int(dsq[in_hi].max())
    return Bracket(QNum(lo) * g2, QNum(hb) * g2, QNum.from_fraction(Fraction(h) ** 2 / 2))


def _min_sq_dist(nodes: np.ndarray, Zs: np.ndarray) -> np.ndarray:
    """Exact squared distance from each node to its nearest center (int64)."""
    out = np.empty(len(nodes), dtype=np.int64)
    step = max(1, 2_000_000 // max(1, len(Zs)))
    for a in range(0, len(nodes), step):
        nd = nodes[a:a + step]
        dx = nd[:, None, 0] - Zs[None, :, 0]
        dy = nd[:, None, 1] - Zs[None, :, 1]
        out[a:a + step] = (dx * dx + dy * dy).min(axis=1)
    int_array_check(out)
    return out


def _sum_roots_le(a: np.ndarray, s: int, b: int) -> np.ndarray:
    # sqrt(a) + sqrt(s) <= sqrt(b), elementwise, exact in integers
    r = b - a - s
    return (r >= 0) & (4 * a * s <= r * r)


def _max_cover_2d(groups: list, den: int, rho: QNum, h: Fraction) -> Bracket:
    """Maximum over groups of the grid covering bracket, by branch and bound.

    Coarse nodes (a sub-grid of the fine nodes) give each coarse cell an upper
    bound ``d(c) + H/sqrt(2)``; fine nodes are only evaluated in cells whose
    bound exceeds the running maximum.  Groups are visited rarest first.
    Every distance is an exact integer; the result equals the maximum of
    ``covering_radius_2d`` over the groups.
    """
    g = _grid_unit(h, den)
    to_g = int(Fraction(1, den) / g)
    s = int(Fraction(h) / g)
    rho_g = rho / QNum.from_fraction(g)
    L_lo = q_floor(rho_g * rho_g)
    L_hi = q_floor((rho_g + s) * (rho_g + s))
    r_hi = math.isqrt(L_hi)
    m = 2
    while (2 * r_hi // (m * s)) > 40:
        m *= 2
    H = m * s
    cr = -(-(r_hi + H) // H)
    ax = np.arange(-cr, cr + 1, dtype=np.int64) * H
    cx, cy = np.meshgrid(ax, ax, indexing="ij")
    coarse = np.stack([cx.ravel(), cy.ravel()], axis=1)
    cn = (coarse * coarse).sum(axis=1)
    int_array_check(cn)
    coarse = coarse[cn <= (r_hi + H) * (r_hi + H)]
    cn = (coarse * coarse).sum(axis=1)
    half = m // 2
    loc = np.arange(-half, half + 1, dtype=np.int64) * s
    lx, ly = np.meshgrid(loc, loc, indexing="ij")
    cell_offsets = np.stack([lx.ravel(), ly.ravel()], axis=1)
    S = H * H  # (H/sqrt2)^2 scaled by 2
    best_lo = best_hb = 0
    for grp in sorted(groups, key=len):
        Zs = grp.astype(np.int64) * to_g
        dc = _min_sq_dist(coarse, Zs)
        in_lo = cn <= L_lo
        in_hi = cn <= L_hi
        if in_lo.any():
            best_lo = max(best_lo, int(dc[in_lo].max()))
        if in_hi.any():
            best_hb = max(best_hb, int(dc[in_hi].max()))
        open_ = ~_sum_roots_le(2 * dc, S, 2 * best_lo)
        if not open_.any():
            continue
        nodes = (coarse[open_][:, None, :] + cell_offsets[None, :, :]).reshape(-1, 2)
        nn = (nodes * nodes).sum(axis=1)
        int_array_check(nn)
        nodes, nn = nodes[nn <= L_hi], nn[nn <= L_hi]
        if not len(nodes):
            continue
        if len(nodes) * len(Zs) > 8_000_000:
            b = _cover_2d_ints(grp, den, rho, h)
            best_lo = max(best_lo, q_floor(b.lo_sq / QNum.from_fraction(g * g)))
            best_hb = max(best_hb, q_floor(b.hi_base_sq / QNum.from_fraction(g * g)))
            continue
        df = _min_sq_dist(nodes, Zs)
        sel = nn <= L_lo
        if sel.any():
            best_lo = max(best_lo, int(df[sel].max()))
        best_hb = max(best_hb, int(df.max()))
    g2 = QNum.from_fraction(g * g)
    return Bracket(QNum(best_lo) * g2, QNum(best_hb) * g2, QNum.from_fraction(Fraction(h) ** 2 / 2))


def _cover_2d_generic(centers: Sequence, rho: QNum, h: Fraction) -> Bracket:
    hq = QNum.from_fraction(Fraction(h))
    k = q_ceil((rho + hq) / hq)
    lo = hb = QNum(0)
    r2 = rho * rho
    r2h = (rho + hq) * (rho + hq)
    for i in range(-k, k + 1):
        for j in range(-k, k + 1):
            node = (i * hq, j * hq)
            nsq = node[0] * node[0] + node[1] * node[1]
            if nsq > r2h:
                continue
            dmin = min(sq_dist(node, c) for c in centers)
            hb = max(hb, dmin)
            if nsq <= r2:
                lo = max(lo, dmin)
    return Bracket(lo, hb, QNum.from_fraction(Fraction(h) ** 2 / 2))


def covering_radius_2d(q: CoveringQuery) -> Bracket:
    """Grid bracket for the covering radius over ``B(0, rho)`` in the plane.

    ``lo`` is the largest nearest-center distance over grid nodes inside
    ``B(0, rho)``; ``hi`` adds ``h*sqrt(2)/2`` to the same maximum over nodes
    inside ``B(0, rho + h)``, which holds the nearest node of every point of
    the ball.
    """
    rho = as_qnum(q.eval_radius)
    h = Fraction(q.grid_step)
    if QNum.from_fraction(h) * 8 > rho:
        raise ValueError("grid step must satisfy h <= rho/8")
    centers = [tuple(as_qnum(c) for c in p) for p in q.centers]
    if all(c.b == 0 for p in centers for c in p):
        den = 1
        for p in centers:
            for c in p:
                den = den * c.den // math.gcd(den, c.den)
        Z = np.array([[c.a * (den // c.den) for c in p] for p in centers], dtype=np.int64)
        return _cover_2d_ints(Z, den, rho, h)
    return _cover_2d_generic(centers, rho, h)


@dataclass(frozen=True)
class RepetitivityRow:
    T: QNum
    bracket: Bracket
    valid: bool
    status: str
    types: int
    eval_radius: QNum


def default_grid_step(rho: QNum) -> Fraction:
    """Largest power-of-two step (at most 1) allowed by ``h <= rho/8``."""
    h = Fraction(1)
    while QNum.from_fraction(h) * 8 > rho:
        h /= 2
    return h


def repetitivity_at(X: PointSet, T, occ: OccurrenceMap | None = None, grid_step=None) -> RepetitivityRow:
    """Windowed estimate of the repetitivity function at radius T."""
    T = as_qnum(T)
    if occ is None:
        _, occ = count_patches(X, T)
    rem = X.window_radius - T
    rho = rem / 2
    F = X.frame
    if X.d == 1:
        best = QNum(0)
        for g in occ.entries.values():
            if F.ints is not None:
                r = _cover_1d_ints(F.ints[g, 0], rho, F.den)
            else:
                r = covering_radius_1d(CoveringQuery([X.points[i] for i in g], rho))
            best = max(best, r)
        br = Bracket.point(best)
    else:
        h = Fraction(grid_step) if grid_step is not None else default_grid_step(rho)
        if QNum.from_fraction(h) * 8 > rho:
            raise ValueError("grid step must satisfy h <= rho/8")
        if F.ints is not None:
            br = _max_cover_2d([F.ints[g] for g in occ.entries.values()], F.den, rho, h)
        else:
            br = None
            for g in occ.entries.values():
                b = covering_radius_2d(CoveringQuery([X.points[i] for i in g], rho, h))
                if br is None:
                    br = b
                else:
                    br = Bracket(max(br.lo_sq, b.lo_sq), max(br.hi_base_sq, b.hi_base_sq), b.slack_sq)
    valid = br.hi_le(rem - rho)
    return RepetitivityRow(T, br, valid, "valid" if valid else WINDOW_TOO_SMALL, len(occ), rho)


def repetitivity_profile(X: PointSet, T_grid: Sequence, *, maps: dict | None = None, grid_step=None,
                         allow_shallow: bool = False) -> Profile:
    from .patches import _check_grid

    grid = _check_grid(X, T_grid, allow_shallow)
    rows = []
    for T in grid:
        occ = maps.get(T) if maps else None
        rows.append(repetitivity_at(X, T, occ, grid_step))
    prof = Profile("repetitivity", X.d, rows)
    prof.notes.append("balls are centred in B(0, (W-T)/2); rows with M_hi > (W-T)/2 are flagged and excluded from constants")
    return prof


def _nroot_lower(n: int, d: int, bits: int = 64) -> QNum:
    if d == 1:
        return QNum(n)
    lo, _ = sqrt_bounds(QNum(n), bits)
    return QNum.from_fraction(lo)


def repetitivity_csv(profile: Profile, counts: dict) -> str:
    """CSV ``T,M_lo,M_hi,valid,M_over_T,M_over_Nroot``; display values only."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["T", "M_lo", "M_hi", "valid", "M_over_T", "M_over_Nroot"])
    for r in profile.rows:
        lo, hi = r.bracket.display()
        hi_q = r.bracket.hi_upper()
        n = counts.get(r.T, r.types)
        w.writerow([display(r.T), lo, hi, "true" if r.valid else "false",
                    display(hi_q / r.T), display(hi_q / _nroot_lower(n, profile.d))])
    return buf.getvalue()


def repetitivity_json(profile: Profile) -> dict:
    return {
        "kind": "repetitivity",
        "dimension": profile.d,
        "notes": profile.notes,
        "rows": [{"T": str(r.T), "bracket": r.bracket.to_json(), "valid": r.valid, "status": r.status,
                  "types": r.types, "eval_radius": str(r.eval_radius)} for r in profile.rows],
    }
