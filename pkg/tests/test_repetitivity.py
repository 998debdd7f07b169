from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aperiodic_lab.exact import QNum
from aperiodic_lab.generators import gen_fibonacci_cut_project
from aperiodic_lab.patches import count_patches
from aperiodic_lab.repetitivity import (Bracket, CoveringQuery, _cover_2d_generic, _cover_2d_ints, _max_cover_2d,
                                       covering_radius_1d, covering_radius_2d, repetitivity_at, repetitivity_csv,
                                       repetitivity_profile)

HALF = QNum(1, 0, 2)


def test_integer_lattice_rows(z1):
    for T in range(2, 25):
        row = repetitivity_at(z1, T)
        assert row.valid and row.bracket.exact == HALF


def test_square_lattice_bracket(z2):
    h = Fraction(1, 4)
    for T in (2, 4, 8):
        row = repetitivity_at(z2, T, grid_step=h)
        b = row.bracket
        assert b.contains_sq(HALF)
        assert b.tight and b.slack_sq == QNum.from_fraction(h * h / 2)


@given(st.sets(st.integers(-30, 30), min_size=1, max_size=25), st.integers(1, 20))
def test_cover_1d_matches_half_step_scan(cs, rho):
    got = covering_radius_1d(CoveringQuery([(QNum(c),) for c in cs], QNum(rho)))
    scan = max(min(abs(Fraction(k, 2) - c) for c in cs) for k in range(-2 * rho, 2 * rho + 1))
    assert got == scan


def test_cover_1d_irrational_centers():
    X = gen_fibonacci_cut_project(0, 40)
    r = covering_radius_1d(CoveringQuery(X.points, QNum(10)))
    tau = QNum(0, 1, 1)
    assert r == tau / 2


pts2 = st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=1, max_size=12, unique=True)


@settings(max_examples=20)
@given(st.lists(pts2, min_size=1, max_size=3))
def test_branch_and_bound_matches_generic(groups):
    rho, h = QNum(4), Fraction(1, 2)
    arrays = [np.array(g, dtype=np.int64) for g in groups]
    fast = _max_cover_2d(arrays, 1, rho, h)
    slow = [_cover_2d_generic([(QNum(x), QNum(y)) for x, y in g], rho, h) for g in groups]
    assert fast.lo_sq == max(b.lo_sq for b in slow)
    assert fast.hi_base_sq == max(b.hi_base_sq for b in slow)
    for a, g in zip(arrays, groups):
        edt = _cover_2d_ints(a, 1, rho, h)
        ref = _cover_2d_generic([(QNum(x), QNum(y)) for x, y in g], rho, h)
        assert (edt.lo_sq, edt.hi_base_sq) == (ref.lo_sq, ref.hi_base_sq)


@given(st.integers(0, 400), st.integers(0, 50), st.integers(1, 16), st.integers(0, 30))
def test_bracket_hi_le_is_exact(hb, s_num, s_den, c):
    b = Bracket(QNum(0), QNum(hb), QNum(s_num, 0, s_den))
    mpmath.mp.dps = 60
    hi = mpmath.sqrt(hb) + mpmath.sqrt(mpmath.mpf(s_num) / s_den)
    assert b.hi_le(QNum(c)) == (hi <= c)


def test_grid_step_constraint():
    with pytest.raises(ValueError, match="rho/8"):
        covering_radius_2d(CoveringQuery([(QNum(0), QNum(0))], QNum(2), Fraction(1, 2)))


def test_fibonacci_profile_valid_rows(fib500):
    prof = repetitivity_profile(fib500, list(range(2, 41, 2)))
    assert all(r.valid for r in prof.rows)
    counts = {r.T: count_patches(fib500, r.T)[0] for r in prof.rows}
    lines = repetitivity_csv(prof, counts).splitlines()
    assert lines[0] == "T,M_lo,M_hi,valid,M_over_T,M_over_Nroot"
    assert len(lines) == len(prof.rows) + 1


def test_shallow_rows_are_flagged(fib200):
    row = repetitivity_at(fib200, 150)
    assert not row.valid and row.status == "window too small"
