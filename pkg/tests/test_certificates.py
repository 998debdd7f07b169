import json

import pytest

from aperiodic_lab.certificates import (FAIL, PASS, WindowTooSmall, certify, complexity_chain_check, density_bound,
                                        detect_period, dr_constant, halton_probes, liminf_report, lr_constant,
                                        packing_covering, repulsion_constant, repulsion_ratio,
                                        repulsion_window_check)
from aperiodic_lab.exact import QNum
from aperiodic_lab.generators import gen_fibonacci_cut_project, gen_periodic_superlattice
from aperiodic_lab.patches import complexity_profile
from aperiodic_lab.pointset import PointSet
from aperiodic_lab.repetitivity import repetitivity_profile

HALF = QNum(1, 0, 2)


def test_packing_covering_examples(z1, z2, fib500):
    p = packing_covering(z1)
    assert p.packing_sq == QNum(1, 0, 4) and p.covering.exact == HALF
    p2 = packing_covering(z2)
    assert p2.packing_sq == QNum(1, 0, 4) and p2.covering.contains_sq(HALF)
    pf = packing_covering(fib500)
    assert pf.packing == HALF and pf.covering.exact == 1
    with pytest.raises(ValueError):
        packing_covering(PointSet.build(1, [(0,)], 3))


def test_packing_covering_tau_coordinates():
    X = gen_fibonacci_cut_project(0, 50)
    p = packing_covering(X)
    assert p.packing_sq == QNum(1, 0, 4)
    assert p.covering.exact == QNum(0, 1, 2)


def test_detect_period(z1, superlattice, fib500, z2):
    assert detect_period(z1, 3) == (QNum(1),)
    assert detect_period(superlattice, 5) == (QNum(1),)
    assert detect_period(fib500, 100) is None
    assert detect_period(z2, 3) == (QNum(0), QNum(1))
    with pytest.raises(ValueError):
        detect_period(z1, 20)


def test_detect_period_with_tau_cell():
    X = gen_periodic_superlattice([0], 3, 60)
    Y = PointSet.build(1, [(p[0] * QNum(0, 1, 1),) for p in X.points], 60)
    assert detect_period(Y, 12) == (QNum(0, 3, 1),)


def test_repulsion_ratio_lattices(z1, superlattice):
    for T in (2, 5, 12):
        assert repulsion_ratio(z1, T).ratio_sq == QNum(1, 0, T * T)
        assert repulsion_ratio(superlattice, T).ratio_sq == QNum(1, 0, T * T)
    with pytest.raises(ValueError):
        repulsion_ratio(z1, 1)


def test_period_bounds_repulsion(z1, superlattice):
    for X in (z1, superlattice):
        t = detect_period(X, 5)
        for T in range(2, 13):
            r = repulsion_ratio(X, T)
            assert r.distance_sq <= t[0] * t[0]


def test_repulsion_trend(z1, fib1000):
    assert repulsion_constant(z1, range(2, 13)).trend == "decaying"
    s = repulsion_constant(fib1000, range(2, 101))
    assert s.trend == "bounded below" and s.value_sq > 0


def test_repulsion_window(z1, fib500):
    grid = list(range(2, 13))
    maps = {}
    prof = complexity_profile(z1, grid, maps=maps)
    rep = repetitivity_profile(z1, grid, maps=maps)
    lin_rep = lr_constant(rep.rows)
    assert lin_rep == QNum(1, 0, 4)
    v = repulsion_window_check(z1, repulsion_constant(z1, grid, maps), packing_covering(z1), lin_rep)
    assert v.status == FAIL and any("witness" in e for e in v.evidence)
    assert dr_constant(rep.rows, {r.T: r.count for r in prof.rows}, 1) == HALF

    grid = list(range(2, 64))
    maps = {}
    complexity_profile(fib500, grid, maps=maps)
    rep = repetitivity_profile(fib500, grid, maps=maps)
    rs = repulsion_constant(fib500, grid, maps)
    v = repulsion_window_check(fib500, rs, packing_covering(fib500), lr_constant(rep.rows))
    assert v.status == PASS
    # the repulsion estimate stays above the packing radius at the smallest radius
    assert rs.value_sq * 4 >= packing_covering(fib500).packing_sq


def test_constants_need_valid_rows(fib200):
    rep = repetitivity_profile(fib200, [150], allow_shallow=True)
    with pytest.raises(WindowTooSmall, match="window too small"):
        lr_constant(rep.rows)


def test_halton_probes_are_deterministic_and_inside():
    a = halton_probes(2, QNum(10), 200)
    assert a == halton_probes(2, QNum(10), 200)
    assert all(x * x + y * y <= 100 for x, y in a)
    assert all((64 * x).denominator == 1 for p in a for x in p)


def test_density_examples(z1, fib1000, z2):
    d = density_bound(z1, list(range(2, 13)))
    assert d.value == 2
    f = density_bound(fib1000, list(range(20, 126, 5)))
    lo, hi = QNum(11, 0, 10), QNum(13, 0, 10)
    assert lo < f.value < hi
    sq = density_bound(z2, [16])
    assert QNum(3) < sq.value < QNum(16, 0, 5)
    with pytest.raises(ValueError):
        density_bound(z1, [2], probes=50)


def test_chain_check_fibonacci(fib1000):
    grid = list(range(2, 126))
    maps = {}
    prof = complexity_profile(fib1000, grid, maps=maps)
    chain = complexity_chain_check(fib1000, prof, maps, repulsion_constant(fib1000, grid, maps),
                                   density_bound(fib1000, grid))
    assert chain.verdict.status == PASS
    for row, ev in zip(prof.rows, chain.verdict.evidence):
        assert ev["pairwise_different"] and ev["counting"]
        if row.T >= chain.complexity_threshold:
            assert ev["volume"] and QNum(row.count) >= chain.complexity_constant * row.T


def test_chain_check_lattice_is_not_a_pass(z1):
    grid = list(range(2, 13))
    maps = {}
    prof = complexity_profile(z1, grid, maps=maps)
    chain = complexity_chain_check(z1, prof, maps, repulsion_constant(z1, grid, maps), density_bound(z1, grid))
    assert chain.verdict.status != PASS


def test_liminf(fib1000, z1):
    lim = liminf_report(complexity_profile(fib1000, list(range(2, 126))))
    assert lim.positive and lim.stable
    lim_z = liminf_report(complexity_profile(z1, list(range(2, 13))))
    assert not lim_z.stable


def test_dr_bounded_by_lr_times_t_over_root(fib500):
    grid = list(range(2, 64))
    maps = {}
    prof = complexity_profile(fib500, grid, maps=maps)
    rep = repetitivity_profile(fib500, grid, maps=maps)
    counts = {r.T: r.count for r in prof.rows}
    bound = lr_constant(rep.rows) * max(r.T / counts[r.T] for r in rep.rows if r.valid)
    assert dr_constant(rep.rows, counts, 1) <= bound


def test_certify_report_is_deterministic(fib500):
    a = certify(fib500, range(2, 64))
    b = certify(fib500, range(2, 64))
    assert a.dumps() == b.dumps()
    assert a.passed
    doc = json.loads(a.dumps())
    assert set(doc["verdicts"]) == {"non_periodicity", "repulsion_trend", "repulsion_window", "complexity_chain",
                                    "linear_repetitivity", "dense_repetitivity", "complexity_liminf"}
    assert "Dense repetitivity" in a.render_text()
    assert doc["complexity_constant"] is not None
    lam = QNum.parse(doc["complexity_constant"])
    t0 = QNum.parse(doc["complexity_threshold"])
    used = [r for r in a.complexity.rows if r.T >= t0]
    assert used and all(lam <= r.normalized for r in used)


def test_certify_superlattice_fails(superlattice):
    rep = certify(superlattice, range(2, 13))
    assert not rep.passed
    assert rep.verdicts["non_periodicity"].status == FAIL
    assert rep.period == (QNum(1),)
