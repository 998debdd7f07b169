import pytest

from aperiodic_lab.exact import TAU, QNum
from aperiodic_lab.generators import (CHAIR_LETTERS, GeneratorError, chair_coloring, fibonacci_word,
                                      gen_block_substitution_2d, gen_fibonacci_cut_project, gen_fibonacci_integer,
                                      gen_lattice, gen_periodic_superlattice)


def gaps(X):
    xs = [p[0] for p in X.points]
    return {b - a for a, b in zip(xs, xs[1:])}


def test_lattice_counts():
    assert len(gen_lattice(1, 1, 50)) == 101
    assert len(gen_lattice(2, 1, 2)) == 13
    with pytest.raises(GeneratorError, match="empty window"):
        gen_lattice(1, 2, 1)


def test_fibonacci_word_prefix():
    assert fibonacci_word(10).startswith("abaababaabaab"[:len(fibonacci_word(10))])


def test_fibonacci_integer_gaps_and_origin():
    X = gen_fibonacci_integer(100)
    assert gaps(X) == {QNum(1), QNum(2)}
    assert (QNum(0),) in X.index
    assert len(X) == 124
    with pytest.raises(GeneratorError):
        gen_fibonacci_integer(1)


def test_fibonacci_integer_is_deterministic():
    assert gen_fibonacci_integer(300).to_json() == gen_fibonacci_integer(300).to_json()


@pytest.mark.parametrize("c", [0, "1/3", "-1/2"])
def test_cut_project_two_gaps(c):
    X = gen_fibonacci_cut_project(c, 60)
    assert gaps(X) == {QNum(1), TAU}


def test_cut_project_gap_frequencies():
    X = gen_fibonacci_cut_project(0, 200)
    xs = [p[0] for p in X.points]
    long = sum(1 for a, b in zip(xs, xs[1:]) if b - a == TAU)
    short = len(xs) - 1 - long
    # long gaps outnumber short ones by about tau
    assert QNum(3, 0, 2) < QNum(long, 0, short) < QNum(17, 0, 10)


def test_chair_coloring_uses_all_letters_evenly():
    col = chair_coloring(40)
    counts = {c: sum(1 for v in col.values() if v == c) for c in CHAIR_LETTERS}
    assert set(counts) == set(CHAIR_LETTERS)
    total = sum(counts.values())
    assert all(abs(4 * n - total) < total // 10 for n in counts.values())


def test_block_set_is_integer_and_contains_origin():
    X = gen_block_substitution_2d("A", 32)
    assert X.d == 2 and X.frame.rational
    assert (QNum(0), QNum(0)) in X.index
    with pytest.raises(GeneratorError, match="unknown symbol"):
        gen_block_substitution_2d("Z", 8)


def test_superlattice():
    X = gen_periodic_superlattice([0, "1/3"], 1, 2)
    assert [p[0] for p in X.points] == [QNum(k, 0, 3) for k in (-6, -5, -3, -2, 0, 1, 3, 4, 6)]
    with pytest.raises(GeneratorError, match="motif larger than cell"):
        gen_periodic_superlattice([2], 1, 5)
    Y = gen_periodic_superlattice([(0, 0), (1, 1)], (2, 2), 6)
    assert Y.d == 2
