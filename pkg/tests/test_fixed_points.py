import random
from itertools import product
from math import comb

import pytest
from hypothesis import given, strategies as st

from bowlab.brane_core import dualize, parse
from bowlab.fixed_points import (BCT, count_bcts, crossings, d5_resolutions, d5_sharp,
                                 enumerate_bcts, epsilon_sign, fixed_points, from_ties,
                                 gale_ryser_feasible, gamma_index, margins, mirror_point,
                                 ns5_resolutions, ns5_sharp, split_subtorus,
                                 tie_crossings_geometric)

BIG = "/1/2\\2/2/3\\3\\3/2\\2/1\\1/"
# rows Z1..Z6 top-down
EXAMPLE_BCT = BCT([[1, 1, 0, 0, 0], [1, 0, 0, 0, 0], [0, 0, 1, 0, 0],
                   [1, 0, 1, 0, 0], [1, 1, 0, 0, 1], [1, 0, 0, 0, 1]])


def brute_force(r, c):
    """Every 0/1 matrix with the given margins, by exhaustive search."""
    out = []
    for bits in product((0, 1), repeat=len(r) * len(c)):
        M = [bits[i * len(c):(i + 1) * len(c)] for i in range(len(r))]
        if [sum(row) for row in M] == list(r) and \
                [sum(M[i][j] for i in range(len(r))) for j in range(len(c))] == list(c):
            out.append(BCT(M, ncols=len(c)))
    return sorted(out)


def test_gale_ryser_examples():
    assert gale_ryser_feasible((1, 1), (1, 1))
    assert not gale_ryser_feasible((2,), (1,))
    assert gale_ryser_feasible((2, 1, 1, 2, 3, 2), (5, 2, 2, 0, 2))
    assert EXAMPLE_BCT in enumerate_bcts((2, 1, 1, 2, 3, 2), (5, 2, 2, 0, 2))


def test_small_enumeration():
    pts = enumerate_bcts((1, 1), (1, 1))
    assert sorted(pts) == sorted([BCT([[1, 0], [0, 1]]), BCT([[0, 1], [1, 0]])])


def test_1055_fixed_points():
    D = parse(BIG)
    r, c = margins(D)
    assert count_bcts(r, c) == 1055
    assert len(enumerate_bcts(r, c)) == 1055
    rd, cd = margins(dualize(D))
    assert count_bcts(rd, cd) == 1055
    assert len(fixed_points(D)) == 1055


def test_epsilon_examples():
    I, J = BCT([[1, 0], [0, 1]]), BCT([[0, 1], [1, 0]])
    assert crossings(I) == 1 and epsilon_sign(I) == -1
    assert crossings(J) == 0 and epsilon_sign(J) == 1


def test_mirror_point_examples():
    f = EXAMPLE_BCT
    assert mirror_point(f) == BCT([list(col) for col in zip(*f)])
    assert mirror_point(mirror_point(f)) == f
    assert mirror_point(f).row_sums == f.col_sums


def test_split_subtorus():
    f = EXAMPLE_BCT
    first, second = split_subtorus(f, [0, 2, 3])
    assert first.col_sums == (5, 2, 0) and second.col_sums == (2, 2)
    assert tuple(a + b for a, b in zip(first.row_sums, second.row_sums)) == f.row_sums
    whole, empty = split_subtorus(f, range(f.n))
    assert whole == f and empty.n == 0


def test_d5_resolution_two_ties():
    f = BCT([[1], [0], [0], [0], [1]])
    res = d5_resolutions(f, 0, 1, 1)
    assert len(res) == 2
    sharp = d5_sharp(f, 0, 1, 1)
    # no crossing: the tie of the lower row (row 5) moves to the left column
    assert crossings(sharp) == 0
    assert sharp.column(0) == (0, 0, 0, 0, 1)
    other = [g for g in res if g != sharp][0]
    assert crossings(other) == 1
    assert d5_sharp(f, 0, 1, 1, "co-separated") == other


def test_trivial_split():
    f = EXAMPLE_BCT
    res = d5_resolutions(f, 0, 5, 0)
    assert len(res) == 1 and res[0].column(0) == f.column(0) and sum(res[0].column(1)) == 0
    res = ns5_resolutions(f, 4, 3, 0)
    assert len(res) == 1
    assert gamma_index(res[0], 4) == gamma_index(f, 4)


@pytest.mark.parametrize("w", range(1, 7))
def test_resolution_counts(w):
    col = BCT([[1]] * w, ncols=1)
    row = BCT([[1] * w], ncols=w)
    for w1 in range(w + 1):
        assert len(d5_resolutions(col, 0, w1, w - w1)) == comb(w, w1)
        assert len(ns5_resolutions(row, 0, w1, w - w1)) == comb(w, w1)


def test_sharp_mirror_duality():
    rng = random.Random(3)
    for _ in range(200):
        f = random_bct(rng, 4, 4)
        for i, row in enumerate(f):
            w = sum(row)
            for w1 in range(w + 1):
                s = ns5_sharp(f, i, w1, w - w1)
                assert mirror_point(s) == d5_sharp(mirror_point(f), i, w1, w - w1, "co-separated")
                s = ns5_sharp(f, i, w1, w - w1, "co-separated")
                assert mirror_point(s) == d5_sharp(mirror_point(f), i, w1, w - w1)


def test_ties_round_trip():
    f = EXAMPLE_BCT
    assert from_ties(f.m, f.n, f.ties()) == f
    assert BCT.from_json(f.to_json()) == f


def random_bct(rng, max_m, max_n):
    m, n = rng.randint(1, max_m), rng.randint(1, max_n)
    return BCT([[rng.randint(0, 1) for _ in range(n)] for _ in range(m)], ncols=n)


margin_pairs = st.tuples(st.lists(st.integers(0, 4), min_size=1, max_size=4),
                         st.lists(st.integers(0, 4), min_size=1, max_size=4))


@given(margin_pairs)
def test_enumeration_matches_brute_force(rc):
    r, c = rc
    pts = enumerate_bcts(r, c)
    assert sorted(pts) == brute_force(r, c)
    assert count_bcts(r, c) == len(pts)
    assert gale_ryser_feasible(r, c) == bool(pts)
    assert count_bcts(c, r) == count_bcts(r, c)


@given(st.integers(0, 2**32))
def test_crossings_geometric(seed):
    f = random_bct(random.Random(seed), 4, 4)
    assert crossings(f) == tie_crossings_geometric(f)
    assert crossings(mirror_point(f)) == crossings(f)


@given(st.integers(0, 2**32), st.integers(0, 5))
def test_resolutions_commute_with_mirror(seed, pick):
    f = random_bct(random.Random(seed), 4, 4)
    i = pick % f.m
    w = sum(f[i])
    for w1 in range(w + 1):
        rows = ns5_resolutions(f, i, w1, w - w1)
        cols = d5_resolutions(mirror_point(f), i, w1, w - w1)
        assert sorted(mirror_point(g) for g in rows) == sorted(cols)
        for g in rows:
            assert g.col_sums == f.col_sums
