import random

import pytest
from hypothesis import given, strategies as st

from bowlab.brane_core import (D5, NS5, BraneDiagram, DiagramError, charges, dimension, dualize,
                               format_diagram, hw_move, hw_transport_kclass, legal_moves, line,
                               normalize, parse, reverse, separated_from_charges, strip_zero_charge, xi)
from bowlab.fixed_points import count_bcts, gale_ryser_feasible

BIG = "/1/2\\2/2/3\\3\\3/2\\2/1\\1/"
BIG_DUAL = "\\1\\2/2\\2\\3/3/3\\2/2\\1/1\\"
EXAMPLE = "/2\\2/2\\4/3/3/4\\3/2\\2\\"


def test_parse_examples():
    D = parse("/1/2\\1\\")
    assert D.branes == (NS5, NS5, D5, D5) and D.d3 == (0, 1, 2, 1, 0)
    D = parse("\\2/1/")
    assert D.branes == (D5, NS5, NS5) and D.d3 == (0, 2, 1, 0)
    D = parse("/1/3/3\\1\\")
    assert D.branes == (NS5,) * 3 + (D5,) * 2 and D.d3 == (0, 1, 3, 3, 1, 0)


def test_parse_aliases_and_errors():
    assert parse("s1s2b1b") == parse("/1/2\\1\\")
    with pytest.raises(DiagramError):
        parse("/1/x\\")
    with pytest.raises(DiagramError):
        parse("/-1/")
    with pytest.raises(DiagramError):
        parse("/1 2/")
    with pytest.raises(DiagramError):
        BraneDiagram((NS5,), (1, 0))


def test_charges_examples():
    ch = charges(parse(EXAMPLE))
    assert ch.r == (2, 1, 1, 2, 3, 2) and ch.c == (5, 2, 2, 0, 2)
    ch = charges(parse("/1/2\\1\\"))
    assert ch.r == (1, 1) and ch.c == (1, 1)
    D = parse("/2/1/")
    assert charges(D).c == () and charges(D).r == (2, -1, -1)


def test_hw_move_arithmetic():
    assert format_diagram(hw_move(parse("/1/3\\1\\"), 1)) == "/1\\0/1\\"


def test_normalization_chain():
    start = parse("/1/3/3\\1\\")
    target = parse("/1\\1/2\\2/")
    assert normalize(target) == start
    assert normalize(start) == start
    assert charges(start) == charges(target)


def test_dualize_examples():
    assert format_diagram(dualize(parse(BIG))) == BIG_DUAL
    assert dualize(parse("/")).branes == (D5,)


def test_dual_charges_swap_roles():
    rng = random.Random(5)
    for _ in range(100):
        D = random_diagram(rng)
        ch, chd = charges(D), charges(dualize(D))
        m, n = len(ch.r), len(ch.c)
        # positional: NS5 charges of the dual are m - c
        assert chd.r == tuple(m - x for x in ch.c) and chd.c == tuple(n - x for x in ch.r)
        # read upside down the roles swap exactly
        chm = charges(reverse(dualize(D)))
        assert chm.r == ch.c[::-1] and chm.c == ch.r[::-1]


def test_dimension_examples():
    assert dimension(parse("/1/2\\1\\")) == 2
    assert dimension(parse(BIG)) == 16
    assert dimension(parse(BIG_DUAL)) == 22


def test_strip_zero_charge():
    D = parse(EXAMPLE)
    S = strip_zero_charge(D)
    assert all(x > 0 for x in charges(S).r + charges(S).c)
    ch, chs = charges(D), charges(S)
    assert count_bcts(ch.r, ch.c) == count_bcts(chs.r, chs.c)
    P = parse("/1/2\\1\\")
    assert strip_zero_charge(P) == P


def test_kclass_transport():
    D = parse("/1/3\\1\\")
    moved = hw_transport_kclass(xi(2), D, 1)
    expected = xi(1) + xi(3) + line(1)
    expected.subtract(xi(2))
    assert +moved == +expected or moved == expected
    assert hw_transport_kclass(xi(1), D, 1) == xi(1)
    back = hw_transport_kclass(moved, hw_move(D, 1), 1)
    assert {k: v for k, v in back.items() if v} == {k: v for k, v in xi(2).items() if v}


def random_diagram(rng: random.Random, max_branes: int = 6, max_charge: int = 3) -> BraneDiagram:
    while True:
        m = rng.randint(1, max_branes - 1)
        n = rng.randint(1, max_branes - m)
        r = [rng.randint(0, max_charge) for _ in range(m)]
        c = [rng.randint(0, max_charge) for _ in range(n)]
        if not gale_ryser_feasible(r, c):
            continue
        D = separated_from_charges(r, c)
        for _ in range(rng.randint(0, 10)):
            sites = legal_moves(D)
            if not sites:
                break
            D = hw_move(D, rng.choice(sites))
        return D


diagrams = st.integers(0, 2**32).map(lambda s: random_diagram(random.Random(s)))


@given(diagrams, st.integers(0, 2**16))
def test_moves_preserve_charges_and_dimension(D, pick):
    sites = legal_moves(D)
    if not sites:
        return
    E = hw_move(D, sites[pick % len(sites)])
    assert charges(E) == charges(D)
    assert dimension(E) == dimension(D)
    assert dimension(D) % 2 == 0


@given(diagrams)
def test_round_trip_and_idempotence(D):
    assert parse(format_diagram(D)) == D
    S = normalize(D)
    assert normalize(S) == S and S.is_separated()
    assert charges(S) == charges(D) and dimension(S) == dimension(D)
    C = normalize(D, "co-separated")
    assert C.is_coseparated() and charges(C) == charges(D)


@given(diagrams)
def test_dualize_involution(D):
    assert dualize(dualize(D)) == D
    assert reverse(reverse(D)) == D


@given(diagrams)
def test_strip_zero_commutes_with_dual_on_charges(D):
    mirror = lambda E: reverse(dualize(E))
    a = charges(strip_zero_charge(mirror(D)))
    b = charges(mirror(strip_zero_charge(D)))
    assert sorted(a.r) == sorted(b.r) and sorted(a.c) == sorted(b.c)


def test_thousand_random_moves():
    rng = random.Random(11)
    for _ in range(1000):
        D = random_diagram(rng)
        sites = legal_moves(D)
        if sites:
            E = hw_move(D, rng.choice(sites))
            assert charges(E) == charges(D) and dimension(E) == dimension(D)
