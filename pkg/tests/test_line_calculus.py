from collections import Counter

import pytest
from hypothesis import given, strategies as st

from bowlab.brane_core import legal_moves, parse
from bowlab.char_calc import HomBlock
from bowlab.line_calculus import (QForm, diagram_roots, equivalent, hw_invariance_check, q_alpha,
                                  q_of_class, qu_form, random_hw_trials, reduce_mod_base,
                                  section_check)
from bowlab.stab_matrices import (COSEPARATED, SEPARATED, envelope_section_check, stab_tp1_elliptic,
                                  stab_tpn, tpn_diagram)
from bowlab.theta_engine import Mono, a, hb, th, z

T = Mono.var("t1_1")
t = Mono.var("t")


def sq(m):
    return QForm.square(m)


def test_q_of_hom_block():
    roots = {("xi", 1): Counter({Mono.var("t1"): 1, Mono.var("t2"): 1}),
             ("C", 0): Counter({a(1): 1})}
    Q = q_of_class([HomBlock(("xi", 1), ("C", 0))], roots)
    assert Q == sq(Mono.var("t1") / a(1) * hb()) + sq(Mono.var("t2") / a(1) * hb())
    assert q_of_class([], roots).is_zero()


@pytest.mark.parametrize("n", [2, 3, 4])
def test_separated_forms(n):
    D = parse(tpn_diagram(n, SEPARATED))
    expected = sum((sq(T / a(i) * hb()) for i in range(1, n + 1)), QForm())
    assert equivalent(q_alpha(D), expected)
    assert equivalent(qu_form(D), QForm.product(T, z(1) / z(2) / hb(), 2))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_coseparated_qu(n):
    D = parse(tpn_diagram(n, COSEPARATED))
    assert equivalent(qu_form(D), QForm.product(T, z(1) / z(2) * hb(n - 1), 2))


def test_single_ns5_has_no_qu():
    assert qu_form(parse("/2\\1\\")).is_zero()


def test_reduce_mod_base_examples():
    assert reduce_mod_base(sq(a(1) / a(2))).is_zero()
    Q = reduce_mod_base(sq(t / a(1) * hb()))
    assert Q == QForm({("t", "t"): 1, ("a1", "t"): -2, ("h", "t"): 2})
    mixed = QForm.product(a(1), z(1), 2)
    assert reduce_mod_base(mixed).is_zero()
    assert not reduce_mod_base(mixed, strict=True).is_zero()


def test_alpha_change_under_move():
    D = parse("/1/2\\1\\")
    for site in legal_moves(D):
        rep = hw_invariance_check(D, site)
        assert rep.ok and rep.delta.is_zero()
        assert not rep.delta_alpha.is_zero()
        assert (rep.delta_alpha + rep.delta_qu).is_zero()
    ident = hw_invariance_check(D, None)
    assert ident.ok and ident.delta.is_zero()


def test_five_hundred_random_moves():
    reports = random_hw_trials(500, seed=7)
    assert len(reports) == 500
    assert all(r.ok for r in reports)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("form", [SEPARATED, COSEPARATED])
def test_prop_formulas_are_sections(n, form):
    S = stab_tpn(n, form)
    assert all(envelope_section_check(S, q) for q in range(n))


@pytest.mark.parametrize("chamber", [(1, 2), (2, 1)])
def test_intro_formulas_are_sections(chamber):
    S = stab_tp1_elliptic(chamber)
    assert all(envelope_section_check(S, q) for q in range(2))


def test_section_mismatch():
    required = sq(t / a(1) * hb())
    assert not section_check(th(t / a(1)), required)
    assert section_check(th(t / a(1) * hb()), required)
    with pytest.raises(TypeError):
        section_check(th(t) + th(t), required)


forms = st.dictionaries(st.tuples(st.sampled_from(["t", "a1", "z1", "h"]),
                                  st.sampled_from(["t", "a1", "z1", "h"])),
                        st.integers(-3, 3), max_size=6).map(QForm)


@given(forms, forms)
def test_reduction_is_linear_projector(P, Q):
    assert reduce_mod_base(reduce_mod_base(P)) == reduce_mod_base(P)
    assert reduce_mod_base(P + Q) == reduce_mod_base(P) + reduce_mod_base(Q)


@given(st.integers(0, 2**31))
def test_hw_invariance_random(seed):
    rep = random_hw_trials(1, seed=seed)[0]
    assert rep.ok


def test_gap_choice_is_irrelevant():
    D = parse("/1\\1/2\\2/")
    roots = diagram_roots(D)
    base = qu_form(D, roots)
    for eta in ([1, 3], [2, 3], [1, 4], [2, 4]):
        assert equivalent(qu_form(D, roots, eta), base)
    with pytest.raises(ValueError):
        qu_form(D, roots, [3, 4])
