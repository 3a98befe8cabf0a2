import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plurigreen import DomainError
from plurigreen.disc_algebra import (
    AnalyticDisc,
    RationalMap,
    blaschke,
    boundedness_report,
    compose_jet,
    jet_at,
    mobius,
    mobius_map,
    mobius_product,
    pseudo_distance,
    with_outer,
    rational_derivative,
    sup_norm_circle,
)

from strategies import disc_points


def test_mobius_values():
    assert mobius(0.5, 0) == pytest.approx(0.5, abs=1e-15)
    assert mobius(0.5, 0.5) == pytest.approx(0, abs=1e-15)
    assert mobius(0.5, 0.2) == pytest.approx(1 / 3, abs=1e-15)


def test_mobius_rejects_boundary():
    with pytest.raises(DomainError):
        mobius(1.0, 0.2)


def test_mobius_map_at_zero_is_negation():
    f = mobius_map(0)
    for x in (0.1, 0.3j, -0.7 + 0.2j):
        assert f(x) == pytest.approx(-x, abs=1e-15)


def test_mobius_involution_on_grid():
    xi = 0.4 - 0.3j
    f = mobius_map(xi)
    pts = 0.9 * np.exp(2j * np.pi * np.arange(64) / 64)
    assert np.max(np.abs(f(f(pts)) - pts)) < 1e-12


def test_blaschke_simple_and_scaled():
    r = 0.7
    f = blaschke([(0, 1)], scale=r)
    for x in (0.2, -0.5j):
        assert f(x) == pytest.approx(-r * x, abs=1e-15)


def test_blaschke_zero_and_modulus():
    f = blaschke([(0.5, 2)])
    assert abs(f(0.5)) < 1e-14
    assert abs(rational_derivative(f, 0.5)) < 1e-12
    assert abs(sup_norm_circle(f) - 1.0) < 1e-9


def test_derivatives():
    sq = RationalMap.polynomial([0, 0, 1])
    assert rational_derivative(sq, 0.3) == pytest.approx(0.6, abs=1e-14)
    assert abs(rational_derivative(mobius_map(0.5), 0)) == pytest.approx(0.75, abs=1e-14)


def test_jets():
    sq = RationalMap.polynomial([0, 0, 1])
    assert np.allclose(jet_at(sq, 0, 3).coeffs, [0, 0, 1, 0], atol=1e-15)
    assert np.allclose(jet_at(mobius_map(0.5), 0, 1).coeffs, [0.5, -0.75], atol=1e-15)


def test_product_jet_is_cauchy_product():
    f, g = mobius_map(0.3 + 0.1j), blaschke([(0.2j, 2)])
    x = 0.1 - 0.25j
    jf, jg, jfg = jet_at(f, x, 5), jet_at(g, x, 5), jet_at(f * g, x, 5)
    cauchy = [sum(jf.coeffs[i] * jg.coeffs[k - i] for i in range(k + 1)) for k in range(6)]
    assert np.max(np.abs(np.array(jfg.coeffs) - cauchy)) < 1e-11


def test_compose_jet_matches_direct():
    f, h = blaschke([(0.3, 1), (-0.2j, 1)]), mobius_map(0.4)
    x = 0.25
    direct = jet_at(f.compose(h), x, 4).coeffs
    via = compose_jet(f, jet_at(h, x, 4)).coeffs
    assert np.max(np.abs(np.array(direct) - via)) < 1e-11


def test_sup_norms():
    assert sup_norm_circle(RationalMap.identity()) == pytest.approx(1.0, abs=1e-15)
    assert sup_norm_circle(RationalMap.constant(0.3)) == pytest.approx(0.3, abs=1e-15)


def test_boundedness_report_flags_excess():
    rep = boundedness_report(RationalMap.polynomial([0, 1.01]))
    assert rep.sampled_sup - 1 == pytest.approx(0.01, abs=1e-9)
    assert rep.excess() >= 0.01 - 1e-12


def test_disc_bounded():
    d = AnalyticDisc((mobius_map(0.2), blaschke([(0.1, 2)], scale=0.5)))
    assert d.is_bounded()
    assert not AnalyticDisc((RationalMap.polynomial([0, 1.1]),)).is_bounded()


def test_pseudo_distance():
    assert pseudo_distance(0.5, 0.5) == 0
    assert pseudo_distance(0.0, 0.3j) == pytest.approx(0.3)
    assert pseudo_distance(0.2, -0.4) == pytest.approx(pseudo_distance(-0.4, 0.2))


@given(disc_points(0.95), disc_points(0.999))
def test_mobius_is_an_involution(xi, zeta):
    assert abs(mobius(xi, mobius(xi, zeta)) - zeta) < 1e-9


@given(disc_points(0.95), disc_points(0.95), disc_points(0.95))
def test_schwarz_pick_contraction(xi, z, w):
    # any Moebius map preserves the pseudo-hyperbolic distance
    d0 = pseudo_distance(z, w)
    d1 = abs(mobius(mobius(xi, z), mobius(xi, w)))
    assert abs(d0 - d1) < 1e-9


@given(disc_points(0.9), disc_points(0.9))
def test_derivative_matches_finite_difference(xi, x):
    f = mobius_map(xi) * blaschke([(0.3, 1)])
    h = 1e-6
    fd = (f(x + h) - f(x - h)) / (2 * h)
    assert abs(rational_derivative(f, x) - fd) < 1e-6


@given(st.lists(st.tuples(disc_points(0.9), st.integers(1, 3)), min_size=1, max_size=3), st.floats(0, 2 * math.pi))
def test_blaschke_is_unimodular_on_circle(factors, t):
    f = blaschke(factors)
    u = cmath.exp(1j * t)
    assert abs(abs(f(u)) - 1.0) < 1e-9


@given(disc_points(0.9), st.lists(st.tuples(disc_points(0.6), st.integers(1, 3)), min_size=1, max_size=3),
       st.one_of(st.none(), disc_points(0.9)), disc_points(0.5))
def test_factored_form_matches_expansion(h, factors, outer, x):
    f = mobius_product(h, factors, outer)
    plain = RationalMap(f.numerator, f.denominator)
    assert plain.factored is None
    assert abs(f(x) - plain(x)) < 1e-12
    assert np.max(np.abs(np.array(jet_at(f, x, 3).coeffs) - jet_at(plain, x, 3).coeffs)) < 1e-9


def test_factored_form_keeps_high_order_zero():
    # a 6-fold zero near the circle: exact from the factors, lost in the expansion
    f = mobius_product(0.3, [(0.9, 6)], 0.5)
    jet = jet_at(f, 0.9, 6).coeffs
    assert jet[0] == pytest.approx(0.5, abs=1e-15)
    assert max(abs(c) for c in jet[1:6]) < 1e-15
    assert f.has_no_poles_in_closed_disc()


def test_with_outer():
    f = with_outer(mobius_product(0.5, [(0.2, 2)]), 0.3j)
    assert f.factored.outer == 0.3j
    g = with_outer(RationalMap.identity(), 0.3j)
    assert abs(f(0.4) - mobius(0.3j, 0.5 * mobius(0.2, 0.4) ** 2)) < 1e-15
    assert abs(g(0.4) - mobius(0.3j, 0.4)) < 1e-15
