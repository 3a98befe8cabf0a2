import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plurigreen import AdmissibilityError, DomainError
from plurigreen.disc_algebra import RationalMap, blaschke, compose_jet, jet_at, mobius_map, sup_norm_circle
from plurigreen.jets import (
    epsilon_bound,
    inverse_transport,
    inverse_transport_matrix,
    multpn_check,
    multpn_construct,
    schur_jet,
    transport,
    transport_matrix,
)

from strategies import disc_points


def composed_jet(coeffs, zs, m):
    """Oracle: chain rule on series, ``g`` applied to the jet of ``mobius(zs)`` at ``zs``."""
    g = RationalMap.polynomial(coeffs)
    return np.array(compose_jet(g, jet_at(mobius_map(zs), zs, m)).coeffs)


def expanded_jet(coeffs, zs, m):
    """Oracle: expand ``g o mobius(zs)`` as one rational map and read its jet at ``zs``."""
    g = RationalMap.polynomial(coeffs)
    return np.array(jet_at(g.compose(mobius_map(zs)), zs, m).coeffs)


def test_order_zero_is_identity():
    for zs in (0, 0.5, -0.3 + 0.6j):
        assert transport([0.7 - 0.1j], zs, 0)[0] == 0.7 - 0.1j


def test_identity_derivative():
    out = transport([0, 1], 0.5)
    assert out[1] == pytest.approx(-1 / 0.75, abs=1e-14)
    assert abs(out[1]) == pytest.approx(1 / 0.75)


def test_zero_base_point_branch():
    a = [0.2, 0.3j, -0.1, 0.05]
    assert np.allclose(transport(a, 0), composed_jet(a, 0, 3), atol=1e-14)


def test_transport_matrix_is_triangular_and_inverted():
    T = transport_matrix(0.3 - 0.4j, 6)
    C = inverse_transport_matrix(0.3 - 0.4j, 6)
    assert np.allclose(np.triu(T, 1), 0)
    assert np.allclose(C @ T, np.eye(7), atol=1e-12)


def test_transport_rejects_boundary():
    with pytest.raises(DomainError):
        transport([1, 2], 1.0)


@given(st.lists(disc_points(1.0), min_size=1, max_size=7), disc_points(0.9))
def test_transport_matches_composition(coeffs, zs):
    m = len(coeffs) - 1
    ref = composed_jet(coeffs, zs, m)
    # coefficients grow like (1 - |zs|^2)^-n, so compare relative to the largest one
    assert np.max(np.abs(transport(coeffs, zs) - ref)) < 1e-10 * max(1.0, np.max(np.abs(ref)))


@given(st.lists(disc_points(1.0), min_size=1, max_size=7), disc_points(0.6))
def test_transport_matches_expanded_map(coeffs, zs):
    # the expanded quotient loses digits near the circle, so stay inside |zs| <= 0.6
    m = len(coeffs) - 1
    ref = expanded_jet(coeffs, zs, m)
    assert np.max(np.abs(transport(coeffs, zs) - ref)) < 1e-10 * max(1.0, np.max(np.abs(ref)))


@given(st.lists(disc_points(1.0), min_size=1, max_size=7), disc_points(0.9))
def test_transport_round_trip(coeffs, zs):
    back = inverse_transport(transport(coeffs, zs), zs)
    assert np.max(np.abs(back - np.array(coeffs))) < 1e-10


def test_multpn_first_coefficient():
    B0 = RationalMap.identity()
    # at zeta* = 0.9 the first transported coefficient is gamma / B0(zeta*)
    res = multpn_construct(B0, 0.3, 1, eta=0.1)
    assert res.zeta_star == pytest.approx(0.9)
    assert res.tilde_coeffs[0] == pytest.approx(1 / 3)


def test_multpn_order_one_is_constant_factor():
    B0 = blaschke([(0.2, 1), (-0.5j, 1)])
    res = multpn_construct(B0, 0.4 + 0.1j, 1)
    assert res.g.degree == 0
    assert res.f(res.zeta_star) == pytest.approx(0.4 + 0.1j, abs=1e-12)


def test_multpn_rejects_non_blaschke():
    with pytest.raises(DomainError):
        multpn_construct(RationalMap.polynomial([0, 0.5]), 0.3, 2)


@given(st.lists(st.tuples(disc_points(0.9), st.integers(1, 2)), min_size=1, max_size=2),
       disc_points(0.8), st.integers(1, 5))
def test_multpn_soundness(factors, gamma, m):
    B0 = blaschke(factors)
    res = multpn_construct(B0, gamma, m)
    chk = multpn_check(res, B0, gamma, m)
    assert chk.jet_error < 1e-8
    assert chk.f_sup <= 1 + 1e-6
    assert chk.g_sup <= 1 + 1e-6


def test_schur_jet_constant():
    g = schur_jet(0.5, [], 0.5)
    assert g.degree == 0 and g(0.3) == pytest.approx(0.5)


def test_schur_jet_one_step():
    g = schur_jet(0.5, [0.1], 0.5)
    jet = jet_at(g, 0, 1).coeffs
    assert jet[0] == pytest.approx(0.5, abs=1e-12)
    assert jet[1] == pytest.approx(0.1, abs=1e-12)
    # the inner Schur function is the constant a_1 / (1 - r^2)
    assert 0.1 / 0.75 == pytest.approx(0.133333, abs=1e-6)


def test_schur_jet_admissibility():
    r = 0.5
    with pytest.raises(AdmissibilityError):
        schur_jet(0.5, [1.01 * r * (1 - r * r)], r)
    with pytest.raises(AdmissibilityError):
        schur_jet(0.6, [], r)


def test_epsilon_bound_two_terms():
    for r in (0.2, 0.5, 0.9):
        assert epsilon_bound(r, 2) == pytest.approx(r * (1 - r * r))
    assert epsilon_bound(0.5, 4) <= epsilon_bound(0.5, 3) <= epsilon_bound(0.5, 2)


@given(st.floats(0.05, 0.95), st.integers(1, 6), st.data())
def test_schur_jet_self_map(r, m, data):
    # shrink by 1e-12 so that rounding in r e^{it} stays inside the admissible box
    beta = data.draw(disc_points(r * (1 - 1e-12)))
    eps = epsilon_bound(r, m) if m > 1 else 0.0
    tail = [data.draw(disc_points(eps * (1 - 1e-12))) for _ in range(m - 1)]
    g = schur_jet(beta, tail, r)
    jet = np.array(jet_at(g, 0, m - 1).coeffs)
    assert np.max(np.abs(jet - np.array([beta] + tail))) < 1e-9
    assert sup_norm_circle(g) <= 1 + 1e-9


@given(st.lists(st.tuples(disc_points(0.9), st.integers(1, 2)), min_size=1, max_size=2),
       disc_points(0.7), st.integers(2, 4))
def test_pipeline_consistency(factors, gamma, m):
    # the g built by multpn, transported to zeta*, reproduces gamma / B0 to order m-1
    B0 = blaschke(factors)
    res = multpn_construct(B0, gamma, m)
    a = np.array(jet_at(res.g, 0, m - 1).coeffs)
    assert np.max(np.abs(transport(a, res.zeta_star) - np.array(res.tilde_coeffs))) < 1e-7
