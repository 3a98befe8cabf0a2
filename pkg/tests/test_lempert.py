import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from plurigreen import NEG_INF, ParameterRangeError, feasibility
from plurigreen.candidates import Condition, DiscCandidate, lempert_conditions
from plurigreen.disc_algebra import AnalyticDisc, RationalMap, mobius
from plurigreen.green import green_horizontal_bidisc, green_one_pole_polydisc, green_two_vertical
from plurigreen.indicators import PSI_0, PSI_H, PSI_V, Indicator, PoleSystem, s_system, simple_system
from plurigreen.lempert import (
    LempertOptions,
    additive_lower_certificate,
    coman_upper,
    construct_horizontal,
    construct_nocoman_base,
    construct_one_pole,
    construct_vertical,
    lempert_upper,
    optimize_upper,
    sandwich,
    schwarz_certificates,
    tilde_upper,
)

from strategies import disc_points

LOG = math.log
FAST = LempertOptions(restarts=3, budget=1500)


def horizontal_system(poles):
    return PoleSystem(tuple(((a, 0), Indicator((m, 1))) for a, m in poles))


# objective and feasibility


def _const_disc(z, nodes, conds):
    return DiscCandidate(AnalyticDisc(tuple(RationalMap.constant(x) for x in z)), nodes, conds, z, "test")


def test_objective_examples():
    c1 = Condition((0.1, 0), (1, 1), 1)
    assert _const_disc((0, 0), (0.5,), (c1,)).objective == pytest.approx(LOG(0.5))
    c2 = Condition((0.1, 0), (2, 1), 2)
    assert _const_disc((0, 0), (0.7,), (c2,)).objective == pytest.approx(-0.713350, abs=1e-6)
    assert construct_nocoman_base(0.5, 0.3).objective == pytest.approx(2 * LOG(0.5), abs=1e-12)


def test_feasibility_reports_missing_derivative():
    # phi = (zeta, 0) hits (0.5, 0) at 0.5 but phi_1' = 1 there
    disc = AnalyticDisc((RationalMap.identity(), RationalMap.constant(0)))
    cand = DiscCandidate(disc, (0.5,), (Condition((0.5, 0), (2, 1), 2),), (0, 0), "test")
    rep = feasibility(cand)
    assert rep.residual >= 1.0 - 1e-12
    assert not rep.feasible


def test_feasibility_reports_excess():
    disc = AnalyticDisc((RationalMap.polynomial([0, 1.01]), RationalMap.constant(0)))
    cand = DiscCandidate(disc, (0.5 / 1.01,), (Condition((0.5, 0), (1, 1), 1),), (0, 0), "test")
    rep = feasibility(cand)
    assert rep.residual < 1e-12
    assert rep.boundedness_excess >= 0.01 - 1e-9
    assert not rep.feasible


# constructors


def test_one_pole_example():
    cand = construct_one_pole((0.25, 0.4), (0, 0), PSI_H)
    assert cand.nodes[0] == pytest.approx(math.sqrt(0.4), abs=1e-12)
    assert np.allclose(np.abs(cand.info["h"]), [0.395285, 1.0], atol=1e-6)
    assert cand.objective == pytest.approx(LOG(0.4), abs=1e-12)
    assert feasibility(cand).residual < 1e-10


def test_one_pole_single_coordinate():
    cand = construct_one_pole((0.2, 0.3j), (0.2, 0), PSI_0)
    assert cand.disc.coords[0].degree == 0
    assert feasibility(cand).residual < 1e-14
    assert cand.objective == pytest.approx(LOG(0.3))


def test_horizontal_case_one():
    cand = construct_horizontal((0, 0.1), [(0.5, 1), (-0.5, 1)])
    assert np.allclose(cand.nodes, [0.5, -0.5], atol=1e-14)
    assert cand.objective == pytest.approx(LOG(0.25), abs=1e-12)


def test_horizontal_case_three():
    cand = construct_horizontal((0, 0.4), [(0.5, 1), (-0.5, 1)])
    r = math.sqrt(0.25 / 0.4)
    assert r == pytest.approx(0.790569, abs=1e-6)
    assert np.allclose(cand.nodes, [0.5 / r, -0.5 / r], atol=1e-12)
    assert cand.objective == pytest.approx(LOG(0.4), abs=1e-12)
    assert feasibility(cand).feasible


def test_horizontal_case_two_drops_outer_pole():
    # |gamma| = 0.5 >= 0.3, so the pole at 0.6 is absorbed
    cand = construct_horizontal((0, 0.5), [(0.6, 1), (0.3, 1)])
    assert cand.nodes[0] is None
    assert cand.objective == pytest.approx(green_horizontal_bidisc((0, 0.5), [(0.6, 1), (0.3, 1)]).value, abs=1e-12)


def test_vertical_disc():
    cand = construct_horizontal((0.5, 0.3j), [(0.5, 2)])
    assert cand.objective == pytest.approx(LOG(0.3), abs=1e-12)
    disc, zeta1 = construct_vertical((0.5, 0.3j), 0.5, 2)
    assert abs(zeta1) ** 2 == pytest.approx(0.3)
    assert feasibility(cand).feasible


def test_nocoman_base_nodes():
    cand = construct_nocoman_base(0.5, 0.3)
    z1, z2, z4 = cand.nodes
    assert z2 == pytest.approx(0.707107, abs=1e-6)
    assert cand.info["xi"] == pytest.approx(0.894427, abs=1e-6)
    assert z1 == pytest.approx(-0.509653, abs=1e-5)
    assert z4 == pytest.approx(0.981061, abs=1e-5)
    assert abs(z1 * z4) == pytest.approx(0.5, abs=1e-12)
    assert feasibility(cand).feasible
    assert 0.3 / abs(z1 * z2 * z4) == pytest.approx(0.848528, abs=1e-6)


def test_nocoman_base_range():
    with pytest.raises(ParameterRangeError):
        construct_nocoman_base(0.5, 0.4)
    with pytest.raises(ParameterRangeError):
        construct_nocoman_base(0.5, 0.2)


@given(st.floats(0.05, 0.95), st.floats(0.0, 1.0), st.floats(0, 2 * math.pi))
def test_nocoman_identities(a, t, theta):
    lo, hi = a * a, a**1.5
    gamma = (lo + (hi - lo) * max(t, 1e-6)) * complex(math.cos(theta), math.sin(theta))
    cand = construct_nocoman_base(a, gamma)
    z1, z2, z4 = cand.nodes
    assert abs(abs(z1 * z4) - a) < 1e-10
    assert abs(abs(z2) ** 2 - a) < 1e-10
    assert abs(LOG(abs(z1)) + LOG(abs(z4)) + 2 * LOG(abs(z2)) - 2 * LOG(a)) < 1e-9


def _instance_strategy():
    return st.integers(2, 3).flatmap(
        lambda n: st.tuples(
            st.lists(disc_points(0.9), min_size=n, max_size=n),
            st.lists(disc_points(0.9), min_size=n, max_size=n),
            st.lists(st.integers(1, 3), min_size=n, max_size=n),
        )
    )


@given(_instance_strategy())
def test_one_pole_constructor_exact(args):
    z, a, c = args
    assume(all(abs(x - y) > 1e-6 for x, y in zip(z, a)))
    ind = Indicator(tuple(c))
    cand = construct_one_pole(z, a, ind)
    rep = feasibility(cand)
    assert rep.residual < 1e-10 and rep.feasible
    assert abs(cand.objective - green_one_pole_polydisc(z, a, ind).value) < 1e-10


@given(st.lists(st.tuples(disc_points(0.9, 0.05), st.integers(1, 3)), min_size=1, max_size=4, unique_by=lambda t: t[0]),
       disc_points(0.9), disc_points(0.9, 1e-3))
def test_horizontal_constructor_exact(poles, z1, z2):
    assume(all(abs(z1 - a) > 1e-3 for a, _ in poles))
    if len(poles) > 1:
        assume(min(abs(p[0] - q[0]) for i, p in enumerate(poles) for q in poles[:i]) > 1e-2)
    cand = construct_horizontal((z1, z2), poles)
    rep = feasibility(cand)
    assert rep.residual < 1e-10 and rep.feasible
    assert abs(cand.objective - green_horizontal_bidisc((z1, z2), poles).value) < 1e-10


# upper bounds


def test_lempert_upper_equals_green_horizontal():
    poles = [(0.5, 1), (-0.5, 1)]
    rep = lempert_upper((0, 0.4), horizontal_system(poles), FAST)
    assert rep.value == pytest.approx(LOG(0.4), abs=1e-9)
    assert abs(rep.gap) < 1e-9


def test_lempert_upper_one_pole():
    s = PoleSystem((((0.3 + 0.1j, -0.2), Indicator((1, 2))),))
    rep = lempert_upper((0.1, 0.4), s, FAST)
    assert rep.gap == pytest.approx(0, abs=1e-9)


def test_lempert_upper_avbv_above_green():
    s = s_system(0.5, -0.5, "VV")
    rep = lempert_upper((0, 0.3), s, FAST)
    assert rep.best is not None and feasibility(rep.best).feasible
    assert rep.value >= green_two_vertical((0, 0.3), 0.5, -0.5).value - 1e-6
    # the single-node-per-pole family cannot beat the bound from absorbing one pole
    assert rep.value <= LOG(0.5) + 1e-9


def test_optimizer_matches_one_pole_constructor():
    s = PoleSystem((((0.3, -0.2j), Indicator((1, 2))),))
    z = (0.1, 0.4)
    rep = optimize_upper(z, s, restarts=3)
    assert rep.best is not None
    assert abs(rep.value - construct_one_pole(z, (0.3, -0.2j), Indicator((1, 2))).objective) < 1e-4


def test_optimizer_never_below_green_horizontal():
    for z, poles in [((0, 0.4), [(0.5, 1), (-0.5, 2)]), ((0.1j, 0.2), [(0.6, 1), (-0.3, 1), (0.2j, 1)])]:
        rep = optimize_upper(z, horizontal_system(poles), restarts=2, budget=1500)
        g = green_horizontal_bidisc(z, poles).value
        for cand in rep.candidates:
            assert cand.objective >= g - 1e-6


def test_optimizer_deterministic_across_workers():
    s = s_system(0.5, -0.5, "0V")
    r1 = optimize_upper((0, 0.4), s, restarts=4, budget=900, seed=3, workers=1)
    r4 = optimize_upper((0, 0.4), s, restarts=4, budget=900, seed=3, workers=4)
    r1b = optimize_upper((0, 0.4), s, restarts=4, budget=900, seed=3, workers=1)
    assert r1.value == r4.value == r1b.value
    assert [c.objective for c in r1.candidates] == [c.objective for c in r4.candidates]


def test_coman_examples():
    rep = coman_upper((0.2, -0.3j), simple_system([(0.5, 0.1)]), FAST)
    assert rep.value == pytest.approx(green_one_pole_polydisc((0.2, -0.3j), (0.5, 0.1), PSI_0).value, abs=1e-9)
    assert rep.value == pytest.approx(construct_one_pole((0.2, -0.3j), (0.5, 0.1), PSI_0).objective, abs=1e-9)
    rep = coman_upper((0, 0.4), simple_system([(0.5, 0), (-0.5, 0)]), FAST)
    assert rep.value == pytest.approx(LOG(0.4), abs=1e-6)


def test_coman_four_poles_above_green():
    s = simple_system([(0.5, 0), (-0.5, 0), (-0.5, 0.05), (0.5, 0.05)])
    rep = coman_upper((0, 0.4), s, LempertOptions(restarts=3))
    for cand in rep.candidates:
        assert cand.objective >= rep.green_reference.value - 1e-6


def test_tilde_examples():
    z = (0, 0.4)
    s = s_system(0.5, -0.5, "0V")
    g, tilde, own = sandwich(z, s, FAST)
    l00 = lempert_upper(z, s_system(0.5, -0.5, "00"), FAST)
    assert tilde.value == pytest.approx(min(own.value, l00.value), abs=1e-12)
    s0 = simple_system([(0.5, 0), (-0.5, 0)])
    assert tilde_upper(z, s0, FAST).value == lempert_upper(z, s0, FAST).value


def test_tilde_avbv_lattice_of_four():
    z = (0, 0.3)
    s = s_system(0.5, -0.5, "VV")
    vals = [lempert_upper(z, s_system(0.5, -0.5, k), FAST).value for k in ("00", "V0", "0V", "VV")]
    assert tilde_upper(z, s, FAST).value == pytest.approx(min(vals), abs=1e-12)


def test_tilde_tie_break_prefers_smaller_mass():
    # Case 1 region: both relaxations of S_a0bV attain the same value
    rep = tilde_upper((0.1, 0.05), s_system(0.5, -0.5, "0V"), FAST)
    assert rep.system_label == s_system(0.5, -0.5, "00").label()


def test_additive_certificate():
    s = s_system(0.5, -0.5, "0V")
    rep = lempert_upper((0.1, 0), s, FAST)
    for cand in rep.candidates:
        assert additive_lower_certificate(cand, s)
    one = construct_one_pole((0.1, 0.2), (0.4, 0), PSI_V)
    assert additive_lower_certificate(one, None)
    # a disc claiming a node it cannot have is caught
    fake = DiscCandidate(one.disc, (0.01,), one.conditions, one.z, "fake")
    assert not additive_lower_certificate(fake, None)


def test_schwarz_on_base():
    rep = schwarz_certificates(construct_nocoman_base(0.5, 0.3), 0.5, 0.3)
    assert rep.checked and rep.all_hold
    v = rep.values
    assert v["second_pair"] == pytest.approx(v["log a"], abs=1e-12)
    assert v["first_pair"] == pytest.approx(v["log a"], abs=1e-12)
    assert v["product_bound"] == pytest.approx(0.353553, abs=1e-6)


def test_schwarz_flags_bad_pattern():
    cand = construct_nocoman_base(0.5, 0.3)
    shrunk = DiscCandidate(cand.disc, tuple(x * 0.9 for x in cand.nodes), cand.conditions, cand.z, "shrunk")
    assert not schwarz_certificates(shrunk, 0.5, 0.3).all_hold
    mismatch = construct_horizontal((0, 0.4), [(0.5, 1), (-0.5, 1)])
    assert not schwarz_certificates(mismatch, 0.5, 0.4).checked


@settings(max_examples=15)
@given(disc_points(0.85, 0.05))
def test_sandwich_chain(gamma):
    z = (0.05, gamma)
    s = s_system(0.5, -0.5, "0V")
    g, tilde, own = sandwich(z, s, LempertOptions(optimizer=False))
    # no closed form for S_a0bV; the more singular S_aVbV Green function lies below it
    assert tilde.value >= green_two_vertical(z, 0.5, -0.5).value - 1e-6
    assert tilde.value <= own.value + 1e-12


def test_monotone_on_closed_forms():
    grid = [(0.9 * k / 20 * complex(math.cos(t), math.sin(t))) for k in range(1, 21) for t in np.linspace(0, 2 * math.pi, 20, endpoint=False)]
    big = [(0.5, 1), (-0.5, 2), (0.2j, 1)]
    for w in grid:
        z = (0.1, w)
        g = green_horizontal_bidisc(z, big).value
        for k in range(3):
            g_sub = green_horizontal_bidisc(z, big[:k] + big[k + 1:]).value
            assert g <= g_sub + 1e-12
