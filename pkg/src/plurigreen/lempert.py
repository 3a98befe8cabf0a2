"""Upper bounds for generalized, simple-pole and corrected Lempert functions.

Explicit extremal-disc constructors cover one pole and horizontal bidisc
systems; everything else goes through the node search of
:mod:`plurigreen.optimizer`. Every reported bound comes from a disc that
passed :func:`plurigreen.candidates.feasibility`.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, replace
from typing import Sequence

from ._base import (
    BOUNDEDNESS_TOL,
    DomainError,
    ParameterRangeError,
    UnsupportedConfiguration,
    as_complex,
    as_point,
    is_neg_inf,
)
from .candidates import (
    Condition,
    DiscCandidate,
    coman_conditions,
    feasibility,
    lempert_conditions,
    node_pattern,
    objective,
)
from .disc_algebra import AnalyticDisc, RationalMap, mobius, mobius_product, with_outer
from .green import GreenValue, green_one_pole_polydisc, green_value
from .indicators import Indicator, PoleSystem, relaxations
from .optimizer import OptimizerOptions, optimize_nodes

__all__ = [
    "LempertOptions",
    "UpperBoundReport",
    "SchwarzReport",
    "construct_one_pole",
    "construct_horizontal",
    "construct_vertical",
    "construct_nocoman_base",
    "optimize_upper",
    "lempert_upper",
    "coman_upper",
    "tilde_upper",
    "sandwich",
    "additive_lower_certificate",
    "schwarz_certificates",
    "objective",
    "feasibility",
]


@dataclass(frozen=True)
class LempertOptions:
    """Search settings shared by the upper-bound routines."""

    optimizer: bool = True
    budget: int = 3000
    restarts: int = 6
    seed: int = 0
    degree: int | None = None
    workers: int = 1

    def search(self) -> OptimizerOptions:
        return OptimizerOptions(self.budget, self.restarts, self.seed, self.degree, self.workers)


@dataclass(frozen=True)
class UpperBoundReport:
    best: DiscCandidate | None
    method: str
    green_reference: GreenValue | None
    status: str
    candidates: tuple[DiscCandidate, ...] = ()
    system_label: str = ""

    @property
    def value(self) -> float | None:
        return None if self.best is None else self.best.objective

    @property
    def gap(self) -> float | None:
        if self.best is None or self.green_reference is None or is_neg_inf(self.green_reference.value):
            return None
        return self.best.objective - float(self.green_reference.value)


# ---------------------------------------------------------------------------
# explicit constructors


def _check_z(z, dim: int | None = None):
    z = as_point(z, "z")
    if dim is not None and len(z) != dim:
        raise DomainError("dimension mismatch")
    if any(abs(x) >= 1 for x in z):
        raise DomainError("z must lie in the open polydisc")
    return z


def _one_node(z, point, orders) -> tuple[AnalyticDisc, complex, tuple[complex, ...]]:
    # disc phi with phi(0) = z and phi - point vanishing to the given orders at zeta0
    w = [zj if aj == 0 else mobius(aj, zj) for zj, aj in zip(z, point)]
    if all(x == 0 for x in w):
        raise DomainError("z coincides with the pole")
    zeta0 = max(abs(x) ** (1.0 / m) for x, m in zip(w, orders))
    coords, hs = [], []
    for x, aj, m in zip(w, point, orders):
        h = x / zeta0**m
        hs.append(h)
        if x == 0:
            coords.append(RationalMap.constant(aj))
        else:
            coords.append(mobius_product(h, [(zeta0, m)], None if aj == 0 else aj))
    return AnalyticDisc(tuple(coords)), complex(zeta0), tuple(hs)


def _one_node_value(z, cond: Condition) -> float:
    w = [zj if aj == 0 else mobius(aj, zj) for zj, aj in zip(z, cond.point)]
    return cond.weight * max((math.log(abs(x)) / m if x != 0 else -math.inf) for x, m in zip(w, cond.orders))


def construct_one_pole(z, a, ind: Indicator) -> DiscCandidate:
    """Extremal disc for one pole with indicator ``ind``.

    After the Moebius reduction ``w_j = mobius(a_j, z_j)`` the disc is
    ``zeta -> (h_j mobius(zeta0, zeta)^{m_j})`` with ``m = required_orders``,
    ``zeta0 = |w_{j0}|^{1/m_{j0}}`` at the argmax ``j0`` of
    ``c_j log|w_j|`` and ``h_j = w_j / zeta0^{m_j}``.
    """
    z = _check_z(z)
    a = _check_z(a)
    cond = lempert_conditions(PoleSystem(((a, ind),)))[0]
    disc, zeta0, hs = _one_node(z, a, cond.orders)
    return DiscCandidate(disc, (zeta0,), (cond,), z, "one-pole", info={"h": hs})


def construct_vertical(z, a1: complex, m1: int) -> tuple[AnalyticDisc, complex]:
    """Disc ``(a_1, mobius(zeta1, zeta)^{m_1})`` with ``zeta1^{m_1} = z_2``, for ``z = (a_1, z_2)``."""
    z1, z2 = _check_z(z, 2)
    if z2 == 0:
        raise DomainError("z is the pole itself")
    zeta1 = cmath.exp(cmath.log(z2) / m1)
    return AnalyticDisc((RationalMap.constant(a1), mobius_product(1.0, [(zeta1, m1)]))), zeta1


def _horizontal_reduced(gamma: complex, poles: list[tuple[complex, int]]):
    # z = (0, gamma); poles (a_j, 0) with a_j != 0, sorted by |a_j| descending
    # returns (disc, nodes aligned with poles (None = dropped), case label)
    P = math.prod(abs(a) ** m for a, m in poles)
    if abs(gamma) <= P:
        scale = gamma / math.prod(a**m for a, m in poles)
        second = mobius_product(scale, poles)
        # the identity is -mobius(0, .)
        return AnalyticDisc((mobius_product(-1.0, [(0j, 1)]), second)), [a for a, _ in poles], "case 1"
    a1, m1 = poles[0]
    if abs(gamma) >= P / abs(a1) ** m1:
        disc, nodes, label = _horizontal_reduced(gamma, poles[1:])
        return disc, [None] + nodes, "case 2/" + label
    M = sum(m for _, m in poles)
    r = (P / abs(gamma)) ** (1.0 / M)
    nodes = [a / r for a, _ in poles]
    phase = gamma / math.prod(x**m for x, (_, m) in zip(nodes, poles))
    phase /= abs(phase)
    second = mobius_product(phase, [(x, m) for x, (_, m) in zip(nodes, poles)])
    first = mobius_product(-r, [(0j, 1)])
    return AnalyticDisc((first, second)), nodes, "case 3"


def construct_horizontal(z, poles: Sequence[tuple[complex, int]]) -> DiscCandidate:
    """Extremal disc for poles ``(a_j, 0)`` with indicators ``max(m_j log|w_1|, log|w_2|)``.

    ``z_1`` is first moved to 0 by ``mobius(z_1, .)``. Case 1 applies when
    ``|gamma| <= prod |a_j|^{m_j}`` (ties included), Case 2 drops the pole
    farthest from 0 and recurses, Case 3 uses ``(r zeta, e^{i theta} prod
    mobius(a_j/r, zeta)^{m_j})``. If ``z_1`` is one of the ``a_j`` the
    vertical disc is returned and the other poles are left unvisited.
    """
    z1, z2 = _check_z(z, 2)
    poles = [(as_complex(a), int(m)) for a, m in poles]
    if len({a for a, _ in poles}) != len(poles):
        raise DomainError("poles must be distinct")
    conds = tuple(Condition((a, 0j), (1, m), m) for a, m in poles)
    for k, (a, m) in enumerate(poles):
        if a == z1:
            disc, zeta1 = construct_vertical((z1, z2), a, m)
            nodes = [None] * len(poles)
            nodes[k] = zeta1
            return DiscCandidate(disc, tuple(nodes), conds, (z1, z2), "horizontal:vertical")
    red = [(a if z1 == 0 else mobius(z1, a), m, k) for k, (a, m) in enumerate(poles)]
    order = sorted(range(len(red)), key=lambda i: (-abs(red[i][0]), i))
    disc, nodes_sorted, label = _horizontal_reduced(z2, [(red[i][0], red[i][1]) for i in order])
    nodes = [None] * len(poles)
    for pos, i in enumerate(order):
        nodes[i] = nodes_sorted[pos]
    first, second = disc.coords
    if z1 != 0:
        first = with_outer(first, z1)
    return DiscCandidate(AnalyticDisc((first, second)), tuple(nodes), conds, (z1, z2), "horizontal:" + label)


def construct_nocoman_base(a: float, gamma) -> DiscCandidate:
    """Limit disc for the four-pole collision at ``z = (0, gamma)``, ``b = -a``.

    Nodes ``zeta_2 = sqrt(a)``, ``zeta_{1,4} = mobius(sqrt(a), +-xi)`` with
    ``xi = sqrt(2a/(1+a^2))``; the disc is ``(mobius(-a, -mobius(zeta_2,
    .)^2), gamma/(zeta_1 zeta_2 zeta_4) prod mobius(zeta_j, .))``. It hits
    ``(a, 0)`` at ``zeta_1`` and ``zeta_4`` and ``(-a, 0)`` at ``zeta_2``
    with vanishing first derivative there.
    """
    a = float(a)
    gamma = as_complex(gamma, "gamma")
    if not 0.0 < a < 1.0:
        raise ParameterRangeError("a must lie in (0, 1)")
    if not (a * a < abs(gamma) <= a**1.5 * (1 + 1e-15)):
        raise ParameterRangeError(f"need a^2 < |gamma| <= a^(3/2) = {a ** 1.5:.6g}, got |gamma| = {abs(gamma):.6g}")
    z2 = math.sqrt(a)
    xi = math.sqrt(2 * a / (1 + a * a))
    z1 = mobius(z2, xi)
    z4 = mobius(z2, -xi)
    first = mobius_product(-1.0, [(z2, 2)], -a)
    second = mobius_product(gamma / (z1 * z2 * z4), [(z1, 1), (z2, 1), (z4, 1)])
    conds = (
        Condition((a, 0j), (1, 1), 1),
        Condition((-a, 0j), (2, 1), 2),
        Condition((a, 0j), (1, 1), 1),
    )
    return DiscCandidate(AnalyticDisc((first, second)), (z1, z2, z4), conds, (0j, gamma), "nocoman-base", info={"xi": xi})


# ---------------------------------------------------------------------------
# constructor candidates for arbitrary systems (via subsystems)


def _aligned_horizontal(z, conds: Sequence[Condition]):
    """Constructor for conditions sharing one coordinate, or ``None``.

    Handles poles ``(a_j, b)`` with orders ``(1, m_j)`` and weight ``m_j``,
    and the transposed shape ``(b, a_j)`` with orders ``(m_j, 1)``.
    """
    if len(z) != 2:
        return None
    for swap in (False, True):
        pts = [(c.point[1], c.point[0]) if swap else c.point for c in conds]
        ords = [(c.orders[1], c.orders[0]) if swap else c.orders for c in conds]
        if len({p[1] for p in pts}) != 1:
            continue
        if any(o[0] != 1 or c.weight != o[1] for o, c in zip(ords, conds)):
            continue
        b = pts[0][1]
        zz = (z[1], z[0]) if swap else tuple(z)
        zz = (zz[0], zz[1] if b == 0 else mobius(b, zz[1]))
        cand = construct_horizontal(zz, [(p[0], o[1]) for p, o in zip(pts, ords)])
        first, second = cand.disc.coords
        if b != 0:
            second = with_outer(second, b)
        coords = (second, first) if swap else (first, second)
        return AnalyticDisc(coords), cand.nodes, cand.method + (" (transposed)" if swap else "")
    return None


def constructor_candidates(z, conds: Sequence[Condition]) -> list[DiscCandidate]:
    """Feasible discs from explicit constructors applied to every subsystem."""
    z = tuple(z)
    n = len(conds)
    out = []
    const = AnalyticDisc(tuple(RationalMap.constant(x) for x in z))
    out.append(DiscCandidate(const, (None,) * n, tuple(conds), z, "constant"))
    for size in range(1, n + 1):
        for keep in itertools.combinations(range(n), size):
            sub = [conds[i] for i in keep]
            built = None
            try:
                if size == 1:
                    disc, zeta0, _ = _one_node(z, sub[0].point, sub[0].orders)
                    built = (disc, (zeta0,), "one-pole")
                else:
                    built = _aligned_horizontal(z, sub)
            except DomainError:
                built = None
            if built is None:
                continue
            disc, sub_nodes, label = built
            nodes = [None] * n
            for i, x in zip(keep, sub_nodes):
                nodes[i] = x
            tag = "all poles" if size == n else "subsystem " + ",".join(str(i + 1) for i in keep)
            out.append(DiscCandidate(disc, tuple(nodes), tuple(conds), z, f"{label} [{tag}]"))
    feasible = []
    for c in out:
        rep = feasibility(c)
        c.info["feasibility"] = rep
        if rep.feasible:
            feasible.append(c)
    return feasible


def _green_or_none(z, system: PoleSystem | None) -> GreenValue | None:
    if system is None:
        return None
    try:
        return green_value(z, system)
    except UnsupportedConfiguration:
        return None


def _pick(cands: Sequence[DiscCandidate]) -> DiscCandidate | None:
    if not cands:
        return None
    # stable: earlier (constructor) candidates win exact ties
    return min(enumerate(cands), key=lambda t: (t[1].objective, t[0]))[1]


def _warm_starts(cands: Sequence[DiscCandidate], n: int) -> list[list[complex]]:
    starts = []
    for c in sorted(cands, key=lambda c: c.objective)[:2]:
        if all(x is None for x in c.nodes):
            continue
        nodes = []
        k = 0
        for x in c.nodes:
            if x is None:
                nodes.append(0.97 * cmath.exp(2j * math.pi * (k + 0.5) / n))
                k += 1
            else:
                nodes.append(x)
        starts.append(nodes)
    return starts


def _upper(z, conds, green_ref, options: LempertOptions, label: str, use_constructors: bool = True, extra=()) -> UpperBoundReport:
    cands = constructor_candidates(z, conds) if use_constructors else []
    for c in extra:
        rep = feasibility(c)
        c.info["feasibility"] = rep
        if rep.feasible:
            cands.append(c)
    best = _pick(cands)
    exact = (
        best is not None
        and green_ref is not None
        and not is_neg_inf(green_ref.value)
        and abs(best.objective - float(green_ref.value)) <= 1e-12
    )
    if options.optimizer and not exact:
        res = optimize_nodes(z, conds, options.search(), starts=_warm_starts(cands, len(conds)))
        cands.extend(res.all_feasible)
        best = _pick(cands)
    if best is None:
        return UpperBoundReport(None, "none", green_ref, "no feasible candidate", (), label)
    return UpperBoundReport(best, best.method, green_ref, "ok", tuple(cands), label)


def _validate_z_for_system(z, system: PoleSystem):
    z = _check_z(z, system.dim)
    if any(all(abs(x - y) == 0 for x, y in zip(z, a)) for a in system.points):
        raise DomainError("z coincides with a pole")
    return z


def optimize_upper(z, system: PoleSystem, budget: int = 3000, seed: int = 0, degree: int | None = None, restarts: int = 6, workers: int = 1) -> UpperBoundReport:
    """Node search alone (no constructors) for the generalized Lempert function."""
    z = _validate_z_for_system(z, system)
    opts = LempertOptions(True, budget, restarts, seed, degree, workers)
    conds = lempert_conditions(system)
    res = optimize_nodes(z, conds, opts.search())
    green_ref = _green_or_none(z, system)
    if res.candidate is None:
        return UpperBoundReport(None, "optimizer", green_ref, res.status, res.near_feasible, system.label())
    return UpperBoundReport(res.candidate, res.candidate.method, green_ref, "ok", res.all_feasible, system.label())


def lempert_upper(z, system: PoleSystem, options: LempertOptions = LempertOptions()) -> UpperBoundReport:
    """Smallest objective over constructors (on all subsystems) and the node search.

    The search is skipped when a constructor already attains the Green
    value, which no disc can beat.
    """
    z = _validate_z_for_system(z, system)
    return _upper(z, lempert_conditions(system), _green_or_none(z, system), options, system.label())


def coman_upper(z, system: PoleSystem, options: LempertOptions = LempertOptions(), extra: Sequence[DiscCandidate] = ()) -> UpperBoundReport:
    """Upper bound for the simple-pole Lempert function with weights ``nu_j``.

    Poles carry isotropic indicators ``(nu, ..., nu)``; the discs only need
    to pass through the poles, and the objective is ``sum nu_j log|zeta_j|``.
    ``extra`` candidates (e.g. collision corrections) are checked and added.
    """
    z = _validate_z_for_system(z, system)
    conds = coman_conditions(system)
    return _upper(z, conds, _green_or_none(z, system), options, system.label() + " [simple]", extra=extra)


def _lattice(z, system: PoleSystem, options: LempertOptions):
    out = []
    for inds in itertools.product(*(relaxations(ind) for ind in system.indicators)):
        sub = system.with_indicators(inds)
        out.append((sub, lempert_upper(z, sub, options)))
    return out


def _tilde_from(lattice, system: PoleSystem, green_ref) -> UpperBoundReport:
    best = None
    for sub, rep in lattice:
        if rep.best is None:
            continue
        if (
            best is None
            or rep.value < best[1].value - 1e-12
            or (abs(rep.value - best[1].value) <= 1e-12 and sub.total_mass < best[0].total_mass)
        ):
            best = (sub, rep)
    if best is None:
        return UpperBoundReport(None, "none", green_ref, "no feasible candidate", (), system.label())
    sub, rep = best
    return UpperBoundReport(rep.best, f"{rep.method} @ {sub.label()}", green_ref, "ok", rep.candidates, sub.label())


def tilde_upper(z, system: PoleSystem, options: LempertOptions = LempertOptions()) -> UpperBoundReport:
    """Minimum of :func:`lempert_upper` over all systems with relaxed indicators.

    Ties within 1e-12 go to the relaxation with smaller total mass.
    """
    z = _validate_z_for_system(z, system)
    return _tilde_from(_lattice(z, system, options), system, _green_or_none(z, system))


def sandwich(z, system: PoleSystem, options: LempertOptions = LempertOptions()):
    """``(green or None, tilde report, lempert report)`` sharing one pass over the relaxation lattice."""
    z = _validate_z_for_system(z, system)
    green_ref = _green_or_none(z, system)
    lattice = _lattice(z, system, options)
    own = next(rep for sub, rep in lattice if sub.indicators == system.indicators)
    return green_ref, _tilde_from(lattice, system, green_ref), own


# ---------------------------------------------------------------------------
# certificates


def additive_lower_certificate(cand: DiscCandidate, system: PoleSystem | None, z=None, slack: float = 1e-9) -> bool:
    """Each hit pole costs at least its one-pole value, so the objective is at least their sum.

    For a condition with orders ``m`` and weight ``w`` the one-pole value is
    ``w max_j log|mobius(a_j, z_j)| / m_j``, which is the one-pole Green
    function when the orders come from an indicator.
    """
    z = cand.z if z is None else as_point(z)
    if system is not None and len(system) != len(cand.nodes):
        raise DomainError("node count differs from pole count")
    bound = sum(_one_node_value(z, c) for _, c in cand.active())
    return cand.objective >= bound - slack


@dataclass(frozen=True)
class SchwarzReport:
    pattern: str
    checked: bool
    second_pair: bool  # log|zeta_2| + log|zeta_3| >= log a
    first_pair: bool  # log|zeta_1| + log|zeta_4| >= log a
    product: bool  # |gamma| <= |zeta_1 zeta_2| (|zeta_4| + |e|)/(1 + |zeta_4||e|)
    values: dict

    @property
    def all_hold(self) -> bool:
        return self.checked and self.second_pair and self.first_pair and self.product


def _match_pattern(cand: DiscCandidate, a: float):
    # returns (zeta1, zeta2, zeta3, zeta4, eps, label) or None
    b = -a
    act = cand.active()
    if len(act) != len(cand.nodes):
        return None
    simple = [(x, c) for x, c in act if c.orders == (1, 1)]
    if len(act) == 4 and len(simple) == 4:
        by = {}
        eps = None
        for x, c in act:
            p1, p2 = c.point
            key = ("a" if abs(p1 - a) < 1e-12 else "b" if abs(p1 - b) < 1e-12 else "?", p2 == 0)
            if p2 != 0:
                if eps is not None and abs(eps - p2) > 1e-15:
                    return None
                eps = p2
            by[key] = x
        if set(by) != {("a", True), ("b", True), ("a", False), ("b", False)}:
            return None
        return by[("a", True)], by[("b", True)], by[("b", False)], by[("a", False)], eps, "four simple poles"
    if len(act) == 3:
        at_a = [x for x, c in act if c.orders == (1, 1) and abs(c.point[0] - a) < 1e-12 and c.point[1] == 0]
        at_b = [x for x, c in act if c.orders == (2, 1) and abs(c.point[0] - b) < 1e-12 and c.point[1] == 0]
        if len(at_a) == 2 and len(at_b) == 1:
            return at_a[0], at_b[0], at_b[0], at_a[1], 0j, "zeta_2 = zeta_3 double node"
    return None


def schwarz_certificates(cand: DiscCandidate, a: float, gamma, slack: float = 1e-9) -> SchwarzReport:
    """Schwarz-lemma inequalities that every disc of the collision pattern satisfies.

    Nodes are labelled ``zeta_1 -> (a,0)``, ``zeta_2 -> (b,0)``, ``zeta_3 ->
    (b,eps)``, ``zeta_4 -> (a,eps)`` with ``b = -a``; the limit pattern has
    ``zeta_2 = zeta_3`` and ``eps = 0``. With ``e = eps / (mobius(zeta_1,
    zeta_4) mobius(zeta_2, zeta_4))`` the checks are
    ``log|zeta_2 zeta_3| >= log a``, ``log|zeta_1 zeta_4| >= log a`` and
    ``|gamma| <= |zeta_1 zeta_2| (|zeta_4| + |e|) / (1 + |zeta_4||e|)``,
    which reduces to ``|gamma| <= |zeta_1 zeta_2 zeta_4|`` when ``eps = 0``.
    """
    gamma = as_complex(gamma, "gamma")
    m = _match_pattern(cand, a)
    if m is None:
        return SchwarzReport("mismatch", False, False, False, False, {})
    z1, z2, z3, z4, eps, label = m
    la = math.log(a)
    s23 = math.log(abs(z2)) + math.log(abs(z3))
    s14 = math.log(abs(z1)) + math.log(abs(z4))
    if eps == 0:
        bound = abs(z1 * z2 * z4)
    else:
        e = abs(eps / (mobius(z1, z4) * mobius(z2, z4)))
        t = abs(z4)
        bound = abs(z1 * z2) * (t + e) / (1 + t * e)
    vals = {"log a": la, "second_pair": s23, "first_pair": s14, "gamma": abs(gamma), "product_bound": bound}
    return SchwarzReport(label, True, s23 >= la - slack, s14 >= la - slack, abs(gamma) <= bound + slack, vals)
