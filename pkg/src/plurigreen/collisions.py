"""Pole collisions: discs for ``eps``-perturbed systems built from a limit disc.

A feasible disc ``phi`` for a limit system (a double node where the first
coordinate has vanishing derivative) is shrunk to ``phi^r(zeta) =
phi(r zeta)``, the double node is split into ``zeta/r`` and ``zeta/r +
eps/(r beta)`` with ``beta = phi_2'(zeta)``, and a bounded correction built
from Blaschke products puts every node exactly on its pole. The radius ``r``
follows the rule ``r = 1 - (max_j M_j / min_j s_j)|eps|`` with
``s_j = (1-|z_j|)/(1+|z_j|)`` and ``M_j |eps|`` a certified bound for the
correction, which keeps the corrected disc inside the bidisc.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from ._base import (
    DegeneracyNotice,
    DomainError,
    ParameterRangeError,
    PlurigreenError,
    SearchFailure,
    as_complex,
    as_point,
)
from .candidates import Condition, DiscCandidate, feasibility
from .disc_algebra import AnalyticDisc, RationalMap, mobius_map, rational_derivative
from .green import GreenValue, green_four_simple_eps, green_horizontal_bidisc
from .indicators import s_system, simple_system
from .lempert import (
    LempertOptions,
    SchwarzReport,
    coman_upper,
    construct_horizontal,
    construct_nocoman_base,
    lempert_upper,
    schwarz_certificates,
)

BETA_TOL = 1e-8
EPS_MAX = 0.1
DEFAULT_SCHEDULE = tuple(10.0**-k for k in range(1, 7))

__all__ = [
    "CollisionScenario",
    "SweepRow",
    "CounterexampleRow",
    "CounterexampleReport",
    "scale_disc",
    "scaled_sup_bounds",
    "correction_three",
    "correction_four",
    "sweep",
    "three_pole_scenario",
    "four_pole_scenario",
    "counterexample_report",
    "eps_schedule",
]


def scale_disc(phi: AnalyticDisc, r: float) -> AnalyticDisc:
    """``zeta -> phi(r zeta)`` for ``0 < r < 1``."""
    r = float(r)
    if not 0.0 < r < 1.0:
        raise DomainError("r must lie in (0, 1)")
    return phi.scaled(r)


def scaled_sup_bounds(z, r: float) -> list[float]:
    """Schwarz-Pick bounds ``(r+|z_j|)/(1+r|z_j|)`` for the coordinates of ``phi^r``.

    Valid for any holomorphic self-map of the polydisc with ``phi(0) = z``;
    each is at most ``1 - s_j (1-r)``.
    """
    return [(r + abs(x)) / (1 + r * abs(x)) for x in as_point(z)]


def _s(z) -> np.ndarray:
    return np.array([(1 - abs(x)) / (1 + abs(x)) for x in z])


# ---------------------------------------------------------------------------
# the generic split-and-correct step


@dataclass(frozen=True)
class _Target:
    point: tuple[complex, ...]
    source: int  # index of the base node the new node comes from
    kind: str  # "exact" | "split" | "retarget"


def _beta(base: DiscCandidate, i: int) -> complex:
    return rational_derivative(base.disc.coords[1], base.nodes[i])


def _nodes_for(base, targets, eps, r, betas):
    out = []
    for t in targets:
        x = base.nodes[t.source]
        if x is None:
            out.append(None)
        elif t.kind == "split":
            out.append(x / r + eps / (r * betas[t.source]))
        else:
            out.append(x / r)
    return out


def _lagrange_blaschke(nodes, values):
    """``f`` with ``f(0) = 0`` and ``f(nodes[j]) = values[j]``, plus the certified bound ``sum |c_j|``.

    ``f = sum_j c_j B_j`` with ``B_j = zeta prod_{i != j} mobius(nodes[i], .)``
    and ``c_j = values[j] / B_j(nodes[j])``; each ``|B_j| <= 1`` on the disc.
    All terms are kept over the common denominator ``prod_i (1 - conj(x_i) zeta)``.
    """
    nodes = [complex(x) for x in nodes]
    den = np.ones(1, dtype=complex)
    for y in nodes:
        den = P.polymul(den, [1.0, -np.conj(y)])
    num = np.zeros(1, dtype=complex)
    bound = 0.0
    for j, (x, v) in enumerate(zip(nodes, values)):
        if v == 0:
            continue
        bx = x
        for i, y in enumerate(nodes):
            if i != j:
                bx *= (y - x) / (1 - np.conj(y) * x)
        c = v / bx
        term = np.array([0.0, 1.0], dtype=complex)
        for i, y in enumerate(nodes):
            term = P.polymul(term, [y, -1.0] if i != j else [1.0, -np.conj(y)])
        num = P.polyadd(num, c * term)
        bound += abs(c)
    return RationalMap(num, den), bound


def _correct_at(base, targets, eps, r, betas):
    nodes = _nodes_for(base, targets, eps, r, betas)
    live = [(k, x) for k, x in enumerate(nodes) if x is not None]
    if any(abs(x) >= 1 for _, x in live):
        raise SearchFailure(f"a node leaves the disc at r={r:.6g}; eps={eps} is too large")
    phi_r = base.disc.scaled(r)
    xs = [x for _, x in live]
    coords, bounds = [], []
    for c in range(phi_r.dim):
        vals = [targets[k].point[c] - phi_r.coords[c](x) for k, x in live]
        f, bnd = _lagrange_blaschke(xs, vals)
        coords.append(phi_r.coords[c] + f)
        bounds.append(bnd)
    return AnalyticDisc(tuple(coords)), nodes, np.array(bounds)


def _radius_rule(base, targets, eps, betas, max_iter: int = 100):
    # fixed point of r = 1 - (max M(r) / min s)|eps|; stops once the rule holds at r itself
    s_min = float(_s(base.z).min())
    live = [abs(x) for x in base.nodes if x is not None]
    floor = max(live) if live else 0.0
    r = 1.0
    for _ in range(max_iter):
        disc, nodes, bounds = _correct_at(base, targets, eps, r, betas)
        need = 1.0 - bounds.max() / s_min
        if r <= need:
            return r, disc, nodes, bounds
        r = need * (1 - 1e-12)
        if r <= floor * (1 + 1e-12):
            break
    raise SearchFailure(f"no radius satisfies the rule for eps={eps}; |eps| is too large for this base")


def _pre_perturb(base: DiscCandidate, split_sources: Sequence[int], eps: complex) -> DiscCandidate:
    # add (0, C zeta prod mobius(zeta_i/r0, .)^{p_i}) so that the second coordinate
    # has nonzero derivative at every split node; p_i = 1 at degenerate nodes, 2 at the others
    r0 = 1.0 - math.sqrt(abs(eps))
    phi = base.disc.scaled(r0)
    nodes = [None if x is None else x / r0 for x in base.nodes]
    margin = 1.0 - max(phi.sup_norms())
    if margin <= 0:
        raise SearchFailure("base disc has no boundedness margin after shrinking")
    C = 0.5 * margin
    g = RationalMap.identity()
    for i, x in enumerate(nodes):
        if x is None:
            continue
        deg = i in split_sources and abs(_beta(base, i)) < BETA_TOL
        g = g * mobius_map(x) ** (1 if deg or i not in split_sources else 2)
    disc = AnalyticDisc((phi.coords[0], phi.coords[1] + C * g))
    info = dict(base.info, pre_perturbation={"r0": r0, "C": C})
    return DiscCandidate(disc, tuple(nodes), base.conditions, base.z, base.method + " +pre-perturbed", base.bound_tol, info)


def _split_correct(base: DiscCandidate, targets: Sequence[_Target], eps, r, method: str, pre_perturb: bool) -> DiscCandidate:
    eps = as_complex(eps, "eps")
    if eps == 0:
        return base
    if abs(eps) > EPS_MAX:
        raise DomainError(f"|eps| must be at most {EPS_MAX}")
    split_sources = sorted({t.source for t in targets if t.kind == "split" and base.nodes[t.source] is not None})
    betas = {i: _beta(base, i) for i in split_sources}
    degenerate = [i for i, b in betas.items() if abs(b) < BETA_TOL]
    notice = None
    if degenerate:
        if not pre_perturb:
            raise DegeneracyNotice(
                f"phi_2' vanishes at the split node (|beta| = {min(abs(betas[i]) for i in degenerate):.3g}); "
                "use the subsystem bound instead"
            )
        base = _pre_perturb(base, split_sources, eps)
        betas = {i: _beta(base, i) for i in split_sources}
        notice = "degenerate split node: pre-perturbed second coordinate"
    if r is None:
        r, disc, nodes, bounds = _radius_rule(base, targets, eps, betas)
    else:
        r = float(r)
        if not 0.0 < r < 1.0:
            raise DomainError("r must lie in (0, 1)")
        disc, nodes, bounds = _correct_at(base, targets, eps, r, betas)
    conds = tuple(Condition(t.point, (1,) * len(t.point), 1) for t in targets)
    s = _s(base.z)
    info = {
        "r": r,
        "eps": eps,
        "beta": {i + 1: b for i, b in betas.items()},
        "M": tuple(bounds / abs(eps)),
        "s": tuple(s),
        "sup_bound": tuple(1 - s * (1 - r) + bounds),
        "base_objective": base.objective,
    }
    if notice:
        info["notice"] = notice
    cand = DiscCandidate(disc, tuple(nodes), conds, base.z, method, base.bound_tol, info)
    cand.info["feasibility"] = feasibility(cand)
    return cand


def _find(base: DiscCandidate, point, orders=None) -> list[int]:
    out = []
    for i, c in enumerate(base.conditions):
        if all(abs(p - q) < 1e-14 for p, q in zip(c.point, point)) and (orders is None or c.orders == orders):
            out.append(i)
    return out


def _limit_points(base: DiscCandidate):
    # (a, b) from a base whose conditions sit on the first axis, a hit simply or doubly, b doubly
    doubles = [i for i, c in enumerate(base.conditions) if c.orders == (2, 1)]
    if any(c.point[1] != 0 for c in base.conditions) or not doubles:
        raise DomainError("base must hit points (a,0), (b,0) with a double node at (b,0)")
    return doubles


def correction_three(base: DiscCandidate, eps, r: float | None = None) -> DiscCandidate:
    """Disc through ``(a,0), (b,0), (b,eps)`` from a feasible ``S_{a0bV}`` disc.

    ``base`` has a simple node at ``(a,0)`` and a node at ``(b,0)`` where the
    first coordinate has a double zero. With ``r=None`` the radius rule is
    applied. ``eps = 0`` returns ``base`` unchanged. Raises
    :class:`DegeneracyNotice` when ``|phi_2'| < 1e-8`` at the ``b`` node.
    """
    _limit_points(base)
    if len(base.conditions) != 2:
        raise DomainError("correction_three expects a two-pole base")
    ib = next(i for i, c in enumerate(base.conditions) if c.orders == (2, 1))
    ia = 1 - ib
    a = base.conditions[ia].point[0]
    b = base.conditions[ib].point[0]
    eps = as_complex(eps, "eps")
    targets = [
        _Target((a, 0j), ia, "exact"),
        _Target((b, 0j), ib, "exact"),
        _Target((b, eps), ib, "split"),
    ]
    return _split_correct(base, targets, eps, r, "correction_three", pre_perturb=False)


def correction_four(base: DiscCandidate, eps, r: float | None = None) -> DiscCandidate:
    """Disc through ``(a,0), (b,0), (b,eps), (a,eps)`` (nodes in that order).

    Two bases are accepted: an ``S_{aVbV}`` disc (double nodes at ``(a,0)``
    and ``(b,0)``, both split) and the three-node limit pattern of
    :func:`construct_nocoman_base` (simple nodes ``zeta_1, zeta_4`` at
    ``(a,0)``, double node at ``(b,0)``), where ``zeta_2`` is split and
    ``zeta_4`` is moved to ``(a,eps)``. A vanishing ``phi_2'`` at a split
    node is handled by a small pre-perturbation of the second coordinate.
    """
    doubles = _limit_points(base)
    eps = as_complex(eps, "eps")
    n = len(base.conditions)
    if n == 2 and len(doubles) == 2:
        # which double is "a": the first one, as in S_{aVbV}
        ia, ib = 0, 1
        a, b = base.conditions[ia].point[0], base.conditions[ib].point[0]
        targets = [
            _Target((a, 0j), ia, "exact"),
            _Target((b, 0j), ib, "exact"),
            _Target((b, eps), ib, "split"),
            _Target((a, eps), ia, "split"),
        ]
    elif n == 3 and len(doubles) == 1:
        ib = doubles[0]
        ia1, ia4 = [i for i in range(3) if i != ib]
        a = base.conditions[ia1].point[0]
        if base.conditions[ia4].point[0] != a or base.conditions[ia1].orders != (1, 1):
            raise DomainError("three-node base must hit (a,0) twice with simple nodes")
        b = base.conditions[ib].point[0]
        targets = [
            _Target((a, 0j), ia1, "exact"),
            _Target((b, 0j), ib, "exact"),
            _Target((b, eps), ib, "split"),
            _Target((a, eps), ia4, "retarget"),
        ]
    else:
        raise DomainError("unsupported base pattern for correction_four")
    return _split_correct(base, targets, eps, r, "correction_four", pre_perturb=True)


# ---------------------------------------------------------------------------
# sweeps


def eps_schedule(n: int = 6, direction: complex = 1.0) -> tuple[complex, ...]:
    """``10^-1, ..., 10^-n`` along the ray through ``direction``."""
    direction = as_complex(direction, "direction")
    if direction == 0:
        raise DomainError("direction must be nonzero")
    u = direction / abs(direction)
    return tuple(u * 10.0**-k for k in range(1, n + 1))


@dataclass(frozen=True)
class CollisionScenario:
    a: complex
    b: complex
    z: tuple[complex, complex]
    base: DiscCandidate
    pattern: str  # "three" | "four"
    eps: tuple[complex, ...] = DEFAULT_SCHEDULE

    def __post_init__(self):
        object.__setattr__(self, "a", as_complex(self.a, "a"))
        object.__setattr__(self, "b", as_complex(self.b, "b"))
        object.__setattr__(self, "z", as_point(self.z, "z"))
        object.__setattr__(self, "eps", tuple(as_complex(e, "eps") for e in self.eps))
        if self.pattern not in ("three", "four"):
            raise DomainError("pattern must be 'three' or 'four'")
        for e in self.eps:
            if e == 0 or abs(e) > EPS_MAX:
                raise DomainError(f"eps values must be nonzero with |eps| <= {EPS_MAX}, got {e}")
        rep = feasibility(self.base)
        if not rep.feasible:
            raise DomainError(f"base candidate is not feasible (residual {rep.residual:.3g}, excess {rep.boundedness_excess:.3g})")


@dataclass(frozen=True)
class SweepRow:
    eps: complex
    r: float | None
    nodes: tuple[complex | None, ...]
    objective: float
    residual: float
    green_eps: GreenValue
    gap: float
    method: str
    correction_objective: float | None = None
    green_upper: GreenValue | None = None  # three-pole rows: Green of the limit pair (a,0), (b,0)
    notice: str | None = None
    candidate: DiscCandidate | None = field(default=None, compare=False, repr=False)


def _subsystem_bound(scn: CollisionScenario) -> DiscCandidate:
    # (a,0), (b,0) only: an upper bound for every eps by monotonicity in the pole set
    return construct_horizontal(scn.z, [(scn.a, 1), (scn.b, 1)])


def _row(scn: CollisionScenario, eps: complex, sub: DiscCandidate) -> SweepRow:
    green = green_four_simple_eps(scn.z, scn.a, scn.b, eps)
    upper = green_horizontal_bidisc(scn.z, [(scn.a, 1), (scn.b, 1)]) if scn.pattern == "three" else None
    notice = None
    cand = None
    try:
        fn = correction_three if scn.pattern == "three" else correction_four
        cand = fn(scn.base, eps)
        rep = cand.info["feasibility"]
        if not rep.feasible:
            notice = f"correction infeasible (residual {rep.residual:.3g}, excess {rep.boundedness_excess:.3g})"
            cand = None
        else:
            notice = cand.info.get("notice")
    except (PlurigreenError, ZeroDivisionError) as exc:
        notice = f"{type(exc).__name__}: {exc}"
    sub_obj = sub.objective
    if cand is not None and cand.objective <= sub_obj:
        best, method, r = cand, cand.method, cand.info["r"]
    else:
        best, method, r = sub, "subsystem (a,0),(b,0)", None
    rep = feasibility(best)
    return SweepRow(
        eps=eps,
        r=r,
        nodes=best.nodes,
        objective=best.objective,
        residual=rep.residual,
        green_eps=green,
        gap=best.objective - float(green.value),
        method=method,
        correction_objective=None if cand is None else cand.objective,
        green_upper=upper,
        notice=notice,
        candidate=best,
    )


def sweep(scenario: CollisionScenario, workers: int = 1) -> list[SweepRow]:
    """One row per ``eps``; the row objective is the better of the correction and the subsystem bound.

    Rows are independent; with ``workers > 1`` they run in threads and come
    back in schedule order.
    """
    sub = _subsystem_bound(scenario)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(lambda e: _row(scenario, e, sub), scenario.eps))
    return [_row(scenario, e, sub) for e in scenario.eps]


def three_pole_scenario(a=0.5, b=-0.5, z=(0, 0.4), eps=DEFAULT_SCHEDULE, options: LempertOptions = LempertOptions()) -> CollisionScenario:
    """Base: best ``S_{a0bV}`` disc found by :func:`lempert_upper`."""
    rep = lempert_upper(z, s_system(a, b, "0V"), options)
    if rep.best is None:
        raise SearchFailure("no feasible S_a0bV disc found")
    return CollisionScenario(a, b, z, rep.best, "three", eps)


def four_pole_scenario(a=0.5, gamma=0.3, eps=DEFAULT_SCHEDULE, options: LempertOptions = LempertOptions()) -> CollisionScenario:
    """``z = (0, gamma)``, ``b = -a``; base from :func:`construct_nocoman_base` when ``gamma`` is in its range, else the best ``S_{aVbV}`` disc."""
    a = float(a)
    gamma = as_complex(gamma, "gamma")
    z = (0j, gamma)
    try:
        base = construct_nocoman_base(a, gamma)
    except ParameterRangeError:
        rep = lempert_upper(z, s_system(a, -a, "VV"), options)
        if rep.best is None:
            raise SearchFailure("no feasible S_aVbV disc found")
        base = rep.best
    return CollisionScenario(a, -a, z, base, "four", eps)


# ---------------------------------------------------------------------------
# counterexample report


@dataclass(frozen=True)
class CounterexampleRow:
    eps: complex
    green_eps: GreenValue
    best_objective: float
    best_method: str
    n_candidates: int
    min_objective: float
    chain_holds: bool  # every candidate objective >= G^eps - 1e-6
    certificates: tuple[tuple[str, SchwarzReport], ...]
    gap: float  # best objective - G^eps

    @property
    def certificates_hold(self) -> bool:
        return all(rep.all_hold for _, rep in self.certificates)


@dataclass(frozen=True)
class CounterexampleReport:
    a: float
    gamma: complex
    green_limit: float  # 2 log a
    tilde_reference: float  # L_{a0b0}(0, gamma) = log|gamma|
    rows: tuple[CounterexampleRow, ...]
    statement: str


def counterexample_report(
    a: float = 0.5,
    gamma=0.4,
    eps: Sequence[complex] = (1e-2, 1e-3),
    options: LempertOptions = LempertOptions(restarts=50),
    base_options: LempertOptions | None = None,
) -> CounterexampleReport:
    """Certified quantities around the four-pole collision with ``b = -a``, ``z = (0, gamma)``.

    For each ``eps``: the closed-form Green value, the best simple-pole disc
    found by :func:`coman_upper` (seeded with :func:`correction_four` applied
    to the ``S_{aVbV}`` discs), the check that no candidate goes below the
    Green value, and the Schwarz certificates on every candidate with the
    collision pattern. The strict inequality ``G < L`` itself is only
    reported as consistent, never claimed.
    """
    a = float(a)
    gamma = as_complex(gamma, "gamma")
    if not 0.0 < a < 1.0:
        raise ParameterRangeError("a must lie in (0, 1)")
    if not (a**1.5 < abs(gamma) < a):
        raise ParameterRangeError(f"need a^(3/2) < |gamma| < a, i.e. {a ** 1.5:.6g} < |gamma| < {a:.6g}; got {abs(gamma):.6g}")
    for e in eps:
        e = as_complex(e, "eps")
        if e == 0 or abs(e) > EPS_MAX:
            raise DomainError(f"eps values must be nonzero with |eps| <= {EPS_MAX}")
    z = (0j, gamma)
    b = -a
    base_rep = lempert_upper(z, s_system(a, b, "VV"), base_options or LempertOptions(seed=options.seed, budget=options.budget))
    bases = sorted(base_rep.candidates, key=lambda c: c.objective)[:3]
    rows = []
    for e in eps:
        e = as_complex(e)
        seeds = []
        for base in bases:
            try:
                c = correction_four(base, e)
            except (PlurigreenError, ZeroDivisionError):
                continue
            if c.info["feasibility"].feasible:
                seeds.append(c)
        system = simple_system([(a, 0), (b, 0), (b, e), (a, e)])
        rep = coman_upper(z, system, options, extra=seeds)
        green = green_four_simple_eps(z, a, b, e)
        g = float(green.value)
        objs = [c.objective for c in rep.candidates]
        certs = []
        for c in rep.candidates:
            sr = schwarz_certificates(c, a, gamma)
            if sr.checked:
                certs.append((c.method, sr))
        rows.append(
            CounterexampleRow(
                eps=e,
                green_eps=green,
                best_objective=rep.value,
                best_method=rep.method,
                n_candidates=len(objs),
                min_objective=min(objs),
                chain_holds=all(o >= g - 1e-6 for o in objs),
                certificates=tuple(certs),
                gap=rep.value - g,
            )
        )
    consistent = all(r.chain_holds and r.certificates_hold and r.gap > 0 for r in rows)
    statement = (
        "G < L for small eps: known result, numerically consistent"
        if consistent
        else "G < L for small eps: known result; numerical checks inconclusive here"
    )
    return CounterexampleReport(a, gamma, 2 * math.log(a), math.log(abs(gamma)), tuple(rows), statement)
