"""Bounded interpolation in one variable.

Taylor-coefficient transport under Moebius precomposition, Hermite
interpolation by disc self-maps (Schur algorithm), and the construction of
a self-map ``f = B0 * (g o mobius(zeta*))`` with a prescribed jet at
``zeta*``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from ._base import AdmissibilityError, DomainError, SearchFailure, as_complex
from .disc_algebra import (
    RationalMap,
    compose_jet,
    jet_at,
    mobius_map,
    series_div,
    series_mul,
    sup_norm_circle,
)

RHO_MAX = 1.0 - 1e-9


@dataclass(frozen=True)
class JetSpec:
    """Target jet ``gamma + O(h^m)`` at ``base``."""

    gamma: complex
    m: int
    base: complex

    def __post_init__(self):
        if abs(self.gamma) >= 1:
            raise DomainError("|gamma| must be < 1")
        if self.m < 1:
            raise DomainError("m must be >= 1")


# ---------------------------------------------------------------------------
# transport


def transport_matrix(zeta_star, m: int) -> np.ndarray:
    """Lower-triangular ``T`` with ``coeffs of g o mobius(zeta*) at zeta* = T @ coeffs of g at 0``.

    Size ``(m+1) x (m+1)``, covering orders ``0..m``.
    """
    zs = as_complex(zeta_star, "zeta_star")
    if abs(zs) >= 1:
        raise DomainError("zeta_star must lie in the open disc")
    T = np.zeros((m + 1, m + 1), dtype=complex)
    T[0, 0] = 1.0
    if zs == 0:
        # mobius(0, h) = -h, so g(-h)
        for n in range(1, m + 1):
            T[n, n] = (-1) ** n
        return T
    s = 1.0 - abs(zs) ** 2
    zb = zs.conjugate()
    for n in range(1, m + 1):
        for j in range(1, n + 1):
            T[n, j] = (-1) ** j * math.comb(n - 1, j - 1) * zb ** (n - j) / s**n
    return T


def inverse_transport_matrix(zeta_star, m: int) -> np.ndarray:
    """Inverse of :func:`transport_matrix`, read off from the involution property."""
    zs = as_complex(zeta_star, "zeta_star")
    if abs(zs) >= 1:
        raise DomainError("zeta_star must lie in the open disc")
    C = np.zeros((m + 1, m + 1), dtype=complex)
    C[0, 0] = 1.0
    if zs == 0:
        for n in range(1, m + 1):
            C[n, n] = (-1) ** n
        return C
    s = 1.0 - abs(zs) ** 2
    zb = zs.conjugate()
    for j in range(1, m + 1):
        for n in range(1, j + 1):
            C[j, n] = (-1) ** n * math.comb(j - 1, n - 1) * s**n * zb ** (j - n)
    return C


def transport(coeffs: Sequence[complex], zeta_star, m: int | None = None) -> np.ndarray:
    """Taylor coefficients at ``zeta*`` of ``g o mobius(zeta*)``, given those of ``g`` at 0."""
    a = np.asarray(coeffs, dtype=complex)
    m = a.size - 1 if m is None else m
    a = np.pad(a, (0, max(0, m + 1 - a.size)))[: m + 1]
    return transport_matrix(zeta_star, m) @ a


def inverse_transport(coeffs: Sequence[complex], zeta_star, m: int | None = None) -> np.ndarray:
    """Taylor coefficients of ``g`` at 0 from those of ``g o mobius(zeta*)`` at ``zeta*``."""
    a = np.asarray(coeffs, dtype=complex)
    m = a.size - 1 if m is None else m
    a = np.pad(a, (0, max(0, m + 1 - a.size)))[: m + 1]
    return inverse_transport_matrix(zeta_star, m) @ a


# ---------------------------------------------------------------------------
# Hermite data and the Schur algorithm


@dataclass(frozen=True)
class SchurResult:
    """Outcome of the Schur recursion on Hermite data.

    ``steps`` lists ``(node, parameter)`` pairs in processing order;
    ``excess`` is the total amount by which parameters had to be pulled
    back into the disc (zero iff the data is solvable with margin).
    """

    steps: tuple[tuple[complex, complex], ...]
    excess: float
    max_parameter: float


def _mobius_series_ratio(w: complex, x: complex, n: int) -> list[complex]:
    # series in h of (1 - conj(w) (x+h)) / (w - (x+h)), i.e. 1 / mobius(w, x+h)
    wb = w.conjugate()
    return series_div([1 - wb * x, -wb], [w - x, -1.0], n)


def schur_parameters(data: Sequence[tuple[complex, Sequence[complex]]], rho_max: float = RHO_MAX) -> SchurResult:
    """Run the Schur algorithm on Hermite data ``[(node, jet), ...]``.

    ``jet`` holds Taylor coefficients at ``node`` (value first). Nodes must be
    distinct points of the open disc. A parameter of modulus above
    ``rho_max`` is clipped and its overshoot is added to ``excess``.
    """
    work = [(as_complex(x), [complex(c) for c in jet]) for x, jet in data if len(jet)]
    nodes = [x for x, _ in work]
    if len(set(nodes)) != len(nodes):
        raise DomainError("interpolation nodes must be distinct")
    steps = []
    excess = 0.0
    top = 0.0
    while work:
        w, jw = work[0]
        v = jw[0]
        av = abs(v)
        top = max(top, av)
        if av > rho_max:
            excess += min(av - rho_max, 10.0)
            v = v / av * rho_max
        steps.append((w, v))
        vb = v.conjugate()
        new = []
        for x, jet in work:
            n = len(jet)
            den = [(-vb * c) for c in jet]
            den[0] += 1.0
            if abs(den[0]) < 1e-300:
                den[0] = 1e-300
            num = [-c for c in jet]
            num[0] += v
            N = series_div(num, den, n)
            if x == w:
                if n == 1:
                    continue
                s = 1.0 - abs(w) ** 2
                jet1 = series_mul(N[1:], [-s, w.conjugate()], n - 1)
            else:
                jet1 = series_mul(N, _mobius_series_ratio(w, x, n), n)
            new.append((x, jet1))
        work = new
    return SchurResult(tuple(steps), excess, top)


def schur_reconstruct(steps: Sequence[tuple[complex, complex]], tail: RationalMap | None = None) -> RationalMap:
    """Invert the Schur recursion, starting from ``tail`` (default the zero map)."""
    f = RationalMap.constant(0) if tail is None else tail
    p = np.array(f.numerator, dtype=complex)
    q = np.array(f.denominator, dtype=complex)
    for w, v in reversed(steps):
        # f <- (v - M f) / (1 - conj(v) M f) with M = mobius(w, .), kept as p/q
        a = np.array([1.0, -np.conj(w)])  # denominator of M
        b = np.array([w, -1.0])  # numerator of M
        aq, bp = P.polymul(a, q), P.polymul(b, p)
        p, q = P.polysub(v * aq, bp), P.polysub(aq, np.conj(v) * bp)
    return RationalMap(p, q)


def schur_interpolate(data, tail: RationalMap | None = None, rho_max: float = RHO_MAX) -> tuple[RationalMap, SchurResult]:
    """Bounded rational interpolant of Hermite data; exact when ``excess == 0``."""
    res = schur_parameters(data, rho_max)
    return schur_reconstruct(res.steps, tail), res


# ---------------------------------------------------------------------------
# jets at the origin: eps(r, m) and schur_jet


def _majorant_step(R: float, t: list[float]) -> tuple[float, list[float]]:
    # positive-coefficient bound for one Schur step at 0 with |value| <= R
    n = len(t) + 1
    tt = [0.0] + list(t)
    q = 1.0 - R * R
    # t/(q) * 1/(1 - R t/q) as a positive series
    scaled = [c / q for c in tt]
    geom = [0.0] * n
    geom[0] = 1.0
    power = [1.0] + [0.0] * (n - 1)
    for _ in range(1, n):
        power = [x.real for x in series_mul(power, [R * c for c in scaled], n)]
        geom = [g + p for g, p in zip(geom, power)]
    M = [x.real for x in series_mul(scaled, geom, n)]
    return M[1], M[2:]


def _majorant_levels(r: float, eps: float, m: int) -> float:
    """Largest value bound met by the Schur recursion for ``|beta| <= r``, ``|a_j| <= eps``."""
    R, t = r, [eps] * (m - 1)
    worst = 0.0
    while t:
        R, t = _majorant_step(R, t)
        worst = max(worst, R)
        if not math.isfinite(R) or R >= 1.0:
            return math.inf
    return worst


def epsilon_bound(r: float, m: int) -> float:
    """Tail bound ``eps(r, m)``: coefficients up to this size keep every Schur value ``<= r``.

    Computed from a positive majorant of the recursion, maximized at the
    corner ``|a_j| = eps``, and solved by bisection. ``eps(r, 2) = r(1 - r^2)``.
    """
    if not 0.0 < r < 1.0:
        raise DomainError("r must lie in (0, 1)")
    if m <= 1:
        return math.inf
    lo, hi = 0.0, r * (1.0 - r * r)
    if _majorant_levels(r, hi, m) <= r:
        return hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _majorant_levels(r, mid, m) <= r:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return lo


def schur_jet(beta, tail: Sequence[complex], r: float) -> RationalMap:
    """Disc self-map ``g = beta + a_1 z + ... + a_{m-1} z^{m-1} + O(z^m)``.

    Requires ``|beta| <= r`` and ``|a_j| <= eps(r, m)``; otherwise raises
    :class:`AdmissibilityError`.
    """
    beta = as_complex(beta, "beta")
    tail = [as_complex(c, "a_j") for c in tail]
    m = len(tail) + 1
    if not 0.0 < r < 1.0:
        raise DomainError("r must lie in (0, 1)")
    if abs(beta) > r:
        raise AdmissibilityError(f"|beta|={abs(beta):.6g} exceeds r={r:.6g}")
    if tail:
        eps = epsilon_bound(r, m)
        worst = max(abs(c) for c in tail)
        if worst > eps:
            raise AdmissibilityError(f"tail coefficient {worst:.6g} exceeds eps(r, m)={eps:.6g}")
    g, res = schur_interpolate([(0j, [beta] + tail)])
    if res.excess > 0:
        raise AdmissibilityError("Schur recursion left the disc")
    return g


# ---------------------------------------------------------------------------
# prescribed jet against a Blaschke product


@dataclass(frozen=True)
class MultPNResult:
    zeta_star: complex
    g: RationalMap
    f: RationalMap
    tilde_coeffs: tuple[complex, ...]


@dataclass(frozen=True)
class MultPNCheck:
    jet_error: float
    direct_jet_error: float
    f_sup: float
    g_sup: float


def _is_blaschke(B: RationalMap, samples: int = 512) -> bool:
    if not B.has_no_poles_in_closed_disc():
        return False
    th = 2 * np.pi * np.arange(samples) / samples
    return bool(np.max(np.abs(np.abs(B(np.exp(1j * th))) - 1.0)) < 1e-9)


def multpn_construct(
    B0: RationalMap,
    gamma,
    m: int,
    eta: float = 0.5,
    max_halvings: int = 40,
    criterion: str = "schur",
    margin: float = 1e-3,
) -> MultPNResult:
    """Find ``zeta*`` and a self-map ``f = B0 * (g o mobius(zeta*))`` with ``f = gamma + O(h^m)`` at ``zeta*``.

    ``zeta*`` runs over radii ``1 - 2^-k eta`` with 32 arguments each; the
    first admissible point wins. With ``criterion="schur"`` a point is
    admissible when every Schur parameter of the transported jet of ``g``
    stays below ``1 - margin`` (necessary and sufficient up to the margin);
    ``criterion="box"`` uses the sufficient coefficient box of
    :func:`schur_jet` with ``r = max(|a_0|, 1/sqrt(3))`` instead. The Schur
    test accepts points farther from the circle, where the rational
    representation of ``f`` is better conditioned.
    """
    gamma = as_complex(gamma, "gamma")
    if abs(gamma) >= 1:
        raise DomainError("|gamma| must be < 1")
    if m < 1:
        raise DomainError("m must be >= 1")
    if criterion not in ("schur", "box"):
        raise ValueError("criterion must be 'schur' or 'box'")
    if not _is_blaschke(B0):
        raise DomainError("B0 is not a finite Blaschke product")
    blocking = "no radius tried"
    for k in range(max_halvings + 1):
        rad = 1.0 - 2.0 ** (-k) * eta
        if rad <= 0:
            continue
        for i in range(32):
            zs = rad * np.exp(2j * np.pi * i / 32)
            bj = jet_at(B0, zs, m - 1).coeffs
            if abs(bj[0]) < 1e-12:
                blocking = "B0 vanishes at the candidate point"
                continue
            at = series_div([gamma], list(bj), m)
            if abs(at[0]) >= 1:
                blocking = f"|gamma / B0(zeta*)| = {abs(at[0]):.6g} >= 1"
                continue
            a = inverse_transport(at, zs)
            if criterion == "box":
                r = max(abs(a[0]), 1.0 / math.sqrt(3.0))
                if r >= 1.0:
                    blocking = "value too close to the circle"
                    continue
                try:
                    g = schur_jet(a[0], list(a[1:]), r)
                except AdmissibilityError as exc:
                    blocking = str(exc)
                    continue
            else:
                g, res = schur_interpolate([(0j, list(a))], rho_max=1.0 - margin)
                if res.excess > 0:
                    blocking = f"Schur parameter {res.max_parameter:.6g} above {1.0 - margin:.6g}"
                    continue
            f = B0 * g.compose(mobius_map(zs))
            return MultPNResult(complex(zs), g, f, tuple(at))
    raise SearchFailure(f"no admissible zeta* within the annulus; last blocking constraint: {blocking}")


def multpn_check(res: MultPNResult, B0: RationalMap, gamma, m: int) -> MultPNCheck:
    """Verify a construction of :func:`multpn_construct`.

    The jet of ``f`` at ``zeta*`` is computed twice: from the factors
    ``B0`` and ``g o mobius(zeta*)`` by series arithmetic, and from the
    expanded rational map. Near the circle the expanded monomial form loses
    digits to cancellation, so the factored value is the reliable one.
    """
    zs = res.zeta_star
    inner = compose_jet(res.g, jet_at(mobius_map(zs), zs, m - 1))
    fac = list((jet_at(B0, zs, m - 1) * inner).coeffs)
    fac[0] -= gamma
    try:
        direct = list(jet_at(res.f, zs, m - 1).coeffs)
        direct[0] -= gamma
        direct_err = max(abs(x) for x in direct)
    except ZeroDivisionError:
        direct_err = math.inf
    return MultPNCheck(max(abs(x) for x in fac), direct_err, sup_norm_circle(res.f, 1.0, 4096), sup_norm_circle(res.g, 1.0, 4096))
