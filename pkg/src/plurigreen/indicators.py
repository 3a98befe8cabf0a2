"""Max-type indicators ``Psi(z) = max_j c_j log|z_j|`` and pole systems."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._base import JET_TOL, NEG_INF, DomainError, as_point, safe_log
from .disc_algebra import AnalyticDisc, jet_at


@dataclass(frozen=True)
class Indicator:
    """Positive integer coefficients ``c`` of ``max_j c_j log|z_j|``."""

    c: tuple[int, ...]

    def __post_init__(self):
        c = tuple(self.c)
        for cj in c:
            if isinstance(cj, bool) or not float(cj).is_integer() or cj < 1:
                raise DomainError(f"indicator coefficients must be positive integers, got {c}")
        object.__setattr__(self, "c", tuple(int(cj) for cj in c))

    @property
    def dim(self) -> int:
        return len(self.c)

    @property
    def mass(self) -> int:
        return mass(self)

    def __str__(self):
        return "(" + ",".join(map(str, self.c)) + ")"


PSI_0 = Indicator((1, 1))
PSI_H = Indicator((2, 1))
PSI_V = Indicator((1, 2))


def evaluate(ind: Indicator, w):
    """``max_j c_j log|w_j|``; ``NEG_INF`` when every coordinate vanishes."""
    w = as_point(w, "w")
    if len(w) != ind.dim:
        raise DomainError("dimension mismatch between indicator and point")
    if any(abs(x) > 1.0 + 1e-15 for x in w):
        raise DomainError("point lies outside the closed unit polydisc")
    best = NEG_INF
    for cj, x in zip(ind.c, w):
        best = max(best, cj * safe_log(abs(x)))
    return best


def mass(ind: Indicator) -> int:
    """Monge-Ampere mass ``prod_j c_j``."""
    return math.prod(ind.c)


def required_orders(ind: Indicator) -> tuple[int, ...]:
    """Vanishing order ``mass / c_j`` needed in each coordinate at a node."""
    tau = mass(ind)
    return tuple(tau // cj for cj in ind.c)


def relaxations(ind: Indicator) -> list[Indicator]:
    """All indicators ``c'`` with ``1 <= c'_j <= c_j``; these are the ones dominating ``ind``."""
    return [Indicator(c) for c in itertools.product(*(range(1, cj + 1) for cj in ind.c))]


@dataclass(frozen=True)
class SingularityReport:
    satisfied: bool
    orders: tuple[int, ...]
    required: tuple[int, ...]
    residual: float


def vanishing_residual(disc: AnalyticDisc, a, orders: Sequence[int], zeta0) -> float:
    """Largest Taylor coefficient of ``disc_j - a_j`` at ``zeta0`` below order ``orders[j]``."""
    a = as_point(a, "a")
    worst = 0.0
    for f, aj, mj in zip(disc.coords, a, orders):
        coeffs = jet_at(f, zeta0, mj - 1).coeffs
        worst = max(worst, abs(coeffs[0] - aj), *(abs(c) for c in coeffs[1:]))
    return worst


def singularity_check(disc: AnalyticDisc, a, ind: Indicator, zeta0, jet_tol: float = JET_TOL) -> SingularityReport:
    """Does ``Psi(disc - a) <= mass * log|zeta - zeta0| + C`` hold near ``zeta0``?

    Equivalent to ``min_j c_j * ord_j >= mass``, where ``ord_j`` is the
    vanishing order of ``disc_j - a_j`` at ``zeta0`` (coefficients below
    ``jet_tol`` count as zero).
    """
    a = as_point(a, "a")
    req = required_orders(ind)
    top = max(req)
    orders = []
    residual = 0.0
    for f, aj, mj in zip(disc.coords, a, req):
        coeffs = list(jet_at(f, zeta0, top).coeffs)
        coeffs[0] -= aj
        k = 0
        while k < len(coeffs) and abs(coeffs[k]) <= jet_tol:
            k += 1
        orders.append(k)
        residual = max(residual, max(abs(c) for c in coeffs[:mj]))
    ok = min(cj * oj for cj, oj in zip(ind.c, orders)) >= mass(ind)
    return SingularityReport(ok, tuple(orders), req, residual)


@dataclass(frozen=True)
class PoleSystem:
    """Poles ``a_j`` in the open polydisc with their indicators."""

    poles: tuple[tuple[tuple[complex, ...], Indicator], ...]

    def __post_init__(self):
        poles = []
        for a, ind in self.poles:
            a = as_point(a, "pole")
            if not isinstance(ind, Indicator):
                ind = Indicator(tuple(ind))
            if len(a) != ind.dim:
                raise DomainError("pole and indicator dimensions differ")
            if any(abs(x) >= 1.0 for x in a):
                raise DomainError(f"pole {a} is not in the open polydisc")
            poles.append((a, ind))
        if not poles:
            raise DomainError("a pole system needs at least one pole")
        dims = {len(a) for a, _ in poles}
        if len(dims) != 1:
            raise DomainError("all poles must have the same dimension")
        for (a, _), (b, _) in itertools.combinations(poles, 2):
            if np.allclose(a, b, rtol=0, atol=1e-14):
                raise DomainError(f"poles must be distinct, got {a} twice")
        object.__setattr__(self, "poles", tuple(poles))

    @property
    def dim(self) -> int:
        return len(self.poles[0][0])

    def __len__(self):
        return len(self.poles)

    @property
    def points(self) -> list[tuple[complex, ...]]:
        return [a for a, _ in self.poles]

    @property
    def indicators(self) -> list[Indicator]:
        return [ind for _, ind in self.poles]

    @property
    def masses(self) -> list[int]:
        return [mass(ind) for ind in self.indicators]

    @property
    def total_mass(self) -> int:
        return sum(self.masses)

    def subsystem(self, keep: Sequence[int]) -> "PoleSystem":
        return PoleSystem(tuple(self.poles[i] for i in keep))

    def with_indicators(self, inds: Sequence[Indicator]) -> "PoleSystem":
        return PoleSystem(tuple((a, ind) for a, ind in zip(self.points, inds)))

    def label(self) -> str:
        parts = []
        for a, ind in self.poles:
            coords = ",".join(_fmt_complex(x) for x in a)
            parts.append(f"({coords})^{ind}")
        return " ".join(parts)


def _fmt_complex(x: complex) -> str:
    if x.imag == 0:
        return f"{x.real:g}"
    return f"{x.real:g}{x.imag:+g}i"


def simple_system(points, weights: Sequence[int] | None = None) -> PoleSystem:
    """Poles with isotropic indicators ``c = (nu, ..., nu)``; integer weights only."""
    points = [as_point(p) for p in points]
    n = len(points[0])
    weights = [1] * len(points) if weights is None else list(weights)
    return PoleSystem(tuple((p, Indicator((nu,) * n)) for p, nu in zip(points, weights)))


def s_system(a: complex, b: complex, kinds: str) -> PoleSystem:
    """The bidisc systems ``S_{a?b?}`` with poles ``(a,0), (b,0)``.

    ``kinds`` is a two-letter string over ``0``, ``H``, ``V``, e.g. ``"0V"``
    for ``S_{a0bV}``.
    """
    table = {"0": PSI_0, "H": PSI_H, "V": PSI_V}
    ka, kb = kinds.upper()
    return PoleSystem((((a, 0j), table[ka]), ((b, 0j), table[kb])))
