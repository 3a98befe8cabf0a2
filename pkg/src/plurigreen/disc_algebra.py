"""Rational maps of the unit disc: Moebius maps, Blaschke products, jets.

Every analytic disc in this package is a tuple of :class:`RationalMap`
objects. Coefficient lists are stored in ascending degree order, so
``RationalMap([1, 2], [1])`` is ``1 + 2*zeta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from ._base import (
    BOUNDEDNESS_TOL,
    CIRCLE_SAMPLES,
    DEGREE_CAP,
    ROOT_MARGIN,
    CapacityError,
    DomainError,
    PoleAtPointError,
    as_complex,
)

_TRIM_REL = 1e-15


def _trim(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    if c.size == 0:
        return np.zeros(1, dtype=complex)
    scale = np.max(np.abs(c))
    if scale == 0.0:
        return np.zeros(1, dtype=complex)
    keep = np.nonzero(np.abs(c) > _TRIM_REL * scale)[0]
    return c[: keep[-1] + 1].copy()


# ---------------------------------------------------------------------------
# truncated power series on plain lists (hot path of the Schur recursion)


def series_mul(a: Sequence[complex], b: Sequence[complex], n: int) -> list[complex]:
    out = [0j] * n
    for i in range(min(n, len(a))):
        ai = a[i]
        if ai == 0:
            continue
        for j in range(min(n - i, len(b))):
            out[i + j] += ai * b[j]
    return out


def series_div(a: Sequence[complex], b: Sequence[complex], n: int) -> list[complex]:
    """Coefficients of ``a/b`` through order ``n-1``; requires ``b[0] != 0``."""
    b0 = b[0]
    if b0 == 0:
        raise PoleAtPointError("series division by a series vanishing at the base point")
    out = [0j] * n
    lb = len(b)
    for k in range(n):
        s = a[k] if k < len(a) else 0j
        for j in range(1, min(k, lb - 1) + 1):
            s -= b[j] * out[k - j]
        out[k] = s / b0
    return out


def taylor_shift(c: np.ndarray, x0: complex, n: int | None = None) -> np.ndarray:
    """Taylor coefficients at ``x0`` of the polynomial with coefficients ``c``.

    Repeated synthetic division; returns the first ``n`` coefficients.
    """
    work = np.array(c, dtype=complex)
    deg = work.size - 1
    n = deg + 1 if n is None else n
    out = np.zeros(n, dtype=complex)
    for k in range(min(n, deg + 1)):
        # Horner pass: evaluate and deflate in place
        acc = 0j
        m = work.size
        quot = np.empty(max(m - 1, 0), dtype=complex)
        for i in range(m - 1, -1, -1):
            acc = acc * x0 + work[i]
            if i > 0:
                quot[i - 1] = acc
        out[k] = acc
        work = quot
        if work.size == 0:
            break
    return out


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalMap:
    """Quotient of two complex polynomials, ``numerator / denominator``.

    Instances are normalized on construction: negligible top coefficients are
    dropped and the denominator is scaled so that its constant term is 1
    (when nonzero). Degrees above the cap raise :class:`CapacityError`.
    """

    numerator: np.ndarray
    denominator: np.ndarray = field(default_factory=lambda: np.ones(1, dtype=complex))
    # exact factored form, when the map was built as one (see mobius_product);
    # arithmetic on the map drops it
    factored: "MobiusProduct | None" = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        num = _trim(self.numerator)
        den = _trim(self.denominator)
        if not np.all(np.isfinite(num)) or not np.all(np.isfinite(den)):
            raise DomainError("rational map coefficients must be finite")
        if np.all(den == 0):
            raise PoleAtPointError("zero denominator")
        if max(num.size, den.size) - 1 > DEGREE_CAP:
            raise CapacityError(
                f"degree {max(num.size, den.size) - 1} exceeds the cap of {DEGREE_CAP}"
            )
        if den[0] != 0:
            num = num / den[0]
            den = den / den[0]
        num.setflags(write=False)
        den.setflags(write=False)
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    # construction helpers
    @classmethod
    def constant(cls, c) -> "RationalMap":
        return cls(np.array([as_complex(c)]))

    @classmethod
    def identity(cls) -> "RationalMap":
        return cls(np.array([0, 1], dtype=complex))

    @classmethod
    def polynomial(cls, coeffs: Iterable[complex]) -> "RationalMap":
        return cls(np.array(list(coeffs), dtype=complex))

    @property
    def degree(self) -> int:
        return max(self.numerator.size, self.denominator.size) - 1

    def __call__(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        if self.factored is not None:
            return self.factored(zeta)
        d = P.polyval(zeta, self.denominator)
        if np.any(d == 0):
            raise PoleAtPointError("denominator vanishes at the evaluation point")
        out = P.polyval(zeta, self.numerator) / d
        return complex(out) if out.ndim == 0 else out

    # arithmetic
    def _coerce(self, other) -> "RationalMap":
        if isinstance(other, RationalMap):
            return other
        return RationalMap.constant(other)

    def __add__(self, other):
        other = self._coerce(other)
        if np.array_equal(self.denominator, other.denominator):
            return RationalMap(P.polyadd(self.numerator, other.numerator), self.denominator)
        num = P.polyadd(
            P.polymul(self.numerator, other.denominator),
            P.polymul(other.numerator, self.denominator),
        )
        return RationalMap(num, P.polymul(self.denominator, other.denominator))

    __radd__ = __add__

    def __neg__(self):
        return RationalMap(-self.numerator, self.denominator)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return RationalMap(
            P.polymul(self.numerator, other.numerator),
            P.polymul(self.denominator, other.denominator),
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if np.all(other.numerator == 0):
            raise PoleAtPointError("division by the zero map")
        return RationalMap(
            P.polymul(self.numerator, other.denominator),
            P.polymul(self.denominator, other.numerator),
        )

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return RationalMap.constant(1) / (self ** (-k))
        return RationalMap(P.polypow(self.numerator, k), P.polypow(self.denominator, k))

    def compose(self, inner: "RationalMap") -> "RationalMap":
        """The map ``zeta -> self(inner(zeta))``."""
        d = self.degree
        p, q = inner.numerator, inner.denominator
        p_pows = [np.ones(1, dtype=complex)]
        q_pows = [np.ones(1, dtype=complex)]
        for _ in range(d):
            p_pows.append(P.polymul(p_pows[-1], p))
            q_pows.append(P.polymul(q_pows[-1], q))

        def homog(c):
            acc = np.zeros(1, dtype=complex)
            for k, ck in enumerate(c):
                if ck != 0:
                    acc = P.polyadd(acc, ck * P.polymul(p_pows[k], q_pows[d - k]))
            return acc

        num = np.zeros(d + 1, dtype=complex)
        num[: self.numerator.size] = self.numerator
        den = np.zeros(d + 1, dtype=complex)
        den[: self.denominator.size] = self.denominator
        return RationalMap(homog(num), homog(den))

    def scaled_argument(self, r: complex) -> "RationalMap":
        """The map ``zeta -> self(r * zeta)``."""
        num = self.numerator * r ** np.arange(self.numerator.size)
        den = self.denominator * r ** np.arange(self.denominator.size)
        return RationalMap(num, den)

    def poles(self) -> np.ndarray:
        if self.denominator.size < 2:
            return np.zeros(0, dtype=complex)
        return P.polyroots(self.denominator)

    def has_no_poles_in_closed_disc(self, margin: float = ROOT_MARGIN) -> bool:
        """Companion-matrix certificate that the denominator has no root in |zeta| <= 1.

        A factored map is decided exactly: the inner product is bounded by
        ``|scale|`` on the closed disc, so the outer Moebius map has no pole
        there when ``|scale * outer| < 1``.
        """
        if self.factored is not None:
            fac = self.factored
            return fac.outer is None or abs(fac.scale * fac.outer) < 1.0 - margin
        return bool(np.all(np.abs(self.poles()) > 1.0 + margin))

    def derivative_map(self) -> "RationalMap":
        """First derivative by the quotient rule."""
        n, d = self.numerator, self.denominator
        num = P.polysub(P.polymul(P.polyder(n), d), P.polymul(n, P.polyder(d)))
        return RationalMap(num, P.polymul(d, d))


def rational_eval(f: RationalMap, zeta) -> complex:
    return f(as_complex(zeta, "zeta"))


def rational_derivative(f: RationalMap, zeta, order: int = 1) -> complex:
    """``order``-th derivative of ``f`` at ``zeta``.

    Uses the closed recursion ``f^(k) = P_k / D^(k+1)`` with
    ``P_{k+1} = P_k' D - (k+1) P_k D'``, which keeps the degree linear in k.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    zeta = as_complex(zeta, "zeta")
    d = np.asarray(f.denominator)
    dval = P.polyval(zeta, d)
    if dval == 0:
        raise PoleAtPointError("denominator vanishes at the evaluation point")
    pk = np.asarray(f.numerator)
    dd = P.polyder(d) if d.size > 1 else np.zeros(1, dtype=complex)
    for k in range(order):
        pk = P.polysub(P.polymul(P.polyder(pk) if pk.size > 1 else [0j], d), (k + 1) * P.polymul(pk, dd))
    return complex(P.polyval(zeta, pk) / dval ** (order + 1))


@dataclass(frozen=True)
class Jet:
    """Taylor coefficients ``coeffs[k]`` of a function at ``base``."""

    base: complex
    coeffs: tuple[complex, ...]

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __mul__(self, other: "Jet") -> "Jet":
        if other.base != self.base:
            raise ValueError("jets at different base points")
        n = min(len(self.coeffs), len(other.coeffs))
        return Jet(self.base, tuple(series_mul(self.coeffs, other.coeffs, n)))

    def __add__(self, other: "Jet") -> "Jet":
        if other.base != self.base:
            raise ValueError("jets at different base points")
        n = min(len(self.coeffs), len(other.coeffs))
        return Jet(self.base, tuple(self.coeffs[k] + other.coeffs[k] for k in range(n)))

    def __sub__(self, other: "Jet") -> "Jet":
        if other.base != self.base:
            raise ValueError("jets at different base points")
        n = min(len(self.coeffs), len(other.coeffs))
        return Jet(self.base, tuple(self.coeffs[k] - other.coeffs[k] for k in range(n)))

    def derivative(self, k: int) -> complex:
        return self.coeffs[k] * math.factorial(k)


def jet_at(f: RationalMap, zeta0, order: int) -> Jet:
    """Taylor jet of ``f`` at ``zeta0`` through ``order``.

    Uses the factored form when ``f`` carries one, else series division of
    the Taylor-shifted numerator and denominator.
    """
    zeta0 = as_complex(zeta0, "zeta0")
    if f.factored is not None:
        return f.factored.jet(zeta0, order)
    n = order + 1
    num = taylor_shift(f.numerator, zeta0, n)
    den = taylor_shift(f.denominator, zeta0, n)
    # size of the terms summed when evaluating the denominator at zeta0
    scale = float(np.sum(np.abs(f.denominator) * abs(zeta0) ** np.arange(f.denominator.size)))
    if abs(den[0]) <= 1e-13 * scale:
        raise PoleAtPointError(f"rational map has a pole at {zeta0}")
    return Jet(zeta0, tuple(series_div(list(num), list(den), n)))


def compose_jet(f: RationalMap, inner: Jet) -> Jet:
    """Jet of ``f o h`` at ``inner.base`` from the jet of ``h`` there (chain rule on series)."""
    n = len(inner.coeffs)
    outer = jet_at(f, inner.coeffs[0], n - 1).coeffs
    delta = [0j] + list(inner.coeffs[1:])
    out = [0j] * n
    power = [1.0 + 0j] + [0j] * (n - 1)
    for k in range(n):
        if k:
            power = series_mul(power, delta, n)
        for i in range(n):
            out[i] += outer[k] * power[i]
    return Jet(inner.base, tuple(out))


# ---------------------------------------------------------------------------
# Moebius maps and Blaschke products


def _check_open_disc(xi: complex, name: str = "xi") -> complex:
    xi = as_complex(xi, name)
    if abs(xi) >= 1.0:
        raise DomainError(f"{name} must lie in the open unit disc, got |{name}|={abs(xi)}")
    return xi


def mobius(xi, zeta):
    """The disc involution exchanging ``xi`` and 0: ``(xi - zeta)/(1 - conj(xi) zeta)``."""
    xi = _check_open_disc(xi)
    zeta = np.asarray(zeta, dtype=complex)
    den = 1.0 - np.conj(xi) * zeta
    if np.any(den == 0):
        raise PoleAtPointError("1 - conj(xi) * zeta vanishes")
    out = (xi - zeta) / den
    return complex(out) if out.ndim == 0 else out


def mobius_map(xi) -> RationalMap:
    xi = _check_open_disc(xi)
    return RationalMap(np.array([xi, -1.0], dtype=complex), np.array([1.0, -np.conj(xi)], dtype=complex))


def blaschke(factors: Sequence[tuple[complex, int]], phase=1.0, scale=1.0) -> RationalMap:
    """``scale * phase * prod_i mobius(xi_i, .)**k_i`` as a rational map."""
    phase = as_complex(phase, "phase")
    scale = as_complex(scale, "scale")
    if abs(abs(phase) - 1.0) > 1e-12:
        raise DomainError("phase must be unimodular")
    if abs(scale) > 1.0 + 1e-15:
        raise DomainError("scale must satisfy |scale| <= 1")
    out = RationalMap.constant(phase * scale)
    for xi, k in factors:
        if k < 1:
            raise ValueError("multiplicities must be positive")
        out = out * mobius_map(xi) ** int(k)
    return out


@dataclass(frozen=True)
class MobiusProduct:
    """The map ``mobius(outer, scale * prod_i mobius(xi_i, .)**k_i)`` (no outer map when ``outer`` is None).

    Jets are computed factor by factor, which keeps high-order zeros near
    the circle exact; the expanded quotient loses them to cancellation.
    """

    scale: complex
    factors: tuple[tuple[complex, int], ...]
    outer: complex | None = None

    def jet(self, zeta0: complex, order: int) -> Jet:
        n = order + 1
        acc = [complex(self.scale)] + [0j] * order
        for xi, k in self.factors:
            base = jet_at(mobius_map(xi), zeta0, order).coeffs
            for _ in range(k):
                acc = series_mul(acc, base, n)
        inner = Jet(zeta0, tuple(acc))
        return inner if self.outer is None else compose_jet(mobius_map(self.outer), inner)

    def __call__(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        out = np.full(zeta.shape, complex(self.scale))
        for xi, k in self.factors:
            out = out * ((xi - zeta) / (1.0 - np.conj(xi) * zeta)) ** k
        if self.outer is not None:
            o = self.outer
            out = (o - out) / (1.0 - np.conj(o) * out)
        return complex(out) if out.ndim == 0 else out

    def expanded(self) -> RationalMap:
        f = RationalMap.constant(self.scale)
        for xi, k in self.factors:
            f = f * mobius_map(xi) ** int(k)
        if self.outer is not None:
            f = mobius_map(self.outer).compose(f)
        return replace(f, factored=self)


def mobius_product(scale, factors: Sequence[tuple[complex, int]] = (), outer=None) -> RationalMap:
    """``mobius(outer, scale * prod mobius(xi, .)**k)`` as a rational map that remembers its factors."""
    factors = tuple((_check_open_disc(xi), int(k)) for xi, k in factors)
    if any(k < 1 for _, k in factors):
        raise ValueError("multiplicities must be positive")
    outer = None if outer is None else _check_open_disc(outer, "outer")
    return MobiusProduct(as_complex(scale, "scale"), factors, outer).expanded()


def with_outer(f: RationalMap, xi) -> RationalMap:
    """``mobius(xi, f(.))``, keeping the factored form when there is one."""
    if f.factored is not None and f.factored.outer is None:
        return mobius_product(f.factored.scale, f.factored.factors, xi)
    return mobius_map(xi).compose(f)


def pseudo_distance(z, w) -> float:
    """Pseudo-hyperbolic distance ``|mobius(z, w)|`` in the disc."""
    z = _check_open_disc(z, "z")
    w = _check_open_disc(w, "w")
    return abs(mobius(z, w))


def sup_norm_circle(f: RationalMap, radius: float = 1.0, samples: int = CIRCLE_SAMPLES) -> float:
    """Max of ``|f|`` over ``samples`` equispaced points of the circle ``|zeta| = radius``.

    This is a lower estimate of the true supremum; :func:`boundedness_report`
    adds a derivative-based correction for the gaps between samples.
    """
    if not 0.0 < radius <= 1.0:
        raise DomainError("radius must lie in (0, 1]")
    if samples < 64:
        raise ValueError("at least 64 samples are required")
    poles = f.poles()
    if poles.size and np.any(np.abs(np.abs(poles) - radius) < 1e-12):
        raise PoleAtPointError("rational map has a pole on the sampling circle")
    theta = 2.0 * np.pi * np.arange(samples) / samples
    return float(np.max(np.abs(f(radius * np.exp(1j * theta)))))


@dataclass(frozen=True)
class BoundednessReport:
    sampled_sup: float
    derivative_sup: float
    sup_bound: float
    poles_outside: bool

    def excess(self) -> float:
        return max(0.0, self.sampled_sup - 1.0)


def boundedness_report(f: RationalMap, samples: int = CIRCLE_SAMPLES) -> BoundednessReport:
    """Sampled circle sup, with ``sup <= sampled + (pi/samples) * max|f'|`` as the gap bound."""
    theta = 2.0 * np.pi * np.arange(samples) / samples
    pts = np.exp(1j * theta)
    ok = f.has_no_poles_in_closed_disc()
    if not ok:
        return BoundednessReport(math.inf, math.inf, math.inf, False)
    vals = np.abs(f(pts))
    dvals = np.abs(f.derivative_map()(pts))
    s, ds = float(vals.max()), float(dvals.max())
    return BoundednessReport(s, ds, s + math.pi / samples * ds, True)


@dataclass(frozen=True)
class AnalyticDisc:
    """An n-tuple of rational maps, read as a map from the disc to ``C^n``."""

    coords: tuple[RationalMap, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __call__(self, zeta) -> np.ndarray:
        return np.array([f(zeta) for f in self.coords])

    def scaled(self, r: float) -> "AnalyticDisc":
        return AnalyticDisc(tuple(f.scaled_argument(r) for f in self.coords))

    def sup_norms(self, samples: int = CIRCLE_SAMPLES) -> list[float]:
        return [sup_norm_circle(f, 1.0, samples) for f in self.coords]

    def boundedness_excess(self, samples: int = CIRCLE_SAMPLES) -> float:
        """``max(0, sup - 1)`` over coordinates; ``inf`` if a pole lies in the closed disc."""
        worst = 0.0
        for f in self.coords:
            if not f.has_no_poles_in_closed_disc():
                return math.inf
            worst = max(worst, sup_norm_circle(f, 1.0, samples) - 1.0)
        return worst

    def is_bounded(self, tol: float = BOUNDEDNESS_TOL, samples: int = CIRCLE_SAMPLES) -> bool:
        return self.boundedness_excess(samples) <= tol
