"""Closed-form pluricomplex Green functions in the polydisc.

Only configurations with a known closed form are evaluable; anything else
raises :class:`UnsupportedConfiguration`. At a pole the value is the
``NEG_INF`` sentinel.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from ._base import NEG_INF, DomainError, UnsupportedConfiguration, as_complex, as_point, safe_log
from .disc_algebra import mobius
from .indicators import PSI_0, PSI_V, PoleSystem


@dataclass(frozen=True)
class GreenValue:
    value: object  # float, or NEG_INF at a pole
    active_branch: str

    def __float__(self):
        return float(self.value)


def _log_pd(a: complex, w: complex):
    return safe_log(abs(mobius(a, w)))


def _check_polydisc(z):
    z = as_point(z, "z")
    if any(abs(x) >= 1.0 for x in z):
        raise DomainError("z must lie in the open polydisc")
    return z


def _argmax(terms: Sequence[tuple[str, object]]) -> GreenValue:
    label, best = terms[0]
    for lab, val in terms[1:]:
        if val > best:
            label, best = lab, val
    return GreenValue(best, label)


def green_one_pole_polydisc(z, a, ind) -> GreenValue:
    """``max_j c_j log|mobius(a_j, z_j)|``; branch label is the 1-based argmax coordinate."""
    z = _check_polydisc(z)
    a = _check_polydisc(a)
    terms = [(str(j + 1), cj * _log_pd(aj, zj)) for j, (cj, aj, zj) in enumerate(zip(ind.c, a, z))]
    return _argmax(terms)


def green_horizontal_bidisc(z, poles: Sequence[tuple[complex, int]]) -> GreenValue:
    """``max{ sum_j m_j log|mobius(a_j, z_1)|, log|z_2| }`` for poles ``(a_j, 0)`` with ``max(m_j log|w_1|, log|w_2|)``."""
    z1, z2 = _check_polydisc(z)
    pts = [as_complex(a) for a, _ in poles]
    if len(set(pts)) != len(pts):
        raise DomainError("horizontal poles must be distinct")
    first = 0.0
    for a, m in poles:
        first = first + int(m) * _log_pd(a, z1)
    return _argmax([("poles", first), ("vertical", safe_log(abs(z2)))])


def green_two_vertical(z, a, b) -> GreenValue:
    """``max{ log|mobius(a,z_1)| + log|mobius(b,z_1)|, 2 log|z_2| }`` (system ``S_{aVbV}``)."""
    z1, z2 = _check_polydisc(z)
    a, b = as_complex(a), as_complex(b)
    if a == b:
        raise DomainError("a and b must differ")
    first = _log_pd(a, z1) + _log_pd(b, z1)
    return _argmax([("poles", first), ("vertical", 2 * safe_log(abs(z2)))])


def green_product_simple(z, first: Sequence[complex], second: Sequence[complex]) -> GreenValue:
    """Simple poles on the product set ``first x second`` of the bidisc."""
    z1, z2 = _check_polydisc(z)
    u = 0.0
    for a in first:
        u = u + _log_pd(a, z1)
    v = 0.0
    for c in second:
        v = v + _log_pd(c, z2)
    return _argmax([("first", u), ("second", v)])


def green_four_simple_eps(z, a, b, eps) -> GreenValue:
    """Green function of the four simple poles ``(a,0), (b,0), (b,eps), (a,eps)``."""
    eps = as_complex(eps, "eps")
    if eps == 0:
        raise DomainError("eps must be nonzero")
    if as_complex(a) == as_complex(b):
        raise DomainError("a and b must differ")
    return green_product_simple(z, [a, b], [0j, eps])


def green_disc(zeta, nodes: Sequence[tuple[complex, float]]):
    """One-variable Green function ``sum_j tau_j log|mobius(zeta_j, zeta)|`` of the disc."""
    zeta = as_complex(zeta, "zeta")
    total = 0.0
    for zj, tau in nodes:
        total = total + float(tau) * safe_log(abs(mobius(zj, zeta)))
    return total


# ---------------------------------------------------------------------------
# shape recognition


def horizontal_poles(system: PoleSystem) -> list[tuple[complex, int]] | None:
    """``[(a_j, m_j)]`` if every pole is ``(a_j, 0)`` with indicator ``(m_j, 1)``."""
    if system.dim != 2:
        return None
    out = []
    for (a1, a2), ind in system.poles:
        if a2 != 0 or ind.c[1] != 1:
            return None
        out.append((a1, ind.c[0]))
    return out


def product_simple_poles(system: PoleSystem) -> tuple[list[complex], list[complex]] | None:
    """Factor sets ``(A, B)`` when the poles are exactly ``A x B`` with ``Psi_0`` everywhere."""
    if system.dim != 2 or any(ind != PSI_0 for ind in system.indicators):
        return None
    first = sorted({a[0] for a in system.points}, key=lambda x: (x.real, x.imag))
    second = sorted({a[1] for a in system.points}, key=lambda x: (x.real, x.imag))
    if len(first) * len(second) != len(system):
        return None
    pts = set(system.points)
    if all((p, q) in pts for p, q in itertools.product(first, second)):
        return first, second
    return None


def green_value(z, system: PoleSystem) -> GreenValue:
    """Dispatch to the closed form covering ``system``."""
    z = _check_polydisc(z)
    if len(z) != system.dim:
        raise DomainError("dimension mismatch")
    if len(system) == 1:
        (a, ind), = system.poles
        return green_one_pole_polydisc(z, a, ind)
    hp = horizontal_poles(system)
    if hp is not None:
        return green_horizontal_bidisc(z, hp)
    prod = product_simple_poles(system)
    if prod is not None:
        return green_product_simple(z, *prod)
    if (
        system.dim == 2
        and len(system) == 2
        and all(ind == PSI_V for ind in system.indicators)
        and all(p[1] == 0 for p in system.points)
    ):
        (a, _), (b, _) = system.points
        return green_two_vertical(z, a, b)
    raise UnsupportedConfiguration(
        f"no closed-form Green function for {system.label()}; supported shapes are one pole "
        "in the polydisc, horizontal bidisc poles (a_j,0) with indicators (m_j,1), simple "
        "poles on a product set, and S_aVbV"
    )


def has_closed_form(system: PoleSystem) -> bool:
    try:
        green_value((0j,) * system.dim, system)
    except UnsupportedConfiguration:
        return False
    except DomainError:
        return True
    return True
