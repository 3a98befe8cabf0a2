"""Exceptions, tolerances and the log-pole sentinel shared by every module."""

from __future__ import annotations

import functools
import math
import numbers

# constructed discs are exact up to round-off; optimizer output is not
BOUNDEDNESS_TOL = 1e-9
OPTIMIZER_BOUNDEDNESS_TOL = 1e-6
FEAS_TOL = 1e-8
JET_TOL = 1e-9
ROOT_MARGIN = 1e-9
DEGREE_CAP = 64
CIRCLE_SAMPLES = 4096


class PlurigreenError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(PlurigreenError, ValueError):
    """A point lies outside the region where an operation is defined."""


class PoleAtPointError(PlurigreenError, ZeroDivisionError):
    """A rational map was evaluated at a root of its denominator."""


class CapacityError(PlurigreenError):
    """A polynomial exceeded the degree cap."""


class UnsupportedConfiguration(PlurigreenError):
    """No closed form or constructor covers the given pole system."""


class ParameterRangeError(PlurigreenError, ValueError):
    """Parameters fall outside the range where a construction is valid."""


class AdmissibilityError(PlurigreenError, ValueError):
    """Taylor data too large for the bounded-interpolation construction."""


class DegeneracyNotice(PlurigreenError):
    """A collision correction hit a degenerate branch (vanishing derivative at a split node)."""


class SearchFailure(PlurigreenError):
    """A deterministic search exhausted its schedule."""


@functools.total_ordering
class _NegInf:
    """The value ``-inf`` of a logarithmic potential at one of its poles.

    Compares below every real number. Adding a finite real or scaling by a
    positive real returns the sentinel itself; anything else raises, so it
    cannot silently turn into ``nan``.
    """

    _instance = None
    __slots__ = ()

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NEG_INF"

    __str__ = __repr__

    def __float__(self):
        return -math.inf

    def __hash__(self):
        return hash("plurigreen.NEG_INF")

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        if other is self:
            return False
        if isinstance(other, numbers.Real):
            return True
        return NotImplemented

    def __add__(self, other):
        if other is self or (isinstance(other, numbers.Real) and math.isfinite(other)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, numbers.Real) and math.isfinite(other):
            return self
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, numbers.Real) and other > 0:
            return self
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        raise TypeError("NEG_INF cannot be negated")


NEG_INF = _NegInf()


def is_neg_inf(x) -> bool:
    return x is NEG_INF


def safe_log(x: float):
    """Natural log that maps 0 to ``NEG_INF``."""
    if x <= 0.0:
        return NEG_INF
    return math.log(x)


def as_complex(x, name: str = "value") -> complex:
    z = complex(x)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"{name} must be finite, got {z!r}")
    return z


def as_point(z, name: str = "point") -> tuple[complex, ...]:
    return tuple(as_complex(w, name) for w in z)
