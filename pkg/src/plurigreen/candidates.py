"""Disc candidates for Lempert-type infima and their feasibility reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from ._base import BOUNDEDNESS_TOL, FEAS_TOL, DomainError, as_point
from .disc_algebra import AnalyticDisc
from .indicators import PoleSystem, mass, required_orders, vanishing_residual


@dataclass(frozen=True)
class Condition:
    """At its node the disc must hit ``point`` with per-coordinate vanishing ``orders``.

    ``weight`` multiplies ``log|node|`` in the objective: the mass of the
    indicator for generalized Lempert functions, the pole weight for the
    simple-interpolation version.
    """

    point: tuple[complex, ...]
    orders: tuple[int, ...]
    weight: int

    def __post_init__(self):
        object.__setattr__(self, "point", as_point(self.point))
        object.__setattr__(self, "orders", tuple(int(o) for o in self.orders))
        if len(self.orders) != len(self.point) or min(self.orders) < 1:
            raise DomainError("orders must be positive, one per coordinate")
        if self.weight <= 0:
            raise DomainError("weight must be positive")


def lempert_conditions(system: PoleSystem) -> list[Condition]:
    """Conditions of the generalized Lempert function: orders ``tau/c_j``, weight ``tau``."""
    return [Condition(a, required_orders(ind), mass(ind)) for a, ind in system.poles]


def coman_conditions(system: PoleSystem) -> list[Condition]:
    """Simple interpolation with weight ``nu``; requires isotropic indicators ``(nu, ..., nu)``."""
    out = []
    for a, ind in system.poles:
        if len(set(ind.c)) != 1:
            raise DomainError("simple-pole weights need isotropic indicators (nu, ..., nu)")
        out.append(Condition(a, (1,) * ind.dim, ind.c[0]))
    return out


@dataclass(frozen=True)
class DiscCandidate:
    """An analytic disc with one node per condition.

    A node equal to ``None`` means the pole was not hit: the disc is a
    candidate for the subsystem without it, which bounds the full system
    from above because a pole can always be absorbed near the circle.
    """

    disc: AnalyticDisc
    nodes: tuple[complex | None, ...]
    conditions: tuple[Condition, ...]
    z: tuple[complex, ...]
    method: str
    bound_tol: float = BOUNDEDNESS_TOL
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(None if x is None else complex(x) for x in self.nodes))
        object.__setattr__(self, "conditions", tuple(self.conditions))
        object.__setattr__(self, "z", as_point(self.z))
        if len(self.nodes) != len(self.conditions):
            raise DomainError("one node per condition is required")

    @property
    def objective(self) -> float:
        return objective(self)

    def active(self) -> list[tuple[complex, Condition]]:
        return [(x, c) for x, c in zip(self.nodes, self.conditions) if x is not None]


def objective(cand: DiscCandidate, system: PoleSystem | None = None) -> float:
    """``sum_j tau_j log|zeta_j|`` over the nodes that are present."""
    if system is not None and len(system) != len(cand.nodes):
        raise DomainError("node count differs from pole count")
    total = 0.0
    for x, c in cand.active():
        if x == 0:
            return -math.inf  # never feasible, see feasibility()
        total += c.weight * math.log(abs(x))
    return total


@dataclass(frozen=True)
class FeasibilityReport:
    center_residual: float
    jet_residual: float
    boundedness_excess: float
    bound_tol: float

    @property
    def residual(self) -> float:
        """Interpolation and vanishing-order violation."""
        return max(self.center_residual, self.jet_residual)

    @property
    def total(self) -> float:
        return max(self.residual, self.boundedness_excess)

    @property
    def feasible(self) -> bool:
        return self.residual <= FEAS_TOL and self.boundedness_excess <= self.bound_tol


def feasibility(cand: DiscCandidate, z=None) -> FeasibilityReport:
    """Constraint violations of ``cand``; never raises on a violated constraint."""
    z = cand.z if z is None else as_point(z)
    try:
        center = max(abs(w - zj) for w, zj in zip(cand.disc(0.0), z))
    except ZeroDivisionError:
        center = math.inf
    jet = 0.0
    seen = set()
    for x, c in cand.active():
        if x == 0 or abs(x) >= 1 or x in seen:
            jet = math.inf
            break
        seen.add(x)
        try:
            jet = max(jet, vanishing_residual(cand.disc, c.point, c.orders, x))
        except ZeroDivisionError:
            jet = math.inf
    excess = cand.disc.boundedness_excess()
    return FeasibilityReport(center, jet, excess, cand.bound_tol)


def node_pattern(cand: DiscCandidate) -> str:
    """Short description of which nodes coincide, e.g. ``"4 nodes, 4 distinct"``."""
    xs = [x for x in cand.nodes if x is not None]
    distinct = []
    for x in xs:
        if all(abs(x - y) > 1e-6 for y in distinct):
            distinct.append(x)
    return f"{len(xs)} nodes, {len(distinct)} distinct"


def with_nodes_absorbed(cand: DiscCandidate, conditions: Sequence[Condition], mapping: Sequence[int | None]) -> DiscCandidate:
    """Re-express ``cand`` against ``conditions``; ``mapping[i]`` is the index of the old node or ``None``."""
    nodes = [None if k is None else cand.nodes[k] for k in mapping]
    return DiscCandidate(cand.disc, tuple(nodes), tuple(conditions), cand.z, cand.method, cand.bound_tol, dict(cand.info))
