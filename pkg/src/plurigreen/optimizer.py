"""Multi-start derivative-free search for discs realizing a Lempert-type infimum.

Only the node positions are searched. For fixed nodes, each coordinate of
the disc is an interpolation problem for a bounded function (value ``z_k``
at 0, value ``a_k`` with a prescribed vanishing order at each node), and the
Schur algorithm decides solvability and returns an interpolant. The search
therefore minimizes ``sum w_j log|zeta_j|`` plus a penalty on the amount by
which the Schur parameters leave the disc.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from ._base import OPTIMIZER_BOUNDEDNESS_TOL, DomainError, as_point
from .candidates import Condition, DiscCandidate, feasibility
from .disc_algebra import AnalyticDisc
from .jets import RHO_MAX, schur_interpolate, schur_parameters

PENALTY_SCHEDULE = (1e2, 1e4, 1e6)
# final discs keep every Schur parameter this far inside the disc; closer to
# the circle the reconstruction loses digits
PROJECT_RHO = 1.0 - 1e-6
# a node this close to the circle contributes nothing to the objective; the
# pole is dropped and the disc is built for the remaining ones
ABSORB_RADIUS = 1.0 - 1e-7


@dataclass(frozen=True)
class OptimizerOptions:
    budget: int = 3000  # function evaluations per restart
    restarts: int = 6
    seed: int = 0
    degree: int | None = None
    workers: int = 1

    def __post_init__(self):
        if self.budget < 1:
            raise DomainError("budget must be >= 1")
        if self.restarts < 1:
            raise DomainError("restarts must be >= 1")


@dataclass(frozen=True)
class SearchResult:
    candidate: DiscCandidate | None
    objective: float | None
    status: str  # "feasible" | "near-feasible" | "no feasible candidate"
    restart: int | None
    near_feasible: tuple[DiscCandidate, ...] = ()
    evaluations: int = 0
    all_feasible: tuple[DiscCandidate, ...] = ()


def _squash(v: np.ndarray) -> np.ndarray:
    x, y = v[0::2], v[1::2]
    rad = np.hypot(x, y)
    scale = np.where(rad > 1e-300, np.tanh(rad) / np.where(rad > 1e-300, rad, 1.0), 1.0)
    return (x + 1j * y) * scale


def _unsquash(nodes: Sequence[complex]) -> np.ndarray:
    out = []
    for w in nodes:
        r = abs(w)
        s = math.atanh(min(r, 1 - 1e-12)) / r if r > 0 else 1.0
        out += [w.real * s, w.imag * s]
    return np.array(out)


def hermite_data(z, conditions: Sequence[Condition], nodes: Sequence[complex], k: int):
    data = [(0j, [z[k]])]
    for x, c in zip(nodes, conditions):
        if x is None:
            continue
        data.append((x, [c.point[k]] + [0j] * (c.orders[k] - 1)))
    return data


def interpolation_excess(z, conditions, nodes, rho: float = RHO_MAX) -> float:
    total = 0.0
    for k in range(len(z)):
        total += schur_parameters(hermite_data(z, conditions, nodes, k), rho).excess
    return total


def _nodes_ok(nodes) -> bool:
    if any(abs(x) < 1e-12 or abs(x) >= 1 for x in nodes):
        return False
    for i in range(len(nodes)):
        for j in range(i):
            if abs(nodes[i] - nodes[j]) < 1e-10:
                return False
    return True


def build_candidate(z, conditions, nodes, method: str, degree: int | None = None) -> DiscCandidate:
    """Disc interpolating the conditions at ``nodes`` by the Schur algorithm."""
    coords = []
    for k in range(len(z)):
        f, _ = schur_interpolate(hermite_data(z, conditions, nodes, k))
        if degree is not None and f.degree > degree:
            raise DomainError(f"interpolant degree {f.degree} exceeds the requested degree {degree}")
        coords.append(f)
    return DiscCandidate(AnalyticDisc(tuple(coords)), tuple(nodes), tuple(conditions), z, method, OPTIMIZER_BOUNDEDNESS_TOL)


def project(z, conditions, nodes, iters: int = 60, rho: float = PROJECT_RHO) -> list[complex] | None:
    """Push nodes outward radially, ``zeta -> zeta / r``, until the data is solvable.

    Solvability is monotone in ``r`` (precompose a solution with ``r zeta``),
    so the smallest push is found by bisection.
    """
    nodes = list(nodes)
    if interpolation_excess(z, conditions, nodes, rho) == 0.0:
        return nodes
    live = [x for x in nodes if x is not None]
    if not live:
        return None
    top = max(abs(x) for x in live)
    lo = top * (1 + 1e-12)  # r at which the outermost node reaches the circle
    if lo >= 1:
        return None
    hi = 1.0
    lo = lo * (1 + 1e-9)

    def scaled(r):
        return [None if x is None else x / r for x in nodes]

    if lo >= 1 or interpolation_excess(z, conditions, scaled(lo), rho) > 0:
        return None
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if interpolation_excess(z, conditions, scaled(mid), rho) == 0.0:
            lo = mid
        else:
            hi = mid
    return scaled(lo)


def _one_restart(z, conditions, start, budget: int) -> tuple[list[complex] | None, int]:
    weights = np.array([c.weight for c in conditions], dtype=float)
    evals = 0

    def f(v, pen):
        nonlocal evals
        evals += 1
        nodes = _squash(v)
        if not _nodes_ok(nodes):
            return 1e12
        ex = interpolation_excess(z, conditions, list(nodes))
        return float(weights @ np.log(np.abs(nodes))) + pen * ex * ex + (1e3 * ex if ex > 1e-3 else 0.0)

    x = _unsquash(start)
    per_stage = max(1, budget // len(PENALTY_SCHEDULE))
    for pen in PENALTY_SCHEDULE:
        res = minimize(
            f, x, args=(pen,), method="Nelder-Mead",
            options={"maxfev": per_stage, "xatol": 1e-10, "fatol": 1e-13, "adaptive": True},
        )
        x = res.x
    nodes = list(_squash(x))
    if not _nodes_ok(nodes):
        return None, evals
    nodes = [None if abs(w) >= ABSORB_RADIUS else complex(w) for w in nodes]
    return project(z, conditions, nodes), evals


def _random_start(rng: np.random.Generator, n: int) -> list[complex]:
    rad = np.sqrt(rng.uniform(0.05, 0.9, n))
    ang = rng.uniform(0, 2 * np.pi, n)
    return list(rad * np.exp(1j * ang))


def optimize_nodes(
    z,
    conditions: Sequence[Condition],
    options: OptimizerOptions = OptimizerOptions(),
    starts: Sequence[Sequence[complex]] = (),
    method: str = "optimizer",
) -> SearchResult:
    """Best feasible disc over ``options.restarts`` random starts plus the given ``starts``.

    Restart ``i`` draws from ``SeedSequence([seed, i])``; results are merged
    by ``(objective, restart index)``, so the outcome does not depend on
    ``workers``.
    """
    z = as_point(z)
    conditions = tuple(conditions)
    n = len(conditions)
    jobs = [list(s) for s in starts]
    for i in range(options.restarts):
        rng = np.random.default_rng(np.random.SeedSequence([options.seed, i]))
        jobs.append(_random_start(rng, n))

    def run(job):
        return _one_restart(z, conditions, job, options.budget)

    if options.workers > 1:
        with ThreadPoolExecutor(options.workers) as ex:
            outcomes = list(ex.map(run, jobs))
    else:
        outcomes = [run(j) for j in jobs]

    feasible, near = [], []
    evals = 0
    for idx, (nodes, ne) in enumerate(outcomes):
        evals += ne
        if nodes is None:
            continue
        try:
            cand = build_candidate(z, conditions, nodes, f"{method}[restart {idx}]", options.degree)
        except (ZeroDivisionError, DomainError, ArithmeticError):
            continue
        rep = feasibility(cand)
        cand.info["feasibility"] = rep
        cand.info["restart"] = idx
        if rep.feasible:
            feasible.append((cand.objective, idx, cand))
        else:
            near.append(cand)
    if not feasible:
        status = "near-feasible" if near else "no feasible candidate"
        return SearchResult(None, None, status, None, tuple(near), evals)
    feasible.sort(key=lambda t: (t[0], t[1]))
    obj, idx, best = feasible[0]
    return SearchResult(best, obj, "feasible", idx, tuple(near), evals, tuple(c for _, _, c in feasible))


__all__ = [
    "OptimizerOptions",
    "SearchResult",
    "optimize_nodes",
    "build_candidate",
    "project",
    "interpolation_excess",
    "hermite_data",
    "RHO_MAX",
]
