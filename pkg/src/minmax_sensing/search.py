"""Worst-case subset evaluation and numerical search over angle space.

The searches are empirical cross-checks of the closed-form optima; they make
no global optimality claim.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .core import Design, SubsetIndex, all_subsets, pairwise_cost, spectral_closed_form

__all__ = [
    "TIE_TOL",
    "DEFAULT_BUDGET",
    "BudgetExceeded",
    "Method",
    "WorstCaseReport",
    "SearchResult",
    "CostTable",
    "worst_case",
    "grid_search",
    "local_search",
]

TIE_TOL = 1e-9
DEFAULT_BUDGET = 50_000_000  # subset evaluations per search call
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class BudgetExceeded(RuntimeError):
    pass


class Method(enum.Enum):
    GRID = "grid"
    MULTISTART_LOCAL = "local"


@dataclass(frozen=True)
class WorstCaseReport:
    k: int
    max_cost: float
    max_kappa: float
    attaining_subsets: tuple[SubsetIndex, ...]
    subsets_evaluated: int


@dataclass(frozen=True)
class SearchResult:
    best_design: Design
    best_max_cost: float
    method: Method
    seed: int
    resolution_or_restarts: int
    evaluations: int
    n: int
    k: int
    converged: bool = True


def worst_case(design: Design, k: int) -> WorstCaseReport:
    """Largest pairwise cost over every k-column subset of ``design``.

    All subsets within ``TIE_TOL`` of the maximum are reported, in
    lexicographic order.
    """
    n = design.n
    if not 2 <= k <= n:
        raise ValueError(f"k must satisfy 2 <= k <= n={n}, got k={k}")
    subsets = all_subsets(n, k)
    costs = [pairwise_cost(design, s) for s in subsets]
    top = max(costs)
    attaining = tuple(s for s, c in zip(subsets, costs) if c >= top - TIE_TOL)
    kappa = spectral_closed_form(design, attaining[0]).kappa
    return WorstCaseReport(k=k, max_cost=top, max_kappa=kappa, attaining_subsets=attaining, subsets_evaluated=len(subsets))


class CostTable:
    """Vectorized worst-subset cost for batches of angle vectors.

    Pair endpoints of every k-subset are stored as two (m, k(k-1)/2) index
    arrays, so one call evaluates every subset of every design in the batch.
    """

    def __init__(self, n: int, k: int):
        subs = np.array(list(itertools.combinations(range(n), k)), dtype=np.intp)
        pairs = np.array(list(itertools.combinations(range(k), 2)), dtype=np.intp)
        self.n, self.k = n, k
        self.m = subs.shape[0]
        self.first = subs[:, pairs[:, 0]]
        self.second = subs[:, pairs[:, 1]]

    def costs(self, theta: np.ndarray) -> np.ndarray:
        """Per-subset costs, shape ``theta.shape[:-1] + (m,)``."""
        return np.cos(2.0 * (theta[..., self.second] - theta[..., self.first])).sum(axis=-1)

    def max_cost(self, theta: np.ndarray) -> np.ndarray:
        return self.costs(theta).max(axis=-1)

    def jacobian(self, theta: np.ndarray) -> np.ndarray:
        """d(cost_s)/d(theta_i) for every subset s, shape (m, n)."""
        s = np.sin(2.0 * (theta[self.second] - theta[self.first]))
        rows = np.repeat(np.arange(self.m), self.first.shape[1])
        jac = np.zeros((self.m, self.n))
        np.add.at(jac, (rows, self.second.ravel()), -2.0 * s.ravel())
        np.add.at(jac, (rows, self.first.ravel()), 2.0 * s.ravel())
        return jac


def _check_nk(n: int, k: int) -> None:
    if not 2 <= k <= n:
        raise ValueError(f"k must satisfy 2 <= k <= n, got n={n}, k={k}")


def grid_search(n: int, k: int, resolution: int, budget: int = DEFAULT_BUDGET) -> SearchResult:
    """Exhaustive search over angles ``j*pi/resolution``.

    The first angle is pinned to 0 and the rest range over non-decreasing
    tuples, which loses nothing because the worst-case cost is invariant
    under rotation and column permutation. Ties go to the lexicographically
    first tuple.
    """
    _check_nk(n, k)
    if resolution < 8:
        raise ValueError(f"resolution must be >= 8, got {resolution}")
    table = CostTable(n, k)
    points = math.comb(resolution + n - 2, n - 1)
    evaluations = points * table.m
    if evaluations > budget:
        raise BudgetExceeded(
            f"grid of {points} designs x {table.m} subsets = {evaluations} evaluations exceeds budget {budget}"
        )
    # cos(2 (theta_b - theta_a)) only depends on (j_b - j_a) mod resolution
    lut = np.cos(2.0 * math.pi * np.arange(resolution) / resolution)
    tuples = itertools.combinations_with_replacement(range(resolution), n - 1)
    chunk = max(1, 200_000 // table.m)
    best_val, best_idx = math.inf, None
    while True:
        block = list(itertools.islice(tuples, chunk))
        if not block:
            break
        idx = np.zeros((len(block), n), dtype=np.intp)
        idx[:, 1:] = block
        diff = (idx[:, table.second] - idx[:, table.first]) % resolution
        vals = lut[diff].sum(axis=-1).max(axis=-1)
        j = int(np.argmin(vals))
        if vals[j] < best_val:
            best_val, best_idx = float(vals[j]), idx[j]
    design = Design(math.pi * j / resolution for j in best_idx)
    return SearchResult(
        best_design=design,
        best_max_cost=worst_case(design, k).max_cost,
        method=Method.GRID,
        seed=0,
        resolution_or_restarts=resolution,
        evaluations=evaluations,
        n=n,
        k=k,
    )


def _golden(f, lo: float, hi: float, tol: float) -> tuple[float, float, int]:
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    calls = 2
    while hi - lo > tol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd = f(d)
        calls += 1
    x = 0.5 * (lo + hi)
    return x, f(x), calls + 1


def _coordinate_descent(table: CostTable, theta: np.ndarray, max_sweeps: int, scan: int, tol: float):
    """Minimize the worst cost one free coordinate at a time.

    Each coordinate is scanned on ``scan`` points of [0, pi) and the best
    bracket is refined by golden section. Returns (theta, value, calls,
    converged).
    """
    grid = np.arange(scan) * (math.pi / scan)
    step = math.pi / scan
    cur = float(table.max_cost(theta))
    calls = 1
    for _ in range(max_sweeps):
        start = cur
        for i in range(1, table.n):
            batch = np.repeat(theta[None, :], scan, axis=0)
            batch[:, i] = grid
            vals = table.max_cost(batch)
            calls += scan
            j = int(np.argmin(vals))

            def f(t, i=i):
                x = theta.copy()
                x[i] = t
                return float(table.max_cost(x))

            t, v, c = _golden(f, grid[j] - step, grid[j] + step, 1e-11)
            calls += c
            if v < cur:
                theta[i], cur = t % math.pi, v
        if start - cur < tol:
            return theta, cur, calls, True
    return theta, cur, calls, False


def _epigraph_polish(table: CostTable, theta: np.ndarray):
    """Solve min t s.t. cost_s(theta) <= t for all s, from ``theta``.

    The max of smooth costs is kinked wherever subsets tie, which is exactly
    where the optima live; the epigraph form turns it into a smooth
    constrained problem.
    """
    n = table.n
    calls = 0

    def unpack(z):
        return np.concatenate(([0.0], z[:-1]))

    def cons(z):
        nonlocal calls
        calls += 1
        return z[-1] - table.costs(unpack(z))

    def cons_jac(z):
        jac = np.empty((table.m, n))
        jac[:, :-1] = -table.jacobian(unpack(z))[:, 1:]
        jac[:, -1] = 1.0
        return jac

    objective_grad = np.zeros(n)
    objective_grad[-1] = 1.0
    z0 = np.concatenate((theta[1:], [float(table.max_cost(theta))]))
    res = minimize(
        lambda z: z[-1],
        z0,
        jac=lambda z: objective_grad,
        method="SLSQP",
        constraints=[{"type": "ineq", "fun": cons, "jac": cons_jac}],
        options={"maxiter": 500, "ftol": 1e-15},
    )
    out = np.mod(unpack(res.x), math.pi)
    return out, float(table.max_cost(out)), calls


def local_search(
    n: int,
    k: int,
    restarts: int,
    seed: int,
    max_sweeps: int = 500,
    scan: int = 64,
    tol: float = 1e-10,
) -> SearchResult:
    """Multi-start local minimization of the worst-subset cost.

    Every restart draws theta_2..theta_n uniformly from [0, pi) (numpy PCG64
    seeded with ``seed``), runs coordinate descent, then polishes the result
    with an epigraph SLSQP solve and keeps whichever is better. The best
    design over all restarts wins; ties keep the earliest restart.
    """
    _check_nk(n, k)
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    table = CostTable(n, k)
    rng = np.random.default_rng(seed)
    best_val, best_theta, calls = math.inf, None, 0
    all_converged = True
    for _ in range(restarts):
        theta = np.concatenate(([0.0], rng.uniform(0.0, math.pi, n - 1)))
        theta, val, c, converged = _coordinate_descent(table, theta, max_sweeps, scan, tol)
        calls += c
        all_converged &= converged
        if n > 1:
            polished, pval, c = _epigraph_polish(table, theta)
            calls += c
            if pval < val:
                theta, val = polished, pval
        if val < best_val:
            best_val, best_theta = val, theta.copy()
    design = Design(best_theta)
    return SearchResult(
        best_design=design,
        best_max_cost=worst_case(design, k).max_cost,
        method=Method.MULTISTART_LOCAL,
        seed=seed,
        resolution_or_restarts=restarts,
        evaluations=calls * table.m,
        n=n,
        k=k,
        converged=all_converged,
    )
