"""Monte-Carlo least-squares recovery of a 2-D signal from K active sensors.

Measurements are ``y = A_S^T x + w`` with ``A_S`` the 2 x K submatrix of the
active columns and ``w`` i.i.d. Gaussian. The estimate solves the 2 x 2 normal
equations ``(A_S A_S^T) x_hat = A_S y`` and every trial is checked against the
deterministic bound ``|x_hat - x| <= |w| / sigma_min(A_S)``.

Randomness: each subset gets its own PCG64 stream seeded from
``SeedSequence([seed, subset_number])``, and all of that subset's trials are
drawn from it in a fixed order, so subsets can be simulated in any order or
in parallel without changing the report.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Design, SubsetIndex, all_subsets, spectral_closed_form

__all__ = ["SimConfig", "SubsetRecord", "SimReport", "simulate", "ESTIMABLE_TOL", "BOUND_SLACK"]

ESTIMABLE_TOL = 1e-9  # minimum lambda_min for a subset to be simulated
BOUND_SLACK = 1e-9


@dataclass(frozen=True)
class SimConfig:
    trials: int
    noise_sigma: float
    seed: int
    signal_norm: float = 1.0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be positive, got {self.trials}")
        # sigma = 0 is allowed: it is the noiseless exactness check
        if not (self.noise_sigma >= 0.0 and math.isfinite(self.noise_sigma)):
            raise ValueError(f"noise_sigma must be finite and >= 0, got {self.noise_sigma}")
        if not (self.signal_norm > 0.0 and math.isfinite(self.signal_norm)):
            raise ValueError(f"signal_norm must be finite and > 0, got {self.signal_norm}")


@dataclass(frozen=True)
class SubsetRecord:
    subset: SubsetIndex
    sigma_min: float
    estimable: bool
    trials: int = 0
    mean_error: float = math.nan
    max_error: float = math.nan
    bound_violations: int = 0


@dataclass(frozen=True)
class SimReport:
    k: int
    config: SimConfig
    records: tuple[SubsetRecord, ...] = field(default_factory=tuple)

    @property
    def bound_violations(self) -> int:
        return sum(r.bound_violations for r in self.records)

    @property
    def unestimable(self) -> tuple[SubsetIndex, ...]:
        return tuple(r.subset for r in self.records if not r.estimable)

    @property
    def max_mean_error(self) -> float:
        """Largest per-subset mean error."""
        vals = [r.mean_error for r in self.records if r.estimable]
        return max(vals) if vals else math.nan

    @property
    def worst_subset_mean_error(self) -> float:
        """Mean error pooled over the subsets with the smallest sigma_min.

        Optimal designs tie many subsets at the worst conditioning; pooling
        their trials is far less noisy than taking a max of per-subset means.
        """
        ok = [r for r in self.records if r.estimable]
        if not ok:
            return math.nan
        floor = min(r.sigma_min for r in ok)
        worst = [r for r in ok if r.sigma_min <= floor + 1e-9]
        return sum(r.mean_error * r.trials for r in worst) / sum(r.trials for r in worst)

    @property
    def max_error(self) -> float:
        vals = [r.max_error for r in self.records if r.estimable]
        return max(vals) if vals else math.nan


def _simulate_subset(design: Design, subset: SubsetIndex, number: int, cfg: SimConfig) -> SubsetRecord:
    summary = spectral_closed_form(design, subset)
    if summary.lambda_min <= ESTIMABLE_TOL:
        return SubsetRecord(subset=subset, sigma_min=math.sqrt(summary.lambda_min), estimable=False)
    sigma_min = math.sqrt(summary.lambda_min)

    th = np.array([design.angles[p] for p in subset.positions()])
    a = np.vstack([np.cos(th), np.sin(th)])  # 2 x K
    g = a @ a.T
    det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    g_inv = np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]]) / det

    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, number]))
    phi = rng.uniform(0.0, 2.0 * math.pi, cfg.trials)
    w = rng.standard_normal((cfg.trials, subset.k)) * cfg.noise_sigma
    x = cfg.signal_norm * np.column_stack([np.cos(phi), np.sin(phi)])

    y = x @ a + w  # row t is A^T x_t + w_t
    x_hat = (y @ a.T) @ g_inv.T
    err = np.linalg.norm(x_hat - x, axis=1)
    bound = np.linalg.norm(w, axis=1) / sigma_min
    violations = int(np.count_nonzero(err > bound + BOUND_SLACK))
    return SubsetRecord(
        subset=subset,
        sigma_min=sigma_min,
        estimable=True,
        trials=cfg.trials,
        mean_error=float(err.mean()),
        max_error=float(err.max()),
        bound_violations=violations,
    )


def simulate(design: Design, k: int, cfg: SimConfig) -> SimReport:
    """Run ``cfg.trials`` estimation trials on every k-subset of ``design``.

    Rank-deficient subsets are recorded with ``estimable=False`` and skipped.
    """
    if not 2 <= k <= design.n:
        raise ValueError(f"k must satisfy 2 <= k <= n={design.n}, got k={k}")
    records = tuple(
        _simulate_subset(design, s, number, cfg) for number, s in enumerate(all_subsets(design.n, k))
    )
    return SimReport(k=k, config=cfg, records=records)
