"""Spectral evaluation of column subsets of a 2 x N unit-norm matrix.

Column ``i`` of the matrix is ``(cos theta_i, sin theta_i)``. For a subset of
``K`` columns the accumulated Gram matrix ``sum a a^T`` is 2 x 2 with trace
``K``, and both of its eigenvalues follow from the pairwise cost

    S = sum_{j<l} cos(2 (theta_l - theta_j))

as ``K/2 -+ sqrt(K + 2 S) / 2``. :func:`spectral_oracle` computes the same
eigenvalues by building the matrix explicitly, and is kept as an independent
check on :func:`spectral_closed_form`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Design",
    "SubsetIndex",
    "SpectralSummary",
    "normalize_angle",
    "pairwise_cost",
    "spectral_closed_form",
    "spectral_oracle",
    "kappa_from_cost",
    "all_subsets",
]

ISOTROPIC_TOL = 1e-12  # on K + 2S
NEGATIVE_TOL = 1e-9  # lambda_min below -NEGATIVE_TOL is a bug, not noise
RANK_TOL = 1e-12  # lambda_min below this is reported as exactly zero


def normalize_angle(theta: float) -> float:
    """Reduce ``theta`` (radians) to its representative in ``[0, pi)``.

    Shifting a column angle by pi flips the column's sign, which leaves every
    Gram matrix unchanged, so angles are only meaningful modulo pi.
    """
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta!r}")
    r = theta % math.pi
    # tiny negatives round up to exactly pi
    if r >= math.pi:
        r = 0.0
    return r


@dataclass(frozen=True)
class Design:
    """Ordered column angles of a 2 x N unit-norm matrix, reduced mod pi."""

    angles: tuple[float, ...]

    def __init__(self, angles: Iterable[float]):
        vals = tuple(normalize_angle(a) for a in angles)
        if not vals:
            raise ValueError("a design needs at least one column")
        object.__setattr__(self, "angles", vals)

    @property
    def n(self) -> int:
        return len(self.angles)

    def matrix(self) -> np.ndarray:
        """The 2 x N matrix itself."""
        a = np.asarray(self.angles)
        return np.vstack([np.cos(a), np.sin(a)])

    def __len__(self) -> int:
        return len(self.angles)


@dataclass(frozen=True, order=True)
class SubsetIndex:
    """Sorted tuple of distinct 1-based column indices (at least two)."""

    indices: tuple[int, ...]

    def __init__(self, indices: Iterable[int]):
        idx = tuple(int(i) for i in indices)
        if len(idx) < 2:
            raise ValueError("a subset needs at least two columns")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError(f"subset indices must be strictly increasing: {idx}")
        if idx[0] < 1:
            raise IndexError(f"subset indices are 1-based, got {idx}")
        object.__setattr__(self, "indices", idx)

    @property
    def k(self) -> int:
        return len(self.indices)

    def positions(self) -> tuple[int, ...]:
        """0-based positions into ``Design.angles``."""
        return tuple(i - 1 for i in self.indices)

    def label(self) -> str:
        return "-".join(str(i) for i in self.indices)

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class SpectralSummary:
    """Eigenvalues of the Gram accumulation of one column subset.

    ``kappa`` is ``lambda_max / lambda_min``, or ``math.inf`` when the subset
    is rank deficient. ``inf`` compares greater than every finite ratio, so
    worst-case maxima stay well defined.
    """

    cost: float
    lambda_min: float
    lambda_max: float
    kappa: float

    @property
    def k(self) -> int:
        return round(self.lambda_min + self.lambda_max)

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.kappa)

    @property
    def singular_values(self) -> tuple[float, float]:
        """Singular values (min, max) of the 2 x K submatrix itself."""
        return math.sqrt(self.lambda_min), math.sqrt(self.lambda_max)


def all_subsets(n: int, k: int) -> list[SubsetIndex]:
    """Every k-subset of ``1..n`` in lexicographic order."""
    return [SubsetIndex(c) for c in combinations(range(1, n + 1), k)]


def _subset_angles(design: Design, subset: SubsetIndex | Sequence[int]) -> list[float]:
    if not isinstance(subset, SubsetIndex):
        subset = SubsetIndex(subset)
    if subset.indices[-1] > design.n:
        raise IndexError(f"subset {subset.indices} out of range for a design with {design.n} columns")
    return [design.angles[p] for p in subset.positions()]


def pairwise_cost(design: Design, subset: SubsetIndex | Sequence[int]) -> float:
    """Sum of ``cos(2 (theta_l - theta_j))`` over all pairs j < l in the subset.

    Terms are accumulated with :func:`math.fsum` (correctly rounded), so the
    result does not depend on the order pairs are visited in. Pairs are
    generated with j ascending, then l ascending.
    """
    th = _subset_angles(design, subset)
    return math.fsum(math.cos(2.0 * (th[l] - th[j])) for j, l in combinations(range(len(th)), 2))


def _finish(cost: float, k: int, lam_min: float, lam_max: float) -> SpectralSummary:
    if lam_min < -NEGATIVE_TOL:
        raise ArithmeticError(f"negative eigenvalue {lam_min!r} for a Gram matrix")
    if lam_min < RANK_TOL:
        lam_min, lam_max = 0.0, float(k)
    kappa = math.inf if lam_min == 0.0 else lam_max / lam_min
    return SpectralSummary(cost=cost, lambda_min=lam_min, lambda_max=lam_max, kappa=kappa)


def spectral_closed_form(design: Design, subset: SubsetIndex | Sequence[int]) -> SpectralSummary:
    """Eigenvalues from the pairwise cost alone: ``K/2 -+ sqrt(K + 2S)/2``."""
    th = _subset_angles(design, subset)
    k = len(th)
    s = pairwise_cost(design, subset)
    radicand = k + 2.0 * s
    if radicand <= ISOTROPIC_TOL:
        # isotropic subset: Gram is (K/2) I
        half = k / 2.0
        return SpectralSummary(cost=s, lambda_min=half, lambda_max=half, kappa=1.0)
    root = 0.5 * math.sqrt(radicand)
    return _finish(s, k, k / 2.0 - root, k / 2.0 + root)


def spectral_oracle(design: Design, subset: SubsetIndex | Sequence[int]) -> SpectralSummary:
    """Eigenvalues of the explicitly assembled 2 x 2 Gram accumulation.

    Shares nothing with :func:`spectral_closed_form` except the subset lookup:
    the matrix entries are summed from the columns and the eigenvalues come
    from the characteristic polynomial (half trace -+ half discriminant).
    """
    th = _subset_angles(design, subset)
    k = len(th)
    c = [math.cos(t) for t in th]
    s = [math.sin(t) for t in th]
    a = math.fsum(x * x for x in c)
    d = math.fsum(y * y for y in s)
    b = math.fsum(x * y for x, y in zip(c, s))
    mid = 0.5 * (a + d)
    disc = math.hypot(0.5 * (a - d), b)
    lam_min, lam_max = mid - disc, mid + disc
    cost = 0.5 * ((lam_max - lam_min) ** 2 - k)
    if lam_max - lam_min <= 0.0:
        return SpectralSummary(cost=cost, lambda_min=mid, lambda_max=mid, kappa=1.0)
    return _finish(cost, k, lam_min, lam_max)


def kappa_from_cost(cost: float, k: int) -> float:
    """Condition ratio implied by a pairwise cost, increasing in ``cost``."""
    radicand = k + 2.0 * cost
    if radicand <= ISOTROPIC_TOL:
        return 1.0
    root = 0.5 * math.sqrt(radicand)
    lam_min = k / 2.0 - root
    if lam_min < RANK_TOL:
        return math.inf
    return (k / 2.0 + root) / lam_min
