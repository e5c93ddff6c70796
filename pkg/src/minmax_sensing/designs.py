"""Closed-form optimal designs and their provable worst-subset costs.

All constructions are written in terms of exact integer reductions so that
an angle that should be 0 (or coincide with another angle) comes out exactly
equal, e.g. ``2*pi*(i-1)/N mod pi`` is evaluated as ``pi * ((2*(i-1)) % N) / N``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core import Design, kappa_from_cost

__all__ = ["Family", "TheoremOptimum", "generate", "theoretical_optimum", "auto_family"]


class Family(enum.Enum):
    K2_UNIFORM = "k2-uniform"
    K3_EVEN = "k3-even"
    K3_UNIFORM_SMALL = "k3-uniform-small"
    K3_N4_FAMILY = "k3-n4-family"
    K3_SHIFTED_ODD = "k3-shifted-odd"

    @classmethod
    def parse(cls, text: str) -> "Family":
        key = text.strip().lower().replace("_", "-")
        for fam in cls:
            if fam.value == key:
                return fam
        raise ValueError(f"unknown design family {text!r}; choose from {[f.value for f in cls]}")


_RULES = {
    Family.K2_UNIFORM: "n >= 2",
    Family.K3_EVEN: "even n >= 4",
    Family.K3_UNIFORM_SMALL: "n in {3, 5}",
    Family.K3_N4_FAMILY: "n == 4 and 0 <= t1, t2 < pi",
    Family.K3_SHIFTED_ODD: "odd n >= 7",
}


def _applies(family: Family, n: int) -> bool:
    if family is Family.K2_UNIFORM:
        return n >= 2
    if family is Family.K3_EVEN:
        return n >= 4 and n % 2 == 0
    if family is Family.K3_UNIFORM_SMALL:
        return n in (3, 5)
    if family is Family.K3_N4_FAMILY:
        return n == 4
    return n >= 7 and n % 2 == 1


@dataclass(frozen=True)
class TheoremOptimum:
    n: int
    k: int
    max_cost: float
    unique: bool

    @property
    def max_kappa(self) -> float:
        return kappa_from_cost(self.max_cost, self.k)


def generate(family: Family | str, n: int, t1: float = 0.0, t2: float = math.pi / 2) -> Design:
    """Build the optimal design of ``family`` with ``n`` columns.

    ``t1`` and ``t2`` are only used by ``K3_N4_FAMILY``; they are the two free
    doubled angles, so the resulting columns sit at ``t1/2, t2/2, t1/2 + pi/2,
    t2/2 + pi/2``.
    """
    if isinstance(family, str):
        family = Family.parse(family)
    n = int(n)
    if not _applies(family, n):
        raise ValueError(f"{family.value} requires {_RULES[family]}, got n={n}")

    if family is Family.K2_UNIFORM or family is Family.K3_UNIFORM_SMALL:
        return Design(math.pi * i / n for i in range(n))
    if family is Family.K3_EVEN:
        return Design(math.pi * ((2 * i) % n) / n for i in range(n))
    if family is Family.K3_SHIFTED_ODD:
        m = n + 1
        return Design(math.pi * ((2 * i) % m) / m for i in range(n))

    if not (0.0 <= t1 < math.pi and 0.0 <= t2 < math.pi):
        raise ValueError(f"{family.value} requires {_RULES[family]}, got t1={t1}, t2={t2}")
    h1, h2 = t1 / 2.0, t2 / 2.0
    return Design([h1, h2, h1 + math.pi / 2, h2 + math.pi / 2])


def auto_family(n: int, k: int) -> Family:
    """The family whose theorem covers ``(n, k)``."""
    if k == 2 and n >= 2:
        return Family.K2_UNIFORM
    if k == 3:
        if n >= 4 and n % 2 == 0:
            return Family.K3_EVEN
        if n in (3, 5):
            return Family.K3_UNIFORM_SMALL
        if n >= 7:
            return Family.K3_SHIFTED_ODD
    raise ValueError(f"no optimal construction is known for n={n}, k={k}")


def theoretical_optimum(n: int, k: int) -> TheoremOptimum:
    """Smallest achievable worst-subset pairwise cost for ``(n, k)``.

    K=2: adjacent columns of the uniform design are ``pi/N`` apart, so the
    worst pair costs ``cos(2 pi / N)``. K=3: even N gives ``1 + 2 cos(4 pi/N)``,
    N in {3, 5} gives ``2 cos(2 pi/N) + cos(4 pi/N)`` (uniform design, worst
    triple is three neighbours) and odd N >= 7 gives ``1 + 2 cos(4 pi/(N+1))``.
    """
    if k not in (2, 3):
        raise NotImplementedError(f"no optimality result covers k={k}")
    if n < k:
        raise ValueError(f"need n >= k, got n={n}, k={k}")
    if k == 2:
        return TheoremOptimum(n, k, math.cos(2 * math.pi / n), unique=False)
    if n % 2 == 0:
        cost = 1 + 2 * math.cos(4 * math.pi / n)
    elif n in (3, 5):
        cost = 2 * math.cos(2 * math.pi / n) + math.cos(4 * math.pi / n)
    else:
        cost = 1 + 2 * math.cos(4 * math.pi / (n + 1))
    return TheoremOptimum(n, k, cost, unique=(n % 2 == 0 and n >= 6))
