import math

import numpy as np
import pytest

from minmax_sensing.core import Design, all_subsets, pairwise_cost
from minmax_sensing.designs import Family, auto_family, generate, theoretical_optimum
from minmax_sensing.search import worst_case

PI = math.pi


def brute_worst(design, k):
    """Independent of search.worst_case: numpy over every subset."""
    th = np.asarray(design.angles)
    best = -math.inf
    for s in all_subsets(design.n, k):
        t = th[list(s.positions())]
        diff = t[None, :] - t[:, None]
        best = max(best, float(np.cos(2 * diff)[np.triu_indices(len(t), 1)].sum()))
    return best


def test_k2_uniform_n4():
    assert generate(Family.K2_UNIFORM, 4).angles == pytest.approx((0, PI / 4, PI / 2, 3 * PI / 4), abs=1e-15)


def test_k3_even_n6():
    d = generate(Family.K3_EVEN, 6)
    assert d.angles == pytest.approx((0, PI / 3, 2 * PI / 3, 0, PI / 3, 2 * PI / 3), abs=1e-15)
    assert d.angles[0] == d.angles[3] == 0.0
    assert brute_worst(d, 3) == pytest.approx(0.0, abs=1e-12)


def test_k3_shifted_odd_n7():
    d = generate(Family.K3_SHIFTED_ODD, 7)
    assert d.angles == pytest.approx((0, PI / 4, PI / 2, 3 * PI / 4, 0, PI / 4, PI / 2), abs=1e-15)
    doubled = sorted(round((2 * a) / (PI / 2)) for a in d.angles)
    assert doubled == [0, 0, 1, 1, 2, 2, 3]


def test_k3_uniform_small_n5():
    assert generate("k3-uniform-small", 5).angles == pytest.approx(tuple(i * PI / 5 for i in range(5)), abs=1e-15)


@pytest.mark.parametrize("n", range(4, 21, 2))
def test_even_formula_matches_reduction(n):
    d = generate(Family.K3_EVEN, n)
    for i, a in enumerate(d.angles):
        assert a == pytest.approx(math.fmod(2 * PI * i / n, PI), abs=1e-15) or a == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize(
    "family, n",
    [
        (Family.K2_UNIFORM, 1),
        (Family.K3_EVEN, 5),
        (Family.K3_EVEN, 2),
        (Family.K3_UNIFORM_SMALL, 7),
        (Family.K3_N4_FAMILY, 5),
        (Family.K3_SHIFTED_ODD, 5),
        (Family.K3_SHIFTED_ODD, 8),
    ],
)
def test_inapplicable_family_raises_with_rule(family, n):
    with pytest.raises(ValueError, match="requires"):
        generate(family, n)


def test_n4_family_parameter_range():
    with pytest.raises(ValueError):
        generate(Family.K3_N4_FAMILY, 4, t1=PI, t2=0.0)
    with pytest.raises(ValueError):
        generate(Family.K3_N4_FAMILY, 4, t1=-0.1, t2=0.0)


def test_unknown_family_name():
    with pytest.raises(ValueError):
        Family.parse("k4-magic")
    assert Family.parse("K3_EVEN") is Family.K3_EVEN


# ---------------------------------------------------------------- optimum values


@pytest.mark.parametrize(
    "n, k, expected",
    [
        (6, 3, 0.0),
        (5, 3, -0.190983),
        (7, 3, 1.0),
        (4, 3, -1.0),
        (3, 3, -1.5),
    ],
)
def test_theoretical_optimum_values(n, k, expected):
    assert theoretical_optimum(n, k).max_cost == pytest.approx(expected, abs=1e-6)


def test_n5_value_matches_reported_decimal():
    # reported as approximately -0.1910
    assert round(theoretical_optimum(5, 3).max_cost, 4) == -0.1910


def test_uniqueness_flag():
    assert theoretical_optimum(6, 3).unique
    assert theoretical_optimum(12, 3).unique
    assert not theoretical_optimum(4, 3).unique
    assert not theoretical_optimum(7, 3).unique
    assert not theoretical_optimum(6, 2).unique


def test_unsupported_k():
    with pytest.raises(NotImplementedError):
        theoretical_optimum(8, 4)
    with pytest.raises(ValueError):
        theoretical_optimum(2, 3)


@pytest.mark.parametrize("n", range(2, 13))
def test_k2_optimum_is_adjacent_pair_by_enumeration(n):
    d = generate(Family.K2_UNIFORM, n)
    pair_costs = [pairwise_cost(d, s) for s in all_subsets(n, 2)]
    assert max(pair_costs) == pytest.approx(theoretical_optimum(n, 2).max_cost, abs=1e-12)


COVERED = [(n, 2) for n in range(2, 13)] + [(n, 3) for n in range(3, 14)]


@pytest.mark.parametrize("n, k", COVERED)
def test_generated_design_attains_optimum(n, k):
    d = generate(auto_family(n, k), n)
    assert worst_case(d, k).max_cost == pytest.approx(theoretical_optimum(n, k).max_cost, abs=1e-12)
    assert brute_worst(d, k) == pytest.approx(theoretical_optimum(n, k).max_cost, abs=1e-12)


def test_auto_family_dispatch():
    assert auto_family(9, 2) is Family.K2_UNIFORM
    assert auto_family(8, 3) is Family.K3_EVEN
    assert auto_family(5, 3) is Family.K3_UNIFORM_SMALL
    assert auto_family(3, 3) is Family.K3_UNIFORM_SMALL
    assert auto_family(11, 3) is Family.K3_SHIFTED_ODD
    with pytest.raises(ValueError):
        auto_family(8, 4)


# ---------------------------------------------------------------- properties


def test_n4_family_flat_on_grid():
    ts = np.arange(50) * PI / 50
    for t1 in ts:
        for t2 in ts:
            d = generate(Family.K3_N4_FAMILY, 4, t1=float(t1), t2=float(t2))
            for s in all_subsets(4, 3):
                assert abs(pairwise_cost(d, s) + 1.0) <= 1e-12


def test_n4_family_default_is_optimal():
    d = generate(Family.K3_N4_FAMILY, 4)
    assert worst_case(d, 3).max_cost == pytest.approx(-1.0, abs=1e-12)
    # t1 = t2 = 0 gives the same multiset as the even-N construction
    same = generate(Family.K3_N4_FAMILY, 4, t1=0.0, t2=0.0)
    assert sorted(same.angles) == sorted(generate(Family.K3_EVEN, 4).angles)


@pytest.mark.parametrize("n", [6, 8, 10])
@pytest.mark.parametrize("delta", [0.01, -0.01, 0.05, -0.05])
def test_even_design_single_perturbation_strictly_worse(n, delta):
    base = generate(Family.K3_EVEN, n)
    opt = worst_case(base, 3).max_cost
    for i in range(n):
        th = list(base.angles)
        th[i] += delta
        assert worst_case(Design(th), 3).max_cost > opt + 1e-12


def test_uniform_n7_is_not_optimal():
    uniform = Design(i * PI / 7 for i in range(7))
    expected = 2 * math.cos(2 * PI / 7) + math.cos(4 * PI / 7)
    assert worst_case(uniform, 3).max_cost == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(1.0244587, abs=1e-7)
    shifted = worst_case(generate(Family.K3_SHIFTED_ODD, 7), 3).max_cost
    assert shifted == pytest.approx(1.0, abs=1e-12)
    assert expected > shifted
