from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from walshgreedy.dirichlet import (
    block_max_search,
    check_log_bound,
    dirichlet_pow2,
    dirichlet_step,
    lebesgue_constant,
)
from walshgreedy.dyadic import DyadicStep, l1_norm, linear_combine, pointwise_product
from walshgreedy.errors import ResourceError
from walshgreedy.walsh import walsh_step

from oracles import dirichlet_grid, l1


def test_dirichlet_step_examples():
    assert dirichlet_step(1, 3) == DyadicStep.constant(1, 3)
    assert dirichlet_step(4, 2).values == (4, 0, 0, 0)
    assert dirichlet_step(3, 2).values == (3, 1, 1, -1)


@pytest.mark.parametrize("level", range(0, 6))
def test_dirichlet_step_matches_direct_summation(level):
    for m in range(1, (1 << level) + 1):
        assert list(dirichlet_step(m, level).numerators) == dirichlet_grid(m, level)


def test_dirichlet_step_bounds():
    with pytest.raises(ValueError):
        dirichlet_step(5, 2)
    with pytest.raises(ValueError):
        dirichlet_step(0, 2)


def test_dirichlet_pow2_examples():
    assert dirichlet_pow2(0, 0).values == (1,)
    assert dirichlet_pow2(2, 2).values == (4, 0, 0, 0)
    assert dirichlet_pow2(3, 3).values == (8,) + (0,) * 7
    with pytest.raises(ValueError):
        dirichlet_pow2(3, 2)


@pytest.mark.parametrize("level", range(0, 11))
def test_closed_form_matches_recursion(level):
    for j in range(level + 1):
        assert dirichlet_pow2(j, level) == dirichlet_step(1 << j, level)


@given(st.integers(0, 8).flatmap(lambda k: st.tuples(st.just(k), st.integers(0, (1 << k) - 1))))
def test_kernel_recursion(args):
    k, j = args
    level = k + 1
    rhs = dirichlet_pow2(k, level) if j == 0 else linear_combine(
        [(1, dirichlet_step(1 << k, level)),
         (1, pointwise_product(walsh_step(1 << k, level), dirichlet_step(j, level)))]
    )
    assert dirichlet_step((1 << k) + j, level) == rhs


def test_lebesgue_examples():
    assert lebesgue_constant(0) == 0
    assert lebesgue_constant(1) == 1
    assert lebesgue_constant(3) == Fraction(3, 2)
    assert lebesgue_constant(13) == Fraction(17, 8)
    assert lebesgue_constant(11) == Fraction(17, 8)


def test_lebesgue_matches_brute_force_grid():
    level = 6
    for m in range(1, (1 << level) + 1):
        assert lebesgue_constant(m) == l1(dirichlet_grid(m, level))


def test_lebesgue_matches_grid_up_to_level_10():
    level = 10
    for m in range(1, (1 << level) + 1, 7):
        assert lebesgue_constant(m) == l1_norm(dirichlet_step(m, level))


def test_lebesgue_handles_huge_m():
    m = (1 << 4000) + (1 << 17) + 5
    assert lebesgue_constant(m) == 1 - Fraction((1 << 17) + 5, 1 << 4000) + lebesgue_constant((1 << 17) + 5)


@given(st.integers(1, 1 << 40))
def test_lebesgue_at_least_one(m):
    assert lebesgue_constant(m) >= 1


def test_block_max_examples():
    r = block_max_search(1)
    assert (r.m, r.lebesgue, r.block) == (1, 1, 1)
    r = block_max_search(2)
    assert (r.m, r.lebesgue) == (3, Fraction(3, 2))
    r = block_max_search(3)
    assert (r.m, r.lebesgue) == (5, Fraction(7, 4))
    r = block_max_search(4)
    assert (r.m, r.lebesgue) == (11, Fraction(17, 8))  # ties with 13


@pytest.mark.parametrize("k", range(1, 12))
def test_block_max_against_exhaustive_recursion(k):
    candidates = range(1 << (k - 1), 1 << k)
    best = max(candidates, key=lambda m: (lebesgue_constant(m), -m))
    r = block_max_search(k)
    assert (r.m, r.lebesgue) == (best, lebesgue_constant(best))


def test_block_max_guard():
    with pytest.raises(ValueError):
        block_max_search(0)
    with pytest.raises(ResourceError):
        block_max_search(40)


def test_log_bound_routes():
    assert check_log_bound(11, Fraction(17, 8)) == (True, "k/4")
    assert check_log_bound(1, Fraction(1)) == (True, "k/4")
    assert check_log_bound(1 << 10, Fraction(1, 4)) == (False, "(k-1)/4")
    assert check_log_bound(8, Fraction(3, 4)) == (True, "exact")
    # log2(5)/4 = 0.5805
    assert check_log_bound(5, Fraction(59, 100)) == (True, "bracket")
    assert check_log_bound(5, Fraction(58, 100)) == (False, "bracket")


@pytest.mark.parametrize("k", range(2, 21))
def test_log_bound_for_block_maximizers(k):
    r = block_max_search(k)
    assert check_log_bound(r.m, r.lebesgue)[0]
    assert r.lebesgue >= Fraction(k - 1, 4)
