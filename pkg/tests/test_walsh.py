import pytest
from hypothesis import given, strategies as st

from walshgreedy.dyadic import integral, pointwise_product, refine
from walshgreedy.walsh import (
    bit_reverse,
    rademacher_factors,
    rademacher_sign,
    rademacher_step,
    walsh_sign,
    walsh_signs,
    walsh_step,
)

from oracles import midpoints, rademacher_at, walsh_grid


def test_rademacher_examples():
    assert rademacher_sign(0, 1, 0) == 1
    assert rademacher_sign(0, 1, 1) == -1
    assert [rademacher_sign(1, 2, t) for t in range(4)] == [1, -1, 1, -1]


def test_rademacher_needs_fine_enough_level():
    with pytest.raises(ValueError):
        rademacher_sign(2, 2, 0)


@pytest.mark.parametrize("level", range(1, 7))
def test_rademacher_matches_point_evaluation(level):
    for k in range(level):
        expected = [rademacher_at(k, x) for x in midpoints(level)]
        assert [rademacher_sign(k, level, t) for t in range(1 << level)] == expected
        assert list(rademacher_step(k, level).numerators) == expected


def test_walsh_sign_examples():
    assert all(walsh_sign(0, 3, t) == 1 for t in range(8))
    assert [walsh_sign(3, 2, t) for t in range(4)] == [1, -1, -1, 1]
    assert walsh_sign(5, 3, 7) == rademacher_sign(2, 3, 7) * rademacher_sign(0, 3, 7)


def test_walsh_sign_rejects_coarse_level():
    with pytest.raises(ValueError):
        walsh_sign(4, 2, 0)
    with pytest.raises(ValueError):
        walsh_step(8, 3)


def test_walsh_step_examples():
    assert walsh_step(0, 0).values == (1,)
    assert walsh_step(1, 1).values == (1, -1)
    assert walsh_step(7, 3) == pointwise_product(walsh_step(4, 3), walsh_step(3, 3))


@pytest.mark.parametrize("level", range(0, 7))
def test_walsh_step_matches_point_evaluation(level):
    for n in range(1 << level):
        expected = walsh_grid(n, level)
        assert list(walsh_step(n, level).numerators) == expected
        assert [walsh_sign(n, level, t) for t in range(1 << level)] == expected


def test_rademacher_factors():
    assert rademacher_factors(0) == []
    assert rademacher_factors(13) == [3, 2, 0]


@given(st.integers(0, 10).flatmap(lambda w: st.tuples(st.just(w), st.integers(0, (1 << w) - 1))))
def test_bit_reverse_is_involution(args):
    width, cell = args
    assert bit_reverse(bit_reverse(cell, width), width) == cell


@given(st.integers(0, 9).flatmap(lambda k: st.tuples(st.just(k), st.integers(0, (1 << k) - 1))))
def test_multiplicativity(args):
    k, j = args
    level = k + 1
    assert walsh_step((1 << k) + j, level) == pointwise_product(walsh_step(1 << k, level), walsh_step(j, level))


def test_orthonormality_small():
    level = 5
    steps = [walsh_step(n, level) for n in range(1 << level)]
    for m, wm in enumerate(steps):
        for n, wn in enumerate(steps):
            assert integral(pointwise_product(wm, wn)) == (1 if m == n else 0)


@given(st.integers(0, 63), st.integers(0, 4))
def test_nested_levels_agree(n, extra):
    level = max(n.bit_length(), 1)
    coarse = walsh_step(n, level)
    assert refine(coarse, level + extra) == walsh_step(n, level + extra)


@given(st.integers(0, 255))
def test_sign_functions_square_to_one(n):
    s = walsh_signs(n, 8)
    assert set(s.tolist()) <= {-1, 1}
    assert (s * s == 1).all()
