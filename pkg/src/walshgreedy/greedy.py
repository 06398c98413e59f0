"""Greedy (thresholding) approximants of finite Walsh expansions.

Coefficients are either explicit rationals or *symbolic* values
``1/nu**2 + 2**-n``.  Symbolic values are compared without expanding
``2**-n``, which can be astronomically small, and are only truncated when
a grid is synthesized; the truncated mass is carried along as a certified
remainder.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np

from .dyadic import DyadicStep, check_level, l1_norm
from .errors import CertificationError
from .walsh import walsh_signs

DEFAULT_PRECISION_BITS = 64


@dataclass(frozen=True)
class Symbolic:
    """The value ``1/nu**2 + 2**-n``."""

    nu: int
    n: int

    def __post_init__(self):
        if self.nu < 1 or self.n < 1:
            raise ValueError(f"symbolic coefficient needs nu, n >= 1, got ({self.nu}, {self.n})")

    @property
    def base(self) -> Fraction:
        return Fraction(1, self.nu * self.nu)

    def exact(self) -> Fraction:
        return self.base + Fraction(1, 1 << self.n)


@dataclass(frozen=True)
class Explicit:
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))

    def exact(self) -> Fraction:
        return self.value


Coefficient = Union[Symbolic, Explicit]


@dataclass(frozen=True)
class Term:
    index: int
    coeff: Coefficient


@dataclass(frozen=True)
class Expansion:
    """Finite Walsh expansion with strictly ascending indices."""

    terms: tuple[Term, ...]

    def __post_init__(self):
        terms = tuple(self.terms)
        prev = -1
        for t in terms:
            if t.index <= prev:
                raise ValueError(
                    f"indices must be strictly ascending; {t.index} follows {prev}"
                )
            prev = t.index
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, Coefficient | int | Fraction]]) -> "Expansion":
        terms = []
        for index, c in pairs:
            if not isinstance(c, (Symbolic, Explicit)):
                c = Explicit(Fraction(c))
            terms.append(Term(int(index), c))
        return cls(tuple(terms))

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    @property
    def min_level(self) -> int:
        """Coarsest grid on which every term is constant."""
        return self.terms[-1].index.bit_length() if self.terms else 0


class Synthesis(NamedTuple):
    """A synthesized grid function and the L1 mass of the tails dropped from it."""

    step: DyadicStep
    remainder: Fraction


class Bounded(NamedTuple):
    """``value`` is exact for the synthesized grid; the true quantity is within ``remainder``."""

    value: Fraction
    remainder: Fraction


def dyadic_tail_sum(exponents: Iterable[int]) -> Fraction:
    """Exact ``sum(2**-n for n in exponents)``.

    Consecutive runs are summed in closed form, so long blocks of huge
    exponents stay cheap.
    """
    counts = Counter(exponents)
    if not counts:
        return Fraction(0)
    keys = sorted(counts)
    top = keys[-1]
    total = 0
    start = prev = keys[0]
    for n in keys[1:] + [None]:
        if n is not None and n == prev + 1:
            prev = n
            continue
        # sum_{n=start}^{prev} 2^(top-n)
        total += (1 << (top - start + 1)) - (1 << (top - prev))
        if n is not None:
            start = prev = n
    for n, c in counts.items():
        if c > 1:
            total += (c - 1) << (top - n)
    return Fraction(total, 1 << top)


def coeff_value(c: Coefficient, precision_bits: int = DEFAULT_PRECISION_BITS) -> tuple[Fraction, Fraction]:
    """Rational value used for grid synthesis, and the certified remainder.

    For ``Symbolic(nu, n)`` with ``n > precision_bits`` the ``2**-n`` part
    is dropped and returned as the remainder; otherwise the value is exact
    and the remainder is 0.
    """
    if precision_bits < 1:
        raise ValueError(f"precision_bits must be >= 1, got {precision_bits}")
    if isinstance(c, Explicit):
        return c.value, Fraction(0)
    if c.n > precision_bits:
        return c.base, Fraction(1, 1 << c.n)
    return c.exact(), Fraction(0)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _compare_with_power(d: Fraction, n: int) -> int:
    """``sign(d - 2**-n)`` without building ``2**n`` when it is not needed."""
    if d <= 0:
        return -1
    num, den = d.numerator, d.denominator
    if num.bit_length() - 1 + n >= den.bit_length():
        return 1
    return _sign((num << n) - den)


def _compare_symbolic(a: Symbolic, b: Symbolic, exact: bool) -> int:
    if a.nu == b.nu:
        return _sign(b.n - a.n)
    if a.nu > b.nu:
        return -_compare_symbolic(b, a, exact)
    # a.nu < b.nu: a > b is certified once the base gap beats b's tail
    margin = a.base - b.base
    if _compare_with_power(margin, b.n) > 0:
        return 1
    if not exact:
        raise CertificationError(
            f"cannot certify 1/{a.nu}^2 + 2^-{a.n} vs 1/{b.nu}^2 + 2^-{b.n} "
            "symbolically; evaluate exactly"
        )
    return _sign(a.exact() - b.exact())


def coeff_compare(a: Coefficient, b: Coefficient, exact: bool = False) -> int:
    """Exact three-way comparison of coefficient values: -1, 0 or 1.

    Symbolic pairs with different ``nu`` are decided by the certified margin
    ``1/nu_a**2 - 1/nu_b**2 > 2**-n_b``; if the margin does not certify,
    :class:`CertificationError` is raised unless ``exact`` is set.
    """
    if isinstance(a, Explicit) and isinstance(b, Explicit):
        return _sign(a.value - b.value)
    if isinstance(a, Symbolic) and isinstance(b, Symbolic):
        return _compare_symbolic(a, b, exact)
    if isinstance(a, Symbolic):
        return -coeff_compare(b, a, exact)
    # explicit a vs symbolic b
    return _compare_with_power(a.value - b.base, b.n)


def magnitude(c: Coefficient) -> Coefficient:
    if isinstance(c, Explicit):
        return Explicit(abs(c.value))
    return c


def greedy_order(e: Expansion, exact: bool = False) -> list[int]:
    """Term positions by decreasing coefficient magnitude, ties by ascending index.

    Every prefix of the result is an admissible greedy set: no coefficient
    outside the prefix is larger in magnitude than one inside it.
    """
    terms = e.terms
    mags = [magnitude(t.coeff) for t in terms]

    def cmp(i: int, j: int) -> int:
        c = coeff_compare(mags[j], mags[i], exact)
        return c if c else terms[i].index - terms[j].index

    # already-ordered input costs len - 1 comparisons under timsort
    return sorted(range(len(terms)), key=cmp_to_key(cmp))


def synthesize(terms: Sequence[Term], level: int,
               precision_bits: int = DEFAULT_PRECISION_BITS) -> Synthesis:
    """``sum(c * W_index)`` on a grid, with truncated symbolic tails as remainder."""
    check_level(level)
    size = 1 << level
    groups: dict[Fraction, np.ndarray] = {}
    dropped: list[int] = []
    for t in terms:
        if t.index >= size:
            raise ValueError(f"W_{t.index} is not constant on the cells of level {level}")
        value, rem = coeff_value(t.coeff, precision_bits)
        if rem:
            dropped.append(t.coeff.n)
        if value == 0:
            continue
        signs = walsh_signs(t.index, level)
        if value in groups:
            groups[value] += signs
        else:
            groups[value] = signs.copy()
    remainder = dyadic_tail_sum(dropped)
    if not groups:
        return Synthesis(DyadicStep.zero(level), remainder)
    den = math.lcm(*(v.denominator for v in groups))
    acc = np.zeros(size, dtype=object)
    for value, counts in groups.items():
        acc += (value.numerator * (den // value.denominator)) * counts.astype(object)
    return Synthesis(DyadicStep(level, tuple(acc.tolist()), den), remainder)


def _resolve_order(e: Expansion, order: Sequence[int] | None) -> Sequence[int]:
    if order is None:
        return greedy_order(e)
    if len(order) != len(e):
        raise ValueError("order length does not match the expansion")
    return order


def greedy_approximant(e: Expansion, m: int, level: int,
                       precision_bits: int = DEFAULT_PRECISION_BITS,
                       order: Sequence[int] | None = None) -> Synthesis:
    """The m-th greedy approximant ``G_m`` on the grid of ``level``."""
    if not 0 <= m <= len(e):
        raise ValueError(f"m must lie in [0, {len(e)}], got {m}")
    order = _resolve_order(e, order)
    return synthesize([e.terms[p] for p in order[:m]], level, precision_bits)


def greedy_gap_norm(e: Expansion, m1: int, m2: int, level: int,
                    precision_bits: int = DEFAULT_PRECISION_BITS,
                    order: Sequence[int] | None = None) -> Bounded:
    """``||G_m2 - G_m1||_1``, summing only the greedy positions ``m1 .. m2-1``."""
    if not 0 <= m1 <= m2 <= len(e):
        raise ValueError(f"need 0 <= m1 <= m2 <= {len(e)}, got m1={m1}, m2={m2}")
    order = _resolve_order(e, order)
    step, remainder = synthesize([e.terms[p] for p in order[m1:m2]], level, precision_bits)
    return Bounded(l1_norm(step), remainder)


def prefix_norms(e: Expansion, level: int,
                 precision_bits: int = DEFAULT_PRECISION_BITS,
                 order: Sequence[int] | None = None) -> list[Fraction]:
    """``[||G_0||_1, ||G_1||_1, ..., ||G_N||_1]`` on the grid (tails truncated)."""
    check_level(level)
    order = _resolve_order(e, order)
    size = 1 << level
    values = []
    for p in order:
        t = e.terms[p]
        if t.index >= size:
            raise ValueError(f"W_{t.index} is not constant on the cells of level {level}")
        values.append(coeff_value(t.coeff, precision_bits)[0])
    den = math.lcm(1, *(v.denominator for v in values))
    scale = den << level
    acc = np.zeros(size, dtype=object)
    norms = [Fraction(0)]
    for p, v in zip(order, values):
        acc += (v.numerator * (den // v.denominator)) * walsh_signs(e.terms[p].index, level).astype(object)
        norms.append(Fraction(int(np.abs(acc).sum()), scale))
    return norms


def quasi_greedy_scan(e: Expansion, level: int,
                      precision_bits: int = DEFAULT_PRECISION_BITS) -> Fraction:
    """``max_m ||G_m||_1 / ||f||_1`` over all greedy prefixes.

    A lower witness for the quasi-greedy constant; it is the exact constant
    over admissible sets only when no two magnitudes tie.
    """
    norms = prefix_norms(e, level, precision_bits)
    if norms[-1] == 0:
        raise ZeroDivisionError("expansion has zero L1 norm")
    return max(norms) / norms[-1]
