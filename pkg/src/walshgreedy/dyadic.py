"""Exact step functions on the dyadic cells of [0, 1).

A :class:`DyadicStep` of level ``L`` is constant on each cell
``[t / 2**L, (t + 1) / 2**L)``.  Cell values are rationals stored as integer
numerators over one shared positive denominator, kept in lowest terms, so
equality is structural and every norm is an exact :class:`~fractions.Fraction`.

Floating point only appears in :func:`to_float_samples`.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import ResourceError

Rational = Fraction
RationalLike = Union[int, Fraction]

DEFAULT_LEVEL_CAP = 28
LEVEL_CAP_ENV = "WALSHGREEDY_LEVEL_CAP"


def level_cap() -> int:
    """Largest grid level any operation may materialize.

    Defaults to 28; override with the ``WALSHGREEDY_LEVEL_CAP`` environment
    variable.
    """
    raw = os.environ.get(LEVEL_CAP_ENV)
    if raw is None or raw == "":
        return DEFAULT_LEVEL_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"{LEVEL_CAP_ENV} must be an integer, got {raw!r}") from None
    if cap < 0:
        raise ValueError(f"{LEVEL_CAP_ENV} must be nonnegative, got {cap}")
    return cap


def check_level(level: int, cap: int | None = None) -> None:
    if level < 0:
        raise ValueError(f"level must be nonnegative, got {level}")
    cap = level_cap() if cap is None else cap
    if level > cap:
        raise ResourceError(
            f"grid level {level} exceeds the memory guard (level cap {cap})"
        )


@dataclass(frozen=True)
class DyadicStep:
    """Function on [0, 1) that is constant on the ``2**level`` dyadic cells.

    ``numerators[t] / denominator`` is the value on cell ``t``.  The pair is
    normalized on construction: ``denominator > 0`` and the gcd of the
    denominator with all numerators is 1.
    """

    level: int
    numerators: tuple[int, ...]
    denominator: int = 1

    def __post_init__(self) -> None:
        check_level(self.level)
        nums = tuple(int(v) for v in self.numerators)
        if len(nums) != 1 << self.level:
            raise ValueError(
                f"level {self.level} needs {1 << self.level} cell values, got {len(nums)}"
            )
        den = int(self.denominator)
        if den == 0:
            raise ZeroDivisionError("denominator must be nonzero")
        if den < 0:
            nums = tuple(-v for v in nums)
            den = -den
        g = math.gcd(den, *nums)
        if g > 1:
            nums = tuple(v // g for v in nums)
            den //= g
        object.__setattr__(self, "numerators", nums)
        object.__setattr__(self, "denominator", den)

    @classmethod
    def from_values(cls, values: Sequence[RationalLike]) -> "DyadicStep":
        """Build from explicit cell values; the length must be a power of two."""
        size = len(values)
        if size == 0 or size & (size - 1):
            raise ValueError(f"number of cells must be a power of two, got {size}")
        fracs = [Fraction(v) for v in values]
        den = math.lcm(*(v.denominator for v in fracs))
        return cls(size.bit_length() - 1, tuple(v.numerator * (den // v.denominator) for v in fracs), den)

    @classmethod
    def constant(cls, value: RationalLike, level: int = 0) -> "DyadicStep":
        value = Fraction(value)
        return cls(level, (value.numerator,) * (1 << level), value.denominator)

    @classmethod
    def zero(cls, level: int = 0) -> "DyadicStep":
        return cls(level, (0,) * (1 << level), 1)

    @cached_property
    def values(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(n, self.denominator) for n in self.numerators)

    def __len__(self) -> int:
        return len(self.numerators)

    def __call__(self, x: RationalLike) -> Fraction:
        """Evaluate at a point of [0, 1) using the left-closed cell convention."""
        x = Fraction(x)
        if not 0 <= x < 1:
            raise ValueError(f"x must lie in [0, 1), got {x}")
        cell = math.floor(x * (1 << self.level))
        return Fraction(self.numerators[cell], self.denominator)

    def __add__(self, other: "DyadicStep") -> "DyadicStep":
        return linear_combine([(1, self), (1, other)])

    def __sub__(self, other: "DyadicStep") -> "DyadicStep":
        return linear_combine([(1, self), (-1, other)])

    def __neg__(self) -> "DyadicStep":
        return DyadicStep(self.level, tuple(-v for v in self.numerators), self.denominator)

    def __mul__(self, other):
        if isinstance(other, DyadicStep):
            return pointwise_product(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def _object_array(self) -> np.ndarray:
        out = np.empty(len(self.numerators), dtype=object)
        out[:] = self.numerators
        return out


def _refined_numerators(f: DyadicStep, target_level: int) -> np.ndarray:
    arr = f._object_array()
    if target_level > f.level:
        arr = np.repeat(arr, 1 << (target_level - f.level))
    return arr


def refine(f: DyadicStep, target_level: int) -> DyadicStep:
    """Re-express ``f`` on the finer grid of ``target_level``.

    Each cell value is duplicated ``2**(target_level - f.level)`` times.
    """
    if target_level < f.level:
        raise ValueError(
            f"cannot coarsen: target level {target_level} < current level {f.level}"
        )
    check_level(target_level)
    if target_level == f.level:
        return f
    return DyadicStep(target_level, tuple(_refined_numerators(f, target_level).tolist()), f.denominator)


def scale(f: DyadicStep, c: RationalLike) -> DyadicStep:
    c = Fraction(c)
    return DyadicStep(f.level, tuple(c.numerator * v for v in f.numerators), c.denominator * f.denominator)


def linear_combine(terms: Iterable[tuple[RationalLike, DyadicStep]]) -> DyadicStep:
    """Exact ``sum(c * f for c, f in terms)`` on the finest input level."""
    terms = [(Fraction(c), f) for c, f in terms]
    if not terms:
        raise ValueError("linear_combine needs at least one term")
    level = max(f.level for _, f in terms)
    check_level(level)
    den = math.lcm(*(c.denominator * f.denominator for c, f in terms))
    acc = np.zeros(1 << level, dtype=object)
    for c, f in terms:
        if c == 0:
            continue
        weight = c.numerator * (den // (c.denominator * f.denominator))
        acc += weight * _refined_numerators(f, level)
    return DyadicStep(level, tuple(acc.tolist()), den)


def pointwise_product(f: DyadicStep, g: DyadicStep) -> DyadicStep:
    level = max(f.level, g.level)
    check_level(level)
    prod = _refined_numerators(f, level) * _refined_numerators(g, level)
    return DyadicStep(level, tuple(prod.tolist()), f.denominator * g.denominator)


def l1_norm(f: DyadicStep) -> Fraction:
    """Exact ``integral_0^1 |f(x)| dx``."""
    return Fraction(sum(map(abs, f.numerators)), f.denominator << f.level)


def integral(f: DyadicStep) -> Fraction:
    """Exact ``integral_0^1 f(x) dx``."""
    return Fraction(sum(f.numerators), f.denominator << f.level)


def same_function(f: DyadicStep, g: DyadicStep) -> bool:
    """True when ``f`` and ``g`` agree on every cell of their common refinement."""
    level = max(f.level, g.level)
    return refine(f, level) == refine(g, level)


def to_float_samples(f: DyadicStep) -> list[float]:
    """Cell values rounded to the nearest float, left to right."""
    den = f.denominator
    # int / int true division is correctly rounded
    return [n / den for n in f.numerators]
