"""Walsh-Dirichlet kernels ``D_m = W_0 + ... + W_{m-1}`` and their L1 norms."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .dyadic import DyadicStep, check_level, level_cap
from .errors import ResourceError
from .walsh import walsh_signs


@dataclass(frozen=True)
class KernelNormRecord:
    """Lebesgue constant ``||D_m||_1`` of an index ``m`` in block ``2**(block-1) <= m < 2**block``."""

    m: int
    lebesgue: Fraction
    block: int


def _kernel_cells(m: int, level: int) -> np.ndarray:
    # D_{2^(k+1)} = D_{2^k} + W_{2^k} D_{2^k};  D_{2^k + j} = D_{2^k} + W_{2^k} D_j
    size = 1 << level
    pow2 = np.ones(size, dtype=np.int64)
    acc = np.zeros(size, dtype=np.int64)
    for k in range(m.bit_length()):
        w = walsh_signs(1 << k, level) if k < level else None
        if m >> k & 1:
            acc = pow2 + w * acc if w is not None else pow2 + acc
        if w is not None:
            pow2 = pow2 + w * pow2
    return acc


def dirichlet_step(m: int, level: int) -> DyadicStep:
    """``D_m`` on the grid of ``level``, built from the doubling recursion."""
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    if m > 1 << level:
        raise ValueError(f"D_{m} is not constant on the cells of level {level}")
    check_level(level)
    return DyadicStep(level, tuple(_kernel_cells(m, level).tolist()))


def dirichlet_pow2(j: int, level: int) -> DyadicStep:
    """Closed form of ``D_{2**j}``: ``2**j`` on ``[0, 2**-j)``, zero elsewhere."""
    if j < 0:
        raise ValueError(f"j must be nonnegative, got {j}")
    if j > level:
        raise ValueError(f"D_(2^{j}) is not constant on the cells of level {level}")
    check_level(level)
    inside = 1 << (level - j)
    return DyadicStep(level, (1 << j,) * inside + (0,) * ((1 << level) - inside))


def lebesgue_constant(m: int) -> Fraction:
    """Exact ``||D_m||_1`` via ``L(2**k + j) = 1 - j / 2**k + L(j)``, ``0 <= j < 2**k``.

    Costs one step per set bit of ``m``, so ``m`` may be far beyond any grid.
    """
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    total = Fraction(0)
    while m:
        k = m.bit_length() - 1
        j = m - (1 << k)
        total += 1 - Fraction(j, 1 << k)
        m = j
    return total


def _scaled_lebesgue_table(k: int) -> np.ndarray:
    """``L(j) * 2**k`` for all ``0 <= j < 2**k`` as int64."""
    table = np.zeros(1, dtype=np.int64)
    for b in range(k):
        j = np.arange(1 << b, dtype=np.int64)
        upper = (1 << (b + 1)) - 2 * j + 2 * table
        table = np.concatenate([2 * table, upper])
    return table


MAX_SCAN_BLOCK = 26


def block_max_search(k: int) -> KernelNormRecord:
    """Largest Lebesgue constant over the block ``2**(k-1) <= m < 2**k``.

    Exhaustive scan; ties go to the smallest ``m``.  Blocks above
    ``MAX_SCAN_BLOCK`` (or the level cap) raise :class:`ResourceError`.
    """
    if k < 1:
        raise ValueError(f"block index must be >= 1, got {k}")
    limit = min(level_cap(), MAX_SCAN_BLOCK)
    if k > limit:
        raise ResourceError(f"block {k} is too large for an exhaustive scan (limit {limit})")
    # L(2^(k-1) + j) * 2^(k-1) = 2^(k-1) - j + L(j) * 2^(k-1)
    half = 1 << (k - 1)
    block = half - np.arange(half, dtype=np.int64) + _scaled_lebesgue_table(k - 1)
    offset = int(np.argmax(block))
    return KernelNormRecord(m=half + offset, lebesgue=Fraction(int(block[offset]), half), block=k)


def check_log_bound(m: int, lebesgue: Fraction) -> tuple[bool, str]:
    """Decide ``lebesgue >= log2(m) / 4`` exactly.

    Returns the verdict and the route that settled it: ``"k/4"`` when
    ``4 * lebesgue >= k`` with ``k = m.bit_length()`` (so ``log2 m < k``),
    ``"(k-1)/4"`` when ``4 * lebesgue < k - 1 <= log2 m``, ``"exact"`` for
    powers of two, and ``"bracket"`` when an interval enclosure of
    ``log2 m`` was needed.
    """
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    target = 4 * Fraction(lebesgue)
    k = m.bit_length()
    if target >= k:
        return True, "k/4"
    if target < k - 1:
        return False, "(k-1)/4"
    if m & (m - 1) == 0:
        return target >= k - 1, "exact"
    # log2 m is irrational here, so a fine enough enclosure always separates
    iv = mpmath.iv
    saved = iv.prec
    try:
        prec = 64
        while prec <= 1 << 20:
            iv.prec = prec
            log2m = iv.log(iv.mpf(m)) / iv.log(iv.mpf(2))
            bound = iv.mpf(target.numerator) / target.denominator
            if log2m.b < bound.a:
                return True, "bracket"
            if log2m.a > bound.b:
                return False, "bracket"
            prec *= 2
    finally:
        iv.prec = saved
    raise ArithmeticError(f"could not separate log2({m}) from {target}")
