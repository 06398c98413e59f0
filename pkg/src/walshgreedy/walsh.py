"""Rademacher and Walsh-Paley functions on dyadic grids.

Cells are numbered left to right, so the binary digits of a cell index are
the leading binary digits of every point in the cell.  ``r_k`` flips sign
with binary digit ``k + 1`` of ``x``, which is bit ``level - 1 - k`` of the
cell index.  ``W_n`` is the product of ``r_m`` over the set bits ``m`` of
``n`` (Paley ordering).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .dyadic import DyadicStep, check_level


def _check_cell(level: int, cell: int) -> None:
    if level < 0:
        raise ValueError(f"level must be nonnegative, got {level}")
    if not 0 <= cell < 1 << level:
        raise ValueError(f"cell {cell} outside [0, 2**{level})")


def rademacher_factors(n: int) -> list[int]:
    """Exponents ``m_1 > m_2 > ...`` with ``n = sum(2**m_s)``."""
    if n < 0:
        raise ValueError(f"Walsh index must be nonnegative, got {n}")
    return [m for m in range(n.bit_length() - 1, -1, -1) if n >> m & 1]


def bit_reverse(cell: int, width: int) -> int:
    """Reverse the low ``width`` bits of ``cell``."""
    out = 0
    for _ in range(width):
        out = (out << 1) | (cell & 1)
        cell >>= 1
    return out


def rademacher_sign(k: int, level: int, cell: int) -> int:
    """Value of ``r_k`` on cell ``cell`` of the given level."""
    _check_cell(level, cell)
    if not 0 <= k < level:
        raise ValueError(f"level {level} is too coarse to resolve r_{k}")
    return -1 if cell >> (level - 1 - k) & 1 else 1


def walsh_sign(n: int, level: int, cell: int) -> int:
    """Value of ``W_n`` on a cell: ``(-1)**popcount(n & bitreverse(cell))``."""
    _check_cell(level, cell)
    if n < 0:
        raise ValueError(f"Walsh index must be nonnegative, got {n}")
    if n >= 1 << level:
        raise ValueError(f"W_{n} is not constant on the cells of level {level}")
    return -1 if (n & bit_reverse(cell, level)).bit_count() & 1 else 1


@lru_cache(maxsize=64)
def _cells(level: int) -> np.ndarray:
    cells = np.arange(1 << level, dtype=np.int64)
    cells.flags.writeable = False
    return cells


def walsh_signs(n: int, level: int) -> np.ndarray:
    """Cell values of ``W_n`` as an ``int64`` array of +-1.

    Built as the product of the Rademacher square waves selected by ``n``.
    """
    if n < 0:
        raise ValueError(f"Walsh index must be nonnegative, got {n}")
    if n >= 1 << level:
        raise ValueError(f"W_{n} is not constant on the cells of level {level}")
    check_level(level)
    cells = _cells(level)
    flips = np.zeros(1 << level, dtype=np.int64)
    for m in rademacher_factors(n):
        flips ^= cells >> (level - 1 - m)
    return 1 - 2 * (flips & 1)


def walsh_step(n: int, level: int) -> DyadicStep:
    return DyadicStep(level, tuple(walsh_signs(n, level).tolist()))


def rademacher_step(k: int, level: int) -> DyadicStep:
    if not 0 <= k < level:
        raise ValueError(f"level {level} is too coarse to resolve r_{k}")
    return walsh_step(1 << k, level)
