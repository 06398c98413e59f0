"""An L1 function whose greedy Walsh approximants do not converge.

Block ``nu`` occupies the Walsh indices ``[2**k_nu, 2**(k_nu + 1))`` and
carries the coefficients ``1/nu**2 + 2**-n``.  All coefficients strictly
decrease, so greedy order is index order, and the greedy partial sums
jump by roughly ``||D_m||_1 / nu**2`` inside each block.  The choice
``k_nu > (nu - 1)**2 + 1`` keeps those jumps above ``1/8`` while the
function itself has L1 norm at most ``sum(1/nu**2) + sum(2**(1 - 2**k_nu))``.

Everything here works on finite truncations with ``V`` blocks.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence, Union

from .dirichlet import block_max_search, check_log_bound, dirichlet_pow2, dirichlet_step, lebesgue_constant
from .dyadic import DyadicStep, check_level, l1_norm, level_cap, linear_combine, pointwise_product, scale
from .errors import CertificationError, ConstructionError, ResourceError, StageError
from .greedy import (
    DEFAULT_PRECISION_BITS,
    Expansion,
    Symbolic,
    Term,
    coeff_compare,
    dyadic_tail_sum,
    greedy_gap_norm,
    greedy_order,
)
from .walsh import walsh_step

log = logging.getLogger(__name__)

DEFAULT_GRID_LEVEL_MAX = 12
DEFAULT_MAX_TERMS = 1 << 20
EIGHTH = Fraction(1, 8)


@dataclass(frozen=True)
class BlockSpec:
    nu: int
    k_nu: int
    window: tuple[int, int]
    m_nu: int | None = None

    def __post_init__(self):
        if self.nu < 1:
            raise ConstructionError(f"nu must be >= 1, got {self.nu}")
        if self.k_nu <= (self.nu - 1) ** 2 + 1:
            raise ConstructionError(
                f"k_{self.nu} = {self.k_nu} violates k_nu > (nu-1)^2 + 1 = {(self.nu - 1) ** 2 + 1}"
            )
        lo, hi = self.window
        if not (lo <= self.N_nu and 2 * self.N_nu <= hi):
            raise ConstructionError(f"window {self.window} does not contain block [{self.N_nu}, {2 * self.N_nu})")
        if self.m_nu is not None and not self.N_nu <= self.m_nu < 2 * self.N_nu:
            raise ConstructionError(f"m_nu = {self.m_nu} outside [{self.N_nu}, {2 * self.N_nu})")

    @property
    def N_nu(self) -> int:
        return 1 << self.k_nu

    @property
    def block_len(self) -> int:
        return 1 << self.k_nu

    @property
    def indices(self) -> range:
        return range(self.N_nu, 2 * self.N_nu)


@dataclass(frozen=True)
class ConstructionConfig:
    """Parameters of a truncated construction.

    ``k_policy`` is ``"minimal"`` (``k_nu = (nu-1)**2 + 2``) or an explicit
    sequence of ``k`` values.  Grid cross-checks run only for blocks whose
    grid level ``k_nu + 1`` is at most ``grid_level_max``; larger blocks are
    certified by exact formulas alone.
    """

    blocks: int
    level_cap: int = field(default_factory=level_cap)
    k_policy: Union[str, tuple[int, ...]] = "minimal"
    grid_level_max: int = DEFAULT_GRID_LEVEL_MAX
    precision_bits: int = DEFAULT_PRECISION_BITS
    max_terms: int = DEFAULT_MAX_TERMS

    def __post_init__(self):
        if self.blocks < 1:
            raise ValueError(f"need at least one block, got V = {self.blocks}")
        if isinstance(self.k_policy, str):
            if self.k_policy != "minimal":
                raise ValueError(f"unknown k policy {self.k_policy!r}")
        else:
            object.__setattr__(self, "k_policy", tuple(int(k) for k in self.k_policy))


@dataclass(frozen=True)
class BlockCertificate:
    """Divergence certificate for one block.

    ``gap_lower = lebesgue / nu**2 - j2_bound`` uses ``m_nu`` from the block
    ``[2**k, 2**(k+1))``; ``j1_grid_norm`` is the grid norm of
    ``W_N**2 * D_m / nu**2``.  The ``greedy_*`` fields certify an actual
    greedy jump ``||G_{M+m} - G_M||_1`` with ``m < 2**k`` so the summed terms
    stay inside block ``nu``.
    """

    nu: int
    k_nu: int
    m_nu: int
    lebesgue: Fraction
    j2_bound: Fraction
    gap_lower: Fraction
    c1: Fraction
    passed: bool
    log_bound_holds: bool
    certificate_only: bool
    j1_grid_norm: Fraction | None
    greedy_start: int
    greedy_m: int
    greedy_lebesgue: Fraction
    greedy_j2_bound: Fraction
    greedy_gap_lower: Fraction
    greedy_gap_grid: Fraction | None
    greedy_gap_remainder: Fraction | None
    witness_passed: bool
    grid_consistent: bool | None


@dataclass(frozen=True)
class VerificationReport:
    blocks: int
    k_sequence: tuple[int, ...]
    records: tuple[BlockCertificate, ...]
    l1_norm_G: Fraction
    l1_upper_bound_G: Fraction
    l1_upper_bound_H: Fraction
    h_tail_mass: Fraction
    l1_bounds_hold: bool
    C1: Fraction
    min_gap_lower: Fraction
    all_passed: bool


def minimal_k(nu: int) -> int:
    return (nu - 1) ** 2 + 2


def _k_sequence(cfg: ConstructionConfig) -> list[int]:
    if cfg.k_policy == "minimal":
        return [minimal_k(nu) for nu in range(1, cfg.blocks + 1)]
    ks = list(cfg.k_policy)
    if len(ks) != cfg.blocks:
        raise ConstructionError(f"explicit k list has {len(ks)} entries for V = {cfg.blocks}")
    return ks


def choose_sequences(cfg: ConstructionConfig) -> list[BlockSpec]:
    """Block parameters ``k_nu`` and windows ``[2**k_nu, 2**(k_nu+1))``; ``m_nu`` unset."""
    ks = _k_sequence(cfg)
    for nu, k in enumerate(ks, start=1):
        if k <= (nu - 1) ** 2 + 1:
            raise ConstructionError(f"k_{nu} = {k} violates k_nu > (nu-1)^2 + 1")
    for nu in range(1, len(ks)):
        if ks[nu] < ks[nu - 1] + 1:
            raise ConstructionError(
                f"blocks {nu} and {nu + 1} overlap: need k_{nu + 1} >= k_{nu} + 1, got {ks[nu - 1]}, {ks[nu]}"
            )
    needed = ks[-1] + 1
    if needed > cfg.level_cap:
        feasible = sum(1 for k in ks if k + 1 <= cfg.level_cap)
        raise ResourceError(
            f"V = {cfg.blocks} needs grid level {needed} > level cap {cfg.level_cap}; "
            f"largest feasible V is {feasible}"
        )
    terms = [1 << k for k in ks]
    if sum(terms) > cfg.max_terms:
        feasible = 0
        while sum(terms[: feasible + 1]) <= cfg.max_terms:
            feasible += 1
        raise ResourceError(
            f"V = {cfg.blocks} needs {sum(terms)} expansion terms > limit {cfg.max_terms}; "
            f"largest feasible V is {feasible}"
        )
    return [BlockSpec(nu=nu, k_nu=k, window=(1 << k, 1 << (k + 1))) for nu, k in enumerate(ks, start=1)]


def block_terms(spec: BlockSpec) -> list[Term]:
    return [Term(n, Symbolic(spec.nu, n)) for n in spec.indices]


def _check_ordered(specs: Sequence[BlockSpec]) -> None:
    for a, b in zip(specs, specs[1:]):
        if b.nu != a.nu + 1 or 2 * a.N_nu > b.N_nu:
            raise ConstructionError(f"blocks nu={a.nu} and nu={b.nu} are not disjoint and increasing")


def assemble_expansion(specs: Sequence[BlockSpec], max_terms: int = DEFAULT_MAX_TERMS) -> Expansion:
    """Concatenate the blocks and certify strictly decreasing coefficients."""
    _check_ordered(specs)
    total = sum(s.block_len for s in specs)
    if total > max_terms:
        raise ResourceError(f"expansion would have {total} terms (limit {max_terms})")
    terms = [t for s in specs for t in block_terms(s)]
    for a, b in zip(terms, terms[1:]):
        try:
            drops = coeff_compare(a.coeff, b.coeff) > 0
        except CertificationError as exc:
            raise ConstructionError(f"cannot certify the drop from W_{a.index} to W_{b.index}: {exc}") from exc
        if not drops:
            raise ConstructionError(
                f"coefficient of W_{b.index} does not drop below that of W_{a.index}"
            )
    return Expansion(tuple(terms))


def h_tail_bound(specs: Sequence[BlockSpec]) -> Fraction:
    """``sum(2**(1 - 2**k_nu))``, the geometric bound on the ``2**-n`` tails."""
    return sum((Fraction(2, 1 << s.N_nu) for s in specs), Fraction(0))


def split_G_H(e: Expansion, specs: Sequence[BlockSpec], level: int) -> tuple[DyadicStep, Fraction]:
    """Materialize ``G = sum(W_N * D_N / nu**2)`` and bound ``||H||_1``.

    ``H`` is the sum of the ``2**-n * W_n`` tails; the bound is checked
    against the exact tail mass of ``e``.
    """
    need = specs[-1].k_nu + 1
    if level < need:
        raise ValueError(f"level {level} too coarse: G needs level {need}")
    check_level(level)
    parts = [
        (Fraction(1, s.nu ** 2), pointwise_product(walsh_step(s.N_nu, level), dirichlet_pow2(s.k_nu, level)))
        for s in specs
    ]
    G = linear_combine(parts)
    bound = h_tail_bound(specs)
    mass = h_tail_mass(e)
    if not mass < bound:
        raise ConstructionError(f"tail mass {float(mass)} is not below its bound {float(bound)}")
    return G, bound


def h_tail_mass(e: Expansion) -> Fraction:
    """``sum(2**-n)`` over the symbolic coefficients of ``e``; bounds ``||H||_1``."""
    return dyadic_tail_sum(t.coeff.n for t in e if isinstance(t.coeff, Symbolic))


def choose_m_nu(spec: BlockSpec) -> BlockSpec:
    """Fill ``m_nu`` with the Lebesgue maximizer of ``[2**k_nu, 2**(k_nu+1))``."""
    return replace(spec, m_nu=block_max_search(spec.k_nu + 1).m)


def tail_sum(spec: BlockSpec, m: int) -> Fraction:
    """``sum(2**-(N + i) for i < m)`` in closed form."""
    return Fraction((1 << m) - 1, 1 << (spec.N_nu + m - 1))


def divergence_bound(e: Expansion, specs: Sequence[BlockSpec], nu: int, level: int | None = None,
                     precision_bits: int = DEFAULT_PRECISION_BITS,
                     order: Sequence[int] | None = None) -> BlockCertificate:
    """Certificate that the greedy sums of ``e`` jump by at least ``~1/8`` at block ``nu``.

    With ``level=None`` only exact formulas are used; otherwise the grid
    norms are computed at ``level`` and checked against them.
    """
    if not 2 <= nu <= len(specs):
        raise ValueError(f"nu must lie in [2, {len(specs)}], got {nu}")
    spec = specs[nu - 1]
    if spec.m_nu is None:
        spec = choose_m_nu(spec)
    if level is not None and level < spec.k_nu + 1:
        raise ValueError(f"level {level} too coarse for block {nu}: need {spec.k_nu + 1}")
    weight = Fraction(1, nu * nu)

    lebesgue = lebesgue_constant(spec.m_nu)
    j2 = tail_sum(spec, spec.m_nu)
    gap_lower = weight * lebesgue - j2
    c1 = EIGHTH - j2
    log_ok, _ = check_log_bound(spec.m_nu, lebesgue)

    # genuine greedy jump: the first m_w terms of block nu, m_w < 2**k
    start = sum(s.block_len for s in specs[: nu - 1])
    inner = block_max_search(spec.k_nu)
    g_j2 = tail_sum(spec, inner.m)
    g_lower = weight * inner.lebesgue - g_j2
    witness_ok = g_lower >= EIGHTH - g_j2 and check_log_bound(inner.m, inner.lebesgue)[0]

    j1_norm = g_grid = g_rem = None
    consistent = None
    if level is not None:
        w = walsh_step(spec.N_nu, level)
        j1 = scale(pointwise_product(pointwise_product(w, w), dirichlet_step(spec.m_nu, level)), weight)
        j1_norm = l1_norm(j1)
        if order is None:
            order = greedy_order(e)
        window = [e.terms[p].index for p in order[start:start + inner.m]]
        if window != list(range(spec.N_nu, spec.N_nu + inner.m)):
            raise ConstructionError(f"greedy positions {start}.. do not cover the start of block {nu}")
        g_grid, g_rem = greedy_gap_norm(e, start, start + inner.m, level, precision_bits, order)
        consistent = j1_norm - j2 == gap_lower and g_grid - g_rem >= g_lower
    log.debug("nu=%d m=%d gap_lower=%.6f greedy_lower=%.6f", nu, spec.m_nu, float(gap_lower), float(g_lower))

    return BlockCertificate(
        nu=nu,
        k_nu=spec.k_nu,
        m_nu=spec.m_nu,
        lebesgue=lebesgue,
        j2_bound=j2,
        gap_lower=gap_lower,
        c1=c1,
        passed=gap_lower >= c1,
        log_bound_holds=log_ok,
        certificate_only=level is None,
        j1_grid_norm=j1_norm,
        greedy_start=start,
        greedy_m=inner.m,
        greedy_lebesgue=inner.lebesgue,
        greedy_j2_bound=g_j2,
        greedy_gap_lower=g_lower,
        greedy_gap_grid=g_grid,
        greedy_gap_remainder=g_rem,
        witness_passed=witness_ok,
        grid_consistent=consistent,
    )


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except Exception as exc:
        raise StageError(name, exc) from exc


def verify_theorem(cfg: ConstructionConfig) -> VerificationReport:
    """Build the ``V``-block truncation and certify every block ``nu >= 2``."""
    if cfg.blocks < 2:
        raise ValueError(f"need V >= 2 blocks to certify a jump, got V = {cfg.blocks}")
    specs = _stage("choose_sequences", choose_sequences, cfg)
    specs = [_stage("choose_m_nu", choose_m_nu, s) for s in specs]
    e = _stage("assemble_expansion", assemble_expansion, specs, cfg.max_terms)
    order = _stage("greedy_order", greedy_order, e)
    if order != list(range(len(e))):
        raise StageError("greedy_order", ConstructionError("greedy order is not index order"))
    G, h_bound = _stage("split_G_H", split_G_H, e, specs, specs[-1].k_nu + 1)

    records = []
    for s in specs[1:]:
        level = s.k_nu + 1 if s.k_nu + 1 <= cfg.grid_level_max else None
        records.append(_stage(f"divergence_bound[nu={s.nu}]", divergence_bound,
                              e, specs, s.nu, level, cfg.precision_bits, order))

    g_norm = l1_norm(G)
    g_bound = sum((Fraction(1, s.nu ** 2) for s in specs), Fraction(0))
    mass = h_tail_mass(e)
    coarse_h_bound = sum((Fraction(1, 1 << s.nu) for s in specs), Fraction(0))
    bounds_ok = g_norm <= g_bound and mass < h_bound <= coarse_h_bound

    all_ok = bounds_ok and all(
        r.passed and r.log_bound_holds and r.witness_passed and r.grid_consistent is not False
        for r in records
    )
    return VerificationReport(
        blocks=cfg.blocks,
        k_sequence=tuple(s.k_nu for s in specs),
        records=tuple(records),
        l1_norm_G=g_norm,
        l1_upper_bound_G=g_bound,
        l1_upper_bound_H=h_bound,
        h_tail_mass=mass,
        l1_bounds_hold=bounds_ok,
        C1=min(r.c1 for r in records),
        min_gap_lower=min(min(r.gap_lower, r.greedy_gap_lower) for r in records),
        all_passed=all_ok,
    )
