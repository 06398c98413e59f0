"""Exact Walsh-Paley arithmetic, greedy approximation, and a certified
counterexample to greedy convergence along a Walsh subsystem in L1."""

from .counterexample import (
    BlockCertificate,
    BlockSpec,
    ConstructionConfig,
    VerificationReport,
    assemble_expansion,
    block_terms,
    choose_m_nu,
    choose_sequences,
    divergence_bound,
    split_G_H,
    verify_theorem,
)
from .dirichlet import KernelNormRecord, block_max_search, dirichlet_pow2, dirichlet_step, lebesgue_constant
from .dyadic import DyadicStep, integral, l1_norm, linear_combine, pointwise_product, refine, to_float_samples
from .errors import CertificationError, ConstructionError, ResourceError, StageError
from .greedy import (
    Expansion,
    Explicit,
    Symbolic,
    Term,
    coeff_compare,
    coeff_value,
    greedy_approximant,
    greedy_gap_norm,
    greedy_order,
    quasi_greedy_scan,
)
from .walsh import rademacher_sign, walsh_sign, walsh_step

__all__ = [
    "BlockCertificate", "BlockSpec", "ConstructionConfig", "VerificationReport",
    "assemble_expansion", "block_terms", "choose_m_nu", "choose_sequences",
    "divergence_bound", "split_G_H", "verify_theorem",
    "KernelNormRecord", "block_max_search", "dirichlet_pow2", "dirichlet_step", "lebesgue_constant",
    "DyadicStep", "integral", "l1_norm", "linear_combine", "pointwise_product", "refine",
    "to_float_samples",
    "CertificationError", "ConstructionError", "ResourceError", "StageError",
    "Expansion", "Explicit", "Symbolic", "Term", "coeff_compare", "coeff_value",
    "greedy_approximant", "greedy_gap_norm", "greedy_order", "quasi_greedy_scan",
    "rademacher_sign", "walsh_sign", "walsh_step",
]

__version__ = "0.1.0"
