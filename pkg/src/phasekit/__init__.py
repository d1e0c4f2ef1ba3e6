"""Phases of sectorial matrices: factorizations, property checks, margins and completions."""

__version__ = "0.1.0"

from .analysis import (
    ConeSpec,
    adversarial_B,
    compress,
    cone_membership,
    extremal_phase_sums,
    hadamard_phase_bounds,
    kronecker_phases,
    mixed_margin_check,
    product_phase_check,
    rank_margin,
    schmidt_mirsky_B,
    schur_complement,
)
from .completion import BandedPartial, complete, decompose_banded
from .compound import compound, compound_spectrum, sample_compound_range, verify_inclusions
from .majorization import is_log_majorized, is_majorized, is_weakly_majorized
from .numrange import boundary_trace, classify_sector, contains_point
from .phases import (
    gcf,
    phases,
    phases_via_inverse_conjugate,
    psi_phases,
    real_sectorial,
    sectorial_decomposition,
    spd,
)

__all__ = [
    "__version__",
    "ConeSpec",
    "BandedPartial",
    "adversarial_B",
    "boundary_trace",
    "classify_sector",
    "complete",
    "compound",
    "compound_spectrum",
    "compress",
    "cone_membership",
    "contains_point",
    "decompose_banded",
    "extremal_phase_sums",
    "gcf",
    "hadamard_phase_bounds",
    "is_log_majorized",
    "is_majorized",
    "is_weakly_majorized",
    "kronecker_phases",
    "mixed_margin_check",
    "phases",
    "phases_via_inverse_conjugate",
    "product_phase_check",
    "psi_phases",
    "rank_margin",
    "real_sectorial",
    "sample_compound_range",
    "schmidt_mirsky_B",
    "schur_complement",
    "sectorial_decomposition",
    "spd",
    "verify_inclusions",
]
