"""Covariant phase observables and fuzzy rotated quadratures at finite truncation."""

from .errors import (
    DegenerateTolerance,
    InvalidInput,
    NumericalFailure,
    PhaseMatrixError,
)
from .extremality import ExtremalityCertificate, certify, convex_split, find_witness, is_extreme
from .phase_observable import (
    KolmogorovFamily,
    PhaseMatrix,
    canonical,
    interval_operator,
    kolmogorov_decompose,
    rank,
    rank_one_canonical_form,
    validate,
)

__version__ = "0.1.0"
