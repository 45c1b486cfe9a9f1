"""Concrete cohomology computations behind the calculus.

Polynomial-coefficient complexes are truncated to finite degree windows
and laddered until the reported dimensions stabilize; every matrix is
exact (integer fraction-free elimination), so the numbers are proofs of
rank, not floating-point estimates.
"""

from .poly import MultiPoly, parse_poly, poly_to_str
from .twisted import twisted_cohomology, twisted_rung
from .cech import complement_cohomology, complement_rung
from .compare import (
    CohomologyReport,
    DworkComparison,
    dwork_compare,
    supports_cohomology,
)

__all__ = [
    "MultiPoly",
    "parse_poly",
    "poly_to_str",
    "twisted_cohomology",
    "twisted_rung",
    "complement_cohomology",
    "complement_rung",
    "supports_cohomology",
    "dwork_compare",
    "CohomologyReport",
    "DworkComparison",
]
