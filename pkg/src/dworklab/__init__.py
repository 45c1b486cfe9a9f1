"""Rewriting calculus for algebraic integral transforms, with a concrete
de Rham realization for checking the answers in coordinates."""

from .errors import DworkError, GeometryError, ParseError, RuleError, TermError
from .geometry import (
    CartesianFact,
    FuncName,
    FuncPull,
    GeometryContext,
    SubCap,
    SubName,
    SubPre,
    SubRed,
)
from .terms import (
    ETensor,
    Exp,
    Fourier,
    Oim,
    Opb,
    RGamma,
    Shift,
    Struct,
    Tensor,
    Var,
    equal_normal,
    normalize,
    serialize,
    variety_of,
)
from .rules import RULES, apply_step
from .certificates import (
    Closure,
    Lemma,
    ProofCertificate,
    ProofStep,
    ValidationReport,
    builtin_suite,
    check_certificate,
    get_certificate,
    verify_paper,
)
from .search import SearchResult, prove
from .reports import machine_report, render_report, text_report
from .dsl import (
    BoundScript,
    ScriptDocument,
    bind_script,
    load_script,
    parse_script,
    render_script,
)
from .weyl import (
    CohomologyReport,
    DworkComparison,
    MultiPoly,
    complement_cohomology,
    dwork_compare,
    parse_poly,
    poly_to_str,
    supports_cohomology,
    twisted_cohomology,
)

__version__ = "0.1.0"

__all__ = [
    "DworkError", "GeometryError", "ParseError", "RuleError", "TermError",
    "CartesianFact", "FuncName", "FuncPull", "GeometryContext",
    "SubCap", "SubName", "SubPre", "SubRed",
    "ETensor", "Exp", "Fourier", "Oim", "Opb", "RGamma", "Shift", "Struct",
    "Tensor", "Var", "equal_normal", "normalize", "serialize", "variety_of",
    "RULES", "apply_step",
    "Closure", "Lemma", "ProofCertificate", "ProofStep", "ValidationReport",
    "builtin_suite", "check_certificate", "get_certificate", "verify_paper",
    "SearchResult", "prove",
    "machine_report", "render_report", "text_report",
    "BoundScript", "ScriptDocument", "bind_script", "load_script",
    "parse_script", "render_script",
    "CohomologyReport", "DworkComparison", "MultiPoly",
    "complement_cohomology", "dwork_compare", "parse_poly", "poly_to_str",
    "supports_cohomology", "twisted_cohomology",
    "__version__",
]
