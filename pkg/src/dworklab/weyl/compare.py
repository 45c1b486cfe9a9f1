"""Supported cohomology and the twisted-vs-supports comparison.

Cohomology supported on the common zero locus Z of f_1..f_r inside
affine n-space comes from the complement through the long exact sequence:
the affine space contributes a single class in degree 0, so h^1_Z is
h^0(complement) − 1 and h^{k+1}_Z = h^k(complement) for k >= 1.

The comparison pits that against the twisted de Rham cohomology of
F = sum_i y_i f_i on affine (n+r)-space; the two must agree grade by
grade once zero entries are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cech import complement_cohomology
from .poly import MultiPoly
from .twisted import twisted_cohomology


@dataclass
class CohomologyReport:
    kind: str
    dims: dict | None
    rungs: list = field(default_factory=list)
    note: str = ""

    @property
    def stabilized(self):
        return self.dims is not None


def _nonzero(dims):
    return {k: v for k, v in dims.items() if v}


def supports_cohomology(fs, t_max=8):
    comp = complement_cohomology(fs, t_max=t_max)
    rep = CohomologyReport(kind="supports", dims=None, rungs=comp.rungs)
    if comp.dims is None:
        rep.note = "complement ladder did not stabilize"
        return rep
    out = {}
    h1 = comp.dims.get(0, 0) - 1
    if h1:
        out[1] = h1
    for k, v in comp.dims.items():
        if k >= 1 and v:
            out[k + 1] = v
    rep.dims = out
    return rep


def dwork_twist(fs):
    """F = sum_i y_i f_i with fresh variables appended after the x's."""
    n = fs[0].nvars
    r = len(fs)
    total = n + r
    F = MultiPoly.zero(total)
    for i, f in enumerate(fs):
        F = F + f.extend(total) * MultiPoly.variable(total, n + i)
    return F


@dataclass
class DworkComparison:
    match: bool
    twisted: CohomologyReport
    supports: CohomologyReport
    inconclusive: bool = False


def dwork_compare(fs, d0=None, d_max=20, t_max=8):
    """Twisted cohomology of sum y_i f_i against supported cohomology."""
    F = dwork_twist(fs)
    tw = twisted_cohomology(F, d0=d0, d_max=d_max)
    trep = CohomologyReport(kind="twisted",
                            dims=None if tw.dims is None else dict(tw.dims),
                            rungs=tw.rungs)
    if tw.dims is None:
        trep.note = "twisted ladder did not stabilize"
    srep = supports_cohomology(fs, t_max=t_max)
    if trep.dims is None or srep.dims is None:
        return DworkComparison(False, trep, srep, inconclusive=True)
    match = _nonzero(trep.dims) == _nonzero(srep.dims)
    return DworkComparison(match, trep, srep)
