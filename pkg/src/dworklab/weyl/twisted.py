"""Twisted de Rham cohomology with polynomial coefficients.

The differential is d + dF∧.  Ranks are taken on finite windows: a rung
at cutoff D restricts coefficients to degree <= D, computes the kernel
there, and intersects the image of the slacked domain (degree <= D +
deg F + 1) back with the window.  Rungs are laddered (step 2) until three
in a row agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .forms import add_into, masks_of_degree, wedge_sign
from .linalg import rank
from .poly import binom, count_monomials, graded_monomials


def _colkey(col):
    mono, mask = col
    return (sum(mono), mono, mask)


class TwistedComplex:
    def __init__(self, F):
        if F.is_zero():
            raise ValueError("zero twist")
        self.F = F
        self.n = F.nvars
        self.dF = [F.diff(j).terms for j in range(self.n)]

    def apply(self, mono, mask):
        """Row of the differential on the basis element x^mono dx_mask."""
        row = {}
        for j in range(self.n):
            sgn = wedge_sign(j, mask)
            if not sgn:
                continue
            tgt = mask | (1 << j)
            if mono[j]:
                dm = list(mono)
                dm[j] -= 1
                add_into(row, (tuple(dm), tgt), Fraction(sgn * mono[j]))
            for fm, fc in self.dF[j].items():
                mm = tuple(a + b for a, b in zip(mono, fm))
                add_into(row, (mm, tgt), sgn * fc)
        return row

    def rows(self, k, deg_bound):
        out = []
        for mask in masks_of_degree(self.n, k):
            for mono in graded_monomials(self.n, deg_bound):
                r = self.apply(mono, mask)
                if r:
                    out.append(r)
        return out

    def rung(self, D):
        """Windowed dimensions at cutoff D, every grade 0..n."""
        slack = self.F.degree() + 1
        dims = {}
        for k in range(self.n + 1):
            dom = count_monomials(self.n, D) * binom(self.n, k)
            ker = dom - rank(self.rows(k, D), key=_colkey)
            if k == 0:
                dims[0] = ker
                continue
            img = self.rows(k - 1, D + slack)
            r_full = rank(img, key=_colkey)
            outside = []
            for row in img:
                rr = {c: v for c, v in row.items() if sum(c[0]) > D}
                if rr:
                    outside.append(rr)
            inside = r_full - rank(outside, key=_colkey)
            dims[k] = ker - inside
        return dims


@dataclass
class LadderResult:
    dims: dict | None
    rungs: list = field(default_factory=list)

    @property
    def stabilized(self):
        return self.dims is not None


def twisted_rung(F, D):
    return TwistedComplex(F).rung(D)


def twisted_cohomology(F, d0=None, d_max=20, step=2):
    """Ladder the window cutoff until three consecutive rungs agree."""
    cx = TwistedComplex(F)
    D = d0 if d0 is not None else F.degree() + 1
    res = LadderResult(dims=None)
    values = []
    while D <= d_max:
        dims = cx.rung(D)
        res.rungs.append((D, dims))
        values.append(dims)
        if len(values) >= 3 and values[-1] == values[-2] == values[-3]:
            res.dims = dims
            break
        D += step
    return res
