"""Cohomology of the complement of a hypersurface union, by Čech–de Rham.

The cover is by the loci where each f_i is invertible.  A piece is a
nonempty index set I with denominator g_I = prod f_i; at rung t every
piece uses the uniform pole P = 1 + t and numerator degree bound
P*deg(g_I) + D_t, with D_t = D0 + step*t, step = max(2, max deg f_i),
D0 = max deg f_i + n + 1.  The total differential combines the Čech
coboundary with the (−1)^p-signed de Rham differential; outputs live one
pole higher, so image and window are compared after embedding the window
two poles up (multiply by g_I^2) and using
dim(U ∩ W) = rank U + rank W − rank(U ∪ W).

The uniform pole is what makes the answer insensitive to repeated
factors: a non-reduced f skips odd denominator powers, so any schedule
that hands lower poles to lower form degrees keeps primitives just out
of reach at every rung.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .forms import add_into, masks_of_degree, wedge_sign
from .linalg import rank
from .poly import MultiPoly, binom, count_monomials, graded_monomials
from .twisted import LadderResult


def _shifted(terms, mono, scale):
    """Terms of poly * scale * x^mono."""
    out = {}
    for m, c in terms.items():
        out[tuple(a + b for a, b in zip(m, mono))] = c * scale
    return out


class CechDeRham:
    def __init__(self, fs):
        if not fs:
            raise ValueError("need at least one polynomial")
        self.n = fs[0].nvars
        for f in fs:
            if f.nvars != self.n:
                raise ValueError("mixed variable rings")
            if f.is_zero():
                raise ValueError("zero polynomial has empty invertible locus")
        self.fs = list(fs)
        self.r = len(fs)
        self.pieces = []
        for size in range(1, self.r + 1):
            self.pieces.extend(combinations(range(self.r), size))
        self.piece_index = {I: i for i, I in enumerate(self.pieces)}
        self.g = {}
        self.dg = {}
        for I in self.pieces:
            gI = MultiPoly.constant(self.n, 1)
            for i in I:
                gI = gI * self.fs[i]
            self.g[I] = gI
            self.dg[I] = [gI.diff(j).terms for j in range(self.n)]
        self.maxdeg = max(f.degree() for f in self.fs)
        self._pole_cache = {}

    def _colkey(self, col):
        I, mono, mask = col
        return (sum(mono), mono, self.piece_index[I], mask)

    def _cech_factor(self, I, j0, pole):
        """f_j0^pole * g_(I ∪ j0), cached per pole."""
        key = (I, j0, pole)
        got = self._pole_cache.get(key)
        if got is None:
            J = tuple(sorted(I + (j0,)))
            got = ((self.fs[j0] ** pole) * self.g[J]).terms
            self._pole_cache[key] = got
        return got

    def diff_row(self, I, mono, mask, pole):
        """Total differential of x^mono/g_I^pole dx_mask, at pole + 1."""
        row = {}
        p = len(I) - 1
        psign = -1 if p & 1 else 1
        for j in range(self.n):
            sgn = wedge_sign(j, mask)
            if not sgn:
                continue
            sgn *= psign
            tgt = mask | (1 << j)
            if mono[j]:
                dm = list(mono)
                dm[j] -= 1
                for mm, c in _shifted(self.g[I].terms, tuple(dm),
                                      Fraction(mono[j])).items():
                    add_into(row, (I, mm, tgt), sgn * c)
            for mm, c in _shifted(self.dg[I][j], mono,
                                  Fraction(-pole)).items():
                add_into(row, (I, mm, tgt), sgn * c)
        for j0 in range(self.r):
            if j0 in I:
                continue
            J = tuple(sorted(I + (j0,)))
            sgn = -1 if J.index(j0) & 1 else 1
            for mm, c in _shifted(self._cech_factor(I, j0, pole), mono,
                                  Fraction(1)).items():
                add_into(row, (J, mm, mask), sgn * c)
        return row

    def window_basis(self, pole, D, q=None):
        out = []
        for I in self.pieces:
            p = len(I) - 1
            bound = pole * self.g[I].degree() + D
            for k in range(self.n + 1):
                if q is not None and p + k != q:
                    continue
                for mask in masks_of_degree(self.n, k):
                    for mono in graded_monomials(self.n, bound):
                        out.append((I, mono, mask))
        return out

    def schedule(self, t, d0=None, step=None):
        if step is None:
            step = max(2, self.maxdeg)
        if d0 is None:
            d0 = self.maxdeg + self.n + 1
        return 1 + t, d0 + step * t

    def rung(self, t, d0=None, step=None):
        """Windowed dims of every total grade q at rung t."""
        P, D = self.schedule(t, d0, step)
        slack = self.maxdeg + 1
        key = self._colkey

        win_rows = {}
        for I, mono, mask in self.window_basis(P, D):
            q = (len(I) - 1) + bin(mask).count("1")
            row = self.diff_row(I, mono, mask, P)
            if row:
                win_rows.setdefault(q, []).append(row)
        img_rows = {}
        for I, mono, mask in self.window_basis(P + 1, D + slack):
            q = (len(I) - 1) + bin(mask).count("1")
            row = self.diff_row(I, mono, mask, P + 1)
            if row:
                img_rows.setdefault(q, []).append(row)

        dims = {}
        for q in range(self.n + self.r):
            dom = 0
            for I in self.pieces:
                k = q - (len(I) - 1)
                if 0 <= k <= self.n:
                    dom += (count_monomials(self.n, P * self.g[I].degree() + D)
                            * binom(self.n, k))
            ker = dom - rank(win_rows.get(q, []), key=key)
            if q == 0:
                dims[0] = ker
                continue
            img = img_rows.get(q - 1, [])
            emb = []
            for I, mono, mask in self.window_basis(P, D, q=q):
                gI2 = self.g[I] * self.g[I]
                row = {}
                for mm, c in _shifted(gI2.terms, mono, Fraction(1)).items():
                    add_into(row, (I, mm, mask), c)
                emb.append(row)
            ra = rank(img, key=key)
            rb = rank(emb, key=key)
            rab = rank(img + emb, key=key)
            dims[q] = ker - (ra + rb - rab)
        return dims


def complement_rung(fs, t, d0=None, step=None):
    return CechDeRham(fs).rung(t, d0=d0, step=step)


def complement_cohomology(fs, t_max=8):
    """Ladder the rung index until three consecutive answers agree."""
    cx = CechDeRham(fs)
    res = LadderResult(dims=None)
    values = []
    for t in range(t_max + 1):
        dims = cx.rung(t)
        res.rungs.append((t, dims))
        values.append(dims)
        if len(values) >= 3 and values[-1] == values[-2] == values[-3]:
            res.dims = dims
            break
    return res
