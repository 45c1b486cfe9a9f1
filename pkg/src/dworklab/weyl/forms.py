"""Differential-form bookkeeping on bitmask wedge bases.

A k-form basis element is (monomial, mask) with popcount(mask) = k; the
mask's set bits are the wedged coordinate directions in increasing order.
"""

from __future__ import annotations

from itertools import combinations


def masks_of_degree(nvars, k):
    out = []
    for bits in combinations(range(nvars), k):
        m = 0
        for b in bits:
            m |= 1 << b
        out.append(m)
    return out


def wedge_sign(j, mask):
    """Sign of dx_j wedged onto the front of dx_mask; 0 if j already used."""
    bit = 1 << j
    if mask & bit:
        return 0
    below = bin(mask & (bit - 1)).count("1")
    return -1 if below & 1 else 1


def add_into(row, col, val):
    s = row.get(col)
    s = val if s is None else s + val
    if s:
        row[col] = s
    else:
        row.pop(col, None)
