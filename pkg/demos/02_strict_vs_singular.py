#!/usr/bin/env python3
"""Smoothness side conditions: the same chain under two policies.

One certificate rewrites across a Cartesian square with a singular
corner.  Under the strict policy the base-change step refuses to fire;
allowing singular corners lets the chain through (the degree bookkeeping
is unchanged either way).
"""

from dworklab import check_certificate, get_certificate, text_report

ctx, cert = get_certificate("C5")

for mode in ("strict-smooth", "allow-singular"):
    rep = check_certificate(ctx, cert, mode=mode)
    print(f"== mode {mode} ==")
    print(text_report(rep))
