#!/usr/bin/env python3
"""Replay every built-in certificate and show the validation reports.

Each certificate is a fixed list of rewrite steps between two functor
expressions; the checker replays the steps, tracks the shift ledger, and
discharges any lemma steps against other certificates in the suite.
"""

from dworklab import text_report, verify_paper

rep = verify_paper()
print(text_report(rep))

print("--- one certificate in full detail ---")
from dworklab import check_certificate, get_certificate

ctx, cert = get_certificate("C4")
detail = check_certificate(ctx, cert)
print(text_report(detail))
print(f"goal shift: {detail.expected_shift}, "
      f"ledger: {detail.ledger} -> net {detail.ledger_total}")
