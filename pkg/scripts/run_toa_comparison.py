#!/usr/bin/env python3
"""TOA comparison over the normalized-variance grid on a 200 x 200 field:
ordinal pipeline on raw arrival times vs direct time-to-distance solves."""

import sys

from ordinal_unloc.cli import main

DEFAULTS = [
    "benchmark",
    "--kind", "toa",
    "--anchors", "20",
    "--trials", "1000",
    "--seed", "20260823",
    "--out", "results/toa_comparison",
]

if __name__ == "__main__":
    raise SystemExit(main(DEFAULTS + sys.argv[1:]))
