#!/usr/bin/env python3
"""RSS method comparison: ordinal pipeline on raw powers vs fixed-exponent
and genie-aided distance inversion, on identical channel realizations."""

import sys

from ordinal_unloc.cli import main

DEFAULTS = [
    "benchmark",
    "--kind", "rss",
    "--anchors", "5,10,15,20",
    "--trials", "1000",
    "--seed", "20260823",
    "--out", "results/rss_comparison",
]

if __name__ == "__main__":
    raise SystemExit(main(DEFAULTS + sys.argv[1:]))
