#!/usr/bin/env python3
"""Anchor-count / comparison-noise sweep on the unit square.

Writes results.csv, results.json and manifest.json under --out.  Thin
wrapper over the CLI so the manifest format stays identical.
"""

import sys

from ordinal_unloc.cli import main

DEFAULTS = [
    "simulate",
    "--anchors", "5,10,15,20",
    "--sigma", "0.0,0.1,0.3,0.5",
    "--trials", "2000",
    "--seed", "20260823",
    "--out", "results/ordinal_sweep",
]

if __name__ == "__main__":
    raise SystemExit(main(DEFAULTS + sys.argv[1:]))
