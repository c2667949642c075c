#!/usr/bin/env python3
"""Regenerate the three figure-style CSV bundles (drift sweep, phase scan,
error surface) into ./figures_out.  Expect roughly a half hour of SDP time
for the full set; pass a subset of ids to trim it."""

import sys

from msgatesim.cli import main

ids = sys.argv[1:] or ["fig1", "fig2", "fig3"]
for fig in ids:
    code = main(["reproduce", fig, "--outdir", "figures_out"])
    if code != 0:
        sys.exit(code)
print("figure CSVs in ./figures_out")
