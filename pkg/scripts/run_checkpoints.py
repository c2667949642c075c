#!/usr/bin/env python3
"""Check the embedded single-offset, Gaussian-averaged, and transport
prediction anchor values and write pass/fail summaries to ./checkpoints_out."""

import sys

from msgatesim.cli import main

for section in ("sec4-checkpoints", "sec5-predictions"):
    code = main(["reproduce", section, "--outdir", "checkpoints_out"])
    if code != 0:
        sys.exit(code)
print("summaries in ./checkpoints_out")
