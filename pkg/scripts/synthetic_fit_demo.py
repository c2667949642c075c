#!/usr/bin/env python3
"""End-to-end sideband demo: synthesize two flopping datasets, write them as
CSV, fit them through the CLI, and predict the resulting gate error."""

import math
from pathlib import Path

import numpy as np

from msgatesim import fock, sideband
from msgatesim.cli import main, write_rabi_csv

OUT = Path("fit_demo_out")
OUT.mkdir(exist_ok=True)

rng = np.random.default_rng(42)
model = sideband.RabiModel(2 * np.pi * 13e3, 1.0 / 1.34e-3)
ts = np.linspace(5e-6, 400e-6, 60)
for label, alpha_sq, nbar in (("ez0", 0.0, 0.49), ("ez40", 0.47, 0.12)):
    spec = fock.MotionalSpec(math.sqrt(alpha_sq), 0.0, nbar, 40)
    pe = sideband.excited_probability(model, spec, ts)
    counts = rng.binomial(500, pe)
    write_rabi_csv(OUT / f"{label}.csv", sideband.RabiDataset(label, ts, counts, np.full(60, 500)))

main(
    [
        "fit",
        "--data", str(OUT / "ez0.csv"),
        "--data", str(OUT / "ez40.csv"),
        "--label", "ez0", "--label", "ez40",
        "--outdir", str(OUT),
        "--alpha-sq-max", "2.5", "--nbar-max", "2.5",
    ]
)
main(["predict", "--fit", str(OUT / "fit.json"), "--phi", "0.0",
      "--out", str(OUT / "predictions.json")])
print(f"fit, contours and predictions in {OUT}/")
