#!/usr/bin/env python3
"""Regenerates bic.json: BIC arithmetic cases, d*ln(N) - 2*L."""
import math

import numpy as np

from common import write_fixture

rng = np.random.default_rng(20240607)

cases = [
    {"d": 22, "n": 100, "log_likelihood": -50.0, "note": "hand-checkable"},
]
for _ in range(20):
    cases.append(
        {
            "d": int(rng.integers(1, 5000)),
            "n": int(rng.integers(2, 10**6)),
            "log_likelihood": float(rng.normal(scale=5000.0)),
        }
    )

for case in cases:
    bic = case["d"] * math.log(case["n"]) - 2.0 * case["log_likelihood"]
    case["expected_bic"] = bic
    case["expected_log10_bic"] = math.log10(bic) if bic > 0 else None

write_fixture(
    "bic.json",
    {
        "provenance": "oracle script gen_bic.py (python math, 53-bit floats)",
        "tolerance": 1e-9,
        "cases": cases,
    },
)
