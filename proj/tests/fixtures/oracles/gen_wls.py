#!/usr/bin/env python3
"""Regenerates wls.json: weighted least squares minimizers via numpy lstsq
on the sqrt-weight-scaled system."""
import numpy as np

from common import tolist, write_fixture

rng = np.random.default_rng(20240602)

cases = []
for i in range(25):
    n_rows = int(rng.integers(8, 60))
    n_cols = int(rng.integers(1, 7))
    x = rng.normal(size=(n_rows, n_cols))
    w_true = rng.normal(size=n_cols)
    t = x @ w_true + 0.3 * rng.normal(size=n_rows)
    if i % 3 == 0:
        h = np.ones(n_rows)
    else:
        h = rng.uniform(1e-4, 2.0, size=n_rows)
    sq = np.sqrt(h)
    w, *_ = np.linalg.lstsq(x * sq[:, None], t * sq, rcond=None)
    cases.append(
        {
            "x": tolist(x),
            "t": tolist(t),
            "h": tolist(h),
            "expected_w": tolist(w),
        }
    )

write_fixture(
    "wls.json",
    {
        "provenance": "oracle script gen_wls.py (numpy.linalg.lstsq on scaled system)",
        "tolerance": 1e-6,
        "cases": cases,
    },
)
