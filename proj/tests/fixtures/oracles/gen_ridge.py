#!/usr/bin/env python3
"""Regenerates ridge.json: multi-output ridge solutions via numpy.linalg.solve."""
import numpy as np

from common import tolist, write_fixture

rng = np.random.default_rng(20240603)

cases = [
    {
        # One sample, one dim: (x^T x + lambda) w = x^T y -> (1 + 1) w = 1.
        "x": [[1.0]],
        "y": [[1.0]],
        "lambda": 1.0,
        "expected_w": [[0.5]],
        "note": "hand-checkable single sample",
    }
]
for _ in range(20):
    n_rows = int(rng.integers(5, 40))
    n_in = int(rng.integers(1, 6))
    n_out = int(rng.integers(1, 5))
    x = rng.normal(size=(n_rows, n_in))
    y = rng.normal(size=(n_rows, n_out))
    lam = float(rng.choice([0.01, 0.1, 1.0, 10.0]))
    w = np.linalg.solve(x.T @ x + lam * np.eye(n_in), x.T @ y).T
    cases.append(
        {
            "x": tolist(x),
            "y": tolist(y),
            "lambda": lam,
            "expected_w": tolist(w),
        }
    )

write_fixture(
    "ridge.json",
    {
        "provenance": "oracle script gen_ridge.py (numpy.linalg.solve of normal equations)",
        "tolerance": 1e-8,
        "cases": cases,
    },
)
