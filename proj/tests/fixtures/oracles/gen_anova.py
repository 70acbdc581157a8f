#!/usr/bin/env python3
"""Regenerates anova.json from scipy.stats.f_oneway."""
import numpy as np
from scipy import stats

from common import tolist, write_fixture

rng = np.random.default_rng(20240604)

cases = []
for i in range(22):
    n_groups = int(rng.integers(2, 6))
    shift = 0.0 if i % 2 == 0 else rng.uniform(0.0, 2.0)
    groups = []
    for g in range(n_groups):
        size = int(rng.integers(3, 15))
        groups.append(tolist(rng.normal(loc=g * shift, size=size)))
    f, p = stats.f_oneway(*[np.asarray(g) for g in groups])
    cases.append({"groups": groups, "expected_f": float(f), "expected_p": float(p)})

write_fixture(
    "anova.json",
    {
        "provenance": "oracle script gen_anova.py (scipy.stats.f_oneway)",
        "tolerance_f": 1e-9,
        "tolerance_p": 1e-9,
        "cases": cases,
    },
)
