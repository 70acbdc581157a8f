#!/usr/bin/env python3
"""Regenerates classification.json by explicit confusion-matrix counting."""
import numpy as np

from common import write_fixture

rng = np.random.default_rng(20240605)


def ratio(num, den):
    return 0.0 if den == 0 else num / den


def scores(tp, fp, fn):
    precision = ratio(tp, tp + fp)
    recall = ratio(tp, tp + fn)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return {"precision": precision, "recall": recall, "f1": f1}


def report(y_true, y_pred):
    tp = sum(1 for t, p in zip(y_true, y_pred) if t == 1 and p == 1)
    fp = sum(1 for t, p in zip(y_true, y_pred) if t == 0 and p == 1)
    fn = sum(1 for t, p in zip(y_true, y_pred) if t == 1 and p == 0)
    tn = sum(1 for t, p in zip(y_true, y_pred) if t == 0 and p == 0)
    class1 = scores(tp, fp, fn)
    class0 = scores(tn, fn, fp)  # swap the roles of the classes
    macro = {k: (class1[k] + class0[k]) / 2 for k in class1}
    accuracy = ratio(tp + tn, len(y_true))
    micro = {"precision": accuracy, "recall": accuracy, "f1": accuracy}
    return {
        "tp": tp,
        "fp": fp,
        "fn": fn,
        "tn": tn,
        "class1": class1,
        "class0": class0,
        "macro": macro,
        "micro": micro,
    }


cases = [
    {
        "y_true": [1, 1, 0, 0],
        "y_pred": [1, 0, 1, 0],
        "note": "hand count: tp=fp=fn=tn=1, every rate 0.5",
    },
    {"y_true": [0, 0, 0], "y_pred": [0, 0, 0], "note": "class 1 absent on both sides"},
    {"y_true": [1, 1], "y_pred": [1, 1], "note": "class 0 absent on both sides"},
]
for _ in range(22):
    n = int(rng.integers(5, 200))
    cases.append(
        {
            "y_true": rng.integers(0, 2, size=n).tolist(),
            "y_pred": rng.integers(0, 2, size=n).tolist(),
        }
    )

for case in cases:
    case["expected"] = report(case["y_true"], case["y_pred"])

write_fixture(
    "classification.json",
    {
        "provenance": "oracle script gen_classification.py (independent counting)",
        "tolerance": 1e-12,
        "cases": cases,
    },
)
