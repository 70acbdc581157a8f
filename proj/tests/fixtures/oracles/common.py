"""Shared helpers for the fixture generators."""
import json
import pathlib

LIBRARY_DIR = pathlib.Path(__file__).resolve().parent.parent / "library"


def write_fixture(name, payload):
    LIBRARY_DIR.mkdir(parents=True, exist_ok=True)
    path = LIBRARY_DIR / name
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")
    print(f"wrote {path}")


def tolist(a):
    import numpy as np

    return np.asarray(a, dtype=float).tolist()
