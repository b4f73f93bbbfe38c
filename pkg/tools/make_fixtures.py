"""Regenerate the JSON fixtures shipped in src/cdgkit/fixtures.

Run from the repository root:  python3 tools/make_fixtures.py
"""

import json
import os

from cdgkit import catalog
from cdgkit.cdgmod import Module, free_cdg_module, free_graded_module, mf_category, module_to_dict
from cdgkit.grading import Z

OUT = os.path.join(os.path.dirname(__file__), "..", "src", "cdgkit", "fixtures")


def save(name, data):
    with open(os.path.join(OUT, name + ".json"), "w") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")


def cat(name, B):
    d = B.to_dict()
    d["name"] = name
    save(name, d)


def mod(name, M, base):
    d = module_to_dict(M)
    d["name"] = name
    d["base"] = base
    save(name, d)


def main():
    os.makedirs(OUT, exist_ok=True)
    cx = catalog.counterexample()
    cat("counterexample", cx)
    cat("point", catalog.point())
    cat("exterior", catalog.exterior())
    cat("exterior-z", catalog.exterior(Z))
    cat("dual", catalog.dual_numbers())
    cat("matrix2", catalog.matrix2())
    cat("clifford", catalog.clifford1())
    cat("upper", catalog.upper_triangular())

    free1 = free_cdg_module(free_graded_module(cx, "right", [("pt", 0, "g")]))
    mod("free1", free1, "counterexample")
    C = mf_category(cx, [free1], ["free1"])
    cat("endalgebra", C)

    for base, B in (("exterior", catalog.exterior()), ("exterior-z", catalog.exterior(Z))):
        for side in ("left", "right"):
            M = Module(B, side, [("k", "pt", 0)], {}, fill_units=True)
            suffix = "" if side == "left" else "-right"
            mod(f"k-over-{base}{suffix}", M, base)

    # dual numbers with d(1) = x: the Leibniz rule fails on (1, 1)
    broken = {
        "name": "broken-leibniz", "field": "Q", "grading": "Z/2", "objects": ["pt"],
        "basis": [{"name": "1", "src": "pt", "dst": "pt", "degree": 0},
                  {"name": "x", "src": "pt", "dst": "pt", "degree": 1}],
        "compose": [["1", "1", {"1": 1}], ["1", "x", {"x": 1}], ["x", "1", {"x": 1}]],
        "diff": [["1", {"x": 1}]],
        "units": {"pt": {"1": 1}},
    }
    save("broken-leibniz", broken)


if __name__ == "__main__":
    main()
