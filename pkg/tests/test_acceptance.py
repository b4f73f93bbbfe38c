"""Acceptance criteria 1-10.

Each test prints one line ``criterion N: PASS|FAIL (...)`` with its wall time
against the pinned limit.  Run directly (``python tests/test_acceptance.py``)
for the bare list of lines.
"""

import contextlib
import io
import json
import sys
import tempfile
import time

import pytest

import oracles as O
from cdgkit import catalog
from cdgkit.cdgcore import opposite, tensor
from cdgkit.cdgmod import Module, diagonal_bimodule
from cdgkit.cli import main
from cdgkit.complexes import hochschild_bicomplex
from cdgkit.engines import (compare_hh_B_vs_C, curvature_shift_check, delta_acyclicity_probe,
                            hh_first_kind, hh_second_kind, projective_resolution, tor_first_kind)
from cdgkit.exactla import QQ, Field
from cdgkit.io import Workspace
from cdgkit.suites import bicomplex_identities, functoriality

K = {"even": 1, "odd": 0}


def _report(n, ok, seconds, limit, detail=""):
    word = "PASS" if ok and seconds < limit else "FAIL"
    line = f"criterion {n}: {word} ({seconds:.2f}s, limit {limit}s){' ' + detail if detail else ''}"
    return word == "PASS", line


def _run(n, limit, body, capsys=None):
    t0 = time.time()
    ok, detail = body()
    ok, line = _report(n, ok, time.time() - t0, limit, detail)
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    return ok


def c1():
    results = []
    for field in ("Q", "Fp:5"):
        for variant in ("homology", "cohomology"):
            B = catalog.counterexample(Field.parse(field))
            results.append(hh_second_kind(B, variant=variant).table == K)
    # the same through the command line, writing JSON
    with tempfile.TemporaryDirectory() as d, contextlib.redirect_stdout(io.StringIO()):
        for field in ("Q", "Fp:5"):
            for variant in ("homology", "cohomology"):
                out = f"{d}/r.json"
                code = main(["hh", "counterexample", "--kind", "second", "--variant", variant,
                             "--field", field, "--json", out])
                results.append(code == 0 and json.load(open(out))["table"] == K)
    return all(results), f"{sum(results)}/{len(results)} tables equal {{even: 1, odd: 0}}"


def c2():
    C = Workspace().category("endalgebra")
    rep = hh_first_kind(C, T=3)
    ok = rep.is_zero() and rep.method == "TruncationStabilized"
    return ok, f"{rep.method_label()} {rep.table}"


def c3():
    B = catalog.counterexample()
    cmp = compare_hh_B_vs_C(B, [Workspace().module("free1")], ["free1"])
    return cmp.equal and cmp.left.table == K, cmp.verdict()


def c4():
    res = []
    for make in (catalog.point, catalog.matrix2):
        for c in (1, -1, 2):
            cmp = curvature_shift_check(make(), c)
            res.append(cmp.equal and cmp.extra["tensor_identity"])
    return all(res), f"{sum(res)}/6 shifts equal"


def c5():
    r = bicomplex_identities(seed=0, cases=50, T=5, F=QQ, maxdim=4)
    return r.ok, f"{r.cases} cases, {len(r.failures)} failures"


def c6():
    r = functoriality(seed=0, cases=20, T=6, F=QQ)
    return r.ok, f"{r.cases} cases, {len(r.failures)} failures"


def _named(bc, B, n, fam):
    names = [b.name for b in B.basis]
    M = {"del": bc.del_, "d": bc.d}[fam][n]
    tgt = n - 1 if fam == "del" else n

    def key(k):
        return (names[k[0]],) + tuple(names[f] for f in k[1])
    return {key(bc.keys[n][j]): {key(bc.keys[tgt][r]): c for r, c in col.items()}
            for j, col in enumerate(M.cols)}


def c7():
    T = 4
    ok = True
    for A, B in ((O.EXTERIOR, catalog.exterior()), (O.DUAL, catalog.dual_numbers()),
                 (O.MATRIX2, catalog.matrix2())):
        bc = hochschild_bicomplex(B, diagonal_bimodule(B), "homology", T)
        for n in range(T + 1):
            ok = ok and _named(bc, B, n, "d") == O.hochschild_d(A, n)
            if n:
                ok = ok and _named(bc, B, n, "del") == O.hochschild_b(A, n)
    return ok, "exterior, dual numbers, 2x2 matrices at T=4"


def c8():
    A = catalog.matrix2()
    E, D = _diag(A)
    res = projective_resolution(D)
    hh = hh_second_kind(A).table
    inc = projective_resolution(Workspace().module("k-over-exterior"), max_depth=20)
    ok = res.complete and res.length == 0 and hh == K and not inc.complete
    return ok, f"matrix2 diagonal: {res.status()}, HH {hh}; k over exterior: {inc.status()}"


def _diag(A):
    E = tensor(A, opposite(A))
    return E, diagonal_bimodule(A, E, "left")


def _on(B, M):
    return Module(B, M.side, [(e.name, e.obj, e.degree) for e in M.basis], M.action, M.diff)


def c9():
    res = []
    for F, c in ((QQ, 1), (QQ, -1), (QQ, 2), (Field(7), 1), (Field(7), 3)):
        B = catalog.point(c, F=F)
        N = _on(B, catalog.curved_point_module(c, F, "right"))
        M = _on(B, catalog.curved_point_module(c, F, "left"))
        out = delta_acyclicity_probe(B, N, M, 6)
        res.append(out["ok"] and out["window"] == [1, 5])
    return all(res), f"{sum(res)}/5 probes exact on [1, 5]"


def c10():
    ws = Workspace()
    rep = tor_first_kind(ws.module("k-over-exterior-z-right"), ws.module("k-over-exterior-z"), 6)
    got = {int(k): v for k, v in rep.table.items()}
    want = O.reduced_bar_tor(O.EXTERIOR, ["x"], 4)
    ok = rep.method == "TruncationStabilized" and got == want == {n: 1 for n in range(5)}
    return ok, f"bar pipeline {got}, reduced bar {want}"


CRITERIA = [(1, 1, c1), (2, 10, c2), (3, 10, c3), (4, 10, c4), (5, 60, c5), (6, 60, c6),
            (7, 30, c7), (8, 10, c8), (9, 10, c9), (10, 30, c10)]


@pytest.mark.parametrize("n,limit,body", CRITERIA, ids=[f"criterion-{n}" for n, _, _ in CRITERIA])
def test_criterion(n, limit, body, capsys):
    assert _run(n, limit, body, capsys)


if __name__ == "__main__":
    sys.exit(0 if all([_run(n, limit, body) for n, limit, body in CRITERIA]) else 1)
