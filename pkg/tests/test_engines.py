import json

import pytest

import oracles as O
from cdgkit import catalog
from cdgkit.cdgmod import Module, regular_module
from cdgkit.engines import (EngineError, HomologyReport, Unsupported, check_resolution,
                            compare_hh_B_vs_C, curvature_shift_check, delta_acyclicity_probe,
                            ext_first_kind, ext_second_kind, graded_radical, hh_first_kind,
                            hh_second_kind, projective_resolution, pushforward_compat_check,
                            tor_first_kind, tor_second_kind)
from cdgkit.exactla import QQ, Field
from cdgkit.grading import Z2
from cdgkit.io import Workspace

EVEN = {"even": 1, "odd": 0}


def test_graded_radical():
    assert graded_radical(catalog.matrix2()) == []
    assert graded_radical(catalog.product_kk()) == []
    U = catalog.upper_triangular()
    assert graded_radical(U) == [{U.index["E12"]: 1}]
    E = catalog.exterior()
    assert graded_radical(E) == [{E.index["x"]: 1}]


def test_resolution_of_projective_module_has_length_zero():
    A = catalog.matrix2()
    res = projective_resolution(regular_module(A, "left"))
    assert res.complete and res.length == 0
    assert check_resolution(res) == []


def test_resolution_of_counterexample_diagonal():
    ws = Workspace()
    B = ws.category("counterexample")
    res = projective_resolution(catalog.curved_point_module(1, QQ, "left"))
    assert res.complete and check_resolution(res) == []
    assert B.dim == 1


def test_resolution_of_k_over_exterior_does_not_terminate():
    ws = Workspace()
    res = projective_resolution(ws.module("k-over-exterior"), max_depth=20)
    assert not res.complete
    assert res.status() == "incomplete at depth 20"
    assert check_resolution(res) == []


@pytest.mark.parametrize("F", [QQ, Field(5)])
def test_hh_second_kind_of_counterexample(F):
    B = catalog.counterexample(F)
    assert hh_second_kind(B).table == EVEN
    assert hh_second_kind(B, variant="cohomology").table == EVEN
    assert hh_second_kind(B).method == "FiniteExact"


def test_hh_second_kind_examples():
    # separable algebras: HH is the centre (cohomology) and the cocentre (homology)
    assert hh_second_kind(catalog.matrix2()).table == EVEN
    assert hh_second_kind(catalog.product_kk()).table == {"even": 2, "odd": 0}
    U = catalog.upper_triangular()
    assert hh_second_kind(U).table == {"even": 2, "odd": 0}
    assert hh_second_kind(U, variant="cohomology").table == EVEN
    C = catalog.clifford1()
    assert hh_second_kind(C).table == {"even": 0, "odd": 1}
    assert hh_second_kind(C, variant="cohomology").table == EVEN
    with pytest.raises(EngineError):
        hh_second_kind(C, variant="cyclic")


def test_hh_second_kind_needs_a_finite_resolution():
    with pytest.raises(Unsupported):
        hh_second_kind(catalog.exterior())


def test_tor_ext_second_kind_over_curved_point():
    N = catalog.curved_point_module(1, QQ, "right")
    M = catalog.curved_point_module(1, QQ, "left")
    assert tor_second_kind(N, M).is_zero()
    assert ext_second_kind(M, M).is_zero()
    A = catalog.matrix2()
    R, L = regular_module(A, "right"), regular_module(A, "left")
    assert sum(tor_second_kind(R, L).table.values()) == A.dim


def test_first_kind_on_point_and_exterior():
    rep = hh_first_kind(catalog.point(), T=4)
    assert rep.method == "TruncationStabilized" and rep.index == "level"
    assert rep.table == {"0": 1, "1": 0, "2": 0}
    assert hh_first_kind(catalog.exterior(), T=4).table == {"0": 2, "1": 2, "2": 2}


def test_first_kind_refuses_curved_base():
    B = catalog.counterexample()
    with pytest.raises(Unsupported):
        hh_first_kind(B, T=3)
    N = catalog.curved_point_module(1, QQ, "right")
    M = catalog.curved_point_module(1, QQ, "left")
    with pytest.raises(Unsupported):
        tor_first_kind(N, M, 3)
    with pytest.raises(Unsupported):
        ext_first_kind(M, M, 3)


def test_first_kind_of_endomorphism_dg_category_vanishes():
    C = Workspace().category("endalgebra")
    rep = hh_first_kind(C, T=3)
    assert rep.is_zero() and rep.method == "TruncationStabilized"


def test_tor_first_kind_agrees_with_reduced_bar():
    ws = Workspace()
    rep = tor_first_kind(ws.module("k-over-exterior-z-right"), ws.module("k-over-exterior-z"), 6)
    assert rep.method == "TruncationStabilized"
    want = O.reduced_bar_tor(O.EXTERIOR, ["x"], 4)
    assert {int(k): v for k, v in rep.table.items()} == want == {n: 1 for n in range(5)}


def test_compare_B_vs_C():
    B = catalog.counterexample()
    Q = Workspace().module("free1")
    cmp = compare_hh_B_vs_C(B, [Q], ["free1"])
    assert cmp.equal and cmp.left.table == EVEN
    assert cmp.verdict() == "EQUAL: k vs k"


@pytest.mark.parametrize("c", [1, -1, 2])
@pytest.mark.parametrize("make", [catalog.point, catalog.matrix2])
def test_curvature_shift(make, c):
    cmp = curvature_shift_check(make(), c)
    assert cmp.equal and cmp.extra["tensor_identity"]


def test_grading_pushforward():
    B = Workspace().category("exterior-z")
    out = pushforward_compat_check(B, Z2, T=3)
    assert out["bicomplex_homology"] and out["bicomplex_cohomology"]
    assert out["tables_equal"] is None
    U = catalog.upper_triangular(grading=catalog.Z)
    out = pushforward_compat_check(U, Z2, T=3)
    assert out["ok"] and out["tables_equal"]


@pytest.mark.parametrize("F,c", [(QQ, 1), (QQ, -3), (Field(7), 2)])
def test_delta_probe(F, c):
    B = catalog.point(c, F=F)
    N = Module(B, "right", *_parts(catalog.curved_point_module(c, F, "right")))
    M = Module(B, "left", *_parts(catalog.curved_point_module(c, F, "left")))
    out = delta_acyclicity_probe(B, N, M, 6)
    assert out["ok"] and out["window"] == [1, 5]


def _parts(M):
    return [(e.name, e.obj, e.degree) for e in M.basis], M.action, M.diff


def test_delta_probe_needs_curvature():
    N = catalog.curved_point_module(0, QQ, "right")
    M = catalog.curved_point_module(0, QQ, "left")
    with pytest.raises(EngineError):
        delta_acyclicity_probe(catalog.point(), N, M)


def test_report_round_trip():
    rep = hh_first_kind(catalog.point(), T=3)
    back = HomologyReport.from_dict(json.loads(json.dumps(rep.to_dict())))
    assert back.lines() == rep.lines()
    rep = hh_second_kind(catalog.counterexample())
    back = HomologyReport.from_dict(json.loads(json.dumps(rep.to_dict())))
    assert back == rep
