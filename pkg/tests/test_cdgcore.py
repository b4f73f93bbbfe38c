import json
import random

import pytest

from cdgkit import catalog
from cdgkit.cdgcore import (CdgError, category_from_dict, change_connection,
                            compose_functors, curvature_shift, functor_curvature, identity_functor,
                            opposite, pushforward, tensor, twist_functor, validate, validate_functor)
from cdgkit.exactla import Field
from cdgkit.grading import Z, Z2, GradingError, grading_morphism
from cdgkit.io import read_json

PT = catalog.PT


def _point_dict(**extra):
    d = {"field": "Q", "grading": "Z/2", "objects": ["pt"],
         "basis": [{"name": "1", "src": "pt", "dst": "pt", "degree": 0}],
         "compose": [["1", "1", {"1": 1}]], "units": {"pt": {"1": 1}}, "curvature": {"pt": {"1": 1}}}
    d.update(extra)
    return d


def test_counterexample_validates():
    B = category_from_dict(_point_dict())
    rep = validate(B)
    assert rep.ok, str(rep)
    assert B.same_structure(catalog.counterexample())


def test_degree_one_differential_on_even_unit_fails_homogeneity():
    B = category_from_dict(_point_dict(diff=[["1", {"1": 1}]]))
    rep = validate(B)
    assert not rep.ok
    assert [c.name for c in rep.failed()][0] == "differential homogeneous"


def test_exterior_validates():
    assert validate(catalog.exterior()).ok
    assert validate(catalog.exterior(Z)).ok


def test_broken_leibniz_names_the_pair():
    B = category_from_dict(read_json("broken-leibniz"))
    rep = validate(B)
    (bad,) = [c for c in rep.failed() if c.name == "Leibniz rule"]
    assert bad.witness == "d(1*1)"


def test_opposite():
    B = catalog.counterexample()
    Bop = opposite(B)
    assert Bop.h(PT) == {0: -1}
    assert opposite(Bop).same_structure(B)
    assert validate(opposite(catalog.exterior())).ok


def test_opposite_sign_on_odd_squares():
    # an odd element squaring to the unit: x^op x^op = -(x x)^op
    C = catalog.clifford1()
    Cop = opposite(C)
    x = C.index["x"]
    assert C.comp(x, x) == {C.index["1"]: 1}
    assert Cop.comp(x, x) == {C.index["1"]: -1}
    assert validate(Cop).ok


def test_tensor_with_opposite_of_counterexample():
    B = catalog.counterexample()
    E = tensor(B, opposite(B))
    assert E.dim == 1 and len(E.objects) == 1
    assert E.is_dg() and not E.diff
    assert validate(E).ok


def test_tensor_unit_law():
    C = catalog.exterior()
    E = tensor(C, catalog.point())
    assert E.compose == C.compose and E.diff == C.diff and E.dim == C.dim


def test_tensor_koszul_sign():
    A = catalog.exterior()
    E = tensor(A, A)
    x1 = E.mul({E.index["x|1"]: 1}, {E.index["1|x"]: 1})
    x2 = E.mul({E.index["1|x"]: 1}, {E.index["x|1"]: 1})
    assert x1 == {E.index["x|x"]: 1} and x2 == {E.index["x|x"]: -1}
    assert validate(E).ok


def test_change_connection():
    A = catalog.exterior()
    assert change_connection(A, {}).same_structure(A)
    x = A.index["x"]
    At = change_connection(A, {PT: {x: 1}})
    assert At.h(PT) == {} and At.d({x: 1}) == {}
    assert validate(At).ok
    # tau must be odd
    with pytest.raises(CdgError):
        change_connection(catalog.point(), {PT: {0: 1}})


def test_change_connection_on_clifford_algebra():
    C = catalog.clifford1()
    x = C.index["x"]
    Ct = change_connection(C, {PT: {x: 1}})
    assert Ct.h(PT) == {C.index["1"]: 1}  # x^2 = 1
    assert validate(Ct).ok


def test_curvature_shift():
    B = catalog.counterexample()
    assert curvature_shift(B, -1).same_structure(catalog.point())
    M = catalog.matrix2()
    assert curvature_shift(curvature_shift(M, 3), -3).same_structure(M)
    for c in (1, -1, 2):
        Bc = curvature_shift(M, c)
        assert tensor(Bc, opposite(Bc)).same_structure(tensor(M, opposite(M)))


def test_curvature_shift_needs_even_two():
    # with integer degrees the unit sits in degree 0, not 2
    B = catalog.point(0, Z)
    with pytest.raises(CdgError):
        curvature_shift(B, 1)


def test_pushforward():
    A = catalog.exterior(Z)
    phi = grading_morphism(Z, Z2)
    Ap = pushforward(phi, A)
    assert Ap.same_structure(catalog.exterior(Z2))
    assert pushforward(grading_morphism(Z, Z), A).same_structure(A)
    with pytest.raises(GradingError):
        pushforward(phi, catalog.exterior(Z2))


def test_compose_functors():
    A = catalog.clifford1()
    x = A.index["x"]
    Fn = twist_functor(A, {PT: {x: 1}})
    Id = identity_functor(A)
    FI = compose_functors(Fn, Id)
    assert FI.mor_map == Fn.mor_map and FI.a == Fn.a
    # strict o strict
    S = compose_functors(identity_functor(A), identity_functor(A))
    assert S.is_strict
    # c_X = G(a_X) for strict G
    Bn = catalog.change_basis(A, random.Random(2))
    G = catalog.basis_change_functor(Bn, A)
    Ft = twist_functor(Bn, {PT: catalog.random_odd_element(Bn, random.Random(5))})
    GF = compose_functors(Ft, G)
    assert GF.a[PT] == G(Ft.a[PT])
    assert validate_functor(GF).ok and GF.is_cdg()


def test_functor_curvature():
    A = catalog.exterior()
    Fn = twist_functor(A, {PT: {A.index["x"]: 1}})
    assert all(not v for v in functor_curvature(Fn).values())
    B = catalog.counterexample()
    Fn = identity_functor(B, target=catalog.point())
    assert functor_curvature(Fn) == {PT: {0: -1}}
    Fn = identity_functor(catalog.point(), target=curvature_shift(catalog.point(), 3))
    assert functor_curvature(Fn) == {PT: {0: 3}}


def test_json_round_trip(tmp_path):
    for name in ("counterexample", "exterior", "matrix2", "koszul", "upper"):
        B = catalog.named(name)
        data = json.loads(json.dumps(B.to_dict()))
        assert category_from_dict(data).same_structure(B)


def test_json_errors():
    with pytest.raises(CdgError):
        category_from_dict({"objects": ["pt"]})
    with pytest.raises(CdgError):
        category_from_dict(_point_dict(compose=[["1", "y", {"1": 1}]]))


def test_field_change():
    B = category_from_dict(_point_dict(field="Fp:5"))
    assert B.F == Field(5)
    assert validate(B).ok
