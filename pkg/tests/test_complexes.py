import json
import os

import pytest

import oracles as O
from cdgkit import catalog
from cdgkit.cdgcore import twist_functor
from cdgkit.cdgmod import Module, diagonal_bimodule, regular_module
from cdgkit.complexes import (ComplexError, bar_bicomplex, bar_pushforward, chain_map_defects,
                              cobar_bicomplex, comparison_map, hochschild_bicomplex, sign_lambda,
                              sign_rho, totalize)
from cdgkit.exactla import QQ, Field, SparseMatrix
from cdgkit.suites import bicomplex_identities, composition_check, functoriality

PT = catalog.PT


def test_sign_rho():
    assert sign_rho([0, 0, 0], [1, 0, 1]) == 0
    assert sign_rho([1], [0]) == 1
    assert sign_rho([2], [1]) == 1


def test_sign_lambda():
    assert sign_lambda([0, 0], [1, 1]) == 0
    assert sign_lambda([1, 0], [0, 0]) == 1
    assert sign_lambda([5], [1]) == 1


def _point_modules(c=1, F=QQ):
    return catalog.curved_point_module(c, F, "right"), catalog.curved_point_module(c, F, "left")


def test_bar_dimensions_and_delta_at_weight_zero():
    N, M = _point_modules()
    B = N.base
    bc = bar_bicomplex(N, B, M, 3)
    for i in range(4):
        assert bc.dim(i) == N.dim * B.dim ** i * M.dim
    # n (x) m -> n (x) h (x) m, with h = 1
    D = bc.delta[0]
    for j, (n, p, m) in enumerate(bc.keys[0]):
        assert D.cols[j] == {bc.index[1][(n, (0,), m)]: 1}
    assert bc.identities_hold()


def test_bar_delta_vanishes_without_curvature():
    A = catalog.exterior()
    bc = bar_bicomplex(regular_module(A, "right"), A, regular_module(A, "left"), 3)
    assert all(m.is_zero() for m in bc.delta.values())


def test_cobar_weight_zero_and_delta():
    N, M = _point_modules()
    B = M.base
    bc = cobar_bicomplex(M, B, M, 2)
    assert bc.dim(0) == M.dim * M.dim
    # (delta f)(l) = -f(h, l): every weight-one functional goes to minus its weight-zero twin
    D = bc.delta[1]
    for j, (p, l, m) in enumerate(bc.keys[1]):
        assert D.cols[j] == {bc.index[0][((), l, m)]: -1}
    A = catalog.exterior()
    L = regular_module(A, "left")
    assert all(m.is_zero() for m in cobar_bicomplex(L, A, L, 2).delta.values())


def test_hochschild_of_counterexample_is_one_dimensional_per_weight():
    B = catalog.counterexample()
    D = diagonal_bimodule(B)
    for variant in ("homology", "cohomology"):
        bc = hochschild_bicomplex(B, D, variant, 4)
        assert all(bc.dim(i) == 1 for i in bc.levels())
        assert bc.identities_hold()


def test_cyclic_sign_with_odd_entries():
    # m = x, b_1 = x odd in k[x]/(x^2 - 1): d(x|x) = x x + (+1) x x = 2
    C = catalog.clifford1()
    bc = hochschild_bicomplex(C, diagonal_bimodule(C), "homology", 1)
    x, one = C.index["x"], C.index["1"]
    col = bc.del_[1].cols[bc.index[1][(x, (x,))]]
    assert col == {bc.index[0][(one, ())]: 2}


def _as_named(bc, B, n, fam):
    names = [b.name for b in B.basis]
    M = {"del": bc.del_, "d": bc.d}[fam][n]
    tgt = n - 1 if fam == "del" else n

    def key(k):
        m, p = k
        return (names[m],) + tuple(names[f] for f in p)
    return {key(bc.keys[n][j]): {key(bc.keys[tgt][r]): c for r, c in col.items()}
            for j, col in enumerate(M.cols)}


@pytest.mark.parametrize("A,B,T", [(O.EXTERIOR, catalog.exterior(), 2), (O.KOSZUL, catalog.koszul_pair(), 3)])
def test_hochschild_matches_classical(A, B, T):
    bc = hochschild_bicomplex(B, diagonal_bimodule(B), "homology", T)
    for n in range(T + 1):
        assert _as_named(bc, B, n, "d") == O.hochschild_d(A, n)
        if n:
            assert _as_named(bc, B, n, "del") == O.hochschild_b(A, n)


def test_classical_oracle_is_a_complex():
    # the oracle itself: (b + d)^2 = 0 on the Koszul pair
    A = O.KOSZUL
    for n in range(1, 3):
        bb = O.compose(O.hochschild_b(A, n), O.hochschild_b(A, n + 1))
        assert O.is_zero_map(bb)
        mixed = O.add_maps(O.compose(O.hochschild_b(A, n), O.hochschild_d(A, n)),
                           O.compose(O.hochschild_d(A, n - 1), O.hochschild_b(A, n)))
        assert O.is_zero_map(mixed)


def test_totalize():
    A = catalog.exterior()
    L = regular_module(A, "left")
    bc = cobar_bicomplex(L, A, L, 0)
    tot = totalize(bc)
    assert tot.complex.total_dim() == bc.dim(0)
    s, p = totalize(bc, "sum"), totalize(bc, "product")
    assert s.complex.dims == p.complex.dims and s.complex.maps == p.complex.maps
    # mod two: every weight lands in one of two components
    bc = hochschild_bicomplex(A, diagonal_bimodule(A), "homology", 3)
    tot = totalize(bc)
    assert set(tot.complex.dims) <= {0, 1}
    assert sum(tot.complex.dims.values()) == sum(bc.dim(i) for i in bc.levels())
    with pytest.raises(ComplexError):
        totalize(bc, "laurent")


def test_comparison_map():
    A = catalog.exterior()
    bc = hochschild_bicomplex(A, diagonal_bimodule(A), "homology", 3)
    res = comparison_map(bc)
    assert res["isomorphism"]
    assert all(m == SparseMatrix.identity(m.nrows) for m in res["maps"].values())
    with pytest.raises(ComplexError):
        B = catalog.counterexample()
        comparison_map(hochschild_bicomplex(B, diagonal_bimodule(B), "homology", 2))


def test_strict_pushforward_has_no_insertions():
    A = catalog.exterior()
    Id = twist_functor(A, {})
    src, tgt, maps = bar_pushforward(Id, regular_module(A, "right"), regular_module(A, "left"), 3)
    assert all(s == u for (s, u), m in maps.items() if not m.is_zero())
    assert not chain_map_defects(maps, src, tgt, 2)


def test_twist_pushforward_inserts_powers_of_tau():
    C = catalog.clifford1()
    x = C.index["x"]
    Fn = twist_functor(C, {PT: {x: 1}})
    T = 4
    src, tgt, maps = bar_pushforward(Fn, regular_module(C, "right"), regular_module(C, "left"), T)
    for j, key in enumerate(src.keys[0]):
        n, _, m = key
        for u in range(T + 1):
            col = maps[(0, u)].cols[j] if (0, u) in maps else {}
            support = {tgt.keys[u][r] for r in col}
            assert support == {(n, (x,) * u, m)}
            assert set(col.values()) <= {1, -1}
    assert not chain_map_defects(maps, src, tgt, T - 1)


def test_composition_of_pushforwards_and_pullbacks():
    for seed in range(3):
        assert composition_check(seed, T=4) == []


def test_property_suites_small():
    assert bicomplex_identities(seed=11, cases=6, T=4).ok
    assert functoriality(seed=5, cases=3, T=4).ok


def test_property_suite_over_finite_field():
    assert bicomplex_identities(seed=2, cases=4, T=4, F=Field(5)).ok


def test_identity_check_detects_a_sign_error():
    # negating a whole family at one level is invisible to the identities,
    # but flipping d alone breaks its anticommutation with del
    rc = catalog.random_case(4, QQ, 4)
    bc = bar_bicomplex(rc.right, rc.ring, rc.left, 4)
    assert bc.identities_hold()
    bc.d[1] = -bc.d[1]
    assert not bc.identities_hold()
    assert bc.check_identities()["del d + d del"]


def test_dump(tmp_path):
    N, M = _point_modules(2, Field(7))
    bc = bar_bicomplex(N, N.base, M, 2)
    bc.dump(str(tmp_path))
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["truncation"] == 2 and man["field"] == "Fp:7"
    for name in man["maps"]:
        fam, i = name.rsplit("_", 1)
        attr = {"del": "del_", "d": "d", "delta": "delta"}[fam]
        text = (tmp_path / f"{name}.txt").read_text()
        assert SparseMatrix.load(text) == getattr(bc, attr)[int(i)]
    assert os.path.exists(tmp_path / "delta_0.txt")


def test_bad_coefficients():
    A = catalog.exterior()
    with pytest.raises(ComplexError):
        hochschild_bicomplex(A, regular_module(A, "left"), "homology", 2)
    B = catalog.counterexample()
    with pytest.raises(ComplexError):
        hochschild_bicomplex(B, diagonal_bimodule(B), "homology", 2, reduced=True)
    K = Module(A, "right", [], {}, {})
    with pytest.raises(ComplexError):
        bar_bicomplex(K, catalog.point(), regular_module(A, "left"), 1)
