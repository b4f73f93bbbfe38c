import random
from fractions import Fraction

import pytest
import sympy
from sympy.polys.matrices import DomainMatrix

from cdgkit.exactla import (QQ, Echelon, Field, FiniteComplex, LinearAlgebraError, SparseMatrix,
                            _dense_rank, euler_characteristic, homology_dims, kernel_basis, rank, solve)

F5 = Field(5)


def test_rank_examples():
    assert rank(SparseMatrix.identity(3)) == 3
    assert rank(SparseMatrix.zero(2, 5)) == 0
    assert rank(SparseMatrix.from_dense([[1, 2], [2, 4]])) == 1


def test_kernel_examples():
    assert kernel_basis(SparseMatrix.identity(3)) == []
    assert len(kernel_basis(SparseMatrix.zero(2, 3))) == 3
    (v,) = kernel_basis(SparseMatrix.from_dense([[1, 1]]))
    assert v[0] == -v[1] and v[0] != 0


def test_homology_examples():
    c = FiniteComplex({0: 1, 1: 2}, {})
    assert homology_dims(c) == {0: 1, 1: 2}
    c = FiniteComplex({0: 1, 1: 1}, {0: SparseMatrix.identity(1)})
    assert homology_dims(c) == {0: 0, 1: 0}
    # k <-> k, mod two, with maps 1 and 0
    c = FiniteComplex({0: 1, 1: 1}, {0: SparseMatrix.identity(1), 1: SparseMatrix.zero(1, 1)}, modulus=2)
    h = homology_dims(c)
    assert h == {0: 0, 1: 0} and euler_characteristic(h) == 0


def test_homology_rejects_nonzero_square():
    c = FiniteComplex({0: 1}, {0: SparseMatrix.identity(1)}, modulus=2)
    with pytest.raises(LinearAlgebraError):
        homology_dims(c)


def _random_low_rank(rng, n, m, r, F):
    A = [[rng.randint(-2, 2) for _ in range(r)] for _ in range(n)]
    B = [[rng.choice([0, 0, 1, -1, 3]) for _ in range(m)] for _ in range(r)]
    rows = [[F.norm(sum(A[i][k] * B[k][j] for k in range(r))) for j in range(m)] for i in range(n)]
    return rows


def test_rank_against_sympy():
    rng = random.Random(3)
    for _ in range(6):
        n, m, r = rng.randint(66, 80), rng.randint(66, 80), rng.randint(0, 30)
        rows = _random_low_rank(rng, n, m, r, QQ)
        dm = DomainMatrix([[sympy.QQ(x) for x in row] for row in rows], (n, m), sympy.QQ)
        assert rank(SparseMatrix.from_dense(rows)) == dm.rank()


def test_sparse_rank_against_dense_elimination_mod_p():
    rng = random.Random(4)
    for _ in range(10):
        rows = _random_low_rank(rng, 70, 75, rng.randint(0, 40), F5)
        M = SparseMatrix.from_dense(rows, F5)
        assert rank(M) == _dense_rank(M) == 75 - len(kernel_basis(M))


def test_kernel_vectors_are_in_kernel():
    rng = random.Random(1)
    for F in (QQ, F5):
        rows = _random_low_rank(rng, 30, 40, 10, F)
        M = SparseMatrix.from_dense(rows, F)
        ker = kernel_basis(M)
        assert len(ker) == 40 - rank(M)
        for v in ker:
            assert not M.apply(v)


def test_solve():
    M = SparseMatrix.from_dense([[1, 2], [3, 4]])
    x = solve(M, {0: 5, 1: 6})
    assert M.apply(x) == {0: 5, 1: 6}
    assert solve(SparseMatrix.from_dense([[1, 1]]), {}) == {}


def test_fields():
    assert F5.inv(2) == 3
    assert QQ.inv(2) == Fraction(1, 2)
    assert F5.parse_scalar("1/2") == 3
    assert QQ.format(Fraction(-3, 4)) == "-3/4"
    with pytest.raises(LinearAlgebraError):
        Field(6)
    assert Field.parse("Fp:7") == Field(7)


def test_dump_round_trip():
    M = SparseMatrix.from_dense([[0, Fraction(1, 3)], [-2, 0]])
    assert SparseMatrix.load(M.dump()) == M
    assert sorted(M.dump().splitlines()[1:]) == ["0 1 1/3", "1 0 -2"]


def test_echelon_express():
    ech = Echelon(QQ, track=True)
    ech.add({0: 1, 1: 1}, tag="a")
    ech.add({1: 1}, tag="b")
    rel = ech.add({0: 2, 1: 3}, tag="c")
    assert rel == {"c": 1, "a": -2, "b": -1}
