"""Standard small CDG-rings and random test instances.

Every ring here has one object ``"pt"`` and integer structure constants, so
it can be used over Q and over any F_p (see :func:`cdgcore.with_field`).
"""

from __future__ import annotations

import random
from typing import Dict, List, Optional, Sequence, Tuple

from .cdgcore import BasisMor, CdgCategory, CdgFunctor, curvature_shift, tensor, twist_functor
from .cdgmod import Module, external_tensor, regular_module, restrict
from .exactla import Field, QQ, Vec
from .grading import GradingGroup, Z, Z2

PT = "pt"


def algebra(names: Sequence[str], degrees: Sequence[int], mult: Dict[Tuple[str, str], Dict[str, int]],
            grading: GradingGroup = Z2, F: Field = QQ, diff: Optional[Dict[str, Dict[str, int]]] = None,
            h: Optional[Dict[str, int]] = None, unit: str = "1", name: str = "") -> CdgCategory:
    """One-object CDG-ring from a multiplication table on named basis vectors.
    Products with ``unit`` are filled in automatically."""
    basis = [BasisMor(n, PT, PT, d) for n, d in zip(names, degrees)]
    idx = {n: i for i, n in enumerate(names)}
    compose = {}
    for n in names:
        if unit in idx:
            compose[(idx[unit], idx[n])] = {idx[n]: 1}
            compose[(idx[n], idx[unit])] = {idx[n]: 1}
    for (a, b), v in mult.items():
        compose[(idx[a], idx[b])] = {idx[k]: F(c) for k, c in v.items() if F(c)}
    dd = {idx[a]: {idx[k]: F(c) for k, c in v.items() if F(c)} for a, v in (diff or {}).items()}
    curv = {PT: {idx[k]: F(c) for k, c in h.items() if F(c)}} if h else {}
    units = {PT: {idx[unit]: 1}} if unit in idx else None
    return CdgCategory(F, grading, [PT], basis, compose, dd, curv, units, name=name)


def point(c=0, grading: GradingGroup = Z2, F: Field = QQ) -> CdgCategory:
    """``(k, 0, c)``."""
    return algebra(["1"], [0], {}, grading, F, h={"1": c} if c else None, name=f"k_{c}")


def counterexample(F: Field = QQ) -> CdgCategory:
    """``(k, 0, 1)`` with the mod-two grading."""
    B = point(1, Z2, F)
    B.name = "counterexample"
    return B


def exterior(grading: GradingGroup = Z2, F: Field = QQ) -> CdgCategory:
    """``k[x]/(x^2)`` with ``|x| = 1``."""
    return algebra(["1", "x"], [0, 1], {}, grading, F, name="exterior")


def dual_numbers(grading: GradingGroup = Z2, F: Field = QQ) -> CdgCategory:
    """``k[e]/(e^2)`` with ``|e| = 0``."""
    return algebra(["1", "e"], [0, 0], {}, grading, F, name="dual")


def clifford1(F: Field = QQ) -> CdgCategory:
    """``k[x]/(x^2 - 1)``, ``x`` odd (mod-two grading only)."""
    return algebra(["1", "x"], [0, 1], {("x", "x"): {"1": 1}}, Z2, F, name="cl1")


def product_kk(grading: GradingGroup = Z2, F: Field = QQ) -> CdgCategory:
    """``k x k`` with idempotents ``p, q``; unit ``p + q``."""
    B = algebra(["p", "q"], [0, 0], {("p", "p"): {"p": 1}, ("q", "q"): {"q": 1}},
                grading, F, unit="none", name="kxk")
    return B


def matrix_algebra(degrees: Sequence[int] = (0, 0), grading: GradingGroup = Z2, F: Field = QQ,
                   name: str = "") -> CdgCategory:
    """``End(k^{d_1} (+) ... )`` with matrix units ``E_ij`` of degree ``d_i - d_j``."""
    n = len(degrees)
    names = [f"E{i+1}{j+1}" for i in range(n) for j in range(n)]
    degs = [degrees[i] - degrees[j] for i in range(n) for j in range(n)]
    mult = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                mult[(f"E{i+1}{j+1}", f"E{j+1}{k+1}")] = {f"E{i+1}{k+1}": 1}
    basis = [BasisMor(nm, PT, PT, d) for nm, d in zip(names, degs)]
    idx = {nm: t for t, nm in enumerate(names)}
    compose = {(idx[a], idx[b]): {idx[c]: 1 for c in v} for (a, b), v in mult.items()}
    units = {PT: {idx[f"E{i+1}{i+1}"]: 1 for i in range(n)}}
    return CdgCategory(F, grading, [PT], basis, compose, {}, {}, units,
                       name=name or f"M{n}")


def matrix2(F: Field = QQ, grading: GradingGroup = Z2) -> CdgCategory:
    return matrix_algebra((0, 0), grading, F, name="matrix2")


def upper_triangular(grading: GradingGroup = Z2, F: Field = QQ) -> CdgCategory:
    names = ["E11", "E12", "E22"]
    mult = {("E11", "E11"): {"E11": 1}, ("E11", "E12"): {"E12": 1},
            ("E12", "E22"): {"E12": 1}, ("E22", "E22"): {"E22": 1}}
    basis = [BasisMor(n, PT, PT, 0) for n in names]
    idx = {n: i for i, n in enumerate(names)}
    compose = {(idx[a], idx[b]): {idx[k]: c for k, c in v.items()} for (a, b), v in mult.items()}
    return CdgCategory(F, grading, [PT], basis, compose, {}, {}, {PT: {0: 1, 2: 1}}, name="upper")


def koszul_pair(F: Field = QQ) -> CdgCategory:
    """``k[e]/(e^2) (x) Lambda(x)`` with ``d x = e``, ``e`` even (mod two)."""
    names = ["1", "x", "e", "xe"]
    mult = {("x", "e"): {"xe": 1}, ("e", "x"): {"xe": 1}}
    diff = {"x": {"e": 1}, "xe": {}}
    return algebra(names, [0, 1, 0, 1], mult, Z2, F, diff=diff, name="koszul")


def named(name: str, F: Field = QQ) -> CdgCategory:
    table = {
        "counterexample": lambda: counterexample(F),
        "point": lambda: point(0, Z2, F),
        "exterior": lambda: exterior(Z2, F),
        "exterior-z": lambda: exterior(Z, F),
        "dual": lambda: dual_numbers(Z2, F),
        "matrix2": lambda: matrix2(F),
        "cl1": lambda: clifford1(F),
        "kxk": lambda: product_kk(Z2, F),
        "upper": lambda: upper_triangular(Z2, F),
        "koszul": lambda: koszul_pair(F),
    }
    if name not in table:
        raise KeyError(name)
    return table[name]()


# --------------------------------------------------------------------------
# random instances


def base_dg_algebras(F: Field = QQ, maxdim: int = 4) -> List[CdgCategory]:
    """DG-algebras (zero curvature) used as seeds for random CDG-rings."""
    algs = [point(0, Z2, F), exterior(Z2, F), dual_numbers(Z2, F), clifford1(F), product_kk(Z2, F),
            matrix_algebra((0, 1), Z2, F, name="M11"), matrix2(F), upper_triangular(Z2, F),
            koszul_pair(F),
            algebra(["1", "x", "y", "xy"], [0, 1, 1, 0],
                    {("x", "y"): {"xy": 1}, ("y", "x"): {"xy": -1}}, Z2, F, name="ext2")]
    return [A for A in algs if A.dim <= maxdim]


def _unimodular(rng: random.Random, n: int) -> List[List[int]]:
    """Random integer matrix of determinant +-1 (product of elementary moves)."""
    M = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(2 * n):
        if n < 2:
            break
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-1, 1])
        for k in range(n):
            M[i][k] += c * M[j][k]
    if rng.random() < 0.5 and n:
        M[0] = [-x for x in M[0]]
    return M


def change_basis(B: CdgCategory, rng: random.Random) -> CdgCategory:
    """Random homogeneous integral change of basis (blockwise unimodular)."""
    F = B.F
    n = B.dim
    blocks: Dict[Tuple, List[int]] = {}
    for i in range(n):
        blocks.setdefault((B.src[i], B.dst[i], B.deg[i]), []).append(i)
    P = [[0] * n for _ in range(n)]  # new_i = sum_j P[i][j] old_j
    Pinv = [[0] * n for _ in range(n)]
    for idxs in blocks.values():
        U = _unimodular(rng, len(idxs))
        Ui = _int_inverse(U)
        for a, i in enumerate(idxs):
            for b, j in enumerate(idxs):
                P[i][j] = U[a][b]
                Pinv[i][j] = Ui[a][b]

    def to_new(v: Vec) -> Vec:  # old coords -> new coords: old_j = sum_i Pinv[j][i] new_i
        out: Vec = {}
        for j, c in v.items():
            for i in range(n):
                if Pinv[j][i]:
                    out[i] = F.norm(out.get(i, 0) + c * Pinv[j][i])
        return {k: c for k, c in out.items() if c}

    def new_as_old(i) -> Vec:
        return {j: F(P[i][j]) for j in range(n) if P[i][j]}

    compose = {}
    for i in range(n):
        for j in range(n):
            if B.src[i] != B.dst[j]:
                continue
            v = to_new(B.mul(new_as_old(i), new_as_old(j)))
            if v:
                compose[(i, j)] = v
    diff = {i: to_new(B.d(new_as_old(i))) for i in range(n)}
    curv = {X: to_new(h) for X, h in B.curvature.items()}
    units = {X: to_new(u) for X, u in B.units.items()}
    basis = [BasisMor(f"b{i}", B.src[i], B.dst[i], B.deg[i]) for i in range(n)]
    Bn = CdgCategory(F, B.grading, B.objects, basis, compose, diff, curv, units, name=B.name + "'")
    Bn.as_old = {i: new_as_old(i) for i in range(n)}  # new basis in old coordinates
    return Bn


def basis_change_functor(Bn: CdgCategory, B: CdgCategory) -> CdgFunctor:
    """The strict isomorphism ``Bn -> B`` recorded by :func:`change_basis`."""
    return CdgFunctor(Bn, B, {X: X for X in B.objects}, Bn.as_old, name="basis change")


def unit_functor(B: CdgCategory) -> CdgFunctor:
    """Strict functor ``(k, 0, 0) -> B`` onto the unit of a one-object DG-ring."""
    if len(B.objects) != 1 or not B.is_dg():
        raise ValueError("unit_functor needs a one-object DG-ring")
    X = B.objects[0]
    P = point(0, B.grading, B.F)
    return CdgFunctor(P, B, {PT: X}, {0: dict(B.units[X])}, name="unit")


def _int_inverse(U: List[List[int]]) -> List[List[int]]:
    from fractions import Fraction
    n = len(U)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(U)]
    for c in range(n):
        p = next(r for r in range(c, n) if A[r][c])
        A[c], A[p] = A[p], A[c]
        pv = A[c][c]
        A[c] = [x / pv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    out = [[A[i][n + j] for j in range(n)] for i in range(n)]
    assert all(x.denominator == 1 for row in out for x in row)
    return [[int(x) for x in row] for row in out]


def random_odd_element(B: CdgCategory, rng: random.Random, X=PT, span: int = 1) -> Vec:
    odd = [i for i in B.hom_basis(X, X) if B.par[i]]
    v = {}
    for i in odd:
        c = rng.randint(-span, span)
        if c:
            v[i] = B.F(c)
    return v


class RandomCase:
    """A random CDG-ring with a right and a left CDG-module over it.

    ``base`` is the DG-algebra it was twisted from; ``functor`` the
    CDG-functor ``(id, tau)`` from the ring to ``base`` (None when the
    curvature was shifted by a scalar).
    """

    def __init__(self, ring, right, left, base, tau, functor, c):
        self.ring, self.right, self.left = ring, right, left
        self.base, self.tau, self.functor, self.c = base, tau, functor, c

    def __repr__(self):
        return f"<RandomCase {self.base.name} dim {self.ring.dim} tau={self.tau} c={self.c}>"


def random_case(seed: int, F: Field = QQ, maxdim: int = 4, allow_shift: bool = True) -> RandomCase:
    rng = random.Random(seed)
    A = rng.choice(base_dg_algebras(F, maxdim))
    if rng.random() < 0.7:
        A = change_basis(A, rng)
    tau = {PT: random_odd_element(A, rng)}
    Fn = twist_functor(A, tau)
    B = Fn.source
    right = restrict(Fn, regular_module(A, "right"))
    left = restrict(Fn, regular_module(A, "left"))
    c = 0
    if allow_shift and A.dim <= 2 and rng.random() < 0.4:
        c = rng.choice([1, -1, 2])
        B, right, left = shift_with_modules(B, right, left, c)
        Fn = None
    return RandomCase(B, right, left, A, tau, Fn, c)


def curved_point_module(c, F: Field, side: str, grading: GradingGroup = Z2) -> Module:
    """Two-dimensional CDG-module over ``(k, 0, c)``: ``d e = f``, ``d f = c e``
    (left) or ``d f = -c e`` (right)."""
    P = point(c, grading, F)
    s = F(c) if side == "left" else F(-c)
    return Module(P, side, [("e", PT, 0), ("f", PT, 1)], {(0, 0): {0: 1}, (0, 1): {1: 1}},
                  {0: {1: 1}, 1: {0: s} if s else {}}, name="K")


def shift_with_modules(B: CdgCategory, right: Module, left: Module, c):
    """``B_(c)`` together with ``right (x) K``, ``left (x) K`` restricted along the
    strict isomorphism ``B_(c) -> B (x) (k, 0, c)``."""
    F = B.F
    P = point(c, B.grading, F)
    E = tensor(B, P)
    Bc = curvature_shift(B, c)
    iso = CdgFunctor(Bc, E, {X: (X, PT) for X in B.objects}, {i: {i: 1} for i in range(B.dim)})
    r = restrict(iso, external_tensor(right, curved_point_module(c, F, "right", B.grading), E))
    l = restrict(iso, external_tensor(left, curved_point_module(c, F, "left", B.grading), E))
    return Bc, r, l
