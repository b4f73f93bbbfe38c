"""Bar, cobar and Hochschild bicomplexes with curvature terms.

A :class:`CurvedBicomplex` has components indexed by a level ``i >= 0``
(weight ``-i`` for the homological complexes, ``+i`` for the cohomological
ones) and three families of maps:

* ``del_`` (the ``∂`` part): homological ``i -> i-1``, cohomological ``i -> i+1``;
* ``d``: ``i -> i``;
* ``delta``: homological ``i -> i+1``, cohomological ``i -> i-1``.

Levels above the truncation ``T`` are dropped.  Tensor factors are written in
the order ``B(X_0, X_1) (x) ... (x) B(X_{i-1}, X_i)`` where
``B(X, Y) = Hom(Y, X)``, so ``b_k: X_k -> X_{k-1}``.
"""

from __future__ import annotations

import itertools
import json
import os
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

from .cdgcore import CdgCategory, CdgError, CdgFunctor, opposite, tensor, tensor_functors, opposite_functor
from .cdgmod import Module, restrict
from .exactla import FiniteComplex, SparseMatrix, Vec, add_term, axpy, homology_dims


class ComplexError(CdgError):
    pass


# --------------------------------------------------------------------------
# signs


def sign_rho(js: Sequence[int], ts: Sequence[int]) -> int:
    """``(J-1)J/2 + sum_k j_k (i+1-k) + sum_k j_k (t_0+...+t_k)`` mod 2."""
    if len(js) != len(ts):
        raise ComplexError("sign_rho: length mismatch")
    i = len(js) - 1
    J = sum(js)
    s = ((J - 1) * J // 2) % 2
    acc = 0
    for k, (j, t) in enumerate(zip(js, ts)):
        acc += t
        s += j * (i + 1 - k) + j * acc
    return s % 2


def sign_lambda(js: Sequence[int], ts: Sequence[int]) -> int:
    """``sum_k j_k (i-k) + sum_k j_k (t_0+...+t_k)`` mod 2."""
    if len(js) != len(ts):
        raise ComplexError("sign_lambda: length mismatch")
    i = len(js) - 1
    s = 0
    acc = 0
    for k, (j, t) in enumerate(zip(js, ts)):
        acc += t
        s += j * (i - k) + j * acc
    return s % 2


# --------------------------------------------------------------------------
# the bicomplex container


class CurvedBicomplex:
    def __init__(self, kind: str, orientation: str, F, grading, T: int):
        if orientation not in ("homological", "cohomological"):
            raise ComplexError("bad orientation")
        self.kind = kind
        self.orientation = orientation
        self.F = F
        self.grading = grading
        self.T = T
        self.keys: Dict[int, List[tuple]] = {}
        self.index: Dict[int, Dict[tuple, int]] = {}
        self.internal: Dict[int, List[int]] = {}
        self.del_: Dict[int, SparseMatrix] = {}
        self.d: Dict[int, SparseMatrix] = {}
        self.delta: Dict[int, SparseMatrix] = {}
        self.reduced = False
        self.notes: List[str] = []

    @property
    def homological(self) -> bool:
        return self.orientation == "homological"

    def levels(self) -> List[int]:
        return sorted(self.keys)

    def dim(self, i: int) -> int:
        return len(self.keys.get(i, []))

    def del_target(self, i: int) -> int:
        return i - 1 if self.homological else i + 1

    def delta_target(self, i: int) -> int:
        return i + 1 if self.homological else i - 1

    def weight(self, i: int) -> int:
        return -i if self.homological else i

    def total_degree(self, i: int, internal: int) -> int:
        return self.grading.add(internal, self.grading.embed_int(self.weight(i)))

    def _map(self, fam: str, i: int) -> Optional[SparseMatrix]:
        return getattr(self, fam).get(i)

    def _zero(self, rows: int, cols: int) -> SparseMatrix:
        return SparseMatrix.zero(rows, cols, self.F)

    def check_identities(self, upto: Optional[int] = None) -> Dict[str, List[int]]:
        """Weight components of ``(∂ + d + δ)^2 = 0``.

        Returns, for each identity, the source levels where it fails.  A
        composition through a negative level is zero; an identity needing a
        level above ``T`` is skipped.  Sources range over levels ``<= upto``
        (default ``T - 1``).
        """
        upto = self.T - 1 if upto is None else upto
        step = {"del_": self.del_target, "d": lambda i: i, "delta": self.delta_target}
        identities = {
            "del^2": [("del_", "del_")],
            "del d + d del": [("del_", "d"), ("d", "del_")],
            "d^2 + del delta + delta del": [("d", "d"), ("delta", "del_"), ("del_", "delta")],
            "d delta + delta d": [("delta", "d"), ("d", "delta")],
            "delta^2": [("delta", "delta")],
        }
        fails: Dict[str, List[int]] = {k: [] for k in identities}
        for i in self.levels():
            if i > upto:
                continue
            for name, terms in identities.items():
                pairs = []
                skip = False
                for a, b in terms:
                    j = step[a](i)
                    k = step[b](j) if j >= 0 else -1
                    if j > self.T or k > self.T:
                        skip = True
                        break
                    if j < 0 or k < 0:
                        continue
                    A, Bm = getattr(self, a)[i], getattr(self, b)[j]
                    if not A.is_zero() and not Bm.is_zero():
                        pairs.append((Bm, A))
                if not skip and pairs and not _sum_of_products_vanishes(pairs, self.F):
                    fails[name].append(i)
        return fails

    def identities_hold(self, upto: Optional[int] = None) -> bool:
        return not any(self.check_identities(upto).values())

    def components(self) -> Dict[Tuple[int, int], int]:
        """``(level, internal degree) -> dimension``."""
        out: Dict[Tuple[int, int], int] = {}
        for i, degs in self.internal.items():
            for g in degs:
                out[(i, g)] = out.get((i, g), 0) + 1
        return out

    def manifest(self) -> dict:
        return {
            "kind": self.kind, "orientation": self.orientation, "field": self.F.name,
            "grading": str(self.grading), "truncation": self.T, "reduced": self.reduced,
            "levels": {str(i): {"dim": self.dim(i),
                                "degrees": _count(self.internal[i], self.grading)}
                       for i in self.levels()},
            "maps": sorted(f"{fam}_{i}" for fam in ("del", "d", "delta")
                           for i in getattr(self, "del_" if fam == "del" else fam)),
            "notes": self.notes,
        }

    def dump(self, path: str) -> None:
        """Directory of triplet files ``<family>_<level>.txt`` and ``manifest.json``."""
        os.makedirs(path, exist_ok=True)
        for fam, attr in (("del", "del_"), ("d", "d"), ("delta", "delta")):
            for i, m in getattr(self, attr).items():
                with open(os.path.join(path, f"{fam}_{i}.txt"), "w") as fh:
                    fh.write(m.dump())
        with open(os.path.join(path, "manifest.json"), "w") as fh:
            json.dump(self.manifest(), fh, indent=2)


def _sum_of_products_vanishes(pairs, F) -> bool:
    """Whether ``sum Bm @ A`` over ``(Bm, A)`` pairs is zero, column by column."""
    ncols = pairs[0][1].ncols
    norm = F.norm
    for j in range(ncols):
        acc: Dict = {}
        for Bm, A in pairs:
            bcols = Bm.cols
            for r, c in A.cols[j].items():
                for r2, c2 in bcols[r].items():
                    acc[r2] = acc.get(r2, 0) + c * c2
        for v in acc.values():
            if norm(v):
                return False
    return True


def _count(degs, G) -> Dict[str, int]:
    out: Dict[str, int] = {}
    for g in degs:
        k = G.label(g)
        out[k] = out.get(k, 0) + 1
    return out


# --------------------------------------------------------------------------
# helpers


class _Paths:
    """Composable tuples ``(b_1, ..., b_i)`` with ``b_k: X_k -> X_{k-1}``."""

    def __init__(self, B: CdgCategory, skip=frozenset()):
        self.B = B
        self.skip = skip
        self.into: Dict[Hashable, List[int]] = {}
        for f in range(B.dim):
            if f not in skip:
                self.into.setdefault(B.dst[f], []).append(f)
        self._cache: Dict[Tuple, List[tuple]] = {}

    def from_(self, X0, i: int) -> List[tuple]:
        """All paths of length ``i`` starting (on the left) at ``X0``."""
        key = (X0, i)
        if key not in self._cache:
            if i == 0:
                out = [()]
            else:
                out = []
                for f in self.into.get(X0, []):
                    for rest in self.from_(self.B.src[f], i - 1):
                        out.append((f,) + rest)
            self._cache[key] = out
        return self._cache[key]

    def end(self, X0, path) -> Hashable:
        return self.B.src[path[-1]] if path else X0

    def objs(self, X0, path) -> List:
        """``[X_0, X_1, ..., X_i]``."""
        out = [X0]
        for f in path:
            out.append(self.B.src[f])
        return out


def _clean(v: Vec, skip) -> Vec:
    if not skip:
        return v
    return {k: c for k, c in v.items() if k not in skip}


def _build(src_keys: List[tuple], tgt_index: Dict[tuple, int], col: Callable[[tuple], Dict[tuple, object]], F) -> SparseMatrix:
    cols = []
    norm = F.norm
    for key in src_keys:
        out = {}
        for tk, c in col(key).items():
            c = norm(c)
            if c:
                out[tgt_index[tk]] = c
        cols.append(out)
    return SparseMatrix(len(tgt_index), len(src_keys), cols, F)


def _build_rows(src_index: Dict[tuple, int], tgt_keys: List[tuple],
                row: Callable[[tuple], Dict[tuple, object]], F) -> SparseMatrix:
    """Matrix from a row description: ``row(target_key)`` maps source keys to
    coefficients."""
    cols: List[Dict] = [dict() for _ in range(len(src_index))]
    norm = F.norm
    for r, key in enumerate(tgt_keys):
        for sk, c in row(key).items():
            c = norm(c)
            if c:
                j = src_index[sk]
                t = norm(cols[j].get(r, 0) + c)
                if t:
                    cols[j][r] = t
                else:
                    cols[j].pop(r, None)
    return SparseMatrix(len(tgt_keys), len(src_index), cols, F)


def _acc(out: Dict, key, c, F):
    # raw accumulation; _build/_build_rows normalize and drop zeros
    out[key] = out.get(key, 0) + c


def _accn(out: Dict, key, c, F):
    t = F.norm(out.get(key, 0) + c)
    if t:
        out[key] = t
    else:
        out.pop(key, None)


def _unit_skip(B: CdgCategory) -> frozenset:
    skip = set()
    for X, u in B.units.items():
        if len(u) != 1 or next(iter(u.values())) != 1:
            raise ComplexError("the reduced variant needs every unit to be a basis element")
        skip.add(next(iter(u)))
    return frozenset(skip)


def _check_base(M: Module, B: CdgCategory, what: str):
    if M.base is not B and not M.base.same_structure(B):
        raise ComplexError(f"{what} is not a module over the given category")


# --------------------------------------------------------------------------
# bar complex


def bar_bicomplex(N: Module, B: CdgCategory, M: Module, T: int, reduced: bool = False) -> CurvedBicomplex:
    """``Br(N, B, M)`` truncated at level ``T``; ``N`` right, ``M`` left."""
    if N.side != "right" or M.side != "left":
        raise ComplexError("bar complex needs a right module N and a left module M")
    _check_base(N, B, "N")
    _check_base(M, B, "M")
    if T < 0:
        raise ComplexError("truncation must be nonnegative")
    F = B.F
    G = B.grading
    skip = _unit_skip(B) if reduced else frozenset()
    if reduced and not B.is_dg():
        raise ComplexError("the reduced variant is only available for DG bases")
    bc = CurvedBicomplex("bar", "homological", F, G, T)
    bc.reduced = reduced
    paths = _Paths(B, skip)
    for i in range(T + 1):
        keys, degs = [], []
        for n in range(N.dim):
            X0 = N.obj[n]
            for p in paths.from_(X0, i):
                Xi = paths.end(X0, p)
                dp = sum(B.deg[f] for f in p)
                for m in M.by_obj.get(Xi, []):
                    keys.append((n, p, m))
                    degs.append(G.normalize(N.deg[n] + dp + M.deg[m]))
        bc.keys[i] = keys
        bc.index[i] = {k: j for j, k in enumerate(keys)}
        bc.internal[i] = degs
    par = B.par
    comp = B.comp

    def dcol(key):
        n, p, m = key
        i = len(p)
        s0 = -1 if i % 2 else 1
        out: Dict = {}
        for n2, c in N.diff.get(n, {}).items():
            _acc(out, (n2, p, m), s0 * c, F)
        acc = N.par[n]
        for k, f in enumerate(p):
            s = s0 * (-1 if acc else 1)
            for f2, c in _clean(B.diff.get(f, {}), skip).items():
                _acc(out, (n, p[:k] + (f2,) + p[k + 1:], m), s * c, F)
            acc ^= par[f]
        s = s0 * (-1 if acc else 1)
        for m2, c in M.diff.get(m, {}).items():
            _acc(out, (n, p, m2), s * c, F)
        return out

    def delcol(key):
        n, p, m = key
        i = len(p)
        out: Dict = {}
        if i == 0:
            return out
        for n2, c in N.act(p[0], n).items():
            _acc(out, (n2, p[1:], m), c, F)
        for k in range(1, i):
            s = -1 if k % 2 else 1
            for f2, c in _clean(comp(p[k - 1], p[k]), skip).items():
                _acc(out, (n, p[:k - 1] + (f2,) + p[k + 1:], m), s * c, F)
        s = -1 if i % 2 else 1
        for m2, c in M.act(p[-1], m).items():
            _acc(out, (n, p[:-1], m2), s * c, F)
        return out

    def deltacol(key):
        n, p, m = key
        out: Dict = {}
        objs = paths.objs(N.obj[n], p)
        for k in range(len(p) + 1):
            s = -1 if k % 2 else 1
            for hb, c in B.h(objs[k]).items():
                _acc(out, (n, p[:k] + (hb,) + p[k:], m), s * c, F)
        return out

    for i in range(T + 1):
        bc.d[i] = _build(bc.keys[i], bc.index[i], dcol, F)
        if i >= 1:
            bc.del_[i] = _build(bc.keys[i], bc.index[i - 1], delcol, F)
        if i + 1 <= T:
            if B.is_dg():
                bc.delta[i] = SparseMatrix.zero(len(bc.keys[i + 1]), len(bc.keys[i]), F)
            else:
                bc.delta[i] = _build(bc.keys[i], bc.index[i + 1], deltacol, F)
    return bc


# --------------------------------------------------------------------------
# cobar complex


def cobar_bicomplex(L: Module, B: CdgCategory, M: Module, T: int, reduced: bool = False) -> CurvedBicomplex:
    """``Cb(L, B, M)`` truncated at level ``T``; both modules left.

    The basis of level ``i`` is the set of elementary maps sending one basis
    tensor ``b_1 (x) ... (x) b_i (x) l`` to one basis vector ``m`` of
    ``M(X_0)``; its key is ``(path, l, m)``.
    """
    if L.side != "left" or M.side != "left":
        raise ComplexError("cobar complex needs two left modules")
    _check_base(L, B, "L")
    _check_base(M, B, "M")
    F = B.F
    G = B.grading
    skip = _unit_skip(B) if reduced else frozenset()
    if reduced and not B.is_dg():
        raise ComplexError("the reduced variant is only available for DG bases")
    bc = CurvedBicomplex("cobar", "cohomological", F, G, T)
    bc.reduced = reduced
    paths = _Paths(B, skip)
    deg_f = {}
    for i in range(T + 1):
        keys, degs = [], []
        for X0 in B.objects:
            for p in paths.from_(X0, i):
                Xi = paths.end(X0, p)
                dp = sum(B.deg[f] for f in p)
                for l in L.by_obj.get(Xi, []):
                    for m in M.by_obj.get(X0, []):
                        keys.append((p, l, m))
                        g = G.normalize(M.deg[m] - dp - L.deg[l])
                        degs.append(g)
                        deg_f[(p, l, m)] = g
        bc.keys[i] = keys
        bc.index[i] = {k: j for j, k in enumerate(keys)}
        bc.internal[i] = degs
    par = B.par
    comp = B.comp

    def X0_of(p, l):
        return B.dst[p[0]] if p else L.obj[l]

    def del_row(key):
        # (∂f)(b_1..b_{i+1}, l) evaluated at output m'; key = (p, l, m') at level i+1
        p, l, mt = key
        i = len(p) - 1
        out: Dict = {}
        b1 = p[0]
        X1 = B.src[b1]
        # (-1)^{|f||b_1|} b_1 f(b_2, ..., l)
        for m in M.by_obj.get(X1, []):
            c = M.act(b1, m).get(mt)
            if c:
                sk = (p[1:], l, m)
                s = -1 if (G.parity(deg_f[sk]) and par[b1]) else 1
                _acc(out, sk, s * c, F)
        for k in range(1, i + 1):
            s = -1 if k % 2 else 1
            for f2, c in _clean(comp(p[k - 1], p[k]), skip).items():
                _acc(out, (p[:k - 1] + (f2,) + p[k + 1:], l, mt), s * c, F)
        s = -1 if (i + 1) % 2 else 1
        for l2, c in L.act(p[-1], l).items():
            _acc(out, (p[:-1], l2, mt), s * c, F)
        return out

    def d_row(key):
        p, l, mt = key
        i = len(p)
        s0 = -1 if i % 2 else 1
        out: Dict = {}
        X0 = X0_of(p, l)
        for m in M.by_obj.get(X0, []):
            c = M.diff.get(m, {}).get(mt)
            if c:
                _acc(out, (p, l, m), s0 * c, F)
        # - (-1)^{|f| + |b_1| + ... + |b_{k-1}|} f(..., d b_k, ...)
        # |f| is the degree of the source elementary map, which is the same
        # for all terms below: |f| = |m'| - |w| - 1
        wdeg = sum(B.deg[f] for f in p) + L.deg[l]
        pf = G.parity(G.normalize(M.deg[mt] - wdeg - 1))
        acc = pf
        for k, f in enumerate(p):
            # source input has f2 in slot k with d(f2) containing f
            s = -s0 * (-1 if acc else 1)
            for f2, c in _clean(B.diff.get(f, {}), skip).items():
                _acc(out, (p[:k] + (f2,) + p[k + 1:], l, mt), s * c, F)
            acc ^= par[f]
        s = -s0 * (-1 if acc else 1)
        for l2, c in L.diff.get(l, {}).items():
            _acc(out, (p, l2, mt), s * c, F)
        return out

    def delta_row(key):
        # (δf)(b_1..b_{i-1}, l) = sum_k (-1)^{k+1} f(b_1..b_k, h, b_{k+1}.., l)
        p, l, mt = key
        out: Dict = {}
        objs = paths.objs(X0_of(p, l), p)
        for k in range(len(p) + 1):
            s = 1 if k % 2 else -1
            for hb, c in B.h(objs[k]).items():
                if hb in skip:
                    continue
                _acc(out, (p[:k] + (hb,) + p[k:], l, mt), s * c, F)
        return out

    for i in range(T + 1):
        bc.d[i] = _build_rows(bc.index[i], bc.keys[i], d_row, F)
        if i + 1 <= T:
            bc.del_[i] = _build_rows(bc.index[i], bc.keys[i + 1], del_row, F)
        if i >= 1:
            if B.is_dg():
                bc.delta[i] = SparseMatrix.zero(len(bc.keys[i - 1]), len(bc.keys[i]), F)
            else:
                bc.delta[i] = _build_rows(bc.index[i], bc.keys[i - 1], delta_row, F)
    return bc


# --------------------------------------------------------------------------
# Hochschild complexes


class _Bimod:
    """Left/right actions of ``B`` on a module over ``E = B (x) B^op``."""

    def __init__(self, B: CdgCategory, M: Module):
        self.B, self.M = B, M
        self.n = B.dim
        self.F = B.F
        self._l: Dict = {}
        self._r: Dict = {}

    def left(self, b: int, m: int) -> Vec:
        """``b m = (b (x) 1) m``."""
        key = (b, m)
        if key not in self._l:
            B, M = self.B, self.M
            Y = M.obj[m][1]
            out: Vec = {}
            for u, c in B.units[Y].items():
                axpy(out, M.act(b * self.n + u, m), c, self.F)
            self._l[key] = out
        return self._l[key]

    def right(self, m: int, b: int) -> Vec:
        """``m b = (-1)^{|b||m|} (1 (x) b^op) m``."""
        key = (m, b)
        if key not in self._r:
            B, M = self.B, self.M
            X = M.obj[m][0]
            out: Vec = {}
            for u, c in B.units[X].items():
                axpy(out, M.act(u * self.n + b, m), c, self.F)
            if B.par[b] and M.par[m]:
                out = {k: self.F.norm(-v) for k, v in out.items()}
            self._r[key] = out
        return self._r[key]


def _check_bimodule(B: CdgCategory, M: Module, E: Optional[CdgCategory]):
    if M.side != "left":
        raise ComplexError("Hochschild coefficients must be a left module over B (x) B^op")
    objs = {(X, Y) for X in B.objects for Y in B.objects}
    if set(M.base.objects) != objs or M.base.dim != B.dim * B.dim:
        raise ComplexError("coefficient module is not over B (x) B^op")


def hochschild_bicomplex(B: CdgCategory, M: Module, variant: str = "homology", T: int = 4,
                         reduced: bool = False) -> CurvedBicomplex:
    """Hochschild complex of the second kind (before totalization).

    ``M`` is a left module over ``B (x) B^op`` (for instance
    :func:`cdgmod.diagonal_bimodule`)."""
    _check_bimodule(B, M, None)
    if variant not in ("homology", "cohomology"):
        raise ComplexError("variant is 'homology' or 'cohomology'")
    F = B.F
    G = B.grading
    skip = _unit_skip(B) if reduced else frozenset()
    if reduced and not B.is_dg():
        raise ComplexError("the reduced variant is only available for DG bases")
    paths = _Paths(B, skip)
    bm = _Bimod(B, M)
    par = B.par
    comp = B.comp
    homological = variant == "homology"
    bc = CurvedBicomplex("hochschild-" + variant, "homological" if homological else "cohomological", F, G, T)
    bc.reduced = reduced
    deg_f = {}
    for i in range(T + 1):
        keys, degs = [], []
        for X0 in B.objects:
            for p in paths.from_(X0, i):
                Xi = paths.end(X0, p)
                dp = sum(B.deg[f] for f in p)
                if homological:
                    for m in M.by_obj.get((Xi, X0), []):
                        keys.append((m, p))
                        degs.append(G.normalize(M.deg[m] + dp))
                else:
                    for m in M.by_obj.get((X0, Xi), []):
                        keys.append((p, m))
                        g = G.normalize(M.deg[m] - dp)
                        degs.append(g)
                        deg_f[(p, m)] = g
        bc.keys[i] = keys
        bc.index[i] = {k: j for j, k in enumerate(keys)}
        bc.internal[i] = degs

    if homological:
        def X0_hom(m, p):
            return M.obj[m][1]

        def delcol(key):
            m, p = key
            i = len(p)
            out: Dict = {}
            if i == 0:
                return out
            for m2, c in bm.right(m, p[0]).items():
                _acc(out, (m2, p[1:]), c, F)
            for k in range(1, i):
                s = -1 if k % 2 else 1
                for f2, c in _clean(comp(p[k - 1], p[k]), skip).items():
                    _acc(out, (m, p[:k - 1] + (f2,) + p[k + 1:]), s * c, F)
            bi = p[-1]
            e = i + (par[bi] * (M.par[m] + sum(par[f] for f in p[:-1])))
            s = -1 if e % 2 else 1
            for m2, c in bm.left(bi, m).items():
                _acc(out, (m2, p[:-1]), s * c, F)
            return out

        def dcol(key):
            m, p = key
            i = len(p)
            s0 = -1 if i % 2 else 1
            out: Dict = {}
            for m2, c in M.diff.get(m, {}).items():
                _acc(out, (m2, p), s0 * c, F)
            acc = M.par[m]
            for k, f in enumerate(p):
                s = s0 * (-1 if acc else 1)
                for f2, c in _clean(B.diff.get(f, {}), skip).items():
                    _acc(out, (m, p[:k] + (f2,) + p[k + 1:]), s * c, F)
                acc ^= par[f]
            return out

        def deltacol(key):
            m, p = key
            out: Dict = {}
            objs = paths.objs(X0_hom(m, p), p)
            for k in range(len(p) + 1):
                s = -1 if k % 2 else 1
                for hb, c in B.h(objs[k]).items():
                    _acc(out, (m, p[:k] + (hb,) + p[k:]), s * c, F)
            return out

        for i in range(T + 1):
            bc.d[i] = _build(bc.keys[i], bc.index[i], dcol, F)
            if i >= 1:
                bc.del_[i] = _build(bc.keys[i], bc.index[i - 1], delcol, F)
            if i + 1 <= T:
                if B.is_dg():
                    bc.delta[i] = SparseMatrix.zero(len(bc.keys[i + 1]), len(bc.keys[i]), F)
                else:
                    bc.delta[i] = _build(bc.keys[i], bc.index[i + 1], deltacol, F)
        return bc

    def X0_of(p, m):
        return M.obj[m][0]

    def del_row(key):
        # (∂f)(b_1..b_{i+1}) at output m'
        p, mt = key
        i = len(p) - 1
        out: Dict = {}
        b1 = p[0]
        X1, Xe = B.src[b1], B.src[p[-1]]
        for m in M.by_obj.get((X1, Xe), []):
            c = bm.left(b1, m).get(mt)
            if c:
                sk = (p[1:], m)
                s = -1 if (G.parity(deg_f[sk]) and par[b1]) else 1
                _acc(out, sk, s * c, F)
        for k in range(1, i + 1):
            s = -1 if k % 2 else 1
            for f2, c in _clean(comp(p[k - 1], p[k]), skip).items():
                _acc(out, (p[:k - 1] + (f2,) + p[k + 1:], mt), s * c, F)
        X0, Xi = B.dst[b1], B.dst[p[-1]]
        s = -1 if (i + 1) % 2 else 1
        for m in M.by_obj.get((X0, Xi), []):
            c = bm.right(m, p[-1]).get(mt)
            if c:
                _acc(out, (p[:-1], m), s * c, F)
        return out

    def d_row(key):
        p, mt = key
        i = len(p)
        s0 = -1 if i % 2 else 1
        out: Dict = {}
        for m in M.by_obj.get(M.obj[mt], []):
            c = M.diff.get(m, {}).get(mt)
            if c:
                _acc(out, (p, m), s0 * c, F)
        wdeg = sum(B.deg[f] for f in p)
        acc = G.parity(G.normalize(M.deg[mt] - wdeg - 1))
        for k, f in enumerate(p):
            s = -s0 * (-1 if acc else 1)
            for f2, c in _clean(B.diff.get(f, {}), skip).items():
                _acc(out, (p[:k] + (f2,) + p[k + 1:], mt), s * c, F)
            acc ^= par[f]
        return out

    def delta_row(key):
        p, mt = key
        out: Dict = {}
        objs = paths.objs(X0_of(p, mt), p)
        # slots 0..i for a target of length i-1 ... = len(p) + 1 slots
        for k in range(len(p) + 1):
            s = 1 if k % 2 else -1
            for hb, c in B.h(objs[k]).items():
                if hb in skip:
                    continue
                _acc(out, (p[:k] + (hb,) + p[k:], mt), s * c, F)
        return out

    for i in range(T + 1):
        bc.d[i] = _build_rows(bc.index[i], bc.keys[i], d_row, F)
        if i + 1 <= T:
            bc.del_[i] = _build_rows(bc.index[i], bc.keys[i + 1], del_row, F)
        if i >= 1:
            if B.is_dg():
                bc.delta[i] = SparseMatrix.zero(len(bc.keys[i - 1]), len(bc.keys[i]), F)
            else:
                bc.delta[i] = _build_rows(bc.index[i], bc.keys[i - 1], delta_row, F)
    return bc


# --------------------------------------------------------------------------
# totalization


class Totalization:
    """Total complex of a truncated bicomplex.

    ``complex`` is the Γ-graded :class:`FiniteComplex`; ``blocks[g]`` lists
    ``(level, local index)`` for the basis of total degree ``g``.  Maps out
    of the top level into the (dropped) level ``T + 1`` are omitted, so the
    square-zero property may fail at the boundary when ``δ`` or the
    cohomological ``∂`` reach past ``T``.
    """

    def __init__(self, bc: CurvedBicomplex, mode: str, complex_: FiniteComplex, blocks, boundary):
        self.bc = bc
        self.mode = mode
        self.complex = complex_
        self.blocks = blocks
        self.boundary = boundary


def totalize(bc: CurvedBicomplex, mode: str = "product", levels: Optional[Sequence[int]] = None,
             families: Sequence[str] = ("del_", "d", "delta")) -> Totalization:
    """Total complex (``mode`` is ``"sum"`` or ``"product"``; they agree on
    truncated complexes).  Total degree is internal degree plus the weight."""
    if mode not in ("sum", "product"):
        raise ComplexError("mode is 'sum' or 'product'")
    G = bc.grading
    F = bc.F
    lv = list(levels) if levels is not None else bc.levels()
    lvset = set(lv)
    blocks: Dict[int, List[Tuple[int, int]]] = {}
    where: Dict[Tuple[int, int], Tuple[int, int]] = {}
    for i in lv:
        for j, g in enumerate(bc.internal[i]):
            t = bc.total_degree(i, g)
            where[(i, j)] = (t, len(blocks.setdefault(t, [])))
            blocks[t].append((i, j))
    cols: Dict[int, List[Dict]] = {t: [dict() for _ in b] for t, b in blocks.items()}
    for fam in families:
        for i, m in getattr(bc, fam).items():
            if i not in lvset:
                continue
            tgt = {"del_": bc.del_target(i), "d": i, "delta": bc.delta_target(i)}[fam]
            if tgt not in lvset:
                continue
            for j, col in enumerate(m.cols):
                t, a = where[(i, j)]
                dst = cols[t][a]
                for r, c in col.items():
                    t2, b = where[(tgt, r)]
                    add_term(dst, b, c, F)
    maps = {}
    for t, b in blocks.items():
        t1 = G.add(t, 1)
        maps[t] = SparseMatrix(len(blocks.get(t1, [])), len(b), cols[t], F)
    fc = FiniteComplex({t: len(b) for t, b in blocks.items()}, maps, F, modulus=2 if G.is_torsion else 0)
    return Totalization(bc, mode, fc, blocks, [max(lv)] if lv else [])


def comparison_map(bc: CurvedBicomplex) -> Dict[str, object]:
    """The map ``Tot^⊕ -> Tot^⊓`` (or its cohomological mirror) on a truncated
    DG bicomplex: the identity on every component, with both homologies."""
    if any(not m.is_zero() for m in bc.delta.values()):
        raise ComplexError("comparison map needs a DG base (zero curvature)")
    src = totalize(bc, "sum")
    tgt = totalize(bc, "product")
    mats = {t: SparseMatrix.identity(n, bc.F) for t, n in src.complex.dims.items()}
    hs = homology_dims(src.complex)
    ht = homology_dims(tgt.complex)
    return {"source": src, "target": tgt, "maps": mats, "homology_source": hs,
            "homology_target": ht, "isomorphism": hs == ht}


# --------------------------------------------------------------------------
# functoriality


def _a_powers(C: CdgCategory, a: Vec, j: int, skip=frozenset()) -> List[Tuple[tuple, object]]:
    """Expansion of ``a^{(x) j}`` into basis tensors."""
    items = [(k, c) for k, c in a.items() if k not in skip]
    if j == 0:
        return [((), 1)]
    out = []
    for combo in itertools.product(items, repeat=j):
        c = 1
        for _, x in combo:
            c *= x
        out.append((tuple(k for k, _ in combo), c))
    return out


def _compositions(total: int, parts: int):
    """All tuples of ``parts`` nonnegative ints summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _expand_slots(Fn: CdgFunctor, p: tuple, objs: List, js: tuple, skip) -> List[Tuple[tuple, object]]:
    """Basis expansion of ``a^{j_0} F(b_1) a^{j_1} ... F(b_i) a^{j_i}``."""
    C = Fn.target
    pieces = []
    for k, X in enumerate(objs):
        if k > 0:
            fb = [((f,), c) for f, c in Fn({p[k - 1]: 1}).items() if f not in skip]
            pieces.append(fb)
        pieces.append(_a_powers(C, Fn.conn(X), js[k], skip))
    out = []
    for combo in itertools.product(*pieces):
        c = 1
        t = ()
        for tt, x in combo:
            c *= x
            t += tt
        out.append((t, c))
    return out


def pushforward_map(Fn: CdgFunctor, src: CurvedBicomplex, tgt: CurvedBicomplex,
                    origin_n: Optional[Sequence[int]] = None, origin_m: Optional[Sequence[int]] = None,
                    T: Optional[int] = None) -> Dict[Tuple[int, int], SparseMatrix]:
    """``F_*`` from a bar (or homological Hochschild) bicomplex over ``B`` to the
    one over ``C``.  Returns blocks ``(source level, target level) -> matrix``
    for target levels ``<= T``.

    ``origin_n``/``origin_m`` translate basis indices of the restricted
    modules back to the original ones (``Module.origin``).
    """
    if src.kind != tgt.kind or src.kind not in ("bar", "hochschild-homology"):
        raise ComplexError("pushforward_map needs two bar or two Hochschild homology bicomplexes")
    if not Fn.is_cdg():
        raise ComplexError("F_* is only defined for CDG-functors")
    T = tgt.T if T is None else T
    F = tgt.F
    B = Fn.source
    skip = _unit_skip(Fn.target) if tgt.reduced else frozenset()
    out: Dict[Tuple[int, int], Dict[int, Dict]] = {}
    bar = src.kind == "bar"
    for s in src.levels():
        for j, key in enumerate(src.keys[s]):
            if bar:
                n, p, m = key
                n2 = origin_n[n] if origin_n else n
                m2 = origin_m[m] if origin_m else m
                X0 = _bar_X0(src, key, B)
                t0 = src_par_first(src, key, B)
            else:
                m, p = key
                m2 = origin_m[m] if origin_m else m
                X0 = None
                t0 = src_par_first(src, key, B)
            objs = _objs(B, p, X0 if bar else _hoch_X0(src, key, B))
            ts = [t0] + [B.par[f] for f in p]
            for u in range(s, T + 1):
                for js in _compositions(u - s, len(p) + 1):
                    sg = -1 if sign_rho(js, ts) else 1
                    for tp, c in _expand_slots(Fn, p, objs, js, skip):
                        tk = (n2, tp, m2) if bar else (m2, tp)
                        r = tgt.index[u].get(tk)
                        if r is None:
                            raise ComplexError("image tensor missing in the target complex")
                        blk = out.setdefault((s, u), {})
                        _accn(blk.setdefault(j, {}), r, sg * c, F)
    mats = {}
    for (s, u), cols in out.items():
        mats[(s, u)] = SparseMatrix(tgt.dim(u), src.dim(s), [cols.get(j, {}) for j in range(src.dim(s))], F)
    return mats


def _objs(B, p, X0):
    out = [X0]
    for f in p:
        out.append(B.src[f])
    return out


def _bar_X0(bc, key, B):
    n, p, m = key
    return bc._nobj[n]


def _hoch_X0(bc, key, B):
    m, p = key
    return bc._mobj[m][1]


def src_par_first(bc, key, B):
    if bc.kind == "bar":
        return bc._npar[key[0]]
    return bc._mpar[key[0]]


def attach_module_data(bc: CurvedBicomplex, first: Module) -> CurvedBicomplex:
    """Remember object/parity data of the first tensor factor (used by F_*)."""
    if bc.kind == "bar":
        bc._nobj = first.obj
        bc._npar = first.par
    else:
        bc._mobj = first.obj
        bc._mpar = first.par
    return bc


def pullback_map(Fn: CdgFunctor, src: CurvedBicomplex, tgt: CurvedBicomplex,
                 L_restricted: Optional[Module], M_restricted: Module,
                 T: Optional[int] = None) -> Dict[Tuple[int, int], SparseMatrix]:
    """``F^*`` from a cobar (or Hochschild cochain) bicomplex over ``C`` to the
    one over ``B``; blocks ``(source level, target level)`` for source
    levels ``<= T``.

    ``L_restricted``/``M_restricted`` are the restricted modules ``F^* L``,
    ``F^* M`` over ``B`` (with ``origin`` data); ``F`` must be injective on
    objects.
    """
    if src.kind != tgt.kind or src.kind not in ("cobar", "hochschild-cohomology"):
        raise ComplexError("pullback_map needs two cobar or two Hochschild cochain bicomplexes")
    if not Fn.is_cdg():
        raise ComplexError("F^* is only defined for CDG-functors")
    T = src.T if T is None else T
    F = tgt.F
    B = Fn.source
    skip = _unit_skip(Fn.target) if src.reduced else frozenset()
    cobar = src.kind == "cobar"
    M = M_restricted
    back_m = {}
    for r, o in enumerate(M.origin):
        back_m.setdefault((M.obj[r], o), r)
    out: Dict[Tuple[int, int], Dict[int, Dict]] = {}
    # degrees of source elementary maps
    for u in tgt.levels():
        for r, key in enumerate(tgt.keys[u]):
            if cobar:
                p, l, mt = key
                X0 = B.dst[p[0]] if p else L_restricted.obj[l]
                l2 = L_restricted.origin[l]
            else:
                p, mt = key
                X0 = M.obj[mt][0]
            m2 = M.origin[mt]
            objs = _objs(B, p, X0)
            for s in range(u, T + 1):
                for js in _compositions(s - u, len(p) + 1):
                    for tp, c in _expand_slots(Fn, p, objs, js, skip):
                        sk = (tp, l2, m2) if cobar else (tp, m2)
                        j = src.index[s].get(sk)
                        if j is None:
                            raise ComplexError("preimage tensor missing in the source complex")
                        fdeg = src.internal[s][j]
                        ts = [src.grading.parity(fdeg)] + [B.par[f] for f in p]
                        sg = -1 if sign_lambda(js, ts) else 1
                        blk = out.setdefault((s, u), {})
                        _accn(blk.setdefault(j, {}), r, sg * c, F)
    mats = {}
    for (s, u), cols in out.items():
        mats[(s, u)] = SparseMatrix(tgt.dim(u), src.dim(s), [cols.get(j, {}) for j in range(src.dim(s))], F)
    return mats


def chain_map_defects(maps: Dict[Tuple[int, int], SparseMatrix], src: CurvedBicomplex,
                      tgt: CurvedBicomplex, upto: int) -> List[Tuple[int, int]]:
    """Pairs ``(source level, target level)`` where ``D_tgt Phi != Phi D_src``,
    among target levels ``<= upto`` whose computation stays materialized."""
    fams = ("del_", "d", "delta")

    def D(bc, fam, i):
        return getattr(bc, fam).get(i)

    def tgt_of(bc, fam, i):
        return {"del_": bc.del_target(i), "d": i, "delta": bc.delta_target(i)}[fam]

    bad = []
    F = tgt.F
    for s in src.levels():
        for u in tgt.levels():
            if u > upto:
                continue
            lhs = SparseMatrix.zero(tgt.dim(u), src.dim(s), F)
            ok = True
            # D_tgt o Phi: Phi into level v, then D from v to u
            for v in tgt.levels():
                Phi = maps.get((s, v))
                if Phi is None:
                    continue
                for fam in fams:
                    if tgt_of(tgt, fam, v) == u:
                        m = D(tgt, fam, v)
                        if m is not None:
                            lhs = lhs + m @ Phi
            rhs = SparseMatrix.zero(tgt.dim(u), src.dim(s), F)
            for fam in fams:
                s2 = tgt_of(src, fam, s)
                if s2 < 0:
                    continue
                if s2 > src.T:
                    ok = False  # the source differential leaves the truncation
                    continue
                m = D(src, fam, s)
                if m is None:
                    ok = False
                    continue
                Phi = maps.get((s2, u))
                if Phi is not None:
                    rhs = rhs + Phi @ m
            if ok and lhs != rhs:
                bad.append((s, u))
    return bad


def compose_blocks(G: Dict[Tuple[int, int], SparseMatrix], Fm: Dict[Tuple[int, int], SparseMatrix],
                   upto: int) -> Dict[Tuple[int, int], SparseMatrix]:
    """Blockwise ``G o F`` restricted to final levels ``<= upto``."""
    out: Dict[Tuple[int, int], SparseMatrix] = {}
    for (s, v), A in Fm.items():
        for (v2, u), Bm in G.items():
            if v2 != v or u > upto:
                continue
            prod = Bm @ A
            if (s, u) in out:
                out[(s, u)] = out[(s, u)] + prod
            else:
                out[(s, u)] = prod
    return out


def blocks_equal(a: Dict, b: Dict) -> bool:
    keys = set(a) | set(b)
    for k in keys:
        x, y = a.get(k), b.get(k)
        if x is None:
            if not y.is_zero():
                return False
        elif y is None:
            if not x.is_zero():
                return False
        elif x != y:
            return False
    return True


# --------------------------------------------------------------------------
# convenience: bicomplexes attached to a functor


def bar_pushforward(Fn: CdgFunctor, N: Module, M: Module, T: int):
    """Source and target bar bicomplexes of ``F_*`` and its blocks."""
    Nr = restrict(Fn, N)
    Mr = restrict(Fn, M)
    src = attach_module_data(bar_bicomplex(Nr, Fn.source, Mr, T), Nr)
    tgt = attach_module_data(bar_bicomplex(N, Fn.target, M, T), N)
    maps = pushforward_map(Fn, src, tgt, Nr.origin, Mr.origin, T)
    return src, tgt, maps


def hochschild_pushforward(Fn: CdgFunctor, M: Module, T: int, EB: Optional[CdgCategory] = None):
    """``F_*: Hoch(B, F^* M) -> Hoch(C, M)`` for ``M`` over ``C (x) C^op``."""
    B, C = Fn.source, Fn.target
    EB = EB or tensor(B, opposite(B))
    FF = tensor_functors(Fn, opposite_functor(Fn), EB, M.base)
    Mr = restrict(FF, M)
    src = attach_module_data(hochschild_bicomplex(B, Mr, "homology", T), Mr)
    tgt = attach_module_data(hochschild_bicomplex(C, M, "homology", T), M)
    maps = pushforward_map(Fn, src, tgt, None, Mr.origin, T)
    return src, tgt, maps


def cobar_pullback(Fn: CdgFunctor, L: Module, M: Module, T: int):
    Lr = restrict(Fn, L)
    Mr = restrict(Fn, M)
    src = cobar_bicomplex(L, Fn.target, M, T)
    tgt = cobar_bicomplex(Lr, Fn.source, Mr, T)
    maps = pullback_map(Fn, src, tgt, Lr, Mr, T)
    return src, tgt, maps


def hochschild_pullback(Fn: CdgFunctor, M: Module, T: int, EB: Optional[CdgCategory] = None):
    B, C = Fn.source, Fn.target
    EB = EB or tensor(B, opposite(B))
    FF = tensor_functors(Fn, opposite_functor(Fn), EB, M.base)
    Mr = restrict(FF, M)
    src = hochschild_bicomplex(C, M, "cohomology", T)
    tgt = hochschild_bicomplex(B, Mr, "cohomology", T)
    maps = pullback_map(Fn, src, tgt, None, Mr, T)
    return src, tgt, maps
