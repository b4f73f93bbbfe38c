"""Derived functors of the first and second kind.

Second kind: finite resolutions by CDG-modules whose underlying graded
modules are projective, then an honest finite total complex (direct sums and
products agree).  First kind: truncated bar/Hochschild bicomplexes of
DG-categories, with a comparison of two consecutive truncations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .cdgcore import CdgCategory, CdgError, curvature_shift, opposite, pushforward, tensor
from .cdgmod import (Module, ModuleMorphism, HomSpace, TensorQuotient, _eval_map,
                     cover_map, diagonal_bimodule, free_cdg_module, free_graded_module,
                     graded_section, mf_category, submodule)
from .complexes import (CurvedBicomplex, bar_bicomplex, cobar_bicomplex, hochschild_bicomplex,
                        totalize)
from .exactla import (Echelon, FiniteComplex, SparseMatrix, Vec, add_term, axpy, homology_dims,
                      kernel_basis, rank)
from .grading import GradingGroup, grading_morphism


class EngineError(CdgError):
    """Mathematical failure (inconsistent input, failed verification)."""


class Unsupported(CdgError):
    """The requested computation is outside what the engines can do."""


# --------------------------------------------------------------------------
# reports


@dataclass
class HomologyReport:
    table: Dict[str, int]
    method: str  # FiniteExact | TruncationStabilized | Inconclusive
    truncation: Optional[object] = None
    notes: List[str] = field(default_factory=list)
    index: str = "degree"  # "degree" (total degree) or "level" (homological degree)

    def to_dict(self) -> dict:
        d = {"method": self.method, "table": dict(self.table), "truncation": self.truncation,
             "notes": list(self.notes)}
        if self.index != "degree":
            d["index"] = self.index
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "HomologyReport":
        t = d.get("truncation")
        return cls({str(k): int(v) for k, v in d["table"].items()}, d["method"],
                   list(t) if isinstance(t, list) else t, list(d.get("notes", [])),
                   d.get("index", "degree"))

    def method_label(self) -> str:
        if self.method == "TruncationStabilized":
            return f"TruncationStabilized({self.truncation[0]},{self.truncation[1]})"
        if self.method == "Inconclusive":
            return f"Inconclusive({self.truncation})"
        return self.method

    def is_zero(self) -> bool:
        return not any(self.table.values())

    def lines(self) -> List[str]:
        out = [f"method: {self.method_label()}"]
        key = "level" if self.index == "level" else "degree"
        for k, v in self.table.items():
            out.append(f"  {key} {k}: {v}")
        for n in self.notes:
            out.append(f"  note: {n}")
        return out

    def __str__(self):
        return "\n".join(self.lines())


def degree_table(dims: Dict[int, int], G: GradingGroup) -> Dict[str, int]:
    """Dimension table with Z/2 labels ``even``/``odd`` (both always present)."""
    if G.is_torsion:
        return {"even": dims.get(0, 0), "odd": dims.get(1, 0)}
    return {G.label(g): dims[g] for g in sorted(dims)}


def table_str(table: Dict[str, int]) -> str:
    """Short form: ``k`` for a single one-dimensional class, else the table."""
    nz = {k: v for k, v in table.items() if v}
    if not nz:
        return "0"
    if len(nz) == 1 and list(nz.values()) == [1]:
        return "k"
    return ", ".join(f"{k}: {v}" for k, v in table.items())


# --------------------------------------------------------------------------
# radical


def _algebra_trace(B: CdgCategory) -> List[object]:
    """``tr(L_e)`` for every basis morphism ``e`` acting on the category algebra."""
    F = B.F
    out = []
    for l in range(B.dim):
        t = 0
        for k in range(B.dim):
            if B.src[l] == B.dst[k]:
                t = F.norm(t + B.comp(l, k).get(k, 0))
        out.append(t)
    return out


def graded_radical(B: CdgCategory) -> List[Vec]:
    """Jacobson radical of the graded category algebra (differential ignored).

    Computed as the kernel of the trace form ``(a, b) -> tr(L_{ab})`` one
    homogeneous block at a time, then checked to be a nilpotent two-sided
    ideal.  Over F_p the kernel can be larger than the radical; the check then
    fails and :class:`Unsupported` is raised.
    """
    F = B.F
    tr = _algebra_trace(B)
    n = B.dim
    gram = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if B.src[i] == B.dst[j]:
                gram[i][j] = F.norm(sum(c * tr[k] for k, c in B.comp(i, j).items()))
    blocks: Dict[Tuple, List[int]] = {}
    for i in range(n):
        blocks.setdefault((B.src[i], B.dst[i], B.deg[i]), []).append(i)
    J: List[Vec] = []
    for key, idx in blocks.items():
        # unknown coefficients on idx, equations T(a, e_j) = 0 for all j
        cols = [{j: gram[i][j] for j in range(n) if gram[i][j]} for i in idx]
        mat = SparseMatrix(n, len(idx), cols, F)
        for v in kernel_basis(mat):
            J.append({idx[k]: c for k, c in v.items()})
    ech = Echelon(F)
    for v in J:
        ech.add(v)
    for v in J:
        for e in range(n):
            for prod in (B.mul({e: 1}, v), B.mul(v, {e: 1})):
                if prod and not ech.contains(prod):
                    raise Unsupported("trace-form kernel is not an ideal; radical unavailable "
                                      f"in characteristic {F.char}")
    power = list(J)
    for _ in range(n + 1):
        if not power:
            break
        nxt = Echelon(F)
        new = []
        for u in power:
            for v in J:
                w = B.mul(u, v)
                if w and nxt.add(w) is None:
                    new.append(w)
        power = new
    if power:
        raise Unsupported(f"trace-form kernel is not nilpotent in characteristic {F.char}; "
                          "radical unavailable")
    return J


# --------------------------------------------------------------------------
# resolutions


@dataclass
class Resolution:
    target: Module
    terms: List[Module]
    maps: List[ModuleMorphism]  # maps[j]: terms[j] -> terms[j-1] for j >= 1; maps[0] augmentation
    complete: bool
    minimal: bool = True
    notes: List[str] = field(default_factory=list)

    @property
    def length(self) -> int:
        return len(self.terms) - 1

    def status(self) -> str:
        if self.complete:
            return f"complete, length {self.length}"
        return f"incomplete at depth {len(self.terms)}"


def top_generators(K: Module, J: List[Vec]) -> List[Vec]:
    """Basis vectors of ``K`` lifting a basis of ``K / J K``."""
    F = K.F
    ech = Echelon(F)
    for j in J:
        for k in range(K.dim):
            v = K.act_vec(j, {k: 1})
            if v:
                ech.add(v)
    gens = []
    for k in range(K.dim):
        if ech.add({k: 1}) is None:
            gens.append({k: 1})
    return gens


def top_cover(K: Module, J: List[Vec], tag: str = "g"):
    """Free graded module on top generators of ``K`` and its evaluation map."""
    gens = top_generators(K, J)
    P = free_graded_module(K.base, K.side, [(K.obj[next(iter(g))], K.deg[next(iter(g))], f"{tag}.{t}")
                                            for t, g in enumerate(gens)])
    return P, _eval_map(P, K, gens)


def projective_by_top(K: Module, J: List[Vec]) -> bool:
    """``K`` is graded projective iff the cover by the free module on its top
    generators splits."""
    if K.dim == 0:
        return True
    return graded_section(K, cover=top_cover(K, J)) is not None


def _kernel(f: ModuleMorphism) -> List[Vec]:
    """Homogeneous kernel basis of a degree-0 map, block by (object, degree)."""
    Q = f.source
    blocks: Dict[Tuple, List[int]] = {}
    for q in range(Q.dim):
        blocks.setdefault((Q.obj[q], Q.deg[q]), []).append(q)
    out = []
    for idx in blocks.values():
        rows = sorted({r for q in idx for r in f.mat.get(q, {})})
        rpos = {r: i for i, r in enumerate(rows)}
        cols = [{rpos[r]: c for r, c in f.mat.get(q, {}).items()} for q in idx]
        for v in kernel_basis(SparseMatrix(len(rows), len(idx), cols, Q.F)):
            out.append({idx[k]: c for k, c in v.items()})
    return out


def projective_resolution(M: Module, max_depth: int = 20, J: Optional[List[Vec]] = None,
                          max_dim: int = 4000) -> Resolution:
    """Resolution of ``M`` by CDG-modules with projective underlying graded modules.

    Each stage covers the current syzygy ``K`` by the free CDG-module on a
    free graded module whose generators lift a basis of ``K / J K``; stops
    when a syzygy is zero or graded projective.  Gives up (incomplete) at
    ``max_depth`` terms or once a term exceeds ``max_dim``.
    """
    B = M.base
    J = graded_radical(B) if J is None else J
    ident = ModuleMorphism(M, M, 0, {i: {i: 1} for i in range(M.dim)})
    if projective_by_top(M, J):
        return Resolution(M, [M], [ident], True, notes=["target is graded projective"])
    terms: List[Module] = []
    maps: List[ModuleMorphism] = []
    K = M
    incl: Optional[ModuleMorphism] = None  # K -> previous term
    for depth in range(max_depth):
        P, phi = top_cover(K, J, f"g{depth}")
        Q = free_cdg_module(P)
        Q.name = f"Q{depth}"
        cov = cover_map(Q, P, K, phi.mat)
        terms.append(Q)
        maps.append(cov if incl is None else incl.compose(cov))
        kv = _kernel(cov)
        if not kv:
            return Resolution(M, terms, maps, True)
        Knew, inc = submodule(Q, kv, names=[f"z{depth}.{t}" for t in range(len(kv))])
        if projective_by_top(Knew, J):
            Knew.name = f"K{depth + 1}"
            terms.append(Knew)
            maps.append(inc)
            return Resolution(M, terms, maps, True, notes=["last syzygy is graded projective"])
        K, incl = Knew, inc
        if 2 * K.dim * len(B.basis) > max_dim * 4 or Q.dim > max_dim:
            return Resolution(M, terms, maps, False, notes=[f"size limit {max_dim} reached"])
    return Resolution(M, terms, maps, False, notes=[f"depth {max_depth} exhausted"])


def check_resolution(res: Resolution) -> List[str]:
    """Closedness, linearity and exactness (as graded modules) of a resolution."""
    problems = []
    for j, f in enumerate(res.maps):
        if not f.is_closed():
            problems.append(f"map {j} is not closed")
        if not f.is_linear():
            problems.append(f"map {j} is not linear")
    for j in range(1, len(res.maps)):
        if res.maps[j - 1].compose(res.maps[j]).mat:
            problems.append(f"maps {j - 1} o {j} is nonzero")
    # exactness: rank bookkeeping
    dims = [T.dim for T in res.terms]
    ranks = [rank(_as_matrix(f)) for f in res.maps]
    if ranks and ranks[0] != res.target.dim:
        problems.append("augmentation is not surjective")
    last = len(res.terms) if res.complete else len(res.terms) - 1
    for j in range(last):
        r_out = ranks[j]
        r_in = ranks[j + 1] if j + 1 < len(ranks) else 0
        if dims[j] - r_out != r_in:
            problems.append(f"not exact at term {j}")
    return problems


def _as_matrix(f: ModuleMorphism) -> SparseMatrix:
    return SparseMatrix(f.target.dim, f.source.dim, [dict(f.mat.get(q, {})) for q in range(f.source.dim)],
                        f.source.F)


def _require_complete(res: Resolution, what: str):
    if not res.complete:
        raise Unsupported(f"{what}: the projective resolution is {res.status()}; "
                          "no finite resolution found, use the first-kind (truncated) machinery")


# --------------------------------------------------------------------------
# second kind


def _total(pieces: Dict[Tuple[int, int], int], maps: Dict[Tuple, SparseMatrix], G: GradingGroup, F) -> FiniteComplex:
    """Assemble a finite total complex from blocks.

    ``pieces[(i, g)]`` is the dimension at level ``i`` and total degree ``g``;
    ``maps[((i, g), (j, g'))]`` the block from one piece to another.
    """
    order: Dict[int, List[Tuple[int, int]]] = {}
    for key in sorted(pieces):
        order.setdefault(key[1], []).append(key)
    off: Dict[Tuple[int, int], int] = {}
    dims: Dict[int, int] = {}
    for g, keys in order.items():
        o = 0
        for key in keys:
            off[key] = o
            o += pieces[key]
        dims[g] = o
    cols: Dict[int, List[Dict]] = {g: [dict() for _ in range(n)] for g, n in dims.items()}
    for (a, b), m in maps.items():
        for j, col in enumerate(m.cols):
            dst = cols[a[1]][off[a] + j]
            for r, c in col.items():
                add_term(dst, off[b] + r, c, F)
    out = {}
    for g, n in dims.items():
        g1 = G.add(g, 1)
        out[g] = SparseMatrix(dims.get(g1, 0), n, cols[g], F)
    return FiniteComplex(dims, out, F, modulus=2 if G.is_torsion else 0)


def _split_by_degree(degs: Sequence[int]) -> Tuple[Dict[int, List[int]], Dict[int, int]]:
    by: Dict[int, List[int]] = {}
    local: Dict[int, int] = {}
    for i, g in enumerate(degs):
        local[i] = len(by.setdefault(g, []))
        by[g].append(i)
    return by, local


def tor_second_kind(N: Module, M: Module, max_depth: int = 20, resolve: str = "right") -> HomologyReport:
    """``Tor^{II}(N, M)`` for a right module ``N`` and a left module ``M``.

    ``resolve`` chooses which argument gets the finite projective resolution
    (``"right"`` resolves ``M``, ``"left"`` resolves ``N``).
    """
    if N.side != "right" or M.side != "left":
        raise EngineError("Tor needs a right and a left module")
    B = M.base
    G = B.grading
    F = B.F
    if resolve == "right":
        res = projective_resolution(M, max_depth)
    else:
        res = projective_resolution(N, max_depth)
    _require_complete(res, "Tor of the second kind")
    tqs = [TensorQuotient(N, P) if resolve == "right" else TensorQuotient(P, M) for P in res.terms]
    pieces: Dict[Tuple[int, int], int] = {}
    locs = []
    for i, tq in enumerate(tqs):
        by, local = _split_by_degree([G.add(g, G.embed_int(-i)) for g in tq.deg])
        locs.append((by, local))
        for g, idx in by.items():
            pieces[(i, g)] = len(idx)
    maps: Dict[Tuple, SparseMatrix] = {}

    def put(a, b, col_j, vec):
        m = maps.get((a, b))
        if m is None:
            m = maps[(a, b)] = SparseMatrix(pieces[b], pieces[a], None, F)
        axpy(m.cols[col_j], vec, 1, F)

    for i, tq in enumerate(tqs):
        by, local = locs[i]
        s = -1 if i % 2 else 1
        for t, pair in enumerate(tq.basis):
            g = G.add(tq.deg[t], G.embed_int(-i))
            a = (i, g)
            # internal differential, sign (-1)^i
            dv = tq.project(tq.d_pair(*pair))
            if dv:
                g1 = G.add(g, 1)
                _, l1 = locs[i]
                put(a, (i, g1), local[t], {l1[k]: s * c for k, c in dv.items()})
            # resolution differential
            if i >= 1:
                f = res.maps[i]
                n, p = pair
                v: Vec = {}
                if resolve == "right":
                    for p2, c in f.mat.get(p, {}).items():
                        add_term(v, (n, p2), c, F)
                else:
                    for n2, c in f.mat.get(n, {}).items():
                        add_term(v, (n2, p), c, F)
                img = tqs[i - 1].project(v)
                if img:
                    _, l0 = locs[i - 1]
                    put(a, (i - 1, G.add(g, 1)), local[t], {l0[k]: c for k, c in img.items()})
    tc = _total(pieces, maps, G, F)
    dims = homology_dims(tc)
    return HomologyReport(degree_table(dims, G), "FiniteExact", None,
                          [f"resolution {res.status()} (resolved {'second' if resolve == 'right' else 'first'} argument)"])


def ext_second_kind(L: Module, M: Module, max_depth: int = 20) -> HomologyReport:
    """``Ext^{II}(L, M)`` from a finite projective resolution of ``L``; when
    that does not terminate, from a resolution of the dual ``M^*`` through
    ``Ext(L, M) = Tor(M^*, L)^*`` (degrees negated)."""
    if L.side != M.side:
        raise EngineError("Ext needs two modules on the same side")
    B = L.base
    G = B.grading
    F = B.F
    res = projective_resolution(L, max_depth)
    if not res.complete:
        if M.side != "left":
            _require_complete(res, "Ext of the second kind")
        Md = dual_module(M)
        rep = tor_second_kind(Md, L, max_depth, resolve="left")
        dims = {G.normalize(-G.parse_label(k)): v for k, v in rep.table.items()}
        return HomologyReport(degree_table(dims, G), "FiniteExact", None,
                              [f"first argument: resolution {res.status()}",
                               "computed as the dual of Tor(M^*, L)"] + rep.notes)
    spaces = [HomSpace(P, M) for P in res.terms]
    pieces: Dict[Tuple[int, int], int] = {}
    for i, hs in enumerate(spaces):
        for g, basis in hs.maps.items():
            pieces[(i, G.add(g, G.embed_int(i)))] = len(basis)
    maps: Dict[Tuple, SparseMatrix] = {}
    for i, hs in enumerate(spaces):
        s = -1 if i % 2 else 1
        for g, basis in hs.maps.items():
            tg = G.add(g, G.embed_int(i))
            a = (i, tg)
            for t, fm in enumerate(basis):
                dm = ModuleMorphism(res.terms[i], M, g, fm).differential().mat
                if dm:
                    b = (i, G.add(tg, 1))
                    m = maps.setdefault((a, b), SparseMatrix(pieces[b], pieces[a], None, F))
                    axpy(m.cols[t], hs.express(G.add(g, 1), dm), s, F)
                if i + 1 < len(spaces):
                    f = res.maps[i + 1]
                    comp = {q: _apply_map(fm, v, F) for q, v in f.mat.items()}
                    comp = {q: v for q, v in comp.items() if v}
                    if comp:
                        b = (i + 1, G.add(tg, 1))
                        m = maps.setdefault((a, b), SparseMatrix(pieces[b], pieces[a], None, F))
                        axpy(m.cols[t], spaces[i + 1].express(g, comp), 1, F)
    tc = _total(pieces, maps, G, F)
    dims = homology_dims(tc)
    return HomologyReport(degree_table(dims, G), "FiniteExact", None, [f"resolution {res.status()}"])


def _apply_map(fm: Dict[int, Vec], v: Vec, F) -> Vec:
    out: Vec = {}
    for k, c in v.items():
        img = fm.get(k)
        if img:
            axpy(out, img, c, F)
    return out


def dual_module(M: Module) -> Module:
    """``M^* = Hom_k(M, k)``: a right module for left ``M``,
    ``(phi b)(m) = phi(b m)``, ``d phi = -(-1)^{|phi|} phi d``."""
    if M.side != "left":
        raise EngineError("dual_module expects a left module")
    B = M.base
    G = B.grading
    F = B.F
    basis = [(f"{e.name}*", e.obj, G.normalize(-e.degree)) for e in M.basis]
    action: Dict[Tuple[int, int], Vec] = {}
    for (f, m), v in M.action.items():
        # (m2^* f)(m) = m2^*(f m): coefficient of m2 in f m
        for m2, c in v.items():
            add_term(action.setdefault((f, m2), {}), m, c, F)
    diff: Dict[int, Vec] = {}
    for m, v in M.diff.items():
        for m2, c in v.items():
            # (d m2^*)(m) = -(-1)^{|m2^*|} m2^*(d m)
            s = -1 if M.par[m2] else 1
            add_term(diff.setdefault(m2, {}), m, -s * c, F)
    return Module(B, "right", basis, {k: v for k, v in action.items() if v},
                  {k: v for k, v in diff.items() if v}, name=f"{M.name}*")


def _diagonals(B: CdgCategory):
    E = tensor(B, opposite(B))
    return E, diagonal_bimodule(B, E, "left"), diagonal_bimodule(B, E, "right")


def hh_second_kind(B: CdgCategory, M: Optional[Module] = None, variant: str = "homology",
                   max_depth: int = 20) -> HomologyReport:
    """Hochschild (co)homology of the second kind of ``B`` with coefficients
    in a left ``B (x) B^op``-module ``M`` (default: the diagonal)."""
    if variant not in ("homology", "cohomology"):
        raise EngineError("variant is 'homology' or 'cohomology'")
    E, Dl, Dr = _diagonals(B)
    if M is not None:
        if M.base is not E and not M.base.same_structure(E):
            raise EngineError("coefficients are not a module over B (x) B^op")
        M = Module(E, M.side, M.basis, M.action, M.diff, M.name)
    coeff = M if M is not None else Dl
    if variant == "homology":
        rep = tor_second_kind(Dr, coeff, max_depth, resolve="right")
    else:
        rep = ext_second_kind(Dl, coeff, max_depth)
    rep.notes.insert(0, f"HH of the second kind, {variant}, over {B.F.name}")
    return rep


# --------------------------------------------------------------------------
# first kind


def _require_dg(B: CdgCategory, what: str):
    if not B.is_dg():
        raise Unsupported(f"{what} of the first kind needs a DG base: over a curved base the "
                          "first-kind bar and Hochschild complexes are acyclic, so the answer "
                          "carries no information; use --kind second")


def _splits_by_level(bc: CurvedBicomplex) -> bool:
    return all(m.is_zero() for m in bc.d.values()) and all(m.is_zero() for m in bc.delta.values())


def _level_homology(bc: CurvedBicomplex, upto: int) -> Dict[int, int]:
    """Homology of the ``∂``-only complex at levels ``0..upto``."""
    out = {}
    for i in range(upto + 1):
        leaving = bc.del_.get(i)
        entering = bc.del_.get(i + 1) if bc.homological else bc.del_.get(i - 1)
        out[i] = bc.dim(i) - (rank(leaving) if leaving is not None else 0) \
            - (rank(entering) if entering is not None else 0)
    return out


def _columns(D: SparseMatrix, keep) -> SparseMatrix:
    cols = [D.cols[j] for j in keep]
    return SparseMatrix(D.nrows, len(cols), cols, D.F)


def _rows(D: SparseMatrix, keep) -> SparseMatrix:
    pos = {r: k for k, r in enumerate(keep)}
    cols = [{pos[r]: c for r, c in v.items() if r in pos} for v in D.cols]
    return SparseMatrix(len(keep), D.ncols, cols, D.F)


def reliable_homology(bc: CurvedBicomplex) -> Dict[int, int]:
    """Part of the total homology that survives the truncation.

    Homological orientation: image of ``H(F_{T-1}) -> H(F_T)`` where ``F_j``
    is the subcomplex of levels ``<= j``.  Cohomological orientation: image of
    ``H(G_T) -> H(G_{T-1})`` for the quotient complexes ``G_j`` of levels
    ``<= j``.  Needs ``δ = 0``; everything reduces to ranks of column or row
    selections of the total differential.
    """
    if any(not m.is_zero() for m in bc.delta.values()):
        raise EngineError("reliable homology needs a vanishing curvature differential")
    T = bc.T
    tot = totalize(bc, levels=range(0, T + 1))
    tc = tot.complex
    out = {}
    ranks: Dict[int, int] = {}

    def full_rank(h):
        if h not in ranks:
            ranks[h] = rank(tc.differential(h))
        return ranks[h]

    for g, blk in tot.blocks.items():
        top = [j for j, (i, _) in enumerate(blk) if i == T]
        low = [j for j, (i, _) in enumerate(blk) if i < T]
        Dout = tc.differential(g)                      # leaves degree g
        p = tc.pred(g)
        Din = tc.differential(p)                       # enters degree g
        pblk = tot.blocks.get(p, [])
        ptop = [j for j, (i, _) in enumerate(pblk) if i == T]
        if bc.homological:
            # dim Z' - dim(Z' ∩ B), Z' = cycles of F_{T-1}, Z' ∩ B = D{x : d_T x_T = 0}
            zdim = len(low) - rank(_columns(Dout, low))
            out[g] = zdim - full_rank(p) + rank(_rows(_columns(Din, ptop), top))
        else:
            # dim Z_T - dim ker(d_T) - rank(π D), π dropping level T
            zdim = len(blk) - full_rank(g)
            nxt = tot.blocks.get(tc.succ(g), [])
            rows_top = [j for j, (i, _) in enumerate(nxt) if i == T]
            kdim = len(top) - rank(_rows(_columns(Dout, top), rows_top))
            out[g] = zdim - kdim - rank(_rows(Din, low))
    return out


def _first_kind(build, G: GradingGroup, T: int, what: str) -> HomologyReport:
    if T < 1:
        raise EngineError("truncation must be at least 1")
    tabs = []
    index = "degree"
    for t in (T, T + 1):
        bc = build(t)
        if _splits_by_level(bc):
            index = "level"
            # exact by level: window [0, t - 2] (levels whose neighbours exist)
            lv = _level_homology(bc, t - 1)
            tabs.append({str(i): lv[i] for i in range(0, T - 1)})
        else:
            tabs.append(degree_table(reliable_homology(bc), G))
    notes = [f"{what} of the first kind from truncated bicomplexes; stabilization is a heuristic"]
    if index == "level":
        notes.append(f"internal differential and curvature vanish: table keyed by homological "
                     f"degree, window [0, {T - 2}]")
    if tabs[0] == tabs[1]:
        return HomologyReport(tabs[0], "TruncationStabilized", [T, T + 1], notes, index)
    return HomologyReport(tabs[1], "Inconclusive", T + 1, notes, index)


def tor_first_kind(N: Module, M: Module, T: int = 6) -> HomologyReport:
    B = M.base
    _require_dg(B, "Tor")
    return _first_kind(lambda t: bar_bicomplex(N, B, M, t), B.grading, T, "Tor")


def ext_first_kind(L: Module, M: Module, T: int = 6) -> HomologyReport:
    B = M.base
    _require_dg(B, "Ext")
    return _first_kind(lambda t: cobar_bicomplex(L, B, M, t), B.grading, T, "Ext")


def hh_first_kind(C: CdgCategory, M: Optional[Module] = None, T: int = 6,
                  variant: str = "homology") -> HomologyReport:
    _require_dg(C, "Hochschild (co)homology")
    if M is None:
        M = diagonal_bimodule(C, tensor(C, opposite(C)), "left")
    return _first_kind(lambda t: hochschild_bicomplex(C, M, variant, t), C.grading, T,
                       f"Hochschild {variant}")


# --------------------------------------------------------------------------
# comparisons


@dataclass
class Comparison:
    name: str
    left: HomologyReport
    right: HomologyReport
    equal: bool
    extra: Dict[str, object] = field(default_factory=dict)

    def verdict(self) -> str:
        word = "EQUAL" if self.equal else "UNEQUAL"
        return f"{word}: {table_str(self.left.table)} vs {table_str(self.right.table)}"

    def to_dict(self) -> dict:
        return {"comparison": self.name, "equal": self.equal, "left": self.left.to_dict(),
                "right": self.right.to_dict(), **{k: v for k, v in self.extra.items()}}


def compare_hh_B_vs_C(B: CdgCategory, objects: Sequence[Module], names: Optional[Sequence[str]] = None,
                      variant: str = "homology", max_depth: int = 20) -> Comparison:
    C = mf_category(B, objects, names)
    left = hh_second_kind(B, None, variant, max_depth)
    right = hh_second_kind(C, None, variant, max_depth)
    return Comparison("BvsC", left, right, left.table == right.table,
                      {"C_dim": C.dim, "C_objects": list(C.objects)})


def curvature_shift_check(B: CdgCategory, c, variant: str = "homology", max_depth: int = 20) -> Comparison:
    Bc = curvature_shift(B, c)
    E = tensor(B, opposite(B))
    Ec = tensor(Bc, opposite(Bc))
    same = E.same_structure(Ec)
    left = hh_second_kind(B, None, variant, max_depth)
    right = hh_second_kind(Bc, None, variant, max_depth)
    return Comparison("curvature-shift", left, right, same and left.table == right.table,
                      {"c": B.F.format(B.F(c)), "tensor_identity": same})


def pushforward_compat_check(B: CdgCategory, target: GradingGroup, T: int = 3) -> Dict[str, object]:
    """Bicomplex-level identity ``Hoch(phi_! B) = phi_! Hoch(B)`` for the
    canonical grading morphism, plus folded HH tables when both finite
    resolutions exist."""
    phi = grading_morphism(B.grading, target)
    Bp = pushforward(phi, B)
    out: Dict[str, object] = {"grading_from": str(B.grading), "grading_to": str(target)}
    ok = True
    for variant in ("homology", "cohomology"):
        a = hochschild_bicomplex(B, diagonal_bimodule(B, None, "left"), variant, T)
        b = hochschild_bicomplex(Bp, diagonal_bimodule(Bp, None, "left"), variant, T)
        same = (a.keys == b.keys
                and all([phi(g) for g in a.internal[i]] == b.internal[i] for i in a.levels())
                and all(a.del_[i] == b.del_[i] for i in a.del_)
                and all(a.d[i] == b.d[i] for i in a.d)
                and all(a.delta[i] == b.delta[i] for i in a.delta))
        out[f"bicomplex_{variant}"] = same
        ok = ok and same
    try:
        r1 = hh_second_kind(B)
        r2 = hh_second_kind(Bp)
        folded: Dict[int, int] = {}
        for k, v in r1.table.items():
            g = phi(B.grading.parse_label(k))
            folded[g] = folded.get(g, 0) + v
        ft = degree_table(folded, target)
        out["folded"] = ft
        out["pushed"] = r2.table
        out["tables_equal"] = ft == r2.table
        ok = ok and ft == r2.table
    except Unsupported as e:
        out["tables_equal"] = None
        out["note"] = f"finite resolution unavailable: {e}"
    out["ok"] = ok
    return out


def delta_acyclicity_probe(B: CdgCategory, N: Module, M: Module, T: int = 6) -> Dict[str, object]:
    """Exactness of the ``δ``-only columns of the bar bicomplex in ``[1, T-1]``.

    Requires every curvature element to be a nonzero multiple of the unit.
    """
    F = B.F
    for X in B.objects:
        h = B.h(X)
        u = B.units[X]
        if not h:
            raise EngineError(f"curvature at {X!r} is zero: the probe needs nonzero curvature")
        ratio = None
        for k in set(h) | set(u):
            a, b = h.get(k, 0), u.get(k, 0)
            if not b:
                raise EngineError(f"curvature at {X!r} is not a multiple of the unit")
            r = F.div(a, b)
            if ratio is None:
                ratio = r
            elif r != ratio:
                raise EngineError(f"curvature at {X!r} is not a multiple of the unit")
    bc = bar_bicomplex(N, B, M, T)
    ranks = {i: rank(bc.delta[i]) for i in bc.delta}
    exact = {}
    for i in range(1, T):
        ker = bc.dim(i) - ranks.get(i, 0)
        im = ranks.get(i - 1, 0)
        exact[i] = ker == im
    return {"window": [1, T - 1], "exact": exact, "ok": all(exact.values()),
            "dims": {i: bc.dim(i) for i in bc.levels()}, "field": F.name}
