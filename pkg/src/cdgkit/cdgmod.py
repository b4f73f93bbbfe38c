"""CDG- and QDG-modules over finite-basis CDG-categories.

A module has a homogeneous basis; every basis vector lives over one object.
``action[(f, m)]`` is ``f . m`` for a left module and ``m . f`` for a right
module.  Conventions:

* left:  ``d(f m) = d(f) m + (-1)^{|f|} f d(m)``,  ``d^2 m = h m``;
* right: ``d(n f) = d(n) f + (-1)^{|n|} n d(f)``,  ``d^2 n = -n h``.

The right-module sign comes from ``h_{X^op} = -h_X``: a right module over B
is the same thing as a left module over ``B^op`` via
``f^op . n = (-1)^{|f||n|} n f``.
"""

from __future__ import annotations

from typing import Dict, Hashable, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .cdgcore import (CdgCategory, CdgError, CdgFunctor, ValidationReport, opposite,
                      parse_coeffs, tensor)
from .exactla import (Echelon, FiniteComplex, SparseMatrix, Vec, add_term, axpy,
                      kernel_basis, scale)


class ModuleError(CdgError):
    pass


class Elem(NamedTuple):
    name: str
    obj: Hashable
    degree: int


class Module:
    """Finite-dimensional (Q/C)DG-module; ``diff`` may be empty."""

    def __init__(self, base: CdgCategory, side: str, basis: Iterable, action: Dict[Tuple[int, int], Vec],
                 diff: Optional[Dict[int, Vec]] = None, name: str = "", fill_units: bool = False):
        if side not in ("left", "right"):
            raise ModuleError(f"side must be 'left' or 'right', got {side!r}")
        G = base.grading
        self.base = base
        self.side = side
        self.basis = [Elem(str(e[0]), e[1], G.normalize(e[2])) for e in basis]
        self.action = {k: v for k, v in action.items() if v}
        self.diff = {k: v for k, v in (diff or {}).items() if v}
        self.name = name
        objs = set(base.objects)
        for e in self.basis:
            if e.obj not in objs:
                raise ModuleError(f"element {e.name} sits over unknown object {e.obj!r}")
        self.deg = [e.degree for e in self.basis]
        self.par = [G.parity(g) for g in self.deg]
        self.obj = [e.obj for e in self.basis]
        self.by_obj: Dict[Hashable, List[int]] = {}
        for i, e in enumerate(self.basis):
            self.by_obj.setdefault(e.obj, []).append(i)
        if fill_units:
            for i, e in enumerate(self.basis):
                u = base.units[e.obj]
                if len(u) == 1:
                    (k, c), = u.items()
                    if c == 1 and (k, i) not in self.action:
                        self.action[(k, i)] = {i: 1}
        self._index = None

    @property
    def F(self):
        return self.base.F

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def index(self) -> Dict[str, int]:
        if self._index is None:
            self._index = {e.name: i for i, e in enumerate(self.basis)}
        return self._index

    def act(self, f: int, m: int) -> Vec:
        return self.action.get((f, m), {})

    def act_vec(self, fv: Vec, mv: Vec) -> Vec:
        out: Vec = {}
        F = self.F
        for f, a in fv.items():
            for m, b in mv.items():
                v = self.action.get((f, m))
                if v:
                    axpy(out, v, F.norm(a * b), F)
        return out

    def d(self, mv: Vec) -> Vec:
        out: Vec = {}
        for m, a in mv.items():
            v = self.diff.get(m)
            if v:
                axpy(out, v, a, self.F)
        return out

    def sign(self, a, b) -> int:
        return self.base.sign(a, b)

    def acting(self, m: int) -> List[int]:
        """Basis morphisms that can act on basis element ``m``."""
        B = self.base
        X = self.obj[m]
        if self.side == "left":
            return [f for f in range(B.dim) if B.src[f] == X]
        return [f for f in range(B.dim) if B.dst[f] == X]

    def is_cdg(self) -> bool:
        return all(not v for v in module_curvature(self).values())

    def __repr__(self):
        nm = f" {self.name}" if self.name else ""
        return f"<Module{nm}: {self.side}, dim {self.dim} over {self.base!r}>"

    def with_diff(self, diff: Dict[int, Vec], name: str = "") -> "Module":
        return Module(self.base, self.side, self.basis, self.action, diff, name or self.name)

    def same_structure(self, other: "Module") -> bool:
        return (self.side == other.side and self.basis == other.basis
                and self.action == other.action and self.diff == other.diff)


# --------------------------------------------------------------------------
# validation


def validate_module(M: Module, qdg: bool = False, limit: int = 3) -> ValidationReport:
    B = M.base
    F = M.F
    G = B.grading
    rep = ValidationReport(M.name or "module")
    left = M.side == "left"

    bad = []
    for (f, m), v in M.action.items():
        X = M.obj[m]
        if (B.src[f] if left else B.dst[f]) != X:
            bad.append(f"{B.basis[f].name} cannot act on {M.basis[m].name}")
            continue
        Y = B.dst[f] if left else B.src[f]
        for k in v:
            if M.obj[k] != Y or not G.degrees_equal(M.deg[k], G.add(M.deg[m], B.deg[f])):
                bad.append(f"action {B.basis[f].name},{M.basis[m].name} inhomogeneous")
    for m, v in M.diff.items():
        for k in v:
            if M.obj[k] != M.obj[m] or not G.degrees_equal(M.deg[k], G.add(M.deg[m], G.one)):
                bad.append(f"d({M.basis[m].name}) inhomogeneous")
    rep.add("homogeneity", bad[:limit])

    bad = []
    for m in range(M.dim):
        if M.act_vec(B.units[M.obj[m]], {m: 1}) != {m: 1}:
            bad.append(M.basis[m].name)
    rep.add("unit acts as identity", bad[:limit])

    bad = []
    for m in range(M.dim):
        for g in M.acting(m):
            gm = M.act(g, m)
            for f in range(B.dim):
                if left and B.src[f] != B.dst[g]:
                    continue
                if not left and B.dst[f] != B.src[g]:
                    continue
                if left:  # (f g) m = f (g m)
                    lhs = M.act_vec(B.comp(f, g), {m: 1})
                    rhs = M.act_vec({f: 1}, gm)
                else:  # m (g f) = (m g) f
                    lhs = M.act_vec(B.comp(g, f), {m: 1})
                    rhs = M.act_vec({f: 1}, gm)
                if lhs != rhs:
                    bad.append(f"{B.basis[f].name},{B.basis[g].name},{M.basis[m].name}")
                    break
            if len(bad) >= limit:
                break
        if len(bad) >= limit:
            break
    rep.add("associativity", bad)

    bad = []
    for m in range(M.dim):
        for f in M.acting(m):
            lhs = M.d(M.act(f, m))
            if left:
                rhs = M.act_vec(B.d({f: 1}), {m: 1})
                axpy(rhs, M.act_vec({f: 1}, M.d({m: 1})), M.sign(B.par[f], 1), F)
            else:
                rhs = M.act_vec({f: 1}, M.d({m: 1}))
                axpy(rhs, M.act_vec(B.d({f: 1}), {m: 1}), M.sign(M.par[m], 1), F)
            if lhs != rhs:
                bad.append(f"d({B.basis[f].name}.{M.basis[m].name})")
                break
        if len(bad) >= limit:
            break
    rep.add("Leibniz rule", bad)

    if not qdg:
        curv = module_curvature(M)
        bad = [f"d^2({M.basis[m].name})" for m, v in curv.items() if v]
        rep.add("d^2 = h" if left else "d^2 = -(.h)", bad[:limit])
    return rep


def module_curvature(M: Module) -> Dict[int, Vec]:
    """``d^2 - h.`` (left) or ``d^2 + .h`` (right); zero iff M is CDG."""
    B = M.base
    out = {}
    for m in range(M.dim):
        v = M.d(M.d({m: 1}))
        h = B.h(M.obj[m])
        axpy(v, M.act_vec(h, {m: 1}), -1 if M.side == "left" else 1, M.F)
        out[m] = v
    return out


# --------------------------------------------------------------------------
# morphisms


class ModuleMorphism:
    """Linear map of a fixed degree between modules with the same base and side."""

    def __init__(self, source: Module, target: Module, degree: int, mat: Dict[int, Vec]):
        if source.side != target.side:
            raise ModuleError("morphism between modules of different sides")
        self.source = source
        self.target = target
        self.degree = source.base.grading.normalize(degree)
        self.mat = {k: v for k, v in mat.items() if v}

    def __call__(self, v: Vec) -> Vec:
        out: Vec = {}
        F = self.source.F
        for k, c in v.items():
            img = self.mat.get(k)
            if img:
                axpy(out, img, c, F)
        return out

    def differential(self) -> "ModuleMorphism":
        """``d f = d_M f - (-1)^{|f|} f d_L``."""
        L, M = self.source, self.target
        s = -L.sign(L.base.grading.parity(self.degree), 1)
        mat = {}
        for l in range(L.dim):
            v = M.d(self.mat.get(l, {}))
            axpy(v, self(L.d({l: 1})), s, L.F)
            if v:
                mat[l] = v
        return ModuleMorphism(L, M, L.base.grading.add(self.degree, 1), mat)

    def is_closed(self) -> bool:
        return not self.differential().mat

    def is_linear(self) -> bool:
        L, M = self.source, self.target
        B = L.base
        p = B.grading.parity(self.degree)
        for l in range(L.dim):
            for f in L.acting(l):
                lhs = self(L.act(f, l))
                rhs = M.act_vec({f: 1}, self.mat.get(l, {}))
                if L.side == "left":
                    rhs = scale(rhs, L.sign(p, B.par[f]), L.F)
                if lhs != rhs:
                    return False
        return True

    def compose(self, other: "ModuleMorphism") -> "ModuleMorphism":
        """``self o other``."""
        G = self.source.base.grading
        mat = {k: self(v) for k, v in other.mat.items()}
        return ModuleMorphism(other.source, self.target, G.add(self.degree, other.degree), mat)


def identity_morphism(M: Module) -> ModuleMorphism:
    return ModuleMorphism(M, M, 0, {i: {i: 1} for i in range(M.dim)})


# --------------------------------------------------------------------------
# basic constructions


def free_graded_module(B: CdgCategory, side: str, gens: Sequence[Tuple[Hashable, int, str]]) -> Module:
    """Free graded module on generators ``(object, degree, name)``, no differential.

    Basis element ``(f, g)`` stands for ``f g`` (left) or ``g f`` (right).
    """
    G = B.grading
    basis = []
    pos = {}
    for gi, (X, deg, gname) in enumerate(gens):
        for f in range(B.dim):
            if (side == "left" and B.src[f] == X) or (side == "right" and B.dst[f] == X):
                obj = B.dst[f] if side == "left" else B.src[f]
                pos[(f, gi)] = len(basis)
                basis.append((f"{B.basis[f].name}.{gname}" if side == "left" else f"{gname}.{B.basis[f].name}",
                              obj, G.add(B.deg[f], deg)))
    action = {}
    for (f, gi), k in pos.items():
        for b in range(B.dim):
            if side == "left" and B.src[b] == B.dst[f]:
                prod = B.comp(b, f)
            elif side == "right" and B.dst[b] == B.src[f]:
                prod = B.comp(f, b)
            else:
                continue
            v = {pos[(j, gi)]: c for j, c in prod.items()}
            if v:
                action[(b, k)] = v
    M = Module(B, side, basis, action, {}, name="free")
    M.gen_info = list(gens)
    M.generators = [{pos[(j, gi)]: c for j, c in B.units[X].items()} for gi, (X, _, _) in enumerate(gens)]
    return M


def regular_module(B: CdgCategory, side: str = "left", X=None) -> Module:
    """``B`` acting on itself (all objects, or the representable at ``X``),
    with differential ``d_B``."""
    basis = []
    pos = {}
    for f in range(B.dim):
        if X is not None and ((side == "left" and B.src[f] != X) or (side == "right" and B.dst[f] != X)):
            continue
        pos[f] = len(basis)
        basis.append((B.basis[f].name, B.dst[f] if side == "left" else B.src[f], B.deg[f]))
    action = {}
    for f, k in pos.items():
        for b in range(B.dim):
            prod = B.comp(b, f) if side == "left" else B.comp(f, b)
            if prod:
                action[(b, k)] = {pos[j]: c for j, c in prod.items()}
    diff = {pos[f]: {pos[j]: c for j, c in B.diff.get(f, {}).items()} for f in pos}
    return Module(B, side, basis, action, diff, name="regular")


def representable_qdg(B: CdgCategory, X) -> Module:
    """Right QDG-module ``R_X: Y -> Hom(Y, X)``; its curvature is left
    multiplication by ``h_X``."""
    M = regular_module(B, "right", X)
    M.name = f"R_{X}"
    return M


def zero_module(B: CdgCategory, side: str = "left") -> Module:
    return Module(B, side, [], {}, {}, name="0")


def twist_module(M: Module, tau: Dict[int, Vec]) -> Module:
    """``d' = d + tau`` for a B-linear ``tau`` of degree one."""
    t = ModuleMorphism(M, M, M.base.grading.one, tau)
    G = M.base.grading
    for m, v in t.mat.items():
        for k in v:
            if M.obj[k] != M.obj[m] or not G.degrees_equal(M.deg[k], G.add(M.deg[m], G.one)):
                raise ModuleError("tau is not homogeneous of degree one")
    if not t.is_linear():
        raise ModuleError("tau is not B-linear")
    diff = {m: dict(v) for m, v in M.diff.items()}
    for m, v in t.mat.items():
        cur = diff.setdefault(m, {})
        axpy(cur, v, 1, M.F)
    return Module(M.base, M.side, M.basis, M.action, diff, name=M.name + "^tau")


def shift_module(M: Module, n: int) -> Module:
    """Degree shift: the copy ``s m`` of ``m`` has degree ``|m| + n``.

    ``d(s m) = (-1)^n s d(m)``; for left modules ``b (s m) = (-1)^{n|b|} s (b m)``,
    right actions carry no sign.
    """
    G = M.base.grading
    B = M.base
    pn = G.parity(G.normalize(n))
    basis = [(e.name if n == 0 else f"s{n}({e.name})", e.obj, G.add(e.degree, n)) for e in M.basis]
    sd = -1 if pn else 1
    diff = {m: scale(v, sd, M.F) for m, v in M.diff.items()}
    if M.side == "left" and pn:
        action = {(f, m): scale(v, -1 if B.par[f] else 1, M.F) for (f, m), v in M.action.items()}
    else:
        action = dict(M.action)
    return Module(B, M.side, basis, action, diff, name=f"{M.name}[{n}]")


def direct_sum(mods: Sequence[Module], name: str = "") -> Module:
    B = mods[0].base
    side = mods[0].side
    basis, action, diff = [], {}, {}
    off = 0
    for M in mods:
        if M.side != side:
            raise ModuleError("direct sum of modules with different sides")
        basis.extend(M.basis)
        for (f, m), v in M.action.items():
            action[(f, m + off)] = {k + off: c for k, c in v.items()}
        for m, v in M.diff.items():
            diff[m + off] = {k + off: c for k, c in v.items()}
        off += M.dim
    # disambiguate names
    seen = {}
    out = []
    for e in basis:
        nm = e.name
        if nm in seen:
            seen[nm] += 1
            nm = f"{nm}#{seen[nm]}"
        else:
            seen[nm] = 0
        out.append((nm, e.obj, e.degree))
    return Module(B, side, out, action, diff, name=name)


def free_cdg_module(P: Module) -> Module:
    """The CDG-module freely generated by a graded module ``P``.

    Underlying graded module ``P (+) P[-1]``: basis ``p`` and formal ``d(p)``.
    Left:  ``b d(p) = (-1)^{|b|} (d(b p) - d(b) p)``, ``d(d(p)) = h p``.
    Right: ``d(p) b = d(p b) - (-1)^{|p|} p d(b)``, ``d(d(p)) = -p h``.
    """
    B = P.base
    F = B.F
    G = B.grading
    n = P.dim
    basis = list(P.basis) + [(f"d({e.name})", e.obj, G.add(e.degree, G.one)) for e in P.basis]

    def D(v: Vec) -> Vec:  # formal differential P -> P[-1] summand
        return {k + n: c for k, c in v.items()}

    action = {}
    for (f, m), v in P.action.items():
        action[(f, m)] = dict(v)
    for m in range(n):
        for f in P.acting(m):
            out = D(P.act(f, m))
            if P.side == "left":
                axpy(out, P.act_vec(B.d({f: 1}), {m: 1}), -1, F)
                out = scale(out, -1 if B.par[f] else 1, F)
            else:
                axpy(out, P.act_vec(B.d({f: 1}), {m: 1}), -1 if not P.par[m] else 1, F)
            if out:
                action[(f, m + n)] = out
    diff = {}
    for m in range(n):
        diff[m] = {m + n: 1}
        hv = P.act_vec(B.h(P.obj[m]), {m: 1})
        if hv:
            diff[m + n] = hv if P.side == "left" else scale(hv, -1, F)
    Q = Module(B, P.side, basis, action, diff, name=f"free({P.name})")
    Q.graded_part = n
    if hasattr(P, "generators"):
        Q.generators = list(P.generators) + [D(g) for g in P.generators]
    return Q


def cover_map(Q: Module, P: Module, K: Module, phi: Dict[int, Vec]) -> ModuleMorphism:
    """Extend a graded degree-0 map ``phi: P -> K`` to the closed map
    ``Q = free_cdg_module(P) -> K``, ``p + d(p'') -> phi(p) + d_K phi(p'')``."""
    n = P.dim
    mat = {}
    for m in range(n):
        v = phi.get(m, {})
        if v:
            mat[m] = dict(v)
            dv = K.d(v)
            if dv:
                mat[m + n] = dv
    return ModuleMorphism(Q, K, 0, mat)


def submodule(M: Module, vecs: Sequence[Vec], names: Optional[Sequence[str]] = None,
              check: bool = True) -> Tuple[Module, ModuleMorphism]:
    """Submodule spanned by homogeneous ``vecs`` (each over a single object);
    returns the module and its inclusion."""
    F = M.F
    ech = Echelon(F, track=True)
    for i, v in enumerate(vecs):
        if ech.add(v, tag=i) is not None:
            raise ModuleError("spanning vectors are linearly dependent")
    basis = []
    for i, v in enumerate(vecs):
        ks = list(v)
        obj = M.obj[ks[0]]
        deg = M.deg[ks[0]]
        if any(M.obj[k] != obj or M.deg[k] != deg for k in ks):
            raise ModuleError("submodule generators must be homogeneous over one object")
        basis.append((names[i] if names else f"k{i}", obj, deg))
    action, diff = {}, {}
    for i, v in enumerate(vecs):
        for f in M.acting(next(iter(v))):
            img = M.act_vec({f: 1}, v)
            if img:
                coords = ech.express(img)
                if coords is None:
                    raise ModuleError("span is not closed under the action")
                action[(f, i)] = coords
        dv = M.d(v)
        if dv:
            coords = ech.express(dv)
            if coords is None:
                raise ModuleError("span is not closed under the differential")
            diff[i] = coords
    K = Module(M.base, M.side, basis, action, diff, name="sub")
    return K, ModuleMorphism(K, M, 0, {i: dict(v) for i, v in enumerate(vecs)})


def qdg_structure_on_projective(Q: Module, P: Module, iota: Dict[int, Vec], pi: Dict[int, Vec]) -> Module:
    """Differential ``pi d iota`` on a graded direct summand ``P`` of ``Q``."""
    i_m = ModuleMorphism(P, Q, 0, iota)
    p_m = ModuleMorphism(Q, P, 0, pi)
    if p_m.compose(i_m).mat != {k: {k: 1} for k in range(P.dim)}:
        raise ModuleError("pi o iota is not the identity")
    if not (i_m.is_linear() and p_m.is_linear()):
        raise ModuleError("iota or pi is not B-linear")
    diff = {}
    for k in range(P.dim):
        v = p_m(Q.d(i_m({k: 1})))
        if v:
            diff[k] = v
    return Module(P.base, P.side, P.basis, P.action, diff, name=f"pdi({P.name})")


# --------------------------------------------------------------------------
# changing the base


def as_opposite(M: Module, Bop: Optional[CdgCategory] = None) -> Module:
    """A right module over B as a left module over ``B^op`` (and back):
    ``f^op . n = (-1)^{|f||n|} n f``."""
    B = M.base
    Bop = Bop or opposite(B)
    action = {}
    for (f, m), v in M.action.items():
        action[(f, m)] = scale(v, B.sign(B.par[f], M.par[m]), M.F)
    side = "left" if M.side == "right" else "right"
    return Module(Bop, side, M.basis, action, M.diff, name=M.name)


def restrict(Fn: CdgFunctor, M: Module) -> Module:
    """Restriction of scalars ``F^* M``.

    Left: ``d'(m) = d m + a_X m``; right: ``d'(n) = d n - (-1)^{|n|} n a_X``.
    """
    B, C = Fn.source, Fn.target
    F = C.F
    if M.base is not C and not M.base.same_structure(C):
        raise ModuleError("module base differs from the functor target")
    basis = []
    pos = {}
    for X in B.objects:
        for m in M.by_obj.get(Fn.obj_map[X], []):
            pos[(X, m)] = len(basis)
            e = M.basis[m]
            nm = e.name if _injective(Fn) else f"{X}:{e.name}"
            basis.append((nm, X, e.degree))
    action = {}
    for (X, m), k in pos.items():
        for f in range(B.dim):
            if M.side == "left" and B.src[f] == X:
                Y = B.dst[f]
            elif M.side == "right" and B.dst[f] == X:
                Y = B.src[f]
            else:
                continue
            img = M.act_vec(Fn({f: 1}), {m: 1})
            if img:
                action[(f, k)] = {pos[(Y, j)]: c for j, c in img.items()}
    diff = {}
    for (X, m), k in pos.items():
        v = M.d({m: 1})
        a = Fn.conn(X)
        if a:
            if M.side == "left":
                axpy(v, M.act_vec(a, {m: 1}), 1, F)
            else:
                axpy(v, M.act_vec(a, {m: 1}), -1 if not M.par[m] else 1, F)
        if v:
            diff[k] = {pos[(X, j)]: c for j, c in v.items()}
    R = Module(B, M.side, basis, action, diff, name=f"F*{M.name}")
    R.origin = [m for (X, m) in pos]  # restricted basis index -> index in M
    return R


def _injective(Fn: CdgFunctor) -> bool:
    vals = list(Fn.obj_map.values())
    return len(set(vals)) == len(vals)


def external_tensor(M1: Module, M2: Module, E: Optional[CdgCategory] = None) -> Module:
    """``M1 (x)_k M2`` over ``B1 (x) B2`` (pass ``E`` to reuse a built tensor
    category)."""
    if M1.side != M2.side:
        raise ModuleError("external tensor of modules of different sides")
    B1, B2 = M1.base, M2.base
    E = E or tensor(B1, B2)
    F = E.F
    G = E.grading
    n2 = M2.dim
    m2 = B2.dim
    basis = [(f"{a.name}|{b.name}", (a.obj, b.obj), G.add(a.degree, b.degree)) for a in M1.basis for b in M2.basis]

    def tens(u, v):
        return {i * n2 + j: F.norm(a * b) for i, a in u.items() for j, b in v.items()}

    act2: Dict[int, list] = {}
    for (g, m), v in M2.action.items():
        act2.setdefault(m, []).append((g, v))
    action = {}
    for (f, i), v1 in M1.action.items():
        for j in range(n2):
            for g, v2 in act2.get(j, []):
                if M1.side == "left":
                    s = E.sign(B2.par[g], M1.par[i])
                else:
                    s = E.sign(M2.par[j], B1.par[f])
                action[(f * m2 + g, i * n2 + j)] = scale(tens(v1, v2), s, F)
    diff = {}
    for i in range(M1.dim):
        for j in range(n2):
            v = tens(M1.diff.get(i, {}), {j: 1})
            axpy(v, tens({i: 1}, M2.diff.get(j, {})), E.sign(M1.par[i], 1), F)
            if v:
                diff[i * n2 + j] = v
    return Module(E, M1.side, basis, action, diff, name=f"{M1.name}(x){M2.name}")


def diagonal_bimodule(B: CdgCategory, E: Optional[CdgCategory] = None, side: str = "left") -> Module:
    """``B`` as a module over ``E = B (x) B^op``.

    Left: ``Delta(X, Y^op) = Hom(Y, X)`` with ``(f (x) g^op) m = (-1)^{|g||m|} f m g``.
    Right: ``Delta(X, Y^op) = Hom(X, Y)`` with
    ``n (b (x) c^op) = (-1)^{|c|(|n|+|b|)} c n b``.
    """
    E = E or tensor(B, opposite(B))
    n = B.dim
    F = B.F
    basis = []
    for m in range(n):
        obj = (B.dst[m], B.src[m]) if side == "left" else (B.src[m], B.dst[m])
        basis.append((B.basis[m].name, obj, B.deg[m]))
    action = {}
    for m in range(n):
        for f in range(n):
            for g in range(n):
                if side == "left":
                    if B.src[f] != B.dst[m] or B.dst[g] != B.src[m]:
                        continue
                    v = B.mul(B.comp(f, m), {g: 1})
                    s = B.sign(B.par[g], B.par[m])
                else:
                    # f = b, g = c: c n b with b: X' -> X = src n, c: Y = dst n -> Y'
                    if B.dst[f] != B.src[m] or B.src[g] != B.dst[m]:
                        continue
                    v = B.mul(B.comp(g, m), {f: 1})
                    s = B.sign(B.par[g], (B.par[m] + B.par[f]) & 1)
                if v:
                    action[(f * n + g, m)] = scale(v, s, F)
    diff = {m: dict(v) for m, v in B.diff.items()}
    return Module(E, side, basis, action, diff, name="diag")


# --------------------------------------------------------------------------
# Hom and tensor complexes


class HomSpace:
    """Graded space of B-linear maps ``L -> M`` with its differential.

    ``maps[g]`` is a list of basis maps of degree ``g`` (dicts
    ``l -> vector in M``).  Left-linear maps satisfy
    ``f(b l) = (-1)^{|f||b|} b f(l)``, right-linear ones ``f(l b) = f(l) b``.
    """

    def __init__(self, L: Module, M: Module):
        if L.side != M.side:
            raise ModuleError("Hom between modules of different sides")
        if L.base is not M.base and not L.base.same_structure(M.base):
            raise ModuleError("Hom between modules over different bases")
        self.L, self.M = L, M
        B = L.base
        G = B.grading
        F = B.F
        self.maps: Dict[int, List[Dict[int, Vec]]] = {}
        self._ech: Dict[int, Echelon] = {}
        degs = sorted({G.add(dm, -dl) for dl in set(L.deg) for dm in set(M.deg)}) if L.dim and M.dim else []
        for g in degs:
            unknowns = []
            upos = {}
            for l in range(L.dim):
                for m in M.by_obj.get(L.obj[l], []):
                    if G.degrees_equal(M.deg[m], G.add(L.deg[l], g)):
                        upos[(l, m)] = len(unknowns)
                        unknowns.append((l, m))
            if not unknowns:
                continue
            pg = G.parity(g)
            eqs: Dict[Tuple, Vec] = {}
            for l in range(L.dim):
                for b in L.acting(l):
                    # coefficient of output m in f(b l) - s b f(l)
                    s = L.sign(pg, B.par[b]) if L.side == "left" else 1
                    for l2, c in L.act(b, l).items():
                        for m in M.by_obj.get(L.obj[l2], []):
                            u = upos.get((l2, m))
                            if u is not None:
                                add_term(eqs.setdefault((b, l, m), {}), u, c, F)
                    for m2 in M.by_obj.get(L.obj[l], []):
                        u = upos.get((l, m2))
                        if u is None:
                            continue
                        for m, c in M.act(b, m2).items():
                            add_term(eqs.setdefault((b, l, m), {}), u, -s * c, F)
            rows = [v for v in eqs.values() if v]
            mat = SparseMatrix(len(unknowns), len(rows), rows, F).transpose() if rows else \
                SparseMatrix(0, len(unknowns), None, F)
            ker = kernel_basis(mat)
            if not ker:
                continue
            maps = []
            ech = Echelon(F, track=True)
            for t, kv in enumerate(ker):
                fm: Dict[int, Vec] = {}
                for u, c in kv.items():
                    l, m = unknowns[u]
                    add_term(fm.setdefault(l, {}), m, c, F)
                fm = {l: v for l, v in fm.items() if v}
                maps.append(fm)
                ech.add(_flat(fm), tag=t)
            self.maps[g] = maps
            self._ech[g] = ech

    def degrees(self) -> List[int]:
        return sorted(self.maps)

    def rebase(self, g: int, first: Sequence[Dict[int, Vec]]) -> None:
        """Change the degree-``g`` basis so that it starts with ``first``."""
        F = self.L.F
        old = self.maps.get(g, [])
        ech = Echelon(F, track=True)
        maps = []
        for fm in list(first) + old:
            if ech.add(_flat(fm), tag=len(maps)) is None:
                maps.append(fm)
        if len(maps) != len(old):
            raise ModuleError("rebase: maps do not lie in the Hom space")
        self.maps[g] = maps
        self._ech[g] = ech

    def dims(self) -> Dict[int, int]:
        return {g: len(v) for g, v in self.maps.items()}

    def morphism(self, g: int, t: int) -> ModuleMorphism:
        return ModuleMorphism(self.L, self.M, g, self.maps[g][t])

    def express(self, g: int, fm: Dict[int, Vec]) -> Vec:
        G = self.L.base.grading
        g = G.normalize(g)
        flat = _flat(fm)
        if not flat:
            return {}
        if g not in self._ech:
            raise ModuleError("map does not lie in the Hom space")
        coords = self._ech[g].express(flat)
        if coords is None:
            raise ModuleError("map is not B-linear")
        return coords

    def complex(self) -> FiniteComplex:
        G = self.L.base.grading
        F = self.L.F
        maps = {}
        for g, basis in self.maps.items():
            g1 = G.add(g, 1)
            cols = []
            for fm in basis:
                dfm = ModuleMorphism(self.L, self.M, g, fm).differential().mat
                cols.append(self.express(g1, dfm) if dfm else {})
            maps[g] = SparseMatrix(len(self.maps.get(g1, [])), len(basis), cols, F)
        return FiniteComplex(self.dims(), maps, F, modulus=2 if G.is_torsion else 0)


def _flat(fm: Dict[int, Vec]) -> Vec:
    return {(l, m): c for l, v in fm.items() for m, c in v.items()}


def hom_complex(L: Module, M: Module) -> FiniteComplex:
    """Complex of B-linear maps with ``d f = d_M f - (-1)^{|f|} f d_L``."""
    return HomSpace(L, M).complex()


class TensorQuotient:
    """``N (x)_B M``: the quotient of ``(+)_X N(X) (x) M(X)`` by
    ``n f (x) m - n (x) f m``."""

    def __init__(self, N: Module, M: Module):
        if N.side != "right" or M.side != "left":
            raise ModuleError("tensor_over_base needs a right and a left module")
        if N.base is not M.base and not N.base.same_structure(M.base):
            raise ModuleError("modules over different bases")
        self.N, self.M = N, M
        B = N.base
        F = B.F
        G = B.grading
        pairs = []
        for X in B.objects:
            for n in N.by_obj.get(X, []):
                for m in M.by_obj.get(X, []):
                    pairs.append((n, m))
        self.pairs = pairs
        rel = Echelon(F)
        for n in range(N.dim):
            for f in N.acting(n):  # n in N(Y), f: X -> Y, m in M(X)
                nf = N.act(f, n)
                for m in M.by_obj.get(B.src[f], []):
                    v: Vec = {}
                    for n2, c in nf.items():
                        add_term(v, (n2, m), c, F)
                    for m2, c in M.act(f, m).items():
                        add_term(v, (n, m2), -c, F)
                    if v:
                        rel.add(v)
        self.rel = rel
        self.basis = [p for p in pairs if p not in rel.pivot_of]
        self.pos = {p: i for i, p in enumerate(self.basis)}
        self.deg = [G.add(N.deg[n], M.deg[m]) for n, m in self.basis]

    def project(self, v: Vec) -> Vec:
        """Coordinates of the class of a vector over pairs ``(n, m)``."""
        nf = self.rel.normal_form(v)
        return {self.pos[p]: c for p, c in nf.items()}

    def d_pair(self, n: int, m: int) -> Vec:
        N, M = self.N, self.M
        F = N.F
        v: Vec = {}
        for n2, c in N.diff.get(n, {}).items():
            add_term(v, (n2, m), c, F)
        s = N.sign(N.par[n], 1)
        for m2, c in M.diff.get(m, {}).items():
            add_term(v, (n, m2), s * c, F)
        return v

    def complex(self) -> FiniteComplex:
        G = self.N.base.grading
        F = self.N.F
        by_deg: Dict[int, List[int]] = {}
        for i, g in enumerate(self.deg):
            by_deg.setdefault(g, []).append(i)
        local = {}
        for g, idx in by_deg.items():
            for j, i in enumerate(idx):
                local[i] = j
        maps = {}
        for g, idx in by_deg.items():
            g1 = G.add(g, 1)
            cols = []
            for i in idx:
                img = self.project(self.d_pair(*self.basis[i]))
                cols.append({local[k]: c for k, c in img.items()})
            maps[g] = SparseMatrix(len(by_deg.get(g1, [])), len(idx), cols, F)
        c = FiniteComplex({g: len(v) for g, v in by_deg.items()}, maps, F,
                          modulus=2 if G.is_torsion else 0)
        c.labels = {g: [self.basis[i] for i in idx] for g, idx in by_deg.items()}
        return c


def tensor_over_base(N: Module, M: Module) -> FiniteComplex:
    return TensorQuotient(N, M).complex()


# --------------------------------------------------------------------------
# cones, totals, homotopies


def cone(f: ModuleMorphism) -> Module:
    """``Cone(f) = M (+) L[1]`` for a closed degree-0 ``f: L -> M``:
    ``d(m + s l) = d m + f(l) - s d l``; left actions pick up
    ``b (s l) = (-1)^{|b|} s (b l)``."""
    L, M = f.source, f.target
    if L.base.grading.normalize(f.degree) != 0:
        raise ModuleError("cone needs a degree-0 morphism")
    if not f.is_closed():
        raise ModuleError("cone needs a closed morphism")
    B = L.base
    G = B.grading
    F = B.F
    n = M.dim
    basis = list(M.basis) + [(f"s({e.name})", e.obj, G.add(e.degree, -1)) for e in L.basis]
    action = dict(M.action)
    for (b, l), v in L.action.items():
        s = -1 if (L.side == "left" and B.par[b]) else 1
        action[(b, l + n)] = {k + n: F.norm(s * c) for k, c in v.items()}
    diff = {m: dict(v) for m, v in M.diff.items()}
    for l in range(L.dim):
        v = dict(f.mat.get(l, {}))
        for k, c in L.diff.get(l, {}).items():
            add_term(v, k + n, -c, F)
        if v:
            diff[l + n] = v
    return Module(B, L.side, basis, action, diff, name=f"cone({L.name}->{M.name})")


def cone_identity_homotopy(M: Module) -> Tuple[Module, ModuleMorphism]:
    """``cone(id_M)`` with the contracting homotopy ``H(m) = s m``, ``H(s m) = 0``."""
    Cn = cone(identity_morphism(M))
    n = M.dim
    H = ModuleMorphism(Cn, Cn, -1, {m: {m + n: 1} for m in range(n)})
    return Cn, H


def total_of_exact_triple(f: ModuleMorphism, g: ModuleMorphism, check_exact: bool = True) -> Module:
    """Total module of ``K -f-> L -g-> M`` (closed maps, ``g f = 0``), built as
    ``cone(cone(f) -> M)``."""
    L = f.target
    if g.source is not L:
        raise ModuleError("maps are not composable")
    M = g.target
    if g.compose(f).mat:
        raise ModuleError("g o f is not zero")
    if check_exact and not is_exact_triple(f, g):
        raise ModuleError("triple is not exact")
    C1 = cone(f)
    psi = ModuleMorphism(C1, M, 0, {l: v for l, v in g.mat.items()})
    return cone(psi)


def is_exact_triple(f: ModuleMorphism, g: ModuleMorphism) -> bool:
    from .exactla import rank
    K, L, M = f.source, f.target, g.target
    F = K.F
    A = SparseMatrix(L.dim, K.dim, [f.mat.get(k, {}) for k in range(K.dim)], F)
    Bm = SparseMatrix(M.dim, L.dim, [g.mat.get(l, {}) for l in range(L.dim)], F)
    rf, rg = rank(A), rank(Bm)
    return rf == K.dim and rg == M.dim and rf + rg == L.dim and (Bm @ A).is_zero()


def contracting_homotopy(M: Module) -> Optional[ModuleMorphism]:
    """A B-linear ``H`` of degree -1 with ``d H + H d = id``, or None."""
    from .exactla import solve
    hs = HomSpace(M, M)
    G = M.base.grading
    g = G.normalize(-1)
    basis = hs.maps.get(g, [])
    target = hs.express(0, {i: {i: 1} for i in range(M.dim)}) if M.dim else {}
    if not M.dim:
        return ModuleMorphism(M, M, -1, {})
    cols = []
    for fm in basis:
        dfm = ModuleMorphism(M, M, g, fm).differential().mat
        cols.append(hs.express(0, dfm) if dfm else {})
    mat = SparseMatrix(len(hs.maps.get(0, [])), len(basis), cols, M.F)
    x = solve(mat, target)
    if x is None:
        return None
    H: Dict[int, Vec] = {}
    for t, c in x.items():
        for l, v in basis[t].items():
            axpy(H.setdefault(l, {}), v, c, M.F)
    return ModuleMorphism(M, M, g, H)


# --------------------------------------------------------------------------
# projectivity


def graded_free_cover_of(K: Module) -> Tuple[Module, ModuleMorphism]:
    """Free graded module on all basis vectors of ``K`` with the evaluation map."""
    gens = [(e.obj, e.degree, e.name) for e in K.basis]
    P = free_graded_module(K.base, K.side, gens)
    return P, _eval_map(P, K, [{i: 1} for i in range(K.dim)])


def _eval_map(P: Module, K: Module, images: Sequence[Vec]) -> ModuleMorphism:
    """Degree-0 map from a free graded module sending generator ``i`` to ``images[i]``."""
    B = K.base
    mat = {}
    # free_graded_module orders its basis by generator, then by morphism index
    pos = 0
    for gi, img in enumerate(images):
        X = P.gen_info[gi][0]
        for f in range(B.dim):
            ok = (K.side == "left" and B.src[f] == X) or (K.side == "right" and B.dst[f] == X)
            if not ok:
                continue
            v = K.act_vec({f: 1}, img)
            if v:
                mat[pos] = v
            pos += 1
    return ModuleMorphism(P, K, 0, mat)


def is_graded_projective(K: Module) -> bool:
    """Exact test: the evaluation map from a free module onto ``K`` splits."""
    return graded_section(K) is not None


def graded_section(K: Module, cover: Optional[Tuple[Module, ModuleMorphism]] = None):
    """A B-linear degree-0 section of a surjection ``P -> K`` from a free module."""
    from .exactla import solve
    if K.dim == 0:
        return {}
    P, p = cover or graded_free_cover_of(K)
    B = K.base
    F = K.F
    G = B.grading
    unknowns = []
    upos = {}
    for k in range(K.dim):
        for q in P.by_obj.get(K.obj[k], []):
            if G.degrees_equal(P.deg[q], K.deg[k]):
                upos[(k, q)] = len(unknowns)
                unknowns.append((k, q))
    eqs: Dict[Tuple, Vec] = {}
    rhs: Vec = {}
    # B-linearity: s(b k) = b s(k)   (degree 0: no sign on either side)
    for k in range(K.dim):
        for b in K.acting(k):
            for k2, c in K.act(b, k).items():
                for q in P.by_obj.get(K.obj[k2], []):
                    u = upos.get((k2, q))
                    if u is not None:
                        add_term(eqs.setdefault(("lin", b, k, q), {}), u, c, F)
            for q2 in P.by_obj.get(K.obj[k], []):
                u = upos.get((k, q2))
                if u is None:
                    continue
                for q, c in P.act(b, q2).items():
                    add_term(eqs.setdefault(("lin", b, k, q), {}), u, -c, F)
    # p s = id
    for k in range(K.dim):
        for q in P.by_obj.get(K.obj[k], []):
            u = upos.get((k, q))
            if u is None:
                continue
            for k2, c in p.mat.get(q, {}).items():
                add_term(eqs.setdefault(("sec", k, k2), {}), u, c, F)
        eqs.setdefault(("sec", k, k), {})
        rhs[("sec", k, k)] = 1
    keys = list(eqs)
    kpos = {key: i for i, key in enumerate(keys)}
    # matrix with rows = equations, cols = unknowns
    cols = [dict() for _ in unknowns]
    for key, row in eqs.items():
        r = kpos[key]
        for u, c in row.items():
            cols[u][r] = c
    mat = SparseMatrix(len(keys), len(unknowns), cols, F)
    x = solve(mat, {kpos[key]: c for key, c in rhs.items()})
    if x is None:
        return None
    s: Dict[int, Vec] = {}
    for u, c in x.items():
        k, q = unknowns[u]
        add_term(s.setdefault(k, {}), q, c, F)
    return ModuleMorphism(K, P, 0, s)


# --------------------------------------------------------------------------
# JSON


def module_from_dict(data: dict, base: CdgCategory, name: str = "") -> Module:
    """``{"side", "basis": [{"name", "obj", "degree"}], "action": [[f, m, coeffs]],
    "diff": [[m, coeffs]]}``; unit actions may be omitted."""
    try:
        side = data["side"]
        basis = [(str(e["name"]), str(e["obj"]), int(e["degree"])) for e in data["basis"]]
    except KeyError as e:
        raise ModuleError(f"missing field {e}") from None
    index = {b[0]: i for i, b in enumerate(basis)}
    F = base.F
    action = {}
    for entry in data.get("action", []):
        f, m = entry[0], entry[1]
        if f not in base.index or m not in index:
            raise ModuleError(f"unknown name in action entry {entry!r}")
        action[(base.index[f], index[m])] = parse_coeffs(entry[2] if len(entry) > 2 else None, index, F)
    diff = {}
    for entry in data.get("diff", []):
        if entry[0] not in index:
            raise ModuleError(f"unknown element {entry[0]!r}")
        diff[index[entry[0]]] = parse_coeffs(entry[1] if len(entry) > 1 else None, index, F)
    return Module(base, side, basis, action, diff, name=data.get("name", name), fill_units=True)


def module_to_dict(M: Module) -> dict:
    from .cdgcore import _enc_obj, _enc_scalar
    names = [e.name for e in M.basis]
    F = M.F

    def enc(v):
        return {names[k]: _enc_scalar(F, c) for k, c in sorted(v.items())}

    return {
        "side": M.side,
        "basis": [{"name": e.name, "obj": _enc_obj(e.obj), "degree": e.degree} for e in M.basis],
        "action": [[M.base.basis[f].name, names[m], enc(v)] for (f, m), v in sorted(M.action.items())],
        "diff": [[names[m], enc(v)] for m, v in sorted(M.diff.items())],
    }


# --------------------------------------------------------------------------
# matrix-factorization style categories


def mf_category(B: CdgCategory, objects: Sequence[Module], names: Optional[Sequence[str]] = None,
                qdg: bool = False, check_projective: bool = True) -> CdgCategory:
    """Category of right (Q/C)DG-modules over ``B`` with projective underlying
    graded modules.  Hom spaces are the Hom complexes; the curvature of an
    object is its module curvature (zero for CDG-modules unless ``qdg``)."""
    from .cdgcore import BasisMor
    F = B.F
    G = B.grading
    names = list(names) if names else [M.name or f"P{i}" for i, M in enumerate(objects)]
    if len(set(names)) != len(names):
        raise ModuleError("object names must be distinct")
    for nm, M in zip(names, objects):
        if M.side != "right":
            raise ModuleError(f"object {nm} is not a right module")
        if not validate_module(M, qdg=True).ok:
            raise ModuleError(f"object {nm} is not a valid QDG-module")
        if not qdg and not M.is_cdg():
            raise ModuleError(f"object {nm} is not a CDG-module")
        if check_projective and not is_graded_projective(M):
            raise ModuleError(f"object {nm} is not projective as a graded module")
    spaces = {}
    basis = []
    where = {}  # (i, j, g, t) -> basis index
    for j, (nj, Mj) in enumerate(zip(names, objects)):
        for i, (ni, Mi) in enumerate(zip(names, objects)):
            hs = HomSpace(Mi, Mj)  # morphisms Mi -> Mj
            if i == j and Mi.dim:
                hs.rebase(0, [{k: {k: 1} for k in range(Mi.dim)}])
            spaces[(i, j)] = hs
            for g in hs.degrees():
                for t in range(len(hs.maps[g])):
                    where[(i, j, g, t)] = len(basis)
                    basis.append(BasisMor(f"{ni}->{nj}:{g}.{t}", ni, nj, g))
    rev = {v: k for k, v in where.items()}

    def as_vec(i, j, g, fm) -> Vec:
        coords = spaces[(i, j)].express(g, fm)
        return {where[(i, j, G.normalize(g), t)]: c for t, c in coords.items()}

    compose = {}
    for a, (i, j, g, t) in rev.items():
        fa = spaces[(i, j)].maps[g][t]
        for b, (i2, j2, g2, t2) in rev.items():
            if j2 != i:
                continue
            fb = spaces[(i2, j2)].maps[g2][t2]
            prod = {l: _apply(fa, v, F) for l, v in fb.items()}
            prod = {l: v for l, v in prod.items() if v}
            if prod:
                compose[(a, b)] = as_vec(i2, j, G.add(g, g2), prod)
    diff = {}
    for a, (i, j, g, t) in rev.items():
        dm = ModuleMorphism(objects[i], objects[j], g, spaces[(i, j)].maps[g][t]).differential().mat
        if dm:
            diff[a] = as_vec(i, j, G.add(g, 1), dm)
    units = {}
    curv = {}
    for i, (ni, Mi) in enumerate(zip(names, objects)):
        units[ni] = as_vec(i, i, 0, {k: {k: 1} for k in range(Mi.dim)})
        if qdg:
            c = module_curvature(Mi)
            c = {k: v for k, v in c.items() if v}
            if c:
                curv[ni] = as_vec(i, i, G.add(G.one, G.one), c)
    return CdgCategory(F, G, names, basis, compose, diff, curv, units,
                       name="mf_qdg" if qdg else "mf")


def _apply(fm: Dict[int, Vec], v: Vec, F) -> Vec:
    out: Vec = {}
    for k, c in v.items():
        img = fm.get(k)
        if img:
            axpy(out, img, c, F)
    return out
