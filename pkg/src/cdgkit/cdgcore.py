"""Small CDG-categories with finite homogeneous bases.

A category is stored by structure constants.  Morphisms are sparse vectors
(``dict`` basis index -> scalar); ``compose[(f, g)]`` is the product
``f g`` (first ``g``, then ``f``), defined when ``src(f) == dst(g)``.
The differential has degree ``one`` and ``curvature[X]`` is an element of
``Hom(X, X)`` of degree ``2 one``.  A CDG-ring is the one-object case.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Hashable, Iterable, List, NamedTuple, Optional, Tuple

from .exactla import Echelon, Field, Vec, add_term, axpy, scale
from .grading import GradingGroup, GradingMorphism, GradingError


class CdgError(ValueError):
    pass


class BasisMor(NamedTuple):
    name: str
    src: Hashable
    dst: Hashable
    degree: int


@dataclass
class Check:
    name: str
    ok: bool
    witness: Optional[str] = None


class ValidationReport:
    def __init__(self, subject: str = ""):
        self.subject = subject
        self.checks: List[Check] = []

    def add(self, name: str, failures: List[str]):
        self.checks.append(Check(name, not failures, failures[0] if failures else None))

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failed(self) -> List[Check]:
        return [c for c in self.checks if not c.ok]

    def __bool__(self):
        return self.ok

    def lines(self) -> List[str]:
        out = []
        for c in self.checks:
            tag = "PASS" if c.ok else "FAIL"
            extra = f"  [{c.witness}]" if c.witness else ""
            out.append(f"{tag} {c.name}{extra}")
        return out

    def __str__(self):
        head = f"{self.subject}: " if self.subject else ""
        return head + ("ok" if self.ok else "failed") + "\n" + "\n".join(self.lines())


class CdgCategory:
    """Finite-basis CDG-category over a field."""

    def __init__(self, F: Field, grading: GradingGroup, objects: Iterable[Hashable],
                 basis: Iterable[BasisMor], compose: Dict[Tuple[int, int], Vec],
                 diff: Optional[Dict[int, Vec]] = None,
                 curvature: Optional[Dict[Hashable, Vec]] = None,
                 units: Optional[Dict[Hashable, Vec]] = None,
                 name: str = ""):
        self.F = F
        self.grading = grading
        self.objects = list(objects)
        self.basis = [BasisMor(b.name, b.src, b.dst, grading.normalize(b.degree)) for b in basis]
        self.name = name
        objset = set(self.objects)
        if len(objset) != len(self.objects):
            raise CdgError("duplicate object")
        for b in self.basis:
            if b.src not in objset or b.dst not in objset:
                raise CdgError(f"basis element {b.name} has unknown endpoints")
        self.compose = {k: v for k, v in compose.items() if v}
        self.diff = {k: v for k, v in (diff or {}).items() if v}
        self.curvature = {X: dict(v) for X, v in (curvature or {}).items() if v}
        self.index = {}
        for i, b in enumerate(self.basis):
            if b.name in self.index:
                raise CdgError(f"duplicate basis name {b.name}")
            self.index[b.name] = i
        self.deg = [b.degree for b in self.basis]
        self.par = [grading.parity(g) for g in self.deg]
        self.src = [b.src for b in self.basis]
        self.dst = [b.dst for b in self.basis]
        self.hom: Dict[Tuple, List[int]] = {}
        for i, b in enumerate(self.basis):
            self.hom.setdefault((b.src, b.dst), []).append(i)
        self.units = dict(units) if units is not None else self._infer_units()

    # -- elements -----------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.basis)

    def hom_basis(self, X, Y) -> List[int]:
        """Indices of the basis of Hom(X, Y)."""
        return self.hom.get((X, Y), [])

    def unit(self, X) -> Vec:
        return self.units[X]

    def h(self, X) -> Vec:
        return self.curvature.get(X, {})

    def is_dg(self) -> bool:
        return not self.curvature

    def comp(self, i: int, j: int) -> Vec:
        return self.compose.get((i, j), {})

    def mul(self, u: Vec, v: Vec) -> Vec:
        out: Vec = {}
        F = self.F
        for i, a in u.items():
            for j, b in v.items():
                c = self.compose.get((i, j))
                if c:
                    axpy(out, c, F.norm(a * b), F)
        return out

    def d(self, u: Vec) -> Vec:
        out: Vec = {}
        for i, a in u.items():
            v = self.diff.get(i)
            if v:
                axpy(out, v, a, self.F)
        return out

    def sign(self, a: int, b: int) -> int:
        return -1 if self.grading.sigma(a, b) else 1

    def vec_degree(self, u: Vec) -> Optional[int]:
        """Common degree of a homogeneous vector (None for zero)."""
        degs = {self.deg[i] for i in u}
        if len(degs) > 1:
            raise CdgError("inhomogeneous element")
        return degs.pop() if degs else None

    def vec_ends(self, u: Vec) -> Optional[Tuple]:
        ends = {(self.src[i], self.dst[i]) for i in u}
        if len(ends) > 1:
            raise CdgError("element mixes hom spaces")
        return ends.pop() if ends else None

    def element(self, coeffs) -> Vec:
        """Parse a coefficient description (see :func:`parse_coeffs`)."""
        return parse_coeffs(coeffs, self.index, self.F)

    def fmt(self, u: Vec) -> str:
        if not u:
            return "0"
        parts = []
        for i in sorted(u):
            parts.append(f"{self.F.format(u[i])}*{self.basis[i].name}")
        return " + ".join(parts)

    def _infer_units(self) -> Dict[Hashable, Vec]:
        units = {}
        F = self.F
        for X in self.objects:
            cand = [i for i in self.hom_basis(X, X) if self.grading.normalize(self.deg[i]) == 0]
            # unknown coefficients u_c; equations u f = f for f into X, f u = f for f out of X
            rows: List[Tuple[Vec, Vec]] = []
            for f in range(self.dim):
                if self.dst[f] == X:
                    eq: Dict = {}
                    for c in cand:
                        for k, v in self.comp(c, f).items():
                            eq.setdefault(k, {})
                            add_term(eq[k], c, v, F)
                    for k in set(eq) | {f}:
                        rows.append((eq.get(k, {}), 1 if k == f else 0))
                if self.src[f] == X:
                    eq = {}
                    for c in cand:
                        for k, v in self.comp(f, c).items():
                            eq.setdefault(k, {})
                            add_term(eq[k], c, v, F)
                    for k in set(eq) | {f}:
                        rows.append((eq.get(k, {}), 1 if k == f else 0))
            sol = _solve_rows(rows, F)
            if sol is None:
                raise CdgError(f"object {X!r} has no identity morphism")
            units[X] = sol
        return units

    # -- misc ----------------------------------------------------------------

    def __repr__(self):
        nm = f" {self.name}" if self.name else ""
        return (f"<CdgCategory{nm}: {len(self.objects)} objects, dim {self.dim}, "
                f"{self.grading}, {self.F.name}>")

    def same_structure(self, other: "CdgCategory") -> bool:
        """Equality of all structure constants under the identity of bases."""
        return (self.F == other.F and self.grading == other.grading
                and self.objects == other.objects
                and [tuple(b[1:]) for b in self.basis] == [tuple(b[1:]) for b in other.basis]
                and self.compose == other.compose and self.diff == other.diff
                and self.curvature == other.curvature and self.units == other.units)

    def to_dict(self) -> dict:
        F = self.F
        names = [b.name for b in self.basis]

        def enc(v):
            return {names[k]: _enc_scalar(F, c) for k, c in sorted(v.items())}

        return {
            "field": F.name,
            "grading": str(self.grading),
            "objects": [_enc_obj(X) for X in self.objects],
            "basis": [{"name": b.name, "src": _enc_obj(b.src), "dst": _enc_obj(b.dst),
                       "degree": b.degree} for b in self.basis],
            "compose": [[names[i], names[j], enc(v)] for (i, j), v in sorted(self.compose.items())],
            "diff": [[names[i], enc(v)] for i, v in sorted(self.diff.items())],
            "curvature": {_enc_obj(X): enc(v) for X, v in self.curvature.items()},
            "units": {_enc_obj(X): enc(v) for X, v in self.units.items()},
        }


def _enc_obj(X):
    if isinstance(X, tuple):
        return "(" + ",".join(_enc_obj(x) for x in X) + ")"
    return str(X)


def _enc_scalar(F: Field, c):
    s = F.format(c)
    return int(s) if "/" not in s else s


_RHS = 1 << 62  # sorts after every variable index, so it is never chosen as pivot early


def _solve_rows(rows, F: Field) -> Optional[Vec]:
    """Solve sum_c a_c x_c = b for rows (a, b); return one solution or None."""
    ech = Echelon(F)
    for a, b in rows:
        v = dict(a)
        if b:
            v[_RHS] = F.norm(-b)
        if v:
            ech.add(v)
    # a row whose pivot is the rhs column means 0 = nonzero
    if _RHS in ech.pivot_of:
        return None
    # back substitution: free variables are zero
    sol: Vec = {}
    for r in reversed(range(len(ech.rows))):
        row = ech.rows[r]
        col = ech.pivot_cols[r]
        val = F.norm(-row.get(_RHS, 0))
        for k, c in row.items():
            if k != col and k != _RHS:
                val = F.norm(val - c * sol.get(k, 0))
        if val:
            sol[col] = val
    return sol


def parse_coeffs(coeffs, index: Dict[str, int], F: Field) -> Vec:
    """Coefficients are a dict ``{name: scalar}``, a list of ``[name, scalar]``
    pairs, a single basis name, or ``0``/``None`` for zero."""
    if coeffs in (None, 0, "0"):
        return {}
    if isinstance(coeffs, str):
        items = [(coeffs, 1)]
    elif isinstance(coeffs, dict):
        items = list(coeffs.items())
    else:
        items = []
        for entry in coeffs:
            if isinstance(entry, str):
                items.append((entry, 1))
            else:
                items.append((entry[0], entry[1]))
    out: Vec = {}
    for nm, c in items:
        if nm not in index:
            raise CdgError(f"unknown basis element {nm!r}")
        add_term(out, index[nm], F.parse_scalar(c), F)
    return out


# --------------------------------------------------------------------------
# validation


def validate(C: CdgCategory, limit: int = 3) -> ValidationReport:
    """Check every axiom exhaustively on basis tuples."""
    rep = ValidationReport(C.name or "category")
    F, G = C.F, C.grading
    B = C.basis
    n = C.dim

    bad = []
    for (i, j), v in C.compose.items():
        if C.src[i] != C.dst[j]:
            bad.append(f"{B[i].name}*{B[j].name}: endpoints do not match")
            continue
        for k in v:
            if (C.src[k], C.dst[k]) != (C.src[j], C.dst[i]):
                bad.append(f"{B[i].name}*{B[j].name}: lands in wrong hom space")
            elif not G.degrees_equal(C.deg[k], G.add(C.deg[i], C.deg[j])):
                bad.append(f"{B[i].name}*{B[j].name}: degree not additive")
    rep.add("composition homogeneous", bad[:limit])

    bad = []
    for i, v in C.diff.items():
        for k in v:
            if (C.src[k], C.dst[k]) != (C.src[i], C.dst[i]):
                bad.append(f"d({B[i].name}) leaves its hom space")
            elif not G.degrees_equal(C.deg[k], G.add(C.deg[i], G.one)):
                bad.append(f"d({B[i].name}) not of degree |{B[i].name}|+1")
    rep.add("differential homogeneous", bad[:limit])

    bad = []
    for X in C.objects:
        h = C.h(X)
        for k in h:
            if (C.src[k], C.dst[k]) != (X, X):
                bad.append(f"h_{X} not an endomorphism")
            elif not G.degrees_equal(C.deg[k], G.add(G.one, G.one)):
                bad.append(f"h_{X} not of degree 2")
        u = C.units.get(X)
        if u is None:
            bad.append(f"missing unit for {X}")
            continue
        for k in u:
            if (C.src[k], C.dst[k]) != (X, X) or not G.degrees_equal(C.deg[k], 0):
                bad.append(f"unit of {X} not a degree-0 endomorphism")
    rep.add("curvature and units homogeneous", bad[:limit])

    # associativity on composable triples
    bad = []
    by_dst: Dict = {}
    for i in range(n):
        by_dst.setdefault(C.dst[i], []).append(i)
    for i in range(n):
        for j in by_dst.get(C.src[i], []):
            fg = C.comp(i, j)
            for k in by_dst.get(C.src[j], []):
                lhs = C.mul(fg, {k: 1})
                rhs = C.mul({i: 1}, C.comp(j, k))
                if lhs != rhs:
                    bad.append(f"({B[i].name}*{B[j].name})*{B[k].name}")
                    if len(bad) >= limit:
                        break
            if len(bad) >= limit:
                break
        if len(bad) >= limit:
            break
    rep.add("associativity", bad)

    bad = []
    for i in range(n):
        if C.mul(C.units[C.dst[i]], {i: 1}) != {i: 1} or C.mul({i: 1}, C.units[C.src[i]]) != {i: 1}:
            bad.append(B[i].name)
    rep.add("unit laws", bad[:limit])

    bad = []
    for i in range(n):
        for j in by_dst.get(C.src[i], []):
            lhs = C.d(C.comp(i, j))
            rhs = C.mul(C.d({i: 1}), {j: 1})
            axpy(rhs, C.mul({i: 1}, C.d({j: 1})), C.sign(C.par[i], 1), F)
            if lhs != rhs:
                bad.append(f"d({B[i].name}*{B[j].name})")
                break
        if len(bad) >= limit:
            break
    rep.add("Leibniz rule", bad)

    bad = []
    for i in range(n):
        dd = C.d(C.d({i: 1}))
        rhs = C.mul(C.h(C.dst[i]), {i: 1})
        axpy(rhs, C.mul({i: 1}, C.h(C.src[i])), -1, F)
        if dd != rhs:
            bad.append(f"d^2({B[i].name}) != h f - f h")
    rep.add("d^2 = [h, -]", bad[:limit])

    bad = [f"d(h_{X}) != 0" for X in C.objects if C.d(C.h(X))]
    rep.add("d(h) = 0", bad[:limit])
    return rep


# --------------------------------------------------------------------------
# constructions


def opposite(C: CdgCategory) -> CdgCategory:
    """``f^op g^op = (-1)^{|f||g|} (g f)^op`` and ``h_{X^op} = -h_X``."""
    basis = [BasisMor(_op_name(b.name), b.dst, b.src, b.degree) for b in C.basis]
    compose = {}
    for (g, f), v in C.compose.items():
        compose[(f, g)] = scale(v, C.sign(C.par[f], C.par[g]), C.F)
    curv = {X: scale(h, -1, C.F) for X, h in C.curvature.items()}
    return CdgCategory(C.F, C.grading, C.objects, basis, compose, dict(C.diff), curv,
                       dict(C.units), name=_op_name(C.name) if C.name else "")


def _op_name(s: str) -> str:
    return s[:-3] if s.endswith("^op") else s + "^op"


def tensor(C: CdgCategory, D: CdgCategory) -> CdgCategory:
    """Tensor product over the ground field with the Koszul sign rule."""
    if C.grading != D.grading:
        raise CdgError("grading groups differ")
    if C.F != D.F:
        raise CdgError("fields differ")
    F = C.F
    m = D.dim
    objects = [(X, Y) for X in C.objects for Y in D.objects]
    basis = [BasisMor(f"{a.name}|{b.name}", (a.src, b.src), (a.dst, b.dst),
                      C.grading.add(a.degree, b.degree))
             for a in C.basis for b in D.basis]

    def tens(u: Vec, v: Vec) -> Vec:
        out = {}
        for i, a in u.items():
            for j, b in v.items():
                out[i * m + j] = F.norm(a * b)
        return out

    compose = {}
    for (i1, i2), v1 in C.compose.items():
        for (j1, j2), v2 in D.compose.items():
            s = C.sign(D.par[j1], C.par[i2])
            compose[(i1 * m + j1, i2 * m + j2)] = scale(tens(v1, v2), s, F)
    diff = {}
    for i in range(C.dim):
        for j in range(m):
            out = tens(C.diff.get(i, {}), {j: 1})
            axpy(out, tens({i: 1}, D.diff.get(j, {})), C.sign(C.par[i], 1), F)
            if out:
                diff[i * m + j] = out
    curv = {}
    units = {}
    for X in C.objects:
        for Y in D.objects:
            h = tens(C.h(X), D.units[Y])
            axpy(h, tens(C.units[X], D.h(Y)), 1, F)
            if h:
                curv[(X, Y)] = h
            units[(X, Y)] = tens(C.units[X], D.units[Y])
    name = f"{C.name}(x){D.name}" if C.name and D.name else ""
    return CdgCategory(F, C.grading, objects, basis, compose, diff, curv, units, name=name)


def _check_connection(B: CdgCategory, tau: Dict[Hashable, Vec], what: str = "tau"):
    G = B.grading
    for X, t in tau.items():
        if X not in B.units:
            raise CdgError(f"{what}: unknown object {X!r}")
        for k in t:
            if (B.src[k], B.dst[k]) != (X, X):
                raise CdgError(f"{what}_{X} is not an endomorphism of {X}")
            if not G.degrees_equal(B.deg[k], G.one):
                raise CdgError(f"{what}_{X} is not homogeneous of degree 1")


def change_connection(B: CdgCategory, tau: Dict[Hashable, Vec]) -> CdgCategory:
    """Twist every object by ``tau``: ``d'f = df + tau_Y f - (-1)^{|f|} f tau_X``,
    ``h'_X = h_X + d tau_X + tau_X^2``."""
    _check_connection(B, tau)
    F = B.F
    diff = {}
    for i in range(B.dim):
        X, Y = B.src[i], B.dst[i]
        out = dict(B.diff.get(i, {}))
        if tau.get(Y):
            axpy(out, B.mul(tau[Y], {i: 1}), 1, F)
        if tau.get(X):
            axpy(out, B.mul({i: 1}, tau[X]), -B.sign(B.par[i], 1), F)
        if out:
            diff[i] = out
    curv = {}
    for X in B.objects:
        h = dict(B.h(X))
        t = tau.get(X, {})
        axpy(h, B.d(t), 1, F)
        axpy(h, B.mul(t, t), 1, F)
        if h:
            curv[X] = h
    return CdgCategory(F, B.grading, B.objects, B.basis, B.compose, diff, curv, B.units, name=B.name)


def curvature_shift(B: CdgCategory, c) -> CdgCategory:
    """``B_(c)``: add ``c id_X`` to every curvature element."""
    F = B.F
    c = F(c)
    G = B.grading
    if c and not G.degrees_equal(0, G.add(G.one, G.one)):
        raise CdgError("c id_X is not of degree 2 in this grading group")
    curv = {}
    for X in B.objects:
        h = dict(B.h(X))
        axpy(h, B.units[X], c, F)
        if h:
            curv[X] = h
    return CdgCategory(F, G, B.objects, B.basis, B.compose, B.diff, curv, B.units, name=B.name)


def pushforward(phi: GradingMorphism, B: CdgCategory) -> CdgCategory:
    """Relabel all degrees through ``phi``; structure constants unchanged."""
    if phi.source != B.grading:
        raise GradingError(f"morphism source {phi.source} differs from {B.grading}")
    basis = [BasisMor(b.name, b.src, b.dst, phi(b.degree)) for b in B.basis]
    return CdgCategory(B.F, phi.target, B.objects, basis, B.compose, B.diff, B.curvature,
                       B.units, name=B.name)


def with_field(B: CdgCategory, F: Field) -> CdgCategory:
    """Reduce integer/rational structure constants into another field."""
    def conv(v):
        return {k: F(c) for k, c in v.items() if F(c)}
    return CdgCategory(F, B.grading, B.objects, B.basis,
                       {k: conv(v) for k, v in B.compose.items()},
                       {k: conv(v) for k, v in B.diff.items()},
                       {k: conv(v) for k, v in B.curvature.items()},
                       {k: conv(v) for k, v in B.units.items()}, name=B.name)


# --------------------------------------------------------------------------
# functors


class CdgFunctor:
    """A QDG-functor ``(F, a)``.

    ``mor_map[i]`` is the image of basis morphism ``i`` (a vector in the
    target), ``a[X]`` an element of degree one in ``End(F X)``.
    """

    def __init__(self, source: CdgCategory, target: CdgCategory, obj_map: Dict,
                 mor_map: Dict[int, Vec], a: Optional[Dict[Hashable, Vec]] = None, name: str = ""):
        self.source = source
        self.target = target
        self.obj_map = dict(obj_map)
        self.mor_map = {i: dict(v) for i, v in mor_map.items()}
        self.a = {X: dict(v) for X, v in (a or {}).items() if v}
        self.name = name
        for X in source.objects:
            if X not in self.obj_map:
                raise CdgError(f"object {X!r} not mapped")
        for X, v in self.a.items():
            _check_connection(target, {self.obj_map[X]: v}, "a")

    def __call__(self, u: Vec) -> Vec:
        out: Vec = {}
        for i, c in u.items():
            img = self.mor_map.get(i)
            if img:
                axpy(out, img, c, self.target.F)
        return out

    def conn(self, X) -> Vec:
        return self.a.get(X, {})

    @property
    def is_strict(self) -> bool:
        return not self.a

    def is_cdg(self) -> bool:
        return all(not v for v in functor_curvature(self).values())

    def __repr__(self):
        return f"<CdgFunctor {self.name or ''} {self.source!r} -> {self.target!r}>"


def validate_functor(Fn: CdgFunctor, limit: int = 3) -> ValidationReport:
    B, C = Fn.source, Fn.target
    F = C.F
    rep = ValidationReport(Fn.name or "functor")
    bad = []
    for i in range(B.dim):
        img = Fn.mor_map.get(i, {})
        for k in img:
            if (C.src[k], C.dst[k]) != (Fn.obj_map[B.src[i]], Fn.obj_map[B.dst[i]]):
                bad.append(f"F({B.basis[i].name}) in wrong hom space")
            elif not C.grading.degrees_equal(C.deg[k], B.deg[i]):
                bad.append(f"F({B.basis[i].name}) changes degree")
    rep.add("morphism map homogeneous", bad[:limit])
    bad = []
    for (i, j), v in B.compose.items():
        if Fn(v) != C.mul(Fn({i: 1}), Fn({j: 1})):
            bad.append(f"F({B.basis[i].name}*{B.basis[j].name})")
    for X in B.objects:
        if Fn(B.units[X]) != C.units[Fn.obj_map[X]]:
            bad.append(f"F(1_{X})")
    rep.add("functoriality", bad[:limit])
    bad = []
    for i in range(B.dim):
        X, Y = B.src[i], B.dst[i]
        f = Fn({i: 1})
        rhs = C.d(f)
        axpy(rhs, C.mul(Fn.conn(Y), f), 1, F)
        axpy(rhs, C.mul(f, Fn.conn(X)), -B.sign(B.par[i], 1), F)
        if Fn(B.d({i: 1})) != rhs:
            bad.append(f"F(d {B.basis[i].name})")
    rep.add("F(df) = dF(f) + a F(f) - (-1)^|f| F(f) a", bad[:limit])
    return rep


def functor_curvature(Fn: CdgFunctor) -> Dict[Hashable, Vec]:
    """``(h_F)_X = h_{F X} + d a_X + a_X^2 - F(h_X)``."""
    B, C = Fn.source, Fn.target
    F = C.F
    out = {}
    for X in B.objects:
        a = Fn.conn(X)
        v = dict(C.h(Fn.obj_map[X]))
        axpy(v, C.d(a), 1, F)
        axpy(v, C.mul(a, a), 1, F)
        axpy(v, Fn(B.h(X)), -1, F)
        out[X] = v
    return out


def identity_functor(B: CdgCategory, a: Optional[Dict] = None, target: Optional[CdgCategory] = None) -> CdgFunctor:
    return CdgFunctor(B, target or B, {X: X for X in B.objects},
                      {i: {i: 1} for i in range(B.dim)}, a)


def twist_functor(B: CdgCategory, tau: Dict[Hashable, Vec]) -> CdgFunctor:
    """The CDG-functor ``(id, tau)`` from ``change_connection(B, tau)`` to ``B``."""
    return identity_functor(change_connection(B, tau), a=tau, target=B)


def compose_functors(Fn: CdgFunctor, Gn: CdgFunctor) -> CdgFunctor:
    """``G o F`` with connection ``c_X = G(a_X) + b_{F X}``."""
    if not Fn.target.same_structure(Gn.source):
        raise CdgError("codomain of F is not the domain of G")
    C = Gn.target
    obj = {X: Gn.obj_map[Fn.obj_map[X]] for X in Fn.source.objects}
    mor = {i: Gn(v) for i, v in Fn.mor_map.items()}
    a = {}
    for X in Fn.source.objects:
        c = Gn(Fn.conn(X))
        axpy(c, Gn.conn(Fn.obj_map[X]), 1, C.F)
        if c:
            a[X] = c
    return CdgFunctor(Fn.source, C, obj, mor, a)


def opposite_functor(Fn: CdgFunctor, Bop: Optional[CdgCategory] = None,
                     Cop: Optional[CdgCategory] = None) -> CdgFunctor:
    """``F^op`` with connection ``-a_X^op``."""
    Bop = Bop or opposite(Fn.source)
    Cop = Cop or opposite(Fn.target)
    a = {X: scale(v, -1, Cop.F) for X, v in Fn.a.items()}
    return CdgFunctor(Bop, Cop, Fn.obj_map, Fn.mor_map, a)


def tensor_functors(Fn: CdgFunctor, Gn: CdgFunctor, src: Optional[CdgCategory] = None,
                    dst: Optional[CdgCategory] = None) -> CdgFunctor:
    """``F (x) G`` with connection ``a_X (x) 1 + 1 (x) b_Y``."""
    src = src or tensor(Fn.source, Gn.source)
    dst = dst or tensor(Fn.target, Gn.target)
    F = dst.F
    m1 = Gn.source.dim
    m2 = Gn.target.dim

    def tens(u, v):
        return {i * m2 + j: F.norm(a * b) for i, a in u.items() for j, b in v.items()}

    obj = {(X, Y): (Fn.obj_map[X], Gn.obj_map[Y]) for X in Fn.source.objects for Y in Gn.source.objects}
    mor = {}
    for i in range(Fn.source.dim):
        for j in range(m1):
            v = tens(Fn({i: 1}), Gn({j: 1}))
            if v:
                mor[i * m1 + j] = v
    a = {}
    for X in Fn.source.objects:
        for Y in Gn.source.objects:
            v = tens(Fn.conn(X), Gn.target.units[Gn.obj_map[Y]])
            axpy(v, tens(Fn.target.units[Fn.obj_map[X]], Gn.conn(Y)), 1, F)
            if v:
                a[(X, Y)] = v
    return CdgFunctor(src, dst, obj, mor, a)


# --------------------------------------------------------------------------
# JSON


def category_from_dict(data: dict, name: str = "") -> CdgCategory:
    """Build a category from the JSON schema documented in the README."""
    try:
        F = Field.parse(data.get("field", "Q"))
        G = GradingGroup.parse(data.get("grading", "Z"))
        if data.get("infinite"):
            raise CdgError("infinite-dimensional categories are not supported")
        objects = [str(x) for x in data["objects"]]
        basis = []
        for b in data["basis"]:
            basis.append(BasisMor(str(b["name"]), str(b["src"]), str(b["dst"]), G.normalize(int(b["degree"]))))
    except KeyError as e:
        raise CdgError(f"missing field {e}") from None
    index = {b.name: i for i, b in enumerate(basis)}
    compose = {}
    for entry in data.get("compose", []):
        f, g, coeffs = entry[0], entry[1], entry[2] if len(entry) > 2 else None
        if f not in index or g not in index:
            raise CdgError(f"unknown basis element in compose entry {entry!r}")
        v = parse_coeffs(coeffs, index, F)
        key = (index[f], index[g])
        if key in compose:
            raise CdgError(f"duplicate compose entry {f} {g}")
        compose[key] = v
    diff = {}
    for entry in data.get("diff", []):
        f, coeffs = entry[0], entry[1] if len(entry) > 1 else None
        if f not in index:
            raise CdgError(f"unknown basis element {f!r}")
        diff[index[f]] = parse_coeffs(coeffs, index, F)
    curv = {str(X): parse_coeffs(v, index, F) for X, v in data.get("curvature", {}).items()}
    units = None
    if "units" in data:
        units = {str(X): parse_coeffs(v, index, F) for X, v in data["units"].items()}
    return CdgCategory(F, G, objects, basis, compose, diff, curv, units, name=data.get("name", name))
