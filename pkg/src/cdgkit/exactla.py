"""Exact sparse linear algebra over Q and F_p.

Scalars are plain Python objects: ``int``/``Fraction`` over Q (integers are
kept as ``int`` whenever possible, which keeps the common case fast) and
``int`` residues in ``[0, p)`` over F_p.  Sparse vectors are dicts mapping
a coordinate to a nonzero scalar.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Optional, Tuple

try:  # fast rationals for the rank kernel; Fraction otherwise
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover
    _mpq = Fraction

Vec = Dict[Hashable, object]


class LinearAlgebraError(ValueError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class Field:
    """The rationals (``p == 0``) or the prime field F_p."""

    def __init__(self, p: int = 0):
        if p:
            if not _is_prime(p):
                raise LinearAlgebraError(f"{p} is not prime")
            if p >= 2 ** 31:
                raise LinearAlgebraError("prime fields are limited to p < 2^31")
        self.p = p

    @classmethod
    def parse(cls, text: str) -> "Field":
        text = text.strip()
        if text == "Q":
            return cls(0)
        if text.startswith("Fp:"):
            return cls(int(text[3:]))
        raise LinearAlgebraError(f"unknown field {text!r}")

    @property
    def char(self) -> int:
        return self.p

    @property
    def name(self) -> str:
        return "Q" if not self.p else f"Fp:{self.p}"

    def __repr__(self):
        return f"Field({self.name})"

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def norm(self, x):
        if self.p:
            if type(x) is Fraction:
                return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
            return x % self.p
        if type(x) is Fraction and x.denominator == 1:
            return x.numerator
        return x

    def __call__(self, x):
        if isinstance(x, str):
            return self.parse_scalar(x)
        if isinstance(x, Fraction):
            return self.norm(x)
        return self.norm(int(x))

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.p:
            return pow(a, -1, self.p)
        return self.norm(Fraction(1) / a)

    def div(self, a, b):
        if self.p:
            return (a * pow(b, -1, self.p)) % self.p
        return self.norm(Fraction(a) / b)

    def parse_scalar(self, text) -> object:
        if isinstance(text, (int, Fraction)):
            return self(text)
        text = str(text).strip()
        if "/" in text:
            num, den = text.split("/")
            return self.div(self.norm(int(num)), self.norm(int(den)))
        return self.norm(int(text))

    def format(self, x) -> str:
        if self.p:
            return str(x)
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


QQ = Field(0)


# --------------------------------------------------------------------------
# sparse vectors


def axpy(target: Vec, vec: Vec, c, F: Field) -> None:
    """target += c * vec, in place."""
    if not c:
        return
    norm = F.norm
    for k, v in vec.items():
        t = norm(target.get(k, 0) + c * v)
        if t:
            target[k] = t
        else:
            target.pop(k, None)


def add_term(target: Vec, key, c, F: Field) -> None:
    t = F.norm(target.get(key, 0) + c)
    if t:
        target[key] = t
    else:
        target.pop(key, None)


def scale(vec: Vec, c, F: Field) -> Vec:
    if not c:
        return {}
    norm = F.norm
    out = {}
    for k, v in vec.items():
        t = norm(c * v)
        if t:
            out[k] = t
    return out


def vec_sum(vecs: Iterable[Tuple[object, Vec]], F: Field) -> Vec:
    out: Vec = {}
    for c, v in vecs:
        axpy(out, v, c, F)
    return out


# --------------------------------------------------------------------------
# echelon forms


class Echelon:
    """Incrementally maintained echelon basis of a subspace.

    Pivot rows are stored in creation order; a later pivot row never contains
    an earlier pivot column, so reducing a vector by pivots in creation order
    terminates and yields a canonical representative modulo the subspace.
    Optionally each stored row remembers the combination of inserted vectors
    that produced it.
    """

    def __init__(self, F: Field, track: bool = False, colcount: Optional[Dict] = None):
        self.F = F
        self.track = track
        self.colcount = colcount
        self.rows: List[Vec] = []
        self.combos: List[Vec] = []
        self.pivot_of: Dict[Hashable, int] = {}  # column -> row number
        self.pivot_cols: List[Hashable] = []

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Vec, combo: Optional[Vec] = None) -> Tuple[Vec, Optional[Vec]]:
        F = self.F
        v = dict(vec)
        heap = [self.pivot_of[c] for c in v if c in self.pivot_of]
        heapq.heapify(heap)
        seen = set(heap)
        while heap:
            r = heapq.heappop(heap)
            col = self.pivot_cols[r]
            c = v.get(col)
            if not c:
                continue
            row = self.rows[r]
            factor = F.norm(-c)  # pivot entries are normalized to 1
            norm = F.norm
            for k, x in row.items():
                t = norm(v.get(k, 0) + factor * x)
                if t:
                    v[k] = t
                    if k != col:
                        rr = self.pivot_of.get(k)
                        if rr is not None and rr not in seen:
                            seen.add(rr)
                            heapq.heappush(heap, rr)
                else:
                    v.pop(k, None)
            if combo is not None:
                axpy(combo, self.combos[r], factor, F)
            seen.discard(r)
        return v, combo

    def _choose_pivot(self, v: Vec):
        if self.colcount is None:
            try:
                return min(v)
            except TypeError:
                return min(v, key=repr)
        cc = self.colcount
        return min(v, key=lambda k: (cc.get(k, 0), k))

    def add(self, vec: Vec, tag=None) -> Optional[Vec]:
        """Insert ``vec``; return ``None`` if independent, else the relation.

        With tracking on, ``tag`` names the inserted vector and a dependent
        insertion returns the combination of tags summing to zero.
        """
        combo = {tag: 1} if self.track else None
        v, combo = self.reduce(vec, combo)
        if not v:
            return combo if self.track else {}
        col = self._choose_pivot(v)
        inv = self.F.inv(v[col])
        if inv != 1:
            v = scale(v, inv, self.F)
            if combo is not None:
                combo = scale(combo, inv, self.F)
        self.pivot_of[col] = len(self.rows)
        self.pivot_cols.append(col)
        self.rows.append(v)
        if self.track:
            self.combos.append(combo)
        return None

    def contains(self, vec: Vec) -> bool:
        return not self.reduce(vec)[0]

    def normal_form(self, vec: Vec) -> Vec:
        return self.reduce(vec)[0]

    def express(self, vec: Vec) -> Optional[Vec]:
        """Coordinates of ``vec`` in terms of the inserted tags, or None."""
        if not self.track:
            raise LinearAlgebraError("express needs a tracking echelon")
        v, combo = self.reduce(vec, {})
        if v:
            return None
        return scale(combo, -1, self.F)


# --------------------------------------------------------------------------
# matrices


class SparseMatrix:
    """Column-major sparse matrix: ``cols[j]`` maps row index to entry."""

    __slots__ = ("nrows", "ncols", "cols", "F")

    def __init__(self, nrows: int, ncols: int, cols: Optional[List[Vec]] = None, F: Field = QQ):
        self.nrows = nrows
        self.ncols = ncols
        self.F = F
        self.cols = cols if cols is not None else [dict() for _ in range(ncols)]
        if len(self.cols) != ncols:
            raise LinearAlgebraError("column count mismatch")

    @classmethod
    def from_entries(cls, nrows, ncols, entries, F: Field = QQ) -> "SparseMatrix":
        m = cls(nrows, ncols, F=F)
        seen = set()
        for r, c, v in entries:
            if (r, c) in seen:
                raise LinearAlgebraError(f"duplicate coordinate {(r, c)}")
            seen.add((r, c))
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise LinearAlgebraError(f"coordinate {(r, c)} out of range")
            v = F(v)
            if v:
                m.cols[c][r] = v
        return m

    @classmethod
    def from_dense(cls, rows: List[List], F: Field = QQ) -> "SparseMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        ents = [(i, j, x) for i, row in enumerate(rows) for j, x in enumerate(row) if x]
        return cls.from_entries(nrows, ncols, ents, F)

    @classmethod
    def identity(cls, n: int, F: Field = QQ) -> "SparseMatrix":
        return cls(n, n, [{j: 1} for j in range(n)], F)

    @classmethod
    def zero(cls, nrows: int, ncols: int, F: Field = QQ) -> "SparseMatrix":
        return cls(nrows, ncols, F=F)

    def entries(self):
        for j, col in enumerate(self.cols):
            for i in sorted(col):
                yield i, j, col[i]

    def nnz(self) -> int:
        return sum(len(c) for c in self.cols)

    def to_dense(self) -> List[List]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for i, j, v in self.entries():
            out[i][j] = v
        return out

    def is_zero(self) -> bool:
        return not any(self.cols)

    def apply(self, vec: Vec) -> Vec:
        out: Vec = {}
        F = self.F
        for j, c in vec.items():
            axpy(out, self.cols[j], c, F)
        return out

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise LinearAlgebraError(f"shape mismatch {self.shape} @ {other.shape}")
        return SparseMatrix(self.nrows, other.ncols, [self.apply(c) for c in other.cols], self.F)

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape != other.shape:
            raise LinearAlgebraError("shape mismatch in sum")
        cols = []
        for a, b in zip(self.cols, other.cols):
            c = dict(a)
            axpy(c, b, 1, self.F)
            cols.append(c)
        return SparseMatrix(self.nrows, self.ncols, cols, self.F)

    def __neg__(self):
        return SparseMatrix(self.nrows, self.ncols, [scale(c, -1, self.F) for c in self.cols], self.F)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return (isinstance(other, SparseMatrix) and self.shape == other.shape
                and all(a == b for a, b in zip(self.cols, other.cols)))

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def transpose(self) -> "SparseMatrix":
        cols = [dict() for _ in range(self.nrows)]
        for j, col in enumerate(self.cols):
            for i, v in col.items():
                cols[i][j] = v
        return SparseMatrix(self.ncols, self.nrows, cols, self.F)

    T = property(transpose)

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()}, {self.F.name})"

    def dump(self) -> str:
        """Triplet text format, one ``row col value`` line per entry."""
        lines = [f"% {self.nrows} {self.ncols} {self.F.name}"]
        for i, j, v in self.entries():
            lines.append(f"{i} {j} {self.F.format(v)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, text: str) -> "SparseMatrix":
        lines = [l for l in text.splitlines() if l.strip()]
        head = lines[0].lstrip("%").split()
        nrows, ncols, F = int(head[0]), int(head[1]), Field.parse(head[2])
        ents = []
        for l in lines[1:]:
            i, j, v = l.split()
            ents.append((int(i), int(j), F.parse_scalar(v)))
        return cls.from_entries(nrows, ncols, ents, F)


def _dense_rank(m: SparseMatrix) -> int:
    F = m.F
    rows = m.to_dense()
    rank = 0
    ncols = m.ncols
    for c in range(ncols):
        piv = None
        for r in range(rank, len(rows)):
            if rows[r][c]:
                piv = r
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = F.inv(rows[rank][c])
        prow = [F.norm(x * inv) for x in rows[rank]]
        rows[rank] = prow
        for r in range(rank + 1, len(rows)):
            f = rows[r][c]
            if f:
                row = rows[r]
                rows[r] = [F.norm(row[k] - f * prow[k]) for k in range(ncols)]
        rank += 1
    return rank


DENSE_CUTOFF = 64


def _markowitz_rank(vecs: List[Vec], F: Field) -> int:
    """Rank by right-looking sparse elimination.

    Rows are eliminated shortest first; the pivot column is the one with the
    fewest entries.  Scalars are ``mpq`` over Q and ints mod p over F_p.
    """
    p = F.p
    if p:
        rows = [{k: int(v) % p for k, v in vec.items()} for vec in vecs]
    else:
        rows = [{k: _mpq(v.numerator, v.denominator) if type(v) is Fraction else _mpq(v)
                 for k, v in vec.items()} for vec in vecs]
    where: Dict[Hashable, set] = {}
    for r, row in enumerate(rows):
        for k in row:
            where.setdefault(k, set()).add(r)
    heap = [(len(row), r) for r, row in enumerate(rows) if row]
    heapq.heapify(heap)
    done = set()
    rk = 0
    while heap:
        n, r = heapq.heappop(heap)
        row = rows[r]
        if r in done or n != len(row):
            if r not in done and row:
                heapq.heappush(heap, (len(row), r))
            continue
        if not row:
            done.add(r)
            continue
        done.add(r)
        rk += 1
        c = min(row, key=lambda k: len(where[k]))
        for k in row:
            where[k].discard(r)
        if p:
            inv = pow(row[c], -1, p)
        else:
            inv = 1 / row[c]
        for s in list(where[c]):
            other = rows[s]
            f = -other[c] * inv
            for k, x in row.items():
                t = other.get(k, 0) + f * x
                if p:
                    t %= p
                if t:
                    if k not in other:
                        where.setdefault(k, set()).add(s)
                    other[k] = t
                else:
                    del other[k]
                    where[k].discard(s)
            heapq.heappush(heap, (len(other), s))
    return rk


def rank(m: SparseMatrix) -> int:
    """Exact rank."""
    if m.nrows == 0 or m.ncols == 0:
        return 0
    if m.nrows < DENSE_CUTOFF and m.ncols < DENSE_CUTOFF:
        return _dense_rank(m)
    vecs = m.cols if m.ncols <= m.nrows else m.transpose().cols
    return _markowitz_rank([v for v in vecs if v], m.F)


def kernel_basis(m: SparseMatrix) -> List[Vec]:
    """Basis of ``{x : m x = 0}``; its size is ``ncols - rank``."""
    ech = Echelon(m.F, track=True)
    out = []
    for j, col in enumerate(m.cols):
        rel = ech.add(col, tag=j)
        if rel is not None:
            out.append(rel)
    return out


def image_basis(m: SparseMatrix) -> Echelon:
    ech = Echelon(m.F)
    for col in m.cols:
        if col:
            ech.add(col)
    return ech


def solve(m: SparseMatrix, b: Vec) -> Optional[Vec]:
    """Some x with ``m x = b``, or None when b is not in the column span."""
    ech = Echelon(m.F, track=True)
    for j, col in enumerate(m.cols):
        ech.add(col, tag=j)
    return ech.express(b)


# --------------------------------------------------------------------------
# finite graded complexes


@dataclass
class FiniteComplex:
    """Graded complex with finitely many nonzero components.

    ``dims[g]`` is the dimension in degree ``g``; ``maps[g]`` is the matrix of
    the differential from degree ``g`` to the successor degree ``succ(g)``
    (``g + 1``, reduced mod 2 for ``Z/2``).
    """

    dims: Dict[int, int]
    maps: Dict[int, SparseMatrix]
    F: Field = QQ
    modulus: int = 0  # 2 for Z/2-graded complexes
    labels: Dict[int, list] = dc_field(default_factory=dict)

    def succ(self, g: int) -> int:
        return (g + 1) % 2 if self.modulus == 2 else g + 1

    def pred(self, g: int) -> int:
        return (g - 1) % 2 if self.modulus == 2 else g - 1

    def degrees(self) -> List[int]:
        return sorted(g for g, n in self.dims.items() if n)

    def differential(self, g: int) -> SparseMatrix:
        if g in self.maps:
            return self.maps[g]
        return SparseMatrix.zero(self.dims.get(self.succ(g), 0), self.dims.get(g, 0), self.F)

    def check_square_zero(self) -> bool:
        for g in self.dims:
            a = self.differential(g)
            b = self.differential(self.succ(g))
            if not (b @ a).is_zero():
                return False
        return True

    def total_dim(self) -> int:
        return sum(self.dims.values())


def homology_dims(c: FiniteComplex, check: bool = True) -> Dict[int, int]:
    """Dimension of ker/im in every degree carrying a nonzero component."""
    if check and not c.check_square_zero():
        raise LinearAlgebraError("differential does not square to zero")
    ranks = {g: rank(c.differential(g)) for g in c.dims}
    out = {}
    for g, n in c.dims.items():
        if not n:
            continue
        out[g] = n - ranks[g] - ranks.get(c.pred(g), 0)
    return out


def euler_characteristic(dims: Dict[int, int]) -> int:
    return sum(n if g % 2 == 0 else -n for g, n in dims.items())
