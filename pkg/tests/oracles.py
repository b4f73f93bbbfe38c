"""Independent reference implementations used by the tests.

Everything here is written from the textbook formulas with dense tensors and
names of basis elements; nothing is imported from ``cdgkit`` except for
the final comparison done by the tests themselves.
"""

from fractions import Fraction
from itertools import product

import sympy


class Algebra:
    """Finite-dimensional graded algebra given by a multiplication table on
    named basis elements (missing products are zero)."""

    def __init__(self, names, degrees, mult, diff=None, mod2=True):
        self.names = list(names)
        self.deg = dict(zip(names, degrees))
        self.mult = mult
        self.diff = diff or {}
        self.mod2 = mod2

    def par(self, a):
        return self.deg[a] % 2

    def mul(self, a, b):
        if a == "1":
            return {b: 1}
        if b == "1":
            return {a: 1}
        return self.mult.get((a, b), {})


EXTERIOR = Algebra(["1", "x"], [0, 1], {})
DUAL = Algebra(["1", "e"], [0, 0], {})
KOSZUL = Algebra(["1", "x", "e", "xe"], [0, 1, 0, 1],
                 {("x", "e"): {"xe": 1}, ("e", "x"): {"xe": 1}}, diff={"x": {"e": 1}})


def _m2():
    names = [f"E{i}{j}" for i in (1, 2) for j in (1, 2)]
    mult = {}
    for i, j, k in product((1, 2), repeat=3):
        mult[(f"E{i}{j}", f"E{j}{k}")] = {f"E{i}{k}": 1}

    class M2(Algebra):
        def mul(self, a, b):
            return self.mult.get((a, b), {})
    return M2(names, [0, 0, 0, 0], mult)


MATRIX2 = _m2()


def _add(out, key, c):
    v = out.get(key, 0) + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


def hochschild_b(A: Algebra, n: int):
    """Classical Hochschild boundary ``C_n -> C_{n-1}`` of ``A`` with
    coefficients in itself; ``C_n = A (x) A^{(x) n}``.

    b(a0|a1..an) = sum_{i<n} (-1)^i a0|..|a_i a_{i+1}|..
                   + (-1)^{n + |an|(|a0|+..+|a_{n-1}|)} an a0|a1..a_{n-1}
    Returns ``{source tuple: {target tuple: coefficient}}``.
    """
    out = {}
    for t in product(A.names, repeat=n + 1):
        col = {}
        for i in range(n):
            for c, k in [(v, key) for key, v in A.mul(t[i], t[i + 1]).items()]:
                _add(col, t[:i] + (k,) + t[i + 2:], (-1) ** i * c)
        e = n + A.par(t[n]) * sum(A.par(a) for a in t[:n])
        for k, c in A.mul(t[n], t[0]).items():
            _add(col, (k,) + t[1:n], (-1) ** e * c)
        out[t] = col
    return out


def hochschild_d(A: Algebra, n: int):
    """Internal differential on ``C_n`` (Leibniz with Koszul signs), times
    ``(-1)^n`` so that it anticommutes with ``b``."""
    out = {}
    for t in product(A.names, repeat=n + 1):
        col = {}
        acc = 0
        for i, a in enumerate(t):
            for k, c in A.diff.get(a, {}).items():
                _add(col, t[:i] + (k,) + t[i + 1:], (-1) ** (n + acc) * c)
            acc += A.par(a)
        out[t] = col
    return out


def compose(f, g):
    """``f o g`` for column dictionaries."""
    out = {}
    for s, col in g.items():
        res = {}
        for mid, c in col.items():
            for t, c2 in f.get(mid, {}).items():
                _add(res, t, c * c2)
        out[s] = res
    return out


def add_maps(f, g):
    out = {s: dict(c) for s, c in f.items()}
    for s, col in g.items():
        tgt = out.setdefault(s, {})
        for t, c in col.items():
            _add(tgt, t, c)
    return out


def is_zero_map(f):
    return all(not col for col in f.values())


# --------------------------------------------------------------------------
# reduced bar construction for Tor^A(k, k)


def reduced_bar_tor(A: Algebra, augmentation_ideal, top: int):
    """``dim Tor_n^A(k, k)`` for ``n <= top`` from the reduced bar complex
    ``Abar^{(x) n}`` with ``b[a1|..|an] = sum_i (-1)^i [a1|..|a_i a_{i+1}|..|an]``
    (end terms vanish since ``Abar`` acts by zero on ``k``).  Requires ``d = 0``."""
    bars = list(augmentation_ideal)
    idx = {}
    for n in range(top + 2):
        idx[n] = {t: j for j, t in enumerate(product(bars, repeat=n))}

    def matrix(n):
        rows, cols = len(idx[n - 1]), len(idx[n])
        M = sympy.zeros(rows, cols)
        for t, j in idx[n].items():
            for i in range(n - 1):
                for k, c in A.mul(t[i], t[i + 1]).items():
                    if k not in bars:
                        raise ValueError("augmentation ideal not closed under products")
                    M[idx[n - 1][t[:i] + (k,) + t[i + 2:]], j] += (-1) ** i * Fraction(c)
        return M

    rk = {n: (matrix(n).rank() if n >= 1 and len(idx[n]) and len(idx[n - 1]) else 0)
          for n in range(top + 2)}
    return {n: len(idx[n]) - rk[n] - rk[n + 1] for n in range(top + 1)}
