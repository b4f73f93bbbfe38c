"""Seeded property suites (used by ``cdgkit check`` and the test-suite)."""

from __future__ import annotations

import copy
import random
import time
from dataclasses import dataclass, field
from typing import Dict, List

from . import catalog
from .cdgcore import compose_functors, opposite, tensor, twist_functor
from .cdgmod import diagonal_bimodule, regular_module, restrict
from .complexes import (attach_module_data, bar_bicomplex, bar_pushforward, blocks_equal,
                        chain_map_defects, cobar_bicomplex, cobar_pullback, compose_blocks,
                        hochschild_bicomplex, hochschild_pullback, hochschild_pushforward,
                        pullback_map, pushforward_map)
from .exactla import QQ, Field


@dataclass
class SuiteResult:
    name: str
    cases: int
    failures: List[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        word = "pass" if self.ok else "FAIL"
        return f"{self.name}: {word} ({self.cases} cases, {len(self.failures)} failures, {self.seconds:.1f}s)"


def bicomplex_identities(seed: int = 0, cases: int = 50, T: int = 5, F: Field = QQ,
                         maxdim: int = 4) -> SuiteResult:
    """The five weightwise identities on bar, cobar and both Hochschild
    bicomplexes of random CDG-rings (levels ``<= T - 1``)."""
    t0 = time.time()
    res = SuiteResult("bicomplex-identities", cases)
    for c in range(cases):
        rc = catalog.random_case(seed + c, F, maxdim)
        B, N, M = rc.ring, rc.right, rc.left
        E = tensor(B, opposite(B))
        D = diagonal_bimodule(B, E, "left")
        builders = {
            "bar": lambda: bar_bicomplex(N, B, M, T),
            "cobar": lambda: cobar_bicomplex(M, B, M, T),
            "hochschild-homology": lambda: hochschild_bicomplex(B, D, "homology", T),
            "hochschild-cohomology": lambda: hochschild_bicomplex(B, D, "cohomology", T),
        }
        for kind, build in builders.items():
            bad = {k: v for k, v in build().check_identities().items() if v}
            if bad:
                res.failures.append(f"seed {seed + c} {kind}: {bad}")
    res.seconds = time.time() - t0
    return res


def _functor_cases(seed: int, F: Field, maxdim: int):
    """A nonstrict twist functor and a strict basis change for one seed."""
    rc = catalog.random_case(seed, F, maxdim, allow_shift=False)
    A = rc.base
    out = [("twist", rc.functor, A)]
    An = catalog.change_basis(A, random.Random(seed + 7919))
    out.append(("basis-change", catalog.basis_change_functor(An, A), A))
    if len(A.objects) == 1:
        out.append(("unit", catalog.unit_functor(A), A))
    return out


def _chain_checks(Fn, A, T) -> Dict[str, list]:
    N = regular_module(A, "right")
    M = regular_module(A, "left")
    D = diagonal_bimodule(A, tensor(A, opposite(A)), "left")
    out = {}
    src, tgt, maps = bar_pushforward(Fn, N, M, T)
    out["bar F_*"] = chain_map_defects(maps, src, tgt, T - 1)
    src, tgt, maps = hochschild_pushforward(Fn, D, T)
    out["hochschild F_*"] = chain_map_defects(maps, src, tgt, T - 1)
    src, tgt, maps = cobar_pullback(Fn, M, M, T)
    out["cobar F^*"] = chain_map_defects(maps, src, tgt, T - 1)
    src, tgt, maps = hochschild_pullback(Fn, D, T)
    out["hochschild F^*"] = chain_map_defects(maps, src, tgt, T - 1)
    return out


def _with_origin(M, origin):
    R = copy.copy(M)
    R.origin = origin
    return R


def composition_check(seed: int, T: int = 4, F: Field = QQ, maxdim: int = 2) -> List[str]:
    """``(G F)_* = G_* F_*`` on bar complexes and ``(G F)^* = F^* G^*`` on
    cobar complexes, for ``F`` a twist and ``G`` a basis change."""
    rng = random.Random(seed)
    A = rng.choice(catalog.base_dg_algebras(F, maxdim))
    An = catalog.change_basis(A, rng)
    G = catalog.basis_change_functor(An, A)
    Fn = twist_functor(An, {catalog.PT: catalog.random_odd_element(An, rng)})
    GF = compose_functors(Fn, G)
    B = Fn.source
    problems = []
    # pushforward on bar complexes
    N, M = regular_module(A, "right"), regular_module(A, "left")
    NG, MG = restrict(G, N), restrict(G, M)
    NFG, MFG = restrict(Fn, NG), restrict(Fn, MG)
    top = attach_module_data(bar_bicomplex(N, A, M, T), N)
    mid = attach_module_data(bar_bicomplex(NG, An, MG, T), NG)
    low = attach_module_data(bar_bicomplex(NFG, B, MFG, T), NFG)
    g_star = pushforward_map(G, mid, top, NG.origin, MG.origin, T)
    f_star = pushforward_map(Fn, low, mid, NFG.origin, MFG.origin, T)
    gf_star = pushforward_map(GF, low, top, [NG.origin[k] for k in NFG.origin],
                              [MG.origin[k] for k in MFG.origin], T)
    if not blocks_equal(compose_blocks(g_star, f_star, T), gf_star):
        problems.append(f"seed {seed}: (GF)_* != G_* F_*")
    # pullback on cobar complexes
    LG = MG
    LFG = MFG
    top = cobar_bicomplex(M, A, M, T)
    mid = cobar_bicomplex(LG, An, MG, T)
    low = cobar_bicomplex(LFG, B, MFG, T)
    g_up = pullback_map(G, top, mid, LG, MG, T)
    f_up = pullback_map(Fn, mid, low, LFG, MFG, T)
    comp_origin = [MG.origin[k] for k in MFG.origin]
    gf_up = pullback_map(GF, top, low, _with_origin(LFG, comp_origin), _with_origin(MFG, comp_origin), T)
    if not blocks_equal(_compose_down(f_up, g_up), gf_up):
        problems.append(f"seed {seed}: (GF)^* != F^* G^*")
    return problems


def _compose_down(second, first):
    """Blockwise ``second o first`` for maps that lower levels (pullbacks)."""
    out = {}
    for (s, v), A in first.items():
        for (v2, u), Bm in second.items():
            if v2 != v:
                continue
            prod = Bm @ A
            out[(s, u)] = out[(s, u)] + prod if (s, u) in out else prod
    return out


def functoriality(seed: int = 0, cases: int = 20, T: int = 6, F: Field = QQ,
                  maxdim: int = 2, compose_T: int = 4) -> SuiteResult:
    """``F_*`` and ``F^*`` are chain maps (strict and twist functors) and
    compose correctly."""
    t0 = time.time()
    res = SuiteResult("functoriality", cases)
    for c in range(cases):
        for kind, Fn, A in _functor_cases(seed + c, F, maxdim):
            for what, bad in _chain_checks(Fn, A, T).items():
                if bad:
                    res.failures.append(f"seed {seed + c} {kind} {what}: defects at {bad[:4]}")
        res.failures.extend(composition_check(seed + c, compose_T, F, maxdim))
    res.seconds = time.time() - t0
    return res


SUITES = {
    "bicomplex-identities": bicomplex_identities,
    "functoriality": functoriality,
}
