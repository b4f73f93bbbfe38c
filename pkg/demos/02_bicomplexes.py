"""Bar, cobar and Hochschild bicomplexes with three differentials.

Every curved bicomplex carries ∂ (bar-type, lowers the weight), d (internal)
and δ (curvature insertion, raises the weight).  Their sum squares to zero
because five weightwise identities hold; we check them on a few random
CDG-algebras and look at δ on the curved point.
"""

from cdgkit import catalog
from cdgkit.complexes import bar_bicomplex, cobar_bicomplex, totalize
from cdgkit.exactla import QQ, homology_dims
from cdgkit.suites import bicomplex_identities

N = catalog.curved_point_module(1, QQ, "right")
M = catalog.curved_point_module(1, QQ, "left")
bc = bar_bicomplex(N, N.base, M, 4)
print("bar bicomplex dims by weight:", {i: bc.dim(i) for i in bc.levels()})
print("δ at weight 0 (n ⊗ m -> n ⊗ h ⊗ m):")
print(bc.delta[0].to_dense())
print("identities:", bc.check_identities())

tot = totalize(cobar_bicomplex(M, M.base, M, 0))
print("cobar total complex at T=0:", tot.complex.dims, "homology", homology_dims(tot.complex))

res = bicomplex_identities(seed=0, cases=5, T=4)
print(res.summary())
