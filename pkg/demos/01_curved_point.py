"""The curved point (k, 0, 1): second kind sees k, first kind sees nothing.

The one-object CDG-ring with B = k, d = 0 and curvature h = 1 has no
ordinary modules, but it does have CDG-modules (two-periodic "matrix
factorizations" of the constant 1).  Its Hochschild (co)homology of the
second kind is one-dimensional, while the DG-category C of its free CDG-modules
has vanishing Hochschild homology of the first kind.
"""

from cdgkit import catalog
from cdgkit.engines import compare_hh_B_vs_C, hh_first_kind, hh_second_kind
from cdgkit.exactla import Field
from cdgkit.io import Workspace

B = catalog.counterexample()
print("B:", B.name, "dim", B.dim, "curvature", B.h(catalog.PT))

for F in (B.F, Field(5)):
    Bf = catalog.counterexample(F)
    for variant in ("homology", "cohomology"):
        rep = hh_second_kind(Bf, variant=variant)
        print(f"HH^II {variant:10s} over {F.name:5s}:", rep.table, rep.method_label())

# C = End of the free rank-one CDG-module: an honest DG-algebra
ws = Workspace()
C = ws.category("endalgebra")
rep = hh_first_kind(C, T=3)
print("HH of the first kind of C:", rep.table, rep.method_label())

# ... but the second kind is invariant under passing from B to C
cmp = compare_hh_B_vs_C(B, [ws.module("free1")], ["free1"])
print("B vs C:", cmp.verdict())
