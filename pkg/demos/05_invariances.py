"""Invariance checks: curvature shifts, grading change, δ-acyclicity.

Adding a central constant c to the curvature leaves B ⊗ B^op unchanged,
so second-kind Hochschild homology cannot see it.  Pushing a Z-grading to
Z/2 commutes with building the Hochschild bicomplex.  On a curved point
the δ-columns of the bar bicomplex are exact.
"""

from cdgkit import catalog
from cdgkit.cdgmod import Module
from cdgkit.engines import curvature_shift_check, delta_acyclicity_probe, pushforward_compat_check
from cdgkit.exactla import QQ, Field
from cdgkit.grading import Z, Z2

for make in (catalog.point, catalog.matrix2):
    for c in (1, -1, 2):
        cmp = curvature_shift_check(make(), c)
        print(f"{make.__name__:8s} c={c:2d}:", cmp.verdict(), "tensor identity", cmp.extra["tensor_identity"])

out = pushforward_compat_check(catalog.upper_triangular(grading=Z), Z2, T=3)
print("Z -> Z/2 on upper triangular:", {k: out[k] for k in ("bicomplex_homology", "tables_equal", "ok")})


def on(B, M):
    return Module(B, M.side, [(e.name, e.obj, e.degree) for e in M.basis], M.action, M.diff)


for F, c in ((QQ, 1), (Field(7), 3)):
    B = catalog.point(c, F=F)
    N = on(B, catalog.curved_point_module(c, F, "right"))
    M = on(B, catalog.curved_point_module(c, F, "left"))
    out = delta_acyclicity_probe(B, N, M, 6)
    print(f"δ-probe over {F.name}, c={c}:", out["exact"])
