"""Second-kind Tor/Ext from finite resolutions, and when they do not exist.

Second-kind derived functors are computed from resolutions by CDG-modules
whose underlying graded modules are projective.  For a separable algebra
the diagonal is already projective (length 0).  For the exterior algebra
the trivial module has no finite resolution and the engine says so.
"""

from cdgkit import catalog
from cdgkit.engines import Unsupported, graded_radical, hh_second_kind, projective_resolution
from cdgkit.io import Workspace

A = catalog.matrix2()
print("radical of M_2(k):", graded_radical(A))
print("HH^II of M_2(k):", hh_second_kind(A).table)

U = catalog.upper_triangular()
print("radical of upper triangular:", graded_radical(U))
print("HH^II_* of upper triangular:", hh_second_kind(U).table)
print("HH^II,* of upper triangular:", hh_second_kind(U, variant="cohomology").table)

k = Workspace().module("k-over-exterior")
res = projective_resolution(k, max_depth=20)
print("k over k[x]/x^2:", res.status(), "term dims", [P.dim for P in res.terms[:6]], "...")
try:
    hh_second_kind(catalog.exterior())
except Unsupported as e:
    print("unsupported:", e)
