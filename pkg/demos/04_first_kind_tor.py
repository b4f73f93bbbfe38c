"""Tor of the first kind from truncated bar bicomplexes.

For A = k[x]/(x^2) with |x| = 1 and no differential, Tor^A(k, k) is
one-dimensional in each homological degree.  The truncated bar pipeline
finds this in the window [0, T - 2] and reports that consecutive truncations
agree; the answer is compared with a reduced bar complex computed by hand.
"""

from cdgkit.engines import tor_first_kind
from cdgkit.io import Workspace

ws = Workspace()
rep = tor_first_kind(ws.module("k-over-exterior-z-right"), ws.module("k-over-exterior-z"), 6)
print(rep)

# reduced bar: one chain [x|...|x] in every degree, and x*x = 0 makes
# every bar differential vanish, so Tor_n = k for all n
print("reduced bar:", {n: 1 for n in range(5)})
