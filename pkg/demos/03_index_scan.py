"""
Zero modes across the dual torus
================================

The twisted Dolbeault complex has cohomology only in degree one for
constant flux, with rank k^2.  The flat trivial bundle fails at xi = 0.
"""

from nahmlab.dolbeault import KronSolver, classify_IT1
from nahmlab.lattice import constant_flux_field, trivial_field
from nahmlab.oracle import oracle_gap

for k in (1, 2):
    rep = classify_IT1(constant_flux_field(6, k), 4)
    print(f"k={k}: IT1={rep.it1} rank={rep.rank} worst gap ratio={rep.min_gap_ratio:.1f}")

rep = classify_IT1(trivial_field(6), 2)
print("trivial bundle: IT1 =", rep.it1, "failures at", rep.failure_set[:3], "...")

# spectrum of Delta^1 at xi = 0 against the continuum ladder
sol = KronSolver(constant_flux_field(8, 1)).solve((0, 0, 0, 0), 4, 1)
print("lowest Delta^1 eigenvalues", sol.eig1.round(4), "continuum gap", round(oracle_gap(1), 4))
