"""
Going back, and splitting
=========================

Transforming twice returns the original field, flat twist included.
Direct sums stay reducible; the detector sees it through loop holonomy.
"""

from nahmlab.lattice import constant_flux_field, direct_sum, poincare_twist
from nahmlab.transform import (double_transform_check, irreducibility_test, pauli_pair_bundle,
                               transform_bundle)

base = constant_flux_field(8, 1)
rep = double_transform_check(poincare_twist(base, [0.25, 0, 0, 0]), 8, reference=base)
print("invariants equal:", rep.invariants_equal, "Wilson error:", rep.wilson_max_error)
print("recovered twist:", rep.recovered_twist[0], "(expect i)")

a = constant_flux_field(6, 1)
f = direct_sum([a, poincare_twist(a, [0.5, 0, 0, 0])])
print("direct sum:", tuple(irreducibility_test(transform_bundle(f, 4))))
print("Pauli pair:", tuple(irreducibility_test(pauli_pair_bundle(4))))
