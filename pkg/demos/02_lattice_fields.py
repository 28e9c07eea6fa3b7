"""
Constant-flux link fields
=========================

Build abelian and rank-two fields on a small lattice, read off their
curvature and invariants, and check gauge invariance.
"""

import numpy as np

from nahmlab.lattice import (asd_residual, constant_flux_field, direct_sum, field_invariants,
                             plaquette_curvature, poincare_twist, random_gauge_transform,
                             wilson_loop)

f = constant_flux_field(6, k=1)
F = plaquette_curvature(f)
# F12 = 2 pi, F34 = -2 pi, everything else zero
print(np.round(F.c.reshape(6, -1).mean(axis=1), 6))
print("ASD residual", asd_residual(f))
print("invariants", field_invariants(f))

# twisting by a flat line bundle only changes holonomy
g = poincare_twist(f, [0.25, 0, 0, 0])
print("W1 before", wilson_loop(f, 0)[0, 0], "after", wilson_loop(g, 0)[0, 0])

# a rank-two sum, hidden behind a random gauge transformation
h = random_gauge_transform(direct_sum([f, g]), seed=1)
print("rank-two invariants", field_invariants(h))
