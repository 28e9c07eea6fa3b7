"""
The transformed connection
==========================

Collect zero-mode frames over a dual grid and take the Berry connection.
The result is again anti-self-dual, with the exchanged Chern character.
"""

import numpy as np

from nahmlab import cohomology as coh
from nahmlab.lattice import constant_flux_field
from nahmlab.oracle import oracle_transform_curvature
from nahmlab.transform import (berry_curvature, transform_asd_residual, transform_bundle,
                               transform_invariants)

b = transform_bundle(constant_flux_field(8, 1), 6)
F = berry_curvature(b)
print("mean curvature", np.round(F.c.reshape(6, -1).mean(axis=1), 4))
print("continuum    ", np.round(oracle_transform_curvature(1).c, 4))
print("ASD residual", transform_asd_residual(b))

ch = coh.chern_character(1, coh.two_form_class([1, 0, 0, 0, 0, -1]), -1)
print("lattice   ", transform_invariants(b))
r, c1, ch2 = coh.chern_data(coh.fm_transform_coh(ch))
print("cohomology", (int(r), tuple(int(x) for x in c1), int(ch2)))

# k = 2 gives a rank-four bundle
b2 = transform_bundle(constant_flux_field(8, 2), 4)
print("k=2:", transform_invariants(b2))
