"""Lattice laboratory for the Nahm / Fourier-Mukai transform on the four-torus."""

from .cohomology import (CohClass, chern_character, euler_characteristic, fm_inverse_coh,
                         fm_transform_coh, poincare_class, pushforward_to_Y, wedge)
from .dolbeault import (DolbeaultOps, SpectralReport, assemble, classify_IT1, laplacian,
                        smallest_eigenpairs, zero_mode_frame)
from .geometry import TorusSpec, TwoForm, sd_asd_split
from .k3 import K3Class, MukaiVector, check_paper_conditions, moduli_dimension, mukai_pairing
from .lattice import (LinkField, asd_residual, constant_flux_field, direct_sum,
                      plaquette_curvature, poincare_twist, random_gauge_transform,
                      trivial_field, wilson_loop)
from .oracle import landau_zero_modes, oracle_gap, oracle_transform_curvature
from .transform import (BerryBundle, berry_curvature, double_transform_check,
                        irreducibility_test, transform_asd_residual, transform_bundle,
                        transform_invariants)

__version__ = "0.1.0"
