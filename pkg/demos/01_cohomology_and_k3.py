"""
Chern characters under the transform
====================================

Exact rational arithmetic on the cohomology of the four-torus, then the
K3 lattice numbers for the rank-two example.
"""

from fractions import Fraction

from nahmlab import cohomology as coh
from nahmlab.k3 import K3Class, MukaiVector, check_paper_conditions, moduli_dimension

# constant flux k in the 12 plane and -k in the 34 plane, ch2 = -k^2
for k in (1, 2, 3):
    c1 = coh.two_form_class([k, 0, 0, 0, 0, -k])
    ch = coh.chern_character(1, c1, -k * k)
    t = coh.fm_transform_coh(ch)
    r, c1t, ch2 = coh.chern_data(t)
    print(f"k={k}: rank {r}, c1 {[int(x) for x in c1t]}, ch2 {ch2}; chi = {coh.euler_characteristic(ch)}")

# the inverse undoes it on any class, fractional ones too
c = coh.chern_character(2, coh.two_form_class([Fraction(1, 2), 0, 1, 0, 0, 0]), Fraction(3, 4))
assert coh.fm_inverse_coh(coh.fm_transform_coh(c)) == c

# K3: H = e1 + f1, l = 2 e2 - 3 f2
H = K3Class.from_hyperbolic(e1=1, f1=1)
ell = K3Class.from_hyperbolic(e2=2, f2=-3)
print(check_paper_conditions(H, ell))
v = MukaiVector.from_chern(2, ell, -1)
print("Mukai vector", (v.r, v.s), "moduli dimension", moduli_dimension(v))
