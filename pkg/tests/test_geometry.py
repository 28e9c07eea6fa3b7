import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from nahmlab.geometry import PLANES, TorusSpec, TwoForm, asd_fraction, sd_asd_split

finite = st.floats(-1e3, 1e3, allow_nan=False)


def form(**kw):
    return TwoForm.from_planes(**kw)


def test_asd_basis_element_is_pure_asd():
    f = form(p12=1, p34=-1)
    sd, asd = sd_asd_split(f)
    assert np.allclose(sd.c, 0) and np.allclose(asd.c, f.c)


def test_kahler_form_is_pure_sd():
    f = form(p12=1, p34=1)
    sd, asd = sd_asd_split(f)
    assert np.allclose(sd.c, f.c) and np.allclose(asd.c, 0)


def test_single_plane_splits_in_halves():
    sd, asd = sd_asd_split(form(p12=1))
    assert np.allclose(sd.c, 0.5 * form(p12=1, p34=1).c)
    assert np.allclose(asd.c, 0.5 * form(p12=1, p34=-1).c)


def test_split_lands_in_the_stated_spans():
    sd_basis = [form(p12=1, p34=1), form(p13=1, p24=-1), form(p14=1, p23=1)]
    asd_basis = [form(p12=1, p34=-1), form(p13=1, p24=1), form(p14=1, p23=-1)]
    rng = np.random.default_rng(0)
    f = TwoForm(rng.standard_normal(6))
    sd, asd = sd_asd_split(f)
    for basis, part, other in ((sd_basis, sd, asd_basis), (asd_basis, asd, sd_basis)):
        # orthogonal to every element of the other span
        for b in other:
            assert abs(np.dot(part.c, b.c)) < 1e-12


@given(arrays(float, 6, elements=finite))
def test_split_is_idempotent_and_orthogonal(c):
    f = TwoForm(c)
    sd, asd = sd_asd_split(f)
    assert np.allclose((sd + asd).c, f.c)
    sd2, asd2 = sd_asd_split(sd)
    assert np.allclose(sd2.c, sd.c) and np.allclose(asd2.c, 0)
    lhs, rhs = f.norm() ** 2, sd.norm() ** 2 + asd.norm() ** 2
    assert abs(lhs - rhs) <= 1e-12 * max(lhs, 1e-300)


@given(arrays(float, (6, 3, 2, 2), elements=finite), arrays(float, (6, 3, 2, 2), elements=finite))
def test_split_orthogonal_for_matrix_valued_fields(a, b):
    m = a + 1j * b
    m = m + np.conj(np.swapaxes(m, -1, -2))      # hermitian values
    f = TwoForm(m)
    sd, asd = sd_asd_split(f)
    lhs, rhs = f.norm() ** 2, sd.norm() ** 2 + asd.norm() ** 2
    assert abs(lhs - rhs) <= 1e-12 * max(lhs, 1e-300)


def test_antisymmetry_by_construction():
    f = TwoForm(np.arange(1.0, 7.0))
    for mu, nu in PLANES:
        assert f.component(nu, mu) == -f.component(mu, nu)
    assert f.component(2, 2) == 0


def test_asd_fraction_guards_zero():
    assert asd_fraction(TwoForm(np.zeros(6))) == 0


def test_torus_spec_validation():
    assert TorusSpec(2).N == 2
    assert TorusSpec(4, "Y").points().shape == (256, 4)
    with pytest.raises(ValueError):
        TorusSpec(1)
    with pytest.raises(ValueError):
        TorusSpec(4, "Z")
    with pytest.raises(ValueError):
        TwoForm(np.zeros(5))
