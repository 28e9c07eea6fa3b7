import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nahmlab import cohomology as coh
from nahmlab.dolbeault import DenseFrame
from nahmlab.lattice import (CurvatureError, constant_flux_field, direct_sum, poincare_twist,
                             trivial_field, wilson_loops)
from nahmlab.oracle import oracle_transform_curvature
from nahmlab.pipeline import _triple
from nahmlab.transform import (BerryBundle, NotIT1Error, ResolutionError, SingularOverlapError,
                               abelian_flux_bundle, algebra_and_commutant, berry_curvature,
                               berry_links, double_transform_check, irreducibility_test,
                               links_irreducibility, pauli_pair_bundle, round_invariants,
                               transform_asd_residual, transform_bundle, transform_invariants)


def coh_prediction(k):
    ch = coh.chern_character(1, coh.two_form_class([k, 0, 0, 0, 0, -k]), -k * k)
    return _triple(coh.fm_transform_coh(ch))


@pytest.fixture(scope="module")
def b1():
    return transform_bundle(constant_flux_field(8, 1), 6)


@pytest.fixture(scope="module")
def b2():
    return transform_bundle(constant_flux_field(6, 2), 4)


def test_rank_one_links_are_unit_phases(b1):
    assert b1.r == 1 and b1.M == 6
    assert np.allclose(np.abs(b1.links), 1, atol=1e-12)
    assert b1.index_report.rank == 1


def test_curvature_matches_expected(b1):
    F = berry_curvature(b1)
    want = oracle_transform_curvature(1)
    got = F.c.reshape(6, -1).mean(axis=1)
    assert np.abs(got - want.c).max() <= 0.1 * np.abs(want.c).max()
    assert transform_asd_residual(b1) < 0.1


def test_invariants_match_cohomology(b1, b2):
    assert transform_invariants(b1) == coh_prediction(1) == (1, (-1, 0, 0, 0, 0, 1), -1)
    assert transform_invariants(b2) == coh_prediction(2) == (4, (-2, 0, 0, 0, 0, 2), -1)


def test_twisting_input_translates_dual_bundle(b1):
    """Twisting by zeta shifts the dual torus, so curvature invariants are unchanged."""
    b = transform_bundle(poincare_twist(constant_flux_field(8, 1), [0.25, 0.5, 0, 0.75]), 6)
    assert transform_invariants(b) == transform_invariants(b1)
    assert abs(transform_asd_residual(b) - transform_asd_residual(b1)) < 1e-3


def test_direct_sum_is_additive_and_reducible():
    a = constant_flux_field(6, 1)
    f = direct_sum([a, poincare_twist(a, [0.5, 0, 0, 0])])
    b = transform_bundle(f, 4)
    r, c1, ch2 = transform_invariants(b)
    r1, c11, ch21 = coh_prediction(1)
    assert (r, c1, ch2) == (2 * r1, tuple(2 * v for v in c11), 2 * ch21)
    verdict, dim, comm = irreducibility_test(b)
    assert verdict == "reducible" and comm == 2


def test_irreducible_cases(b1, b2):
    assert tuple(irreducibility_test(b1)) == ("irreducible", 1, 1)
    assert tuple(irreducibility_test(b2)) == ("irreducible", 16, 1)
    assert tuple(irreducibility_test(pauli_pair_bundle(4))) == ("irreducible", 4, 1)


def test_pauli_bundle_is_not_asd():
    F = berry_curvature(pauli_pair_bundle(4))
    # F13, F14, F23 vanish; F24 is the commutator of the two twisted links,
    # and each dual pair has one nonzero member, so the residual is 1/sqrt 2
    assert abs(transform_asd_residual(pauli_pair_bundle(4)) - 1 / np.sqrt(2)) < 1e-12
    assert np.abs(F.c[[1, 2, 3]]).max() < 1e-12
    assert np.abs(F.c[4]).max() > 1


def test_indeterminate_rank():
    g = np.diag([1.0, 1.0 + 3e-6]).astype(complex)
    dim, comm, amb = algebra_and_commutant([g], 2)
    assert amb
    assert links_irreducibility(np.broadcast_to(g, (4, 2, 2, 2, 2, 2, 2)).copy()).verdict in (
        "indeterminate", "reducible")


def test_errors():
    with pytest.raises(NotIT1Error):
        transform_bundle(trivial_field(4), 2)
    with pytest.raises(SingularOverlapError):
        transform_bundle(constant_flux_field(6, 1), 4, min_overlap_sv=0.999)
    with pytest.raises(CurvatureError, match="dual grid too coarse"):
        berry_curvature(abelian_flux_bundle(2, {(1, 2): 2}))
    with pytest.raises(ResolutionError, match="resolution insufficient"):
        round_invariants(1, [0.5, 0, 0, 0, 0, 0], 0.0)
    with pytest.raises(ValueError):
        BerryBundle(np.full((4, 2, 2, 2, 2, 1, 1), 2.0 + 0j))


def test_berry_links_gauge_independent_curvature():
    """Rephasing frames changes links but not curvature."""
    b = transform_bundle(constant_flux_field(6, 1), 4)
    rng = np.random.default_rng(0)
    frames = [DenseFrame(fr.dense() * np.exp(2j * np.pi * rng.random()), fr.N, fr.n, fr.xi)
              for fr in b.frames]
    links = berry_links(frames, 4)
    assert not np.allclose(links, b.links)
    F0, F1 = berry_curvature(b).c, berry_curvature(BerryBundle(links)).c
    assert np.abs(F0 - F1).max() < 1e-10


def test_double_transform_recovers_field_and_twist():
    N = M = 8
    base = constant_flux_field(N, 1)
    f = poincare_twist(base, [0.25, 0, 0, 0])
    rep = double_transform_check(f, M, reference=base)
    assert rep.invariants_equal and rep.wilson_ok and not rep.theorem_violation
    assert rep.wilson_max_error < 1e-6
    assert abs(rep.recovered_twist[0] - 1j) < 1e-6
    assert all(abs(z - 1) < 1e-6 for z in rep.recovered_twist[1:])


def test_double_transform_flags_violation():
    f = constant_flux_field(4, 1)
    flat = BerryBundle(trivial_field(3).links)
    rep = double_transform_check(f, 3, first=flat)
    assert rep.theorem_violation and not rep.it1_second and rep.double is None


@settings(max_examples=4)
@given(st.tuples(*[st.sampled_from([0.0, 0.25, 0.5, 0.75])] * 4))
def test_reducible_output_implies_reducible_input(zeta):
    a = constant_flux_field(6, 1)
    f = direct_sum([a, poincare_twist(a, zeta)]) if any(zeta) else a
    verdict_in = links_irreducibility(f.links).verdict
    verdict_out = irreducibility_test(transform_bundle(f, 4)).verdict
    if verdict_out == "reducible":
        assert verdict_in == "reducible"
    assert verdict_out == verdict_in
