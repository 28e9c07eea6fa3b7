import numpy as np
import pytest
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from nahmlab.dolbeault import (DEFAULT_REGULATOR, ClusterError, DenseFrame, GenericSolver,
                               KronSolver, SolverError, assemble, classify_IT1, laplacian,
                               make_solver, separable_planes, smallest_eigenpairs,
                               zero_mode_frame)
from nahmlab import cohomology as coh
from nahmlab.lattice import (constant_flux_field, direct_sum, poincare_twist,
                             random_gauge_transform, trivial_field)
from nahmlab.oracle import landau_overlap

R = DEFAULT_REGULATOR


def plane_wave_lambda(N, p):
    """Delta^0 eigenvalue of exp(i p x1 N) on the trivial field, from the symbols
    dbar_1 -> (i/2) N sin p and W_12 -> r N (1 - cos p)."""
    return (N ** 2 / 4) * np.sin(p) ** 2 + (R * N * (1 - np.cos(p))) ** 2


def test_dimensions():
    ops = assemble(trivial_field(3, 2))
    d = 3 ** 4 * 2
    assert ops.D0.shape == (2 * d, d) and ops.D1.shape == (d, 2 * d)
    assert ops.dims == (d, 2 * d, d)
    for q in range(3):
        L = laplacian(ops, q)
        assert abs(L - L.conj().T).max() < 1e-12


@pytest.mark.parametrize("f", [trivial_field(4), poincare_twist(trivial_field(4), [0.3, 0.1, 0.2, 0.9]),
                               constant_flux_field(4, 1), constant_flux_field(5, 2)])
def test_complex_property_exact_for_flat_and_separable(f):
    ops = assemble(f)
    assert abs(ops.D1 @ ops.D0).max() < 1e-12


def test_complex_property_decays_on_smooth_modes():
    vals = []
    for N in (4, 8):
        f = constant_flux_field(N, fluxes={(1, 3): 1, (2, 4): 1})
        ops = assemble(f)
        _, v = spla.eigsh(laplacian(ops, 0), k=1, sigma=-1.0, which="LM")
        vals.append(np.linalg.norm(ops.D1 @ (ops.D0 @ v)))
        assert vals[-1] <= 1.0 / N
    assert vals[1] < vals[0] / 2


def test_constant_section_in_kernel():
    ops = assemble(trivial_field(4, 2))
    psi = np.tile([1.0, 2.0], 4 ** 4)
    assert np.abs(ops.D0 @ psi).max() < 1e-12


@pytest.mark.parametrize("N", [4, 6])
def test_plane_wave_is_exact_eigenvector(N):
    L = laplacian(assemble(trivial_field(N)), 0)
    x1 = np.indices((N,) * 4)[0].ravel() / N
    psi = np.exp(2j * np.pi * x1)
    lam = plane_wave_lambda(N, 2 * np.pi / N)
    assert np.abs(L @ psi - lam * psi).max() < 1e-10
    # recorded value for the record: N=4 gives N^2/4 + r^2 N^2
    if N == 4:
        assert np.isclose(lam, 4 + 0.04 * 16)


def test_half_twist_removes_constants():
    N = 4
    ops = assemble(poincare_twist(trivial_field(N), [0.5, 0, 0, 0]))
    assert np.linalg.norm(ops.D0 @ np.ones(N ** 4)) > 0.1
    lam_min = smallest_eigenpairs(laplacian(ops, 0), 1)[0][0]
    # lowest twisted plane wave has momentum +-pi/N
    assert np.isclose(lam_min, plane_wave_lambda(N, np.pi / N))


@pytest.mark.parametrize("n", [1, 2])
def test_trivial_kernels(n):
    ops = assemble(trivial_field(3, n))
    k0 = np.sum(smallest_eigenpairs(laplacian(ops, 0), n + 1)[0] < 1e-8)
    k1 = np.sum(smallest_eigenpairs(laplacian(ops, 1), 2 * n + 1)[0] < 1e-8)
    assert (k0, k1) == (n, 2 * n)


@pytest.mark.parametrize("k", [1, -1, 2])
def test_no_holomorphic_sections_with_flux(k):
    f = constant_flux_field(6, k)
    for xi in [(0, 0, 0, 0), (0.3, 0.7, 0.1, 0.5)]:
        lam = smallest_eigenpairs(laplacian(assemble(poincare_twist(f, xi)), 0), 1)[0][0]
        assert lam > 1.0


def test_smallest_eigenpairs_contract():
    A = sp.diags(np.arange(50.0)).tocsr()
    w, v = smallest_eigenpairs(A, 2)
    assert np.allclose(w, [0, 1])
    L = laplacian(assemble(trivial_field(4)), 0)
    assert abs(smallest_eigenpairs(L, 1)[0][0]) < 1e-9
    w, v = smallest_eigenpairs(L, 2)
    # p = pi is the regulated doubler, lighter than p = pi/2 at N=4
    assert np.isclose(w[1], min(plane_wave_lambda(4, p) for p in (np.pi / 2, np.pi)))
    assert np.abs(v.conj().T @ v - np.eye(2)).max() < 1e-10
    with pytest.raises(ValueError):
        smallest_eigenpairs(A, 0)


def test_iterative_path_matches_dense_and_is_deterministic():
    L = laplacian(assemble(poincare_twist(constant_flux_field(4, 1), [0.1, 0.2, 0.3, 0.4])), 1)
    wd, vd = smallest_eigenpairs(L, 3)
    wi, vi = smallest_eigenpairs(L, 3, tol=1e-8, dense_max=10, seed=5)
    wj, vj = smallest_eigenpairs(L, 3, tol=1e-8, dense_max=10, seed=5)
    assert np.allclose(wd, wi, atol=1e-6)
    assert np.array_equal(wi, wj) and np.array_equal(vi, vj)
    assert np.abs(vi.conj().T @ vi - np.eye(3)).max() < 1e-10
    assert abs(abs(vd[:, 0].conj() @ vi[:, 0]) - 1) < 1e-6


def test_solver_failure_names_xi_and_degree():
    L = laplacian(assemble(constant_flux_field(4, 1)), 1)
    with pytest.raises(SolverError, match=r"xi=\(0\.5, 0\.0, 0\.0, 0\.0\), degree=1"):
        smallest_eigenpairs(L, 2, tol=1e-14, dense_max=10, maxiter=2, xi=(0.5, 0, 0, 0), degree=1)


def test_trivial_bundle_not_it1():
    rep = classify_IT1(trivial_field(4), 2)
    assert not rep.it1
    assert (0.0, 0.0, 0.0, 0.0) in rep.failure_set


@pytest.mark.parametrize("N,k", [(6, 1), (8, 2)])
def test_constant_flux_is_it1_with_rank_minus_chi(N, k):
    rep = classify_IT1(constant_flux_field(N, k), 2)
    ch = coh.chern_character(1, coh.two_form_class([k, 0, 0, 0, 0, -k]), -k * k)
    assert rep.it1 and rep.rank == k * k == -coh.euler_characteristic(ch)
    assert rep.min_gap_ratio >= 50


def test_ambiguous_cluster_is_indeterminate():
    rep = classify_IT1(constant_flux_field(4, 1), 2, rho_gap=1e6)
    assert not rep.it1 and len(rep.indeterminate_set) == 16 and not rep.failure_set


def test_kron_matches_generic():
    a = constant_flux_field(4, 1)
    f = direct_sum([a, poincare_twist(a, [0.5, 0.25, 0, 0])])
    ks, gs = KronSolver(f), GenericSolver(f)
    for xi in [(0, 0, 0, 0), (0.25, 0.5, 0.75, 0.0)]:
        s1, s2 = ks.solve(xi, 6, 2), gs.solve(xi, 6, 2)
        for a1, a2 in ((s1.eig0, s2.eig0), (s1.eig1, s2.eig1), (s1.eig2, s2.eig2)):
            assert np.allclose(a1, a2, atol=1e-10)
        P1 = s1.frame.dense() @ s1.frame.dense().conj().T
        P2 = s2.frame.dense() @ s2.frame.dense().conj().T
        assert np.abs(P1 - P2).max() < 1e-10
        assert np.allclose(s1.frame.inner(s1.frame), s1.frame.dense().conj().T @ s1.frame.dense())


def test_separability_detection():
    f = constant_flux_field(4, 1)
    assert separable_planes(f) is not None
    assert separable_planes(random_gauge_transform(f, 1)) is None
    assert separable_planes(constant_flux_field(4, fluxes={(1, 3): 1})) is None
    assert isinstance(make_solver(random_gauge_transform(f, 1)), GenericSolver)
    with pytest.raises(ValueError):
        make_solver(random_gauge_transform(f, 1), mode="kron")


def test_zero_mode_frame_properties():
    fr = zero_mode_frame(constant_flux_field(6, 1), (0, 0, 0, 0), 1)
    v = fr.dense()
    assert v.shape == (2 * 6 ** 4, 1) and abs(np.linalg.norm(v) - 1) < 1e-12
    fr4 = zero_mode_frame(constant_flux_field(6, 2), (0.1, 0.2, 0.3, 0.4), 4)
    assert np.abs(fr4.inner(fr4) - np.eye(4)).max() < 1e-10
    with pytest.raises(ClusterError):
        zero_mode_frame(constant_flux_field(6, 1), (0, 0, 0, 0), 2)


def test_frame_phase_is_deterministic():
    f = constant_flux_field(4, 1)
    a = zero_mode_frame(f, (0.1, 0, 0, 0), 1, solver="generic").dense()
    b = zero_mode_frame(f, (0.1, 0, 0, 0), 1, solver="generic").dense()
    assert np.array_equal(a, b)
    p = np.argmax(np.abs(a[:, 0]))
    assert abs(a[p, 0].imag) < 1e-14 and a[p, 0].real > 0


def test_frame_continuity_matches_landau_overlap():
    f = constant_flux_field(8, 1)
    base = zero_mode_frame(f, (0, 0, 0, 0), 1)
    prev = 0
    for d in (0.2, 0.1, 0.05, 0.01):
        other = zero_mode_frame(f, (d, 0, 0, 0), 1)
        ov = abs(base.inner(other)[0, 0])
        assert abs(ov - landau_overlap([d, 0, 0, 0])) < 5e-3
        assert ov > prev
        prev = ov
    assert prev > 0.999


def test_zero_mode_eigenvalues_gauge_covariant():
    f = constant_flux_field(4, 1)
    g = random_gauge_transform(f, 3)
    xi = (0.2, 0.4, 0.6, 0.8)
    a = GenericSolver(f).solve(xi, 4)
    b = GenericSolver(g).solve(xi, 4)
    assert np.abs(a.eig1 - b.eig1).max() < 1e-9
    assert np.abs(a.eig0 - b.eig0).max() < 1e-9
