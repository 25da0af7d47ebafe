import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from abmotifs.lattice import MotifSpec, build_motif
from abmotifs.liouville import (NumericalInstability, assemble, classify_modes, default_dt,
                                evolve, spectrum, step_halving_check, unvec, validate_density_matrix,
                                vec)
from abmotifs.sectors import enumerate_basis, full_space_operators, sector_model

from conftest import random_density


def lindblad_rhs(H, dissipators, rho):
    out = -1j * (H @ rho - rho @ H)
    for L, rate in dissipators:
        LdL = L.conj().T @ L
        out += rate * (L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL))
    return out


def random_hermitian(d, rng):
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (A + A.conj().T) / 2


@given(d=st.integers(1, 6), batch=st.integers(1, 3), seed=st.integers(0, 10**6))
def test_vec_roundtrip(d, batch, seed):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(batch, d, d)) + 1j * rng.normal(size=(batch, d, d))
    assert np.array_equal(unvec(np.array([vec(m) for m in M]), d), M)
    assert np.array_equal(vec(M[0]), M[0].reshape(-1, order="F"))


@given(seed=st.integers(0, 10**6), d=st.integers(2, 5), n_ops=st.integers(0, 3))
def test_superoperator_matches_direct_action(seed, d, n_ops):
    rng = np.random.default_rng(seed)
    H = random_hermitian(d, rng)
    diss = [(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)), float(rng.uniform(0, 1)))
            for _ in range(n_ops)]
    L = assemble(H, diss)
    rho = random_density(d, rng)
    assert np.allclose(L.apply(rho), lindblad_rhs(H, diss, rho), atol=1e-12)
    # trace preservation: vec(I)^dag L = 0
    assert np.allclose(vec(np.eye(d)).conj() @ L.matrix, 0, atol=1e-12)


def test_spectrum_structure(motif3):
    _, H, diss = sector_model(motif3, 1)
    S = spectrum(assemble(H, diss))
    lam = S.eigenvalues
    assert len(lam) == 49
    assert S.biorthonormality_residual < 1e-9
    assert S.eigen_residual < 1e-9
    assert np.all(lam.real <= 1e-10)
    for x in lam[np.abs(lam.imag) > 1e-9]:
        assert np.min(np.abs(lam - x.conjugate())) < 1e-9
    assert S.kernel_right.shape[1] == 3
    # kernel right modes orthonormal, left kernel contains the identity
    K = S.kernel_right
    assert np.allclose(K.conj().T @ K, np.eye(3), atol=1e-10)
    ident = vec(np.eye(7)) / np.sqrt(7)
    assert np.linalg.norm(S.kernel_left @ (S.kernel_left.conj().T @ ident) - ident) < 1e-10


def test_mode_classification(motif3):
    _, H, diss = sector_model(motif3, 1)
    S = spectrum(assemble(H, diss))
    rep = classify_modes(S)
    assert len(rep.stationary) == 3
    assert len(rep.oscillatory) == 2
    assert np.allclose(np.sort(S.eigenvalues[rep.oscillatory].imag), [-np.sqrt(3), np.sqrt(3)], atol=1e-9)
    assert rep.gap > 0
    assert rep.tau == pytest.approx(np.log(1e3) / rep.gap)
    assert rep.as_dict()["decaying"] == 44


def test_two_magnon_sector_has_no_undamped_oscillation():
    graph = build_motif(MotifSpec(2, g=0.3, gamma=0.1))
    _, H, diss = sector_model(graph, 2)
    rep = classify_modes(spectrum(assemble(H, diss)))
    assert len(rep.oscillatory) == 0
    assert len(rep.stationary) == 2


def test_modes_reconstruct_initial_state(motif3, rng):
    _, H, diss = sector_model(motif3, 1)
    S = spectrum(assemble(H, diss))
    rho0 = random_density(7, rng)
    c = S.coefficients(rho0)
    assert np.allclose(S.right @ c, vec(rho0), atol=1e-10)


@pytest.mark.parametrize("method", ["rk4", "spectral"])
def test_evolution_matches_matrix_exponential(motif3, rng, method):
    _, H, diss = sector_model(motif3, 1)
    L = assemble(H, diss)
    rho0 = random_density(7, rng)
    traj = evolve(H, diss, rho0, t_max=5.0, dt=0.01, method=method, save_every=50)
    assert len(traj) == 11
    for t, rho in zip(traj.times, traj.states):
        exact = unvec(scipy.linalg.expm(L.matrix * t) @ vec(rho0), 7)
        assert np.max(np.abs(rho - exact)) < 1e-9
    traj.check_invariants()


def test_full_space_matches_sector_evolution(rng):
    graph = build_motif(MotifSpec(2, g=0.3, gamma=0.1))
    basis, H, diss = sector_model(graph, 1)
    rho0 = random_density(basis.dim, rng)
    Hf, dissf = full_space_operators(graph)
    full0 = np.zeros((32, 32), dtype=complex)
    full0[np.ix_(basis.states, basis.states)] = rho0
    a = evolve(H, diss, rho0, 3.0, 0.01, save_every=30)
    b = evolve(Hf, dissf, full0, 3.0, 0.01, save_every=30)
    assert np.max(np.abs(b.states[:, basis.states][:, :, basis.states] - a.states)) < 1e-8


def test_step_halving_is_small(motif3, rng):
    _, H, diss = sector_model(motif3, 1)
    dt = default_dt(1.0, 0.5, 0.2)
    assert dt == pytest.approx(0.01)
    assert step_halving_check(H, diss, random_density(7, rng), dt, 2.0) < 1e-8


def test_instability_is_detected(motif3, rng):
    _, H, diss = sector_model(motif3, 1)
    with pytest.raises(NumericalInstability):
        evolve(H, diss, random_density(7, rng), t_max=200.0, dt=5.0)


def test_invariant_check_flags_corrupted_trajectory(motif3, rng):
    _, H, diss = sector_model(motif3, 1)
    traj = evolve(H, diss, random_density(7, rng), 1.0, 0.1)
    traj.trace_error[3] = 1e-3
    with pytest.raises(NumericalInstability):
        traj.check_invariants()


def test_empty_trajectory_and_bad_inputs(motif3):
    _, H, diss = sector_model(motif3, 1)
    rho = np.eye(7) / 7
    assert len(evolve(H, diss, rho, 0.0, 0.1)) == 1
    with pytest.raises(ValueError):
        evolve(H, diss, rho, 1.0, 0.1, method="euler")
    with pytest.raises(ValueError):
        validate_density_matrix(np.eye(7), 7)
    with pytest.raises(ValueError):
        validate_density_matrix(np.eye(6) / 6, 7)
    bad = np.diag([1.5, -0.5, 0, 0, 0, 0, 0]).astype(complex)
    with pytest.raises(ValueError):
        validate_density_matrix(bad, 7)


def test_spectrum_size_guard():
    class Fake:
        dim = 150
        matrix = np.zeros((150 * 150, 0))

    with pytest.raises(ValueError, match="dense limit"):
        spectrum(Fake())


def test_two_magnon_basis_dimension():
    assert enumerate_basis(5, 2).dim == 10
