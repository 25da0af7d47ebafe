import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from abmotifs import MotifSpec, build_motif

settings.register_profile("default", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# filled by tests/test_acceptance.py, printed at the end of the session
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def motif3():
    return build_motif(MotifSpec(3, h=1.0, g=0.5, gamma=0.2))


def random_density(d, rng, rank=None):
    G = rng.normal(size=(d, rank or d)) + 1j * rng.normal(size=(d, rank or d))
    rho = G @ G.conj().T
    return rho / np.trace(rho)


ACCEPTANCE_EPS_TR = 1e-8


def motif_run(n, g, gamma, seed, h=1.0, t_extra=None, dt=0.05, eps_tr=ACCEPTANCE_EPS_TR,
              rho0=None):
    """Spectral-method run of a single motif from a seeded random pure state.

    Returns a dict with the model, spectral data, mode report and trajectory.
    The run covers ``[0, 2 tau + t_extra]``; ``t_extra`` defaults to 20 periods.
    """
    from abmotifs.liouville import assemble, classify_modes, evolve, spectrum
    from abmotifs.scenario import random_state
    from abmotifs.sectors import sector_model

    graph = build_motif(MotifSpec(n, h=h, g=g, gamma=gamma))
    basis, H, diss = sector_model(graph, 1)
    L = assemble(H, diss)
    S = spectrum(L)
    modes = classify_modes(S, eps_tr=eps_tr)
    omega = 2 * np.sqrt(n) * g
    if t_extra is None:
        t_extra = 20 * 2 * np.pi / omega
    if rho0 is None:
        rho0 = random_state(basis.dim, seed)
    traj = evolve(H, diss, rho0, 2 * modes.tau + t_extra, dt, method="spectral", spectral=S,
                  liouvillian=L)
    return dict(graph=graph, basis=basis, H=H, diss=diss, L=L, S=S, modes=modes, tau=modes.tau,
                rho0=rho0, traj=traj, omega=omega)
