"""Acceptance criteria 1-7.

Each test records one ``PASS``/``FAIL`` line that is printed in the pytest
terminal summary (section "acceptance criteria").  Run only this file with::

    pytest tests/test_acceptance.py

The transient time ``tau = ln(1/eps) / gap`` uses ``eps = 1e-8`` here: the
sync tolerances of 1e-6 and below need the slowest decaying mode to have
shrunk well under that level.
"""
import time
from functools import lru_cache

import numpy as np
import pytest
import scipy.linalg

from abmotifs.lattice import MotifSpec, NetworkSpec, build_motif, build_network
from abmotifs.liouville import assemble, classify_modes, evolve, spectrum
from abmotifs.observables import (concurrence, magnetizations, max_drift, pair_concurrence,
                                  reduce_two_sites, sync_report)
from abmotifs.perturbation import (KINDS, DisorderSpec, decay_rate_scan, perturbative_corrections,
                                   sample_disorder)
from abmotifs.scenario import cross_motif_error, random_state, site_groups
from abmotifs.sectors import enumerate_basis, full_space_operators, sector_model
from abmotifs.theory import (analytic_concurrence, analytic_constants, analytic_magnetization,
                             dark_superposition, find_dark_states, frequency, psi_pm,
                             pure_state_concurrence)

from conftest import ACCEPTANCE_EPS_TR, ACCEPTANCE_LINES, motif_run

SEED = 7
# half the default step: over ~1e5 steps of the closed control run RK4 at
# dt = 0.01 lets the zero eigenvalues of the pure initial state drift to -2e-8
FIG1_DT = 0.005
TRAJECTORIES = {}


def record(number, ok, detail):
    ACCEPTANCE_LINES[number] = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    print(ACCEPTANCE_LINES[number])


def keep(name, traj):
    TRAJECTORIES[name] = traj
    return traj


def invariants_ok(traj):
    return (traj.trace_error.max() < 1e-9 and traj.hermiticity_error.max() < 1e-9
            and traj.min_eigenvalue.min() > -1e-8)


# ---------------------------------------------------------------- criterion 1

def test_criterion_1_spectral_signature():
    start = time.perf_counter()
    checks = []
    for n, g in [(2, 0.3), (3, 0.3), (4, 0.3), (6, 0.3), (3, 0.5)]:
        graph = build_motif(MotifSpec(n, h=1.0, g=g, gamma=0.1))
        _, H, diss = sector_model(graph, 1)
        S = spectrum(assemble(H, diss))
        lam = S.eigenvalues
        undamped = lam[(np.abs(lam.real) < 1e-10) & (np.abs(lam.imag) > 1e-10)]
        pair_ok = (len(undamped) == 2 and abs(undamped.sum()) < 1e-9
                   and np.all(np.abs(np.abs(undamped.imag) - 2 * np.sqrt(n) * g) < 1e-9))
        kernel = S.kernel_right.shape[1]
        checks.append((n, g, pair_ok, kernel))
    elapsed = time.perf_counter() - start
    ok = all(p and k == 3 for _, _, p, k in checks) and elapsed < 10
    record(1, ok, "one undamped pair at +-2 sqrt(n) g and kernel dim 3 for n in {2,3,4,6} "
                  f"({'; '.join(f'n={n} g={g} pair={p} ker={k}' for n, g, p, k in checks)}); "
                  f"{elapsed:.2f} s")
    assert ok


# ---------------------------------------------------------------- criterion 2

@lru_cache(maxsize=None)
def fig1_run(n, gamma):
    graph = build_motif(MotifSpec(n, h=1.0, g=0.3, gamma=gamma))
    basis, H, diss = sector_model(graph, 1)
    ref = build_motif(MotifSpec(n, h=1.0, g=0.3, gamma=0.1))
    _, Hr, dr = sector_model(ref, 1)
    tau = classify_modes(spectrum(assemble(Hr, dr)), eps_tr=ACCEPTANCE_EPS_TR).tau
    omega = frequency(n, 0.3)
    t_max = tau + 30 * 2 * np.pi / omega
    traj = keep(f"fig1 n={n} gamma={gamma}",
                evolve(H, diss, random_state(basis.dim, SEED), t_max, FIG1_DT, save_every=20))
    return graph, basis, traj, tau, omega


def test_criterion_2_fig1_phenomenology():
    parts, ok = [], True
    for n in (2, 4, 6):
        graph, basis, traj, tau, omega = fig1_run(n, 0.1)
        mag = magnetizations(traj.states, basis)
        rep = sync_report(traj.times, mag, site_groups(graph), tau)
        sync = rep.max_sync_error("inner")
        drift = max_drift(traj.times, mag[:, n + 1:], tau)
        ratio = rep.amplitude_ratio("central", "inner")
        dphi = rep.phase_difference("central", "inner")
        freq = rep.frequency / omega
        _, cbasis, ctraj, _, _ = fig1_run(n, 0.0)
        cmag = magnetizations(ctraj.states, cbasis)
        control = float(np.max(np.ptp(cmag[ctraj.times >= tau][:, 1:n + 1], axis=1)))
        good = (sync < 1e-6 and drift < 1e-6 and abs(ratio / n - 1) < 0.01
                and abs(dphi - np.pi) < 0.01 and abs(freq - 1) < 0.02 and control > 0.05)
        ok &= good
        parts.append(f"n={n}: sync={sync:.1e} drift={drift:.1e} ratio/n={ratio / n:.4f} "
                     f"dphi-pi={dphi - np.pi:+.1e} w/W={freq:.5f} control={control:.2f}")
    record(2, ok, "; ".join(parts))
    assert ok


# ---------------------------------------------------------------- criterion 3

def test_criterion_3_analytic_magnetization():
    worst = {}
    for n in (2, 3):
        for seed in range(10):
            run = motif_run(n, 0.3, 0.1, seed=100 + seed, t_extra=20 / frequency(n, 0.3) + 1)
            traj = keep(f"oracle n={n} seed={seed}", run["traj"])
            k = analytic_constants(run["S"], run["rho0"], n, 0.3)
            mag = magnetizations(traj.states, run["basis"])
            tau, omega = run["tau"], run["omega"]
            window = (traj.times >= tau) & (traj.times <= tau + 20 / omega)
            t = traj.times[window]
            graph = run["graph"]
            for kind in ("c", "i", "o"):
                idx = [graph.index(s) for s in graph.sites_of(kind)]
                ref = analytic_magnetization(k, kind, t)
                rms = float(np.sqrt(np.mean((mag[window][:, idx] - ref[:, None]) ** 2)))
                worst[n] = max(worst.get(n, 0.0), rms)
    ok = all(v < 1e-6 for v in worst.values())
    record(3, ok, "worst RMS over 10 seeds on [tau, tau+20/W]: "
                  + ", ".join(f"n={n}: {v:.1e}" for n, v in worst.items()))
    assert ok


# ---------------------------------------------------------------- criterion 4

def lindblad_concurrence(n, rho0, t):
    graph = build_motif(MotifSpec(n, h=1.0, g=0.5, gamma=0.2))
    basis, H, diss = sector_model(graph, 1)
    traj = keep(f"dark n={n}", evolve(H, diss, rho0, t[-1], t[1] - t[0], method="spectral"))
    return (pair_concurrence(traj.states, basis, 0, 1), pair_concurrence(traj.states, basis, 1, 2))


def test_criterion_4_concurrence():
    parts, ok = [], True
    for n in (3, 6):
        run = motif_run(n, 0.5, 0.2, seed=SEED)
        traj = keep(f"fig2 n={n}", run["traj"])
        k = analytic_constants(run["S"], run["rho0"], n, 0.5)
        late = traj.times >= run["tau"]
        t = traj.times[late]
        ci = pair_concurrence(traj.states[late], run["basis"], 0, 1)
        ij = pair_concurrence(traj.states[late], run["basis"], 1, 2)
        dev = max(np.max(np.abs(ci - analytic_concurrence(k, "ci", t))),
                  np.max(np.abs(ij - analytic_concurrence(k, "ij", t))))
        # dark special cases with the full Lindblad evolution as brute-force oracle
        omega = frequency(n, 0.5)
        grid = np.linspace(0, 2 * np.pi / omega, 201)
        psi0 = dark_superposition(n, 0.0)
        ci0, _ = lindblad_concurrence(n, np.outer(psi0, psi0.conj()), grid)
        psi1 = dark_superposition(n, 1.0)
        ci1, ij1 = lindblad_concurrence(n, np.outer(psi1, psi1.conj()), grid)
        b0 = np.max(np.abs(ci0 - 1 / np.sqrt(n)))
        b1 = max(abs(ci1.min()), abs(ci1.max() - 1 / np.sqrt(n)))
        ij0 = abs(ij1[0] - 2 / n)
        good = dev < 1e-4 and b0 < 1e-9 and b1 < 1e-9 and ij0 < 1e-9
        ok &= good
        parts.append(f"n={n}: max|num-analytic|={dev:.1e} b=0 dev={b0:.1e} b=1 range dev={b1:.1e} "
                     f"C_ij(0)-2/n={ij0:.1e}")

    # the three variant forms each disagree with the brute-force oracle
    n, g = 3, 0.5
    omega = frequency(n, g)
    grid = np.linspace(0, 2 * np.pi / omega, 201)
    psi1 = dark_superposition(n, 1.0)
    ci1, ij1 = lindblad_concurrence(n, np.outer(psi1, psi1.conj()), grid)
    # without the relative sign both "dark states" are the same vector
    unsigned = np.zeros(2 * n + 1)
    unsigned[0], unsigned[1:n + 1] = 1, 1 / np.sqrt(n)
    unsigned /= np.sqrt(2)
    pp, pm = psi_pm(n)
    sign_variant_fails = abs(np.vdot(unsigned, unsigned) - 1) < 1e-12 and abs(np.vdot(pp, pm)) < 1e-15
    swapped_ci = np.abs((1.0 - 1j * np.sin(omega * grid)) / np.sqrt(n))
    swap_variant_fails = swapped_ci.min() > 0.5 / np.sqrt(n) and ci1.min() < 1e-9
    halved_ij = 1 / (2 * n) + np.cos(omega * grid) / (2 * n)
    fixed_ci, fixed_ij = pure_state_concurrence(n, 1.0, omega, grid)
    factor_variant_fails = (abs(halved_ij[0] - ij1[0]) > 0.1 / n
                            and np.max(np.abs(fixed_ij - ij1)) < 1e-9
                            and np.max(np.abs(fixed_ci - ci1)) < 1e-9)
    variants = sign_variant_fails and swap_variant_fails and factor_variant_fails
    ok &= variants
    parts.append(f"variant forms rejected: sign={sign_variant_fails} swap={swap_variant_fails} "
                 f"factor={factor_variant_fails} (see tests/test_formula_corrections.py)")
    record(4, ok, "; ".join(parts))
    assert ok


# ---------------------------------------------------------------- criterion 5

@lru_cache(maxsize=None)
def network_run(kappa):
    spec = NetworkSpec([MotifSpec(3, h=1.0, g=0.3, gamma=0.2)] * 3, [(0, 1), (1, 2)],
                       coupling=0.27, kappa=kappa)
    graph = build_network(spec)
    basis, H, diss = sector_model(graph, 1)
    L = assemble(H, diss)
    S = spectrum(L)
    tau = classify_modes(S, eps_tr=ACCEPTANCE_EPS_TR).tau
    t_max = tau + 30 * 2 * np.pi / frequency(3, 0.3)
    traj = keep(f"network kappa={kappa}",
                evolve(H, diss, random_state(basis.dim, SEED), t_max, 0.05, method="spectral",
                       spectral=S, liouvillian=L))
    return graph, basis, traj, tau


def test_criterion_5_network_sync():
    graph, basis, traj, tau = network_run(0.2)
    mag = magnetizations(traj.states, basis)
    groups = site_groups(graph)
    late = traj.times >= tau
    cross = float(np.max(cross_motif_error(groups, mag[late])))
    rep = sync_report(traj.times, mag, groups, tau)
    ratio = rep.amplitude_ratio("m0:inner", "m0:central")
    g0, b0, t0, tau0 = network_run(0.0)
    mag0 = magnetizations(t0.states, b0)
    cross0 = float(np.max(cross_motif_error(site_groups(g0), mag0[t0.times >= tau0])))
    ok = cross < 1e-5 and abs(3 * ratio - 1) < 0.02 and cross0 > 0.01
    record(5, ok, f"kappa=0.2: cross-motif error={cross:.1e}, inner/central amplitude={ratio:.5f} "
                  f"(1/3 target); kappa=0: cross-motif error={cross0:.3f}")
    assert ok


# ---------------------------------------------------------------- criterion 6

def test_criterion_6_disorder_scaling():
    graph = build_motif(MotifSpec(3, g=0.3, gamma=0.1))
    basis, H, diss = sector_model(graph, 1)
    L = assemble(H, diss)
    S = spectrum(L)
    worst_re = 0.0
    for kind in KINDS:
        for seed in range(20):
            V = sample_disorder(DisorderSpec(kind, 1.0, seed), graph).unit_operator(basis)
            rep = perturbative_corrections(L, S, V)
            worst_re = max(worst_re, abs(rep.first_order.real) / np.linalg.norm(V.matrix, 2))

    c2 = build_motif(MotifSpec(2, g=0.3, gamma=0.1))
    eps = np.logspace(-3, -1, 9)
    exponents = {kind: decay_rate_scan(c2, kind, eps, range(5)).exponent for kind in KINDS}

    slopes = {}
    grid = np.logspace(-2.5, -1.5, 5)
    for kind in KINDS:
        V = sample_disorder(DisorderSpec(kind, 1.0, 3), graph).unit_operator(basis)
        res = [perturbative_corrections(L, S, V, e).discrepancy for e in grid]
        slopes[kind] = float(np.polyfit(np.log(grid), np.log(res), 1)[0])
    # coupling disorder is the generic case; on-site and flux shifts are even in
    # epsilon, which removes the cubic term and leaves a quartic residual
    ok = (worst_re < 1e-10 and all(abs(x - 2) < 0.1 for x in exponents.values())
          and abs(slopes["coupling"] - 3) < 0.3 and min(slopes.values()) > 2.7)
    record(6, ok, f"max |Re l1|/||V|| = {worst_re:.1e} (60 draws); decay exponents "
                  + ", ".join(f"{k}={v:.3f}" for k, v in exponents.items())
                  + "; residual slopes " + ", ".join(f"{k}={v:.2f}" for k, v in slopes.items()))
    assert ok


# ---------------------------------------------------------------- criterion 7

def test_criterion_7_structural_oracles():
    graph = build_motif(MotifSpec(2, h=1.0, g=0.3, gamma=0.1))
    basis, H, diss = sector_model(graph, 1)
    rho0 = random_state(basis.dim, SEED)
    Hf, dissf = full_space_operators(graph)
    full0 = np.zeros((32, 32), dtype=complex)
    full0[np.ix_(basis.states, basis.states)] = rho0
    a = keep("sector C2", evolve(H, diss, rho0, 20.0, 0.01, save_every=20))
    b = keep("full C2", evolve(Hf, dissf, full0, 20.0, 0.01, save_every=20))
    full_dev = float(np.max(np.abs(b.states[:, basis.states][:, :, basis.states] - a.states)))
    leak = float(np.max(np.abs(b.states))) - float(np.max(np.abs(b.states[:, basis.states][:, :, basis.states])))

    # make sure every acceptance trajectory exists, then check invariants on all of them
    for n in (2, 4, 6):
        fig1_run(n, 0.1)
        fig1_run(n, 0.0)
    network_run(0.2)
    network_run(0.0)
    bad = [name for name, tr in TRAJECTORIES.items() if not invariants_ok(tr)]

    dark_counts, undamped = {}, {}
    for n in (2, 3):
        g2 = build_motif(MotifSpec(n, h=1.0, g=0.3, gamma=0.1))
        b2, H2, d2 = sector_model(g2, 2)
        dark_counts[n] = find_dark_states(H2, [g2.index(s) for s in g2.dissipative_sites()]).dim
        rep = classify_modes(spectrum(assemble(H2, d2)))
        undamped[n] = len(rep.oscillatory)

    parts = {
        "full vs sector": full_dev < 1e-8,
        "invariants": not bad,
        "no undamped two-magnon oscillation": all(v == 0 for v in undamped.values()),
        "one two-magnon dark state": all(v == 1 for v in dark_counts.values()),
    }
    ok = all(parts.values())
    record(7, ok, f"full 2^5 vs sector max dev={full_dev:.1e} (leak {leak:.0e}); invariants on "
                  f"{len(TRAJECTORIES)} trajectories{' failed: ' + ', '.join(bad) if bad else ' hold'}; "
                  f"two-magnon undamped pairs={undamped}; two-magnon dark states={dark_counts} "
                  f"(claimed 1; see decisions ledger: the single state is a free-fermion result and "
                  f"the spin model has none)")
    assert parts["full vs sector"] and parts["invariants"] and parts["no undamped two-magnon oscillation"]
    assert parts["one two-magnon dark state"], (
        "two-magnon sectors contain no dark state for the spin model; the claimed single state "
        "(symmetric centre-inner combination) is dark only for free fermions")
