"""Entanglement carried by the dark states.

The long-time concurrence of a centre-inner and of an inner-inner pair is
compared with the closed form built from the numerical stationary state.
The pure dark superposition psi+ + b psi- is the clean special case: at
b = 0 the centre-inner concurrence is frozen at 1/sqrt(n), at b = 1 it
swings between 0 and 1/sqrt(n).

    python3 demos/03_concurrence.py
"""
import numpy as np

from abmotifs import (MotifSpec, analytic_concurrence, analytic_constants, assemble, build_motif,
                      classify_modes, evolve, pair_concurrence, sector_model, spectrum)
from abmotifs.scenario import random_state
from abmotifs.theory import dark_superposition, frequency

N, G, GAMMA = 3, 0.5, 0.2

graph = build_motif(MotifSpec(N, h=1.0, g=G, gamma=GAMMA))
basis, H, diss = sector_model(graph, 1)
S = spectrum(assemble(H, diss))
tau = classify_modes(S, eps_tr=1e-8).tau
omega = frequency(N, G)

rho0 = random_state(basis.dim, seed=3)
traj = evolve(H, diss, rho0, tau + 10 * 2 * np.pi / omega, 0.05, method="spectral", spectral=S)
late = traj.times >= tau
k = analytic_constants(S, rho0, N, G)
for pair, (a, b) in (("ci", (0, 1)), ("ij", (1, 2))):
    num = pair_concurrence(traj.states[late], basis, a, b)
    dev = np.max(np.abs(num - analytic_concurrence(k, pair, traj.times[late])))
    print(f"random state, pair {pair}: range [{num.min():.4f}, {num.max():.4f}], "
          f"max |numeric - closed form| = {dev:.1e}")

t = np.linspace(0, 2 * np.pi / omega, 101)
for b in (0.0, 1.0):
    psi = dark_superposition(N, b)
    tr = evolve(H, diss, np.outer(psi, psi.conj()), t[-1], t[1] - t[0], method="spectral", spectral=S)
    ci = pair_concurrence(tr.states, basis, 0, 1)
    ij = pair_concurrence(tr.states, basis, 1, 2)
    print(f"dark state b = {b}: C_ci in [{ci.min():.6f}, {ci.max():.6f}], C_ij(0) = {ij[0]:.6f}"
          f"  (1/sqrt(n) = {1 / np.sqrt(N):.6f}, 2/n = {2 / N:.6f})")
