"""Spectrum of a single motif.

At flux pi the single-magnon Liouvillian keeps exactly one pair of undamped
eigenvalues at +-2 sqrt(n) g next to a three-dimensional kernel.  Away from
pi the pair picks up a decay rate.

    python3 demos/01_spectrum.py
"""
import numpy as np

from abmotifs import MotifSpec, assemble, build_motif, classify_modes, sector_model, spectrum

G, GAMMA = 0.3, 0.1

print(" n   flux   undamped pair            kernel  slowest decay")
for n in (2, 3, 4, 6):
    for flux in (np.pi, 0.8 * np.pi):
        graph = build_motif(MotifSpec(n, h=1.0, g=G, flux=flux, gamma=GAMMA))
        _, H, diss = sector_model(graph, 1)
        S = spectrum(assemble(H, diss))
        modes = classify_modes(S)
        pair = np.sort(S.eigenvalues[modes.oscillatory].imag)
        shown = ", ".join(f"{x:+.6f}i" for x in pair) or "none"
        print(f"{n:2d}  {flux / np.pi:4.2f}pi  {shown:24s} {len(modes.stationary):4d}   "
              f"{modes.gap:.4f}")
    print(f"    expected pair at +-{2 * np.sqrt(n) * G:.6f}i")
