"""
Photon addition to a coherent state
===================================

Adding one photon to a coherent state gives a pure state that is neither
Gaussian nor classical. Both measures shrink as the seed amplitude grows,
because the added photon becomes a small correction to a large coherent field.
"""

import numpy as np

from fockbench import ideal_photon_added_state, non_classicality, non_gaussianity

# ν is normalized so that the single-photon state (alpha = 0) sits at 1.
for alpha in np.arange(0.0, 1.51, 0.25):
    rho = ideal_photon_added_state(alpha, dim=25)
    print(f"|alpha|={alpha:4.2f}  delta={non_gaussianity(rho):.4f} nats  "
          f"nu={non_classicality(rho):.4f}")

###############################################################################
# The heralded amplifier only approximates this state. Stronger squeezing
# brings in two-photon events, which wash out both measures.

from fockbench import ExperimentParams, sweep_alpha

alphas = np.arange(0.0, 1.51, 0.25)
for r in (1e-4, 0.15, 0.30, 0.45):
    rows = sweep_alpha(ExperimentParams(r=r), alphas)
    deltas = " ".join(f"{row.delta_nats:.3f}" for row in rows)
    print(f"r={r:<6}  delta: {deltas}")

###############################################################################
# A Wigner function slice shows where the negativity lives.

from fockbench import wigner

rho = ideal_photon_added_state(0.5, dim=25)
x = np.linspace(-3, 4, 15)
print(np.round(wigner(rho, x, 0.0), 4))

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    xs = np.linspace(-3, 4, 141)
    grid = wigner(rho, xs[:, None], xs[None, :])
    plt.contourf(xs, xs, grid.T, levels=40, cmap="RdBu_r")
    plt.xlabel("x")
    plt.ylabel("p")
    plt.colorbar(label="W(x, p)")
    plt.savefig("photon_added_wigner.png", dpi=120)
