"""
Imperfections of the heralded amplifier
=======================================

Three knobs degrade the state: parasitic gain into mismatched modes (gamma),
false triggers (1 - xi) and homodyne loss (1 - eta). Each one is swept alone
at |alpha| = 0.5 and r = 0.15 with the others held ideal.
"""

import numpy as np

from fockbench import LAB_NOISE_PARAMS, ExperimentParams, sweep_alpha, sweep_noise

values = np.linspace(0, 1, 6)
for knob in ("gamma", "xi", "eta"):
    rows = sweep_noise(knob, values)
    print(f"{knob:>5}: " + " ".join(f"{row.delta_nats:.3f}" for row in rows))

###############################################################################
# With all three imperfections at once, the witness still survives across
# the usual amplitude range.

rows = sweep_alpha(ExperimentParams(**LAB_NOISE_PARAMS), [0.5, 0.75, 1.0, 1.25, 1.5])
for row in rows:
    print(f"|alpha|={row.alpha:4.2f}  delta={row.delta_nats:.4f}  nu={row.nu:.4f}  "
          f"herald weight={row.click_weight:.4f}")

###############################################################################
# The output is a convex mixture of the two trigger branches, passed through
# the loss channel.

from fockbench import loss_channel, run_pipeline

res = run_pipeline(ExperimentParams(alpha=1.0, **LAB_NOISE_PARAMS))
xi, eta = LAB_NOISE_PARAMS["xi"], LAB_NOISE_PARAMS["eta"]
rebuilt = loss_channel(xi * res.rho_success + (1 - xi) * res.rho_faulty, eta)
print("mixture identity error:", np.max(np.abs(rebuilt - res.rho_out)))
