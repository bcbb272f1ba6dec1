"""Sweep the cavity detuning and locate the state-transfer optimum.

Reproduces the 1D cut of the detuning study: all three entanglements with
the magnon peak where the cavity drive sits one phonon frequency below
resonance (delta_c = omega_b, the beam-splitter condition).
"""

import numpy as np

from omm_qcorr import run_sweep
from omm_qcorr.sweep import preset

spec = preset("fig2d", grid=101)
result = run_sweep(spec, progress=lambda i, n: print(f"  {i}/{n}", end="\r"))

wb = spec.base.omega_b
delta_c = result.axis_values[:, 0] / wb
print("\ndelta_c/omega_b at each maximum:")
for name in spec.measures:
    col = result.values[name]
    peak = delta_c[np.nanargmax(col)]
    print(f"  {name:6s}: peak {np.nanmax(col):.4f} at delta_c = {peak:+.2f} omega_b")

result.to_csv("entanglement_vs_detuning.csv")
print("wrote entanglement_vs_detuning.csv")
print("plot it with:")
print("  figplots --input entanglement_vs_detuning.csv --kind lines"
      " --x delta_c_hz --y E_am,E_c1m,E_c2m --out detuning.png")
