"""Map one-way steering regions over the polarization-control plane.

The polarizer angle theta and the atom-cavity exchange strength g_ac2 sort
the stable plane into regions where different subsets of the four
magnon-as-steerer steerings exist.  The magnon is never steered back: every
reverse steerability is identically zero (one-way steering).
"""

from collections import Counter

import numpy as np

from omm_qcorr import run_sweep
from omm_qcorr.sweep import classify_direction, preset, subset_label

spec = preset("fig5", grid=41)
result = run_sweep(spec)

eps = 1e-5
forward = ("S_m_to_a", "S_m_to_c1", "S_m_to_c2", "S_m_to_b")
reverse = ("S_a_to_m", "S_c1_to_m", "S_c2_to_m", "S_b_to_m")

labels = Counter()
for i in range(len(result.stable)):
    if not result.stable[i]:
        labels["(unstable)"] += 1
        continue
    present = tuple(n for n in forward if result.values[n][i] > eps)
    labels[subset_label(present)] += 1

print("steering-combination regions on the 41x41 grid:")
for label, count in labels.most_common():
    print(f"  {count:5d}  {label}")

worst_reverse = max(np.nanmax(result.values[n]) for n in reverse)
print(f"\nlargest reverse steerability onto the magnon: {worst_reverse:.2e}")

directions = {
    classify_direction(result.values["S_m_to_b"][i], result.values["S_b_to_m"][i])
    for i in range(len(result.stable)) if result.stable[i]}
print(f"magnon<->phonon directionality classes seen: {sorted(directions)}")
