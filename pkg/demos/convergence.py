"""
Convergence index while the packet crosses the interface
========================================================

q(t) = log2(e_N(t) / e_2N(t)) for two ways of scaling the interaction
factor. The index dips while most of the packet sits on the interface.

Run from the repository root: ``python3 demos/convergence.py``.
"""

import numpy as np

from schrodinger_sat import run_preset
from schrodinger_sat.harness import CROSSING_THRESHOLD

res = run_preset("convergence-ci")
occupancy = res.runs["dx2-fine"].series["occupancy"].values
q2 = res.convergence[("dx2-coarse", "dx2-fine")]
q3 = res.convergence[("dx3-coarse", "dx3-fine")]

print("   time     occupancy  q(1e3/dx^2)  q(1e3/dx^3)")
for k in range(0, len(q2), 5):
    mark = "*" if occupancy[k] >= CROSSING_THRESHOLD else " "
    print(f"{q2.times[k]:8.4f}  {occupancy[k]:9.3f}{mark} {q2.values[k]:11.3f}  {q3.values[k]:11.3f}")

for key, value in res.summary.items():
    if key.startswith("convergence."):
        print(f"{key} = {value:.3f}")
print("* marks samples in the crossing window")
assert np.isfinite(q2.values[1:]).all()
