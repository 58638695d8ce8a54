"""
Dissipation trade-off
=====================

Long runs with increasing dissipation strength: the error stays at or
below the undamped run while the conserved norm decays faster.

Run from the repository root: ``python3 demos/dissipation.py`` (about a
minute).
"""

from schrodinger_sat import run_preset

res = run_preset("dissipation-ci")
print(" run     final error   sigma-norm loss")
for label, run in res.runs.items():
    sig = run.series["sigma_norm"].values
    print(f"{label}   {res.summary[label + '.final_error']:.4e}    {1 - sig[-1] / sig[0]:.3e}")
