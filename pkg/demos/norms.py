"""
Which norm is conserved
=======================

The interface scheme conserves the norm weighted by the SBP operator's
quadrature weights, up to the time integrator's truncation. The plain
trapezoid norm shows a transient bump while the packet crosses x = 0.

Run from the repository root: ``python3 demos/norms.py``.
"""

from schrodinger_sat import relative_drift, run_preset

res = run_preset("norm-ci")
s = res.runs["interface-o8"].series
sigma = relative_drift(s["sigma_norm"]).values
trap = relative_drift(s["trapezoid_norm"]).values
s2 = relative_drift(res.runs["interface-o2"].series["sigma_norm"]).values
occ = s["occupancy"].values

print("   time     occupancy  sigma (8,4)   trapezoid (8,4)  sigma (2,1)")
for k in range(0, len(sigma), 5):
    print(f"{s['sigma_norm'].times[k]:8.4f}  {occ[k]:9.3f}  {sigma[k]:+.3e}   "
          f"{trap[k]:+.3e}       {s2[k]:+.3e}")
