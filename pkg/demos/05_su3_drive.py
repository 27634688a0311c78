"""
A driven qutrit in product-of-exponentials coordinates
======================================================

Integrate the eight su(3) coordinates for a smooth random drive, compare
with the direct propagator and watch the second-order decay of the gap.
"""
#%%
import numpy as np

from weinorman import ControlSchedule, GammaChart, build_su_basis, canonical_order, integrate_gamma
from weinorman import integrate_unitary

rng = np.random.default_rng(3)
su3 = build_su_basis(3)
amp, freq, phase = rng.uniform(-0.5, 0.5, 8), rng.uniform(0.5, 3, 8), rng.uniform(0, 2 * np.pi, 8)
controls = {j + 1: (lambda t, j=j: amp[j] * np.cos(freq[j] * t + phase[j])) for j in range(8)}
sched = ControlSchedule(rng.uniform(-0.5, 0.5, 8), controls, 1.0)

#%%
for step in (1e-1, 1e-2, 1e-3):
    traj = integrate_gamma(GammaChart(su3, canonical_order(8)), sched, step)
    gap = np.linalg.norm(traj.final_unitary() - integrate_unitary(su3, sched, step).final)
    print(f"step {step:.0e}: gap {gap:.2e}, min |det Xi| {traj.min_abs_det:.3f}")
