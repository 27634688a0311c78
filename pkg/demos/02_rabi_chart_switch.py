"""
A Rabi flip through the ZYZ coordinate lock
===========================================

Driving along X from the identity leaves the ZYZ angles stuck on their
singular set. Three chart policies handle this; all agree with the exact
propagator cos(t/2) I + i sin(t/2) sigma_x.
"""
#%%
import numpy as np

from weinorman import ZYZ, ChartPolicy, ControlSchedule, GammaChart, build_su_basis, integrate_gamma

su2 = build_su_basis(2)
rabi = ControlSchedule(np.zeros(3), {1: lambda t: 1.0}, np.pi)
exact = 1j * np.array([[0, 1], [1, 0]])

#%%
for mode in ("reanchor", "alternate", "reduced"):
    policy = ChartPolicy(mode=mode, alternates=((1, 2, 1),))
    traj = integrate_gamma(GammaChart(su2, ZYZ), rabi, 1e-3, policy)
    err = np.linalg.norm(traj.final_unitary() - exact)
    print(f"{mode:9s}: error {err:.1e}")
    for ev in traj.events:
        print(f"    t={ev.t:.3f} {ev.reason}: {ev.old_order} -> {ev.new_order}")

#%%
# With the strict policy the run stops at the singular point instead.
from weinorman import UnrecoverableSingularity

try:
    integrate_gamma(GammaChart(su2, ZYZ), rabi, 1e-3, ChartPolicy(mode="strict"))
except UnrecoverableSingularity as exc:
    print("strict:", exc)
