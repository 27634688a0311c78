"""
Steering out of the singular set
================================

From gamma = 0 a Y drive is transverse to the locked direction, so the
reduced dynamics move gamma_2 off the singular set after one step and the
full coordinate equation takes over.
"""
#%%
import numpy as np

from weinorman import ZYZ, ChartPolicy, GammaChart, build_su_basis, integrate_gamma, integrate_unitary
from weinorman.su2_zyz import spin_half_model

su2 = build_su_basis(2)
sched = spin_half_model(0.0, u2=lambda t: 1.0, horizon=1.0)
traj = integrate_gamma(GammaChart(su2, ZYZ), sched, 1e-3, ChartPolicy(mode="reduced"))

#%%
for k in (0, 1, 50, 101, 500, 1000):
    print(f"t={traj.times[k]:.3f}  gamma={np.round(traj.gammas[k], 4)}  det={traj.dets[k]:+.4f}")
print("reduced steps:", traj.reduced_steps)

#%%
oracle = integrate_unitary(su2, sched, 1e-3)
print("final discrepancy", np.linalg.norm(traj.final_unitary() - oracle.final))
