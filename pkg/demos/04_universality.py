"""
Which singular points are invisible from a state?
=================================================

If every singular point maps the initial state to itself (up to phase),
the singular set does not obstruct the gates. For |0> only half of the ZYZ
singular slices have this property.
"""
#%%
import numpy as np

from weinorman import ZYZ, universality_check
from weinorman.state_analysis import FixedSampler

report = universality_check(ZYZ, [1.0, 0.0], samples=40, seed=0)
print(report.verdict, report.to_dict()["classification_counts"])
print("witness gamma_2 values:", sorted({float(g) for g in np.round(report.witnesses[:, 1], 6)}))

#%%
# A superposition is moved by every non-trivial singular point.
print(universality_check(ZYZ, [0.6, 0.8], samples=40, seed=0).verdict)

#%%
# Restricting attention to the identity family gives a trivially universal verdict.
g1 = np.linspace(-3, 3, 7)
pts = np.column_stack([g1, 0 * g1, -g1])
print(universality_check(ZYZ, [0.6, 0.8], FixedSampler(pts)).verdict)
