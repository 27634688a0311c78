"""
The su(N) basis and its structure constants
===========================================

Build the skew-Hermitian basis, check the commutator table against direct
matrix products and look at the adjoint matrices that drive everything else.
"""
#%%
import numpy as np

from weinorman import adjoint_matrix, build_su_basis

su2 = build_su_basis(2)
for k, a in enumerate(su2.elements, start=1):
    print(f"A_{k} =\n{np.round(a, 3)}")

#%%
# The commutators close on the basis: [A_1, A_2] = A_3 and cyclic.
c = su2.structure
print("c_12^3 =", c[0, 1, 2], " c_23^1 =", c[1, 2, 0], " c_31^2 =", c[2, 0, 1])

#%%
# ad_{A_3} is a rotation generator acting on coordinate vectors.
print(adjoint_matrix(su2, 3))

#%%
# The same construction for su(3): 8 generators, Jacobi identity to rounding.
su3 = build_su_basis(3)
su3.check()
print("su(3) dimension", su3.n, "periods", np.round(su3.periods / np.pi, 3), "x pi")
