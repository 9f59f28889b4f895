"""The q-difference system T_{a_j} <v> = <v> B and its Gauss decomposition."""

import numpy as np

from qbc1 import ParameterSet, default_xi
from qbc1.diffsys import difference_matrix, difference_system_sides, regularized_matrix

q = 0.3
rng = np.random.default_rng(3)
alpha = rng.uniform(-0.2, -0.08, 8) + 1j * rng.uniform(-0.2, 0.2, 8)
p = ParameterSet(q, tuple(alpha))  # s = 3
fixed, j = [1, 2], 5

m = difference_matrix(p, fixed, j)
np.set_printoptions(precision=4, suppress=True)
print("U =\n", m.U)
print("L =\n", m.L)
print("det(UL) =", np.linalg.det(m.B), "  closed form =", m.det_closed)

xi = default_xi(q, rng)
lhs, rhs = difference_system_sides(p, fixed, j, xi)
print("T<v>   =", lhs)
print("<v> B  =", rhs)

reg = regularized_matrix(p, fixed, j)
print("det B_bar =", np.linalg.det(reg.B), "  closed form =", reg.det_closed)
lhs, rhs = difference_system_sides(p, fixed, j, xi, regularize=True)
print("max |T<<v>> - <<v>> B_bar| =", np.max(np.abs(lhs - rhs)))
