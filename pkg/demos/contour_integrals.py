"""Unit-circle integrals under a_1 ... a_{2s+2} = q and their residue sums."""

import numpy as np

from qbc1 import Balancing, ParameterSet
from qbc1.cli import sample_params
from qbc1.contour import (
    gus_integral_lhs,
    gus_integral_rhs,
    nr_lhs,
    nr_rhs,
    residue_coeff_R,
    residue_sum,
)

q = 0.3
a = np.array([0.4, 0.5, -0.35, 0.3j, 0.45])
p = ParameterSet.balanced(q, np.log(a) / np.log(q), Balancing.PRODUCT_Q)

quad = nr_lhs(p)
print("six-parameter integral:", quad.value, " nodes", quad.points_used, " est. error", quad.est_error)
print("closed product        :", nr_rhs(p))

R = [residue_coeff_R(p, k) for k in range(1, 6)]
print("residues R_k          :", np.round(R, 4))
print("sum of R_k            :", sum(R))
print("sum R_k <1, a_k>      :", residue_sum(p))

rng = np.random.default_rng(5)
p2 = sample_params("gustafson-integral", 2, q, rng)
quad = gus_integral_lhs(p2)
print("two-fold integral     :", quad.value, " grid", quad.points_used, "per axis")
print("closed product        :", gus_integral_rhs(p2))
