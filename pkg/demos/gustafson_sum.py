"""Gustafson's C_n sum: the regularized multiple sum is a constant product."""

import numpy as np

from qbc1.cli import _random_multipoint, sample_params
from qbc1.gustafson import cn_regularized, det_relation, gustafson_product

q = 0.2
rng = np.random.default_rng(11)
for n in (1, 2, 3):
    p = sample_params("gustafson-sum", n, q, rng)
    closed = gustafson_product(p)
    print(f"n = {n}: product {closed:.12f}")
    for _ in range(2):
        x = _random_multipoint(rng, n, q)
        res = cn_regularized(p, x)
        print(f"    x = {np.round(x.values(), 3)}  <<1, x>>_G = {res.value:.12f}  terms {res.terms_used}")

p = sample_params("det-relation", 2, q, rng)
x = _random_multipoint(rng, 2, q)
lhs, rhs = det_relation(p, x)
print("det of one-dimensional sums =", lhs)
print("multiple sum times thetas   =", rhs)
