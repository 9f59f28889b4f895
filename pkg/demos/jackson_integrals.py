"""BC1 Jackson integrals: the lattice sum, the key equation and regularization."""

import numpy as np

from qbc1 import ParameterSet, SymLaurent, default_xi, jackson_integral, regularized
from qbc1.bc1 import convergence_margin, e_product, big_theta
from qbc1.diffsys import key_coefficients, verify_key_equation

q = 0.3
p = ParameterSet(q, (-0.30, -0.20, -0.15, -0.05))  # s = 1, four exponents
xi = default_xi(q)

print("s =", p.s, " sum alpha =", p.sum_alpha, " margin =", convergence_margin(p, 0))

one = jackson_integral(p, SymLaurent.constant(1.0), xi)
print("<1, xi>            =", one.value, " terms used:", one.terms_used)

# the sum only depends on the lattice q^Z xi, not on the chosen representative
print("<1, q^3 xi>        =", jackson_integral(p, SymLaurent.constant(1.0), xi.shift(3)).value)

kc = key_coefficients(p, [1])
e1 = jackson_integral(p, e_product(p, [1]), xi).value
print("C0 <e1> + C1 <1>   =", kc.C0 * e1 + kc.C[0] * one.value)
print("key residual       =", verify_key_equation(p, [1], xi))

# dividing by Theta gives a function of xi that is symmetric under xi -> 1/xi
print("Theta(xi)          =", big_theta(p, xi))
print("<<1, xi>>          =", regularized(p, SymLaurent.constant(1.0), xi).value)
print("<<1, 1/xi>>        =", regularized(p, SymLaurent.constant(1.0), xi.inverse()).value)

# for s >= 2 the lattice shift multiplies <<phi, xi>> by q^(1-s) xi^(2-2s)
p2 = ParameterSet(q, tuple(np.linspace(-0.25, -0.08, 6)))
chi = SymLaurent.character(1)
a = regularized(p2, chi, xi).value
b = regularized(p2, chi, xi.shift(1)).value
z = xi.value()
print("s = 2 ratio        =", b / a, " expected", q ** (1 - p2.s) * z ** (2 - 2 * p2.s))
