"""Numerical verification of BC1-type Jackson integral identities.

The package evaluates BC1 and BC_n Jackson integrals together with the
q-difference systems they satisfy.  Balanced contour integrals are tied to
them by residue sums.
"""

from .bc1 import (
    Balancing,
    ParameterSet,
    SumResult,
    TruncationPolicy,
    big_theta,
    default_xi,
    jackson_integral,
    regularized,
    residual,
    shift_alpha,
)
from .contour import QuadratureResult, circle_quadrature, nr_lhs, nr_rhs
from .errors import (
    BalancedError,
    BoxLimitError,
    DegenerateError,
    DivergenceError,
    NonConvergenceError,
    PoleError,
    PoleProximityWarning,
    QBC1Error,
    SamplerExhaustedError,
    SingularError,
    SingularWarning,
)
from .gustafson import MultiPoint, cn_jackson, cn_regularized, gustafson_product
from .laurent import SymLaurent
from .qcore import LogPoint, qpoch_inf, qpoch_int, theta

__version__ = "0.1.0"

__all__ = [
    "Balancing",
    "BalancedError",
    "BoxLimitError",
    "DegenerateError",
    "DivergenceError",
    "LogPoint",
    "MultiPoint",
    "NonConvergenceError",
    "ParameterSet",
    "PoleError",
    "PoleProximityWarning",
    "QBC1Error",
    "QuadratureResult",
    "SamplerExhaustedError",
    "SingularError",
    "SingularWarning",
    "SumResult",
    "SymLaurent",
    "TruncationPolicy",
    "big_theta",
    "circle_quadrature",
    "cn_jackson",
    "cn_regularized",
    "default_xi",
    "gustafson_product",
    "jackson_integral",
    "nr_lhs",
    "nr_rhs",
    "qpoch_inf",
    "qpoch_int",
    "regularized",
    "residual",
    "shift_alpha",
    "theta",
]
