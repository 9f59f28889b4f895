"""Exception and warning classes raised by the library."""


class QBC1Error(Exception):
    """Base class for all library errors."""


class PoleError(QBC1Error, ZeroDivisionError):
    """A denominator factor vanished at the requested point."""


class DivergenceError(QBC1Error):
    """A lattice tail kept growing instead of decaying."""


class BoxLimitError(QBC1Error):
    """A multiple lattice sum reached its radius cap without converging."""


class NonConvergenceError(QBC1Error):
    """An adaptive quadrature exhausted its refinement budget."""


class SingularError(QBC1Error, ArithmeticError):
    """A matrix is too ill-conditioned to invert reliably."""


class DegenerateError(QBC1Error, ArithmeticError):
    """Parameters coincide so that a closed-form coefficient is undefined."""


class BalancedError(QBC1Error, ValueError):
    """The balancing condition on the parameter product is (or is not) met."""


class SamplerExhaustedError(QBC1Error, RuntimeError):
    """Random parameter sampling rejected too many draws."""


class PoleProximityWarning(UserWarning):
    """An integrand pole lies close to the integration contour."""


class SingularWarning(UserWarning):
    """A prefactor is close to zero; the residual is poorly conditioned."""
