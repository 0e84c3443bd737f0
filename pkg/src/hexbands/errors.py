"""Exception types raised across the package."""


class ParameterError(ValueError):
    """Invalid physical or numerical parameter."""


class DomainError(ValueError):
    """Argument outside the domain of a function."""


class SymmetryError(ValueError):
    """Potential fails the q(x) = q(1 - x) symmetry check."""


class SingularityError(ArithmeticError):
    """Quantity requested at a point where it is singular (lambda in Sigma_0)."""


class ClassificationError(ValueError):
    """Point passed for band-edge classification is not a band edge."""


class RangeError(ValueError):
    """Requested lambda range does not contain enough spectral levels."""


class NumericalError(RuntimeError):
    """Failure inside a numerical kernel (eigen-solver, integrator)."""

    def __init__(self, message, dump_path=None):
        super().__init__(message)
        self.dump_path = dump_path
