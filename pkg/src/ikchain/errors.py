"""Exception types raised across the package."""


class DegenerateParams(ValueError):
    """Model parameters put a formula denominator (or the basis itself) at a zero."""


class NearSingular(ArithmeticError):
    """A denominator fell below the singularity threshold."""

    def __init__(self, which_function: str, argument: complex):
        self.which_function = which_function
        self.argument = argument
        super().__init__(f"{which_function} is numerically zero at argument {argument!r}")


class IndexOutOfRange(IndexError):
    """A site index outside 1..N."""


class NonzeroInhomogeneity(ValueError):
    """The Hamiltonian is only defined for the homogeneous chain."""


class SingularTransfer(ArithmeticError):
    """A transfer matrix at an inhomogeneity is too ill-conditioned to invert."""

    def __init__(self, site: int, condition: float):
        self.site = site
        self.condition = condition
        super().__init__(f"t(theta_{site}) has condition number {condition:.3e}")


class NoConvergence(RuntimeError):
    """Newton iteration failed from every starting point."""

    def __init__(self, best_residual: float):
        self.best_residual = best_residual
        super().__init__(f"no start converged; best residual {best_residual:.3e}")


class ConfigParse(ValueError):
    """A run configuration could not be read or is malformed."""


class SizeGuard(ValueError):
    """The requested chain is too long for dense verification."""
