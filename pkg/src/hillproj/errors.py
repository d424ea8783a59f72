"""Exception types shared across the package."""


class HillprojError(Exception):
    """Base class for all package errors."""


class ParityError(HillprojError, ValueError):
    """Disc index or lattice index incompatible with the boundary condition."""


class WindowError(HillprojError, ValueError):
    """Truncation window too small for the requested computation."""


class SpectralProximityError(HillprojError):
    """A spectral parameter sits too close to an eigenvalue or to the contour."""

    def __init__(self, message, *, z=None, distance=None):
        super().__init__(message)
        self.z = z
        self.distance = distance


class IllConditionedError(HillprojError):
    """A linear solve or eigendecomposition is numerically unreliable."""

    def __init__(self, message, *, condition=None):
        super().__init__(message)
        self.condition = condition


class ContractionError(HillprojError):
    """Perturbation series requested outside its contractive regime."""

    def __init__(self, message, *, measured=None, z=None):
        super().__init__(message)
        self.measured = measured
        self.z = z


class QuadratureError(HillprojError):
    """Contour quadrature failed its convergence or idempotency checks."""


class BudgetError(HillprojError):
    """An exhaustive enumeration would exceed the configured work budget."""

    def __init__(self, message, *, estimate=None, budget=None):
        super().__init__(message)
        self.estimate = estimate
        self.budget = budget


class CountError(HillprojError):
    """Eigenvalue counting produced a non-integer trace or method disagreement."""


class ConfigError(HillprojError, ValueError):
    """Invalid experiment configuration; carries every violation found."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {v}" for v in self.violations))
