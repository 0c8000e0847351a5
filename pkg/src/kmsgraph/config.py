from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by every module.

    ``eig`` is the absolute accuracy of spectral radii and critical
    temperatures, ``harmonic`` the residual allowed in ``B psi = psi``,
    ``classify`` the margin used when comparing a spectral radius with 1 or
    a temperature with an interval endpoint.
    """

    eig: float = 1e-12
    harmonic: float = 1e-10
    classify: float = 1e-9
    residual: float = 1e-10
    riesz: float = 1e-12
    reconstruction: float = 1e-8
    weight_zero: float = 1e-12


@dataclass(frozen=True)
class Limits:
    max_vertices: int = 64
    max_simple_cycles: int = 100_000
    max_iterations: int = 100_000


DEFAULT_TOLERANCES = Tolerances()
DEFAULT_LIMITS = Limits()
