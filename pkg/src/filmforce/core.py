"""Physical constants, engine configuration and result types.

SI units throughout: frequencies in rad/s, lengths in m, forces per unit
area in N/m^2. Attractive forces are negative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

HBAR = 1.054571817e-34  # J s
K_BOLTZMANN = 1.380649e-23  # J/K
C_LIGHT = 2.99792458e8  # m/s
ELECTRON_MASS = 9.1093837015e-31  # kg
ELEMENTARY_CHARGE = 1.602176634e-19  # C
VACUUM_PERMITTIVITY = 8.8541878128e-12  # F/m
EV = ELEMENTARY_CHARGE  # J per eV


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = HBAR
    k_boltzmann: float = K_BOLTZMANN
    c_light: float = C_LIGHT
    electron_mass: float = ELECTRON_MASS
    elementary_charge: float = ELEMENTARY_CHARGE
    vacuum_permittivity: float = VACUUM_PERMITTIVITY


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class EngineSpec:
    """Numerical settings shared by every force evaluation.

    Attributes
    ----------
    temperature : float
        Absolute temperature in K.
    rel_tol, abs_tol : float
        Target accuracy of the Matsubara sum (abs_tol in N/m^2).
    max_matsubara_terms : int
        Hard cap on the number of Matsubara frequencies (n = 0 included).
    quadrature_rel_tol : float
        Relative tolerance of every wavevector integral.
    zero_temperature_mode : bool
        Replace the Matsubara sum by an integral over imaginary frequency.
    matsubara_tail_check : bool
        When False exactly ``max_matsubara_terms`` terms are summed.
    """

    temperature: float = 300.0
    rel_tol: float = 1e-6
    abs_tol: float = 0.0
    max_matsubara_terms: int = 5000
    quadrature_rel_tol: float = 1e-8
    zero_temperature_mode: bool = False
    matsubara_tail_check: bool = True

    def __post_init__(self):
        if not (self.temperature >= 0.0 and math.isfinite(self.temperature)):
            raise ValueError(f"temperature must be >= 0, got {self.temperature!r}")
        for name in ("rel_tol", "quadrature_rel_tol"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {value!r}")
        if self.abs_tol < 0.0:
            raise ValueError(f"abs_tol must be >= 0, got {self.abs_tol!r}")
        if int(self.max_matsubara_terms) != self.max_matsubara_terms or self.max_matsubara_terms < 1:
            raise ValueError(
                f"max_matsubara_terms must be a positive integer, got {self.max_matsubara_terms!r}"
            )
        if self.temperature == 0.0 and not self.zero_temperature_mode:
            raise ValueError("temperature 0 requires zero_temperature_mode")


def default_engine_spec() -> EngineSpec:
    return EngineSpec()


@dataclass(frozen=True)
class ForceResult:
    force: float
    est_error: float
    matsubara_terms_used: int
    converged: bool


@dataclass(frozen=True)
class FreeEnergyResult:
    energy: float
    est_error: float
    matsubara_terms_used: int
    converged: bool


def matsubara_frequency(n: int, temperature: float) -> float:
    """Return the n-th Matsubara frequency 2 pi n k_B T / hbar in rad/s."""
    if temperature <= 0.0:
        raise ValueError(f"temperature must be > 0, got {temperature!r}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n!r}")
    return 2.0 * math.pi * n * K_BOLTZMANN * temperature / HBAR
