"""Dielectric models evaluated on the imaginary frequency axis."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np


class UnsupportedModelError(ValueError):
    """Raised when a model has no finite permittivity (perfect conductor)."""


@dataclass(frozen=True)
class Vacuum:
    pass


@dataclass(frozen=True)
class Plasma:
    omega_p: float

    def __post_init__(self):
        if not (self.omega_p > 0.0 and math.isfinite(self.omega_p)):
            raise ValueError(f"omega_p must be > 0, got {self.omega_p!r}")


@dataclass(frozen=True)
class Drude:
    omega_p: float
    tau: float

    def __post_init__(self):
        if not (self.omega_p > 0.0 and math.isfinite(self.omega_p)):
            raise ValueError(f"omega_p must be > 0, got {self.omega_p!r}")
        if not self.tau > 0.0:
            raise ValueError(f"tau must be > 0, got {self.tau!r}")


@dataclass(frozen=True)
class PerfectConductor:
    pass


@dataclass(frozen=True)
class UniaxialPIB:
    """Particle-in-a-box film: plasma-like in plane, subband transitions along z.

    ``intersubband=False`` drops the transitions so that the normal component
    equals the lateral one.
    """

    fermi_energy: float
    thickness: float
    intersubband: bool = True
    n_max_transitions: Optional[int] = None

    def __post_init__(self):
        if not self.fermi_energy > 0.0:
            raise ValueError(f"fermi_energy must be > 0, got {self.fermi_energy!r}")
        if not self.thickness > 0.0:
            raise ValueError(f"thickness must be > 0, got {self.thickness!r}")

    @property
    def spectrum(self):
        from .qse import pib_spectrum

        return pib_spectrum(self.fermi_energy, self.thickness)


DielectricModel = Union[Vacuum, Plasma, Drude, PerfectConductor, UniaxialPIB]

MODEL_NAMES = {
    "vacuum": Vacuum,
    "plasma": Plasma,
    "drude": Drude,
    "perfect_conductor": PerfectConductor,
    "uniaxial_pib": UniaxialPIB,
}


@dataclass(frozen=True)
class ZeroFrequencyLimit:
    """How a permittivity behaves as xi -> 0.

    kind is one of ``finite`` (value = eps(0)), ``divergent_with_xi2_eps``
    (value = lim xi^2 eps), ``divergent_with_xi_eps`` (value = lim xi eps) or
    ``infinite``.
    """

    kind: str
    value: Optional[float] = None


def _positive_xi(xi):
    xi_arr = np.asarray(xi, dtype=float)
    if np.any(~(xi_arr > 0.0)):
        raise ValueError("xi must be > 0; use zero_frequency_limit at xi = 0")
    return xi_arr


def susceptibility_imag(model: DielectricModel, xi):
    """eps(i xi) - 1 computed without cancellation (lateral component for PIB films)."""
    xi_arr = _positive_xi(xi)
    if isinstance(model, Vacuum):
        out = np.zeros_like(xi_arr)
    elif isinstance(model, Plasma):
        out = (model.omega_p / xi_arr) ** 2
    elif isinstance(model, Drude):
        out = model.omega_p**2 / (xi_arr * (xi_arr + 1.0 / model.tau))
    elif isinstance(model, UniaxialPIB):
        out = (model.spectrum.omega_p_eff / xi_arr) ** 2
    elif isinstance(model, PerfectConductor):
        raise UnsupportedModelError("perfect conductor has no finite permittivity")
    else:
        raise TypeError(f"unknown dielectric model {model!r}")
    return float(out) if np.ndim(out) == 0 else out


def eps_imag(model: DielectricModel, xi):
    """Permittivity at imaginary frequency i*xi (lateral component for PIB films).

    Accepts a scalar or an array of positive frequencies.
    """
    return 1.0 + susceptibility_imag(model, xi)


def zero_frequency_limit(model: DielectricModel) -> ZeroFrequencyLimit:
    if isinstance(model, Vacuum):
        return ZeroFrequencyLimit("finite", 1.0)
    if isinstance(model, Plasma):
        return ZeroFrequencyLimit("divergent_with_xi2_eps", model.omega_p**2)
    if isinstance(model, Drude):
        return ZeroFrequencyLimit("divergent_with_xi_eps", model.omega_p**2 * model.tau)
    if isinstance(model, UniaxialPIB):
        return ZeroFrequencyLimit("divergent_with_xi2_eps", model.spectrum.omega_p_eff**2)
    if isinstance(model, PerfectConductor):
        return ZeroFrequencyLimit("infinite")
    raise TypeError(f"unknown dielectric model {model!r}")


def plasma_frequency(model: DielectricModel) -> float:
    """Characteristic plasma frequency of a model, 0 for vacuum and perfect conductors."""
    if isinstance(model, (Plasma, Drude)):
        return model.omega_p
    if isinstance(model, UniaxialPIB):
        return model.spectrum.omega_p_eff
    return 0.0
