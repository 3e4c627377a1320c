"""Closed-form limits of the fluctuation force, used as oracles and fast estimates.

All forces are per unit area in N/m^2; negative means attractive.
"""
from __future__ import annotations

import math

import numpy as np

from .core import C_LIGHT, HBAR
from .dielectric import Drude, PerfectConductor, Plasma, UnsupportedModelError, Vacuum, eps_imag
from .quadrature import integrate


def _positive(name, value):
    if not (value > 0.0 and math.isfinite(value)):
        raise ValueError(f"{name} must be a finite positive number, got {value!r}")


def casimir_ideal(d: float) -> float:
    """Force between two perfectly reflecting plates at T = 0."""
    _positive("d", d)
    return -HBAR * math.pi**2 * C_LIGHT / (240.0 * d**4)


def vdw_free_film(omega3: float, d: float) -> float:
    """Non-retarded force on a free-standing plasma film, -hbar Omega_s / (32 pi d^3)."""
    _positive("omega3", omega3)
    _positive("d", d)
    return -HBAR * (omega3 / math.sqrt(2.0)) / (32.0 * math.pi * d**3)


def vdw_film_on_ideal(omega_p: float, d: float) -> float:
    """Non-retarded force on a plasma film resting on a perfect conductor (repulsive)."""
    _positive("omega_p", omega_p)
    _positive("d", d)
    return math.sqrt(2.0) * HBAR * omega_p / (32.0 * math.pi * d**3)


def vdw_bimetal(omega1: float, omega3: float, d: float) -> float:
    """Non-retarded force on a plasma film (omega3) on a plasma substrate (omega1).

    ``omega1 = inf`` gives the perfectly reflecting substrate limit.
    """
    _positive("omega3", omega3)
    _positive("d", d)
    if not omega1 >= 0.0:
        raise ValueError(f"omega1 must be >= 0, got {omega1!r}")
    if math.isinf(omega1):
        return vdw_film_on_ideal(omega3, d)
    omega_s = omega3 / math.sqrt(2.0)
    omega_bar = math.sqrt(0.5 * (omega1**2 + omega3**2))
    return (
        HBAR / (32.0 * math.pi * d**3)
        * omega_s * (omega1**2 - omega3**2) / (omega_bar * (omega_bar + omega_s))
    )


def nonretarded_integral(film, d: float, rtol: float = 1e-11) -> float:
    """Non-retarded force on a free-standing film by quadrature over imaginary frequency.

    Integrates -hbar/(8 pi^2 d^3) * ((eps - 1)/(eps + 1))^2 over xi with the
    mapping xi = Omega_p t / (1 - t).
    """
    _positive("d", d)
    if isinstance(film, Vacuum):
        return 0.0
    if isinstance(film, PerfectConductor):
        raise UnsupportedModelError("the non-retarded integral diverges for a perfect conductor")
    if not isinstance(film, (Plasma, Drude)):
        raise UnsupportedModelError(f"nonretarded_integral needs a Plasma or Drude film, got {film!r}")
    scale = film.omega_p

    def integrand(t):
        t = np.clip(t, 1e-300, 1.0 - 1e-16)
        xi = scale * t / (1.0 - t)
        eps = eps_imag(film, xi)
        delta = (eps - 1.0) / (eps + 1.0)
        return delta**2 * scale / (1.0 - t) ** 2

    value, _, _ = integrate(integrand, 0.0, 1.0, rtol=rtol)
    return -HBAR / (8.0 * math.pi**2 * d**3) * value
