"""Particle-in-a-box quantum size effects for thin metallic films.

Electrons are free in the film plane and confined by hard walls along z,
so the subband energies are E0 n^2 with E0 = hbar^2 pi^2 / (2 m d^2). The
in-plane permittivity stays plasma-like with a thickness-dependent density;
the normal component picks up the z-polarised intersubband transitions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .core import (
    ELECTRON_MASS,
    ELEMENTARY_CHARGE,
    HBAR,
    VACUUM_PERMITTIVITY,
    EngineSpec,
    ForceResult,
)

# extra shells beyond the top occupied subband, and the static increment,
# relative to the static eps_zz - 1, below which further shells are dropped
EXTRA_SHELLS = 100
SHELL_INCREMENT_TOL = 1e-10


class FilmTooThinError(ValueError):
    """No subband lies below the Fermi energy."""


@dataclass(frozen=True)
class PIBSpectrum:
    e0: float
    n_occupied: int
    density: float
    omega_p_eff: float
    fermi_energy: float
    thickness: float


@dataclass(frozen=True)
class DielectricTensorIm:
    eps_lateral: float
    eps_normal: float
    converged: bool = True


@lru_cache(maxsize=256)
def pib_spectrum(fermi_energy: float, thickness: float) -> PIBSpectrum:
    """Subband structure and T = 0 electron density of a hard-wall film."""
    if not fermi_energy > 0.0:
        raise ValueError(f"fermi_energy must be > 0, got {fermi_energy!r}")
    if not thickness > 0.0:
        raise ValueError(f"thickness must be > 0, got {thickness!r}")
    e0 = HBAR**2 * math.pi**2 / (2.0 * ELECTRON_MASS * thickness**2)
    n_occ = int(math.floor(math.sqrt(fermi_energy / e0)))
    if n_occ < 1:
        raise FilmTooThinError(
            f"no occupied subband: E_F = {fermi_energy:.4g} J < E0 = {e0:.4g} J "
            f"for d = {thickness:.4g} m"
        )
    n = np.arange(1, n_occ + 1, dtype=float)
    # 2D density of states m / (pi hbar^2) per subband, spin included
    density = ELECTRON_MASS / (math.pi * HBAR**2 * thickness) * float(
        np.sum(fermi_energy - e0 * n**2)
    )
    omega_p = math.sqrt(density * ELEMENTARY_CHARGE**2 / (VACUUM_PERMITTIVITY * ELECTRON_MASS))
    return PIBSpectrum(e0, n_occ, density, omega_p, fermi_energy, thickness)


def bulk_density(fermi_energy: float) -> float:
    """Free-electron density (2 m E_F / hbar^2)^(3/2) / (3 pi^2)."""
    k_f = math.sqrt(2.0 * ELECTRON_MASS * fermi_energy) / HBAR
    return k_f**3 / (3.0 * math.pi**2)


def fermi_energy_for_plasma(omega_p: float) -> float:
    """Free-electron Fermi energy whose bulk plasma frequency is ``omega_p``."""
    if not omega_p > 0.0:
        raise ValueError(f"omega_p must be > 0, got {omega_p!r}")
    density = VACUUM_PERMITTIVITY * ELECTRON_MASS * omega_p**2 / ELEMENTARY_CHARGE**2
    k_f = (3.0 * math.pi**2 * density) ** (1.0 / 3.0)
    return (HBAR * k_f) ** 2 / (2.0 * ELECTRON_MASS)


def pz_matrix_element(n, n_prime, thickness: float):
    """|<n|p_z|n'>| for hard-wall eigenstates; zero unless n + n' is odd."""
    n = np.asarray(n, dtype=float)
    n_prime = np.asarray(n_prime, dtype=float)
    allowed = (n + n_prime) % 2 == 1
    with np.errstate(divide="ignore", invalid="ignore"):
        value = 4.0 * HBAR / thickness * n * n_prime / np.abs(n_prime**2 - n**2)
    return np.where(allowed, value, 0.0)


def oscillator_strength(n, n_prime, thickness: float):
    """Signed z oscillator strength 2 |p_nn'|^2 / (m (E_n' - E_n))."""
    n = np.asarray(n, dtype=float)
    n_prime = np.asarray(n_prime, dtype=float)
    e0 = HBAR**2 * math.pi**2 / (2.0 * ELECTRON_MASS * thickness**2)
    delta = e0 * (n_prime**2 - n**2)
    p = pz_matrix_element(n, n_prime, thickness)
    with np.errstate(divide="ignore", invalid="ignore"):
        f = 2.0 * p**2 / (ELECTRON_MASS * delta)
    return np.where(p > 0.0, f, 0.0)


def f_sum(n: int, n_max_transitions: int, thickness: float = 1e-8) -> float:
    """Sum of oscillator strengths out of subband n over n' <= n_max_transitions."""
    n_prime = np.arange(1, n_max_transitions + 1)
    return math.fsum(oscillator_strength(n, n_prime, thickness))


@lru_cache(maxsize=64)
def _transitions(fermi_energy: float, thickness: float, n_max: Optional[int]):
    """Weights w_j and squared frequencies w0_j^2 so that eps_zz = 1 + sum w/(w0^2 + xi^2)."""
    spec = pib_spectrum(fermi_energy, thickness)
    n_occ = spec.n_occupied
    top = n_occ + EXTRA_SHELLS if n_max is None else int(n_max)
    if top < n_occ:
        raise ValueError(f"n_max_transitions={top} is below n_occupied={n_occ}")
    n = np.arange(1, n_occ + 1, dtype=float)[:, None]
    n_prime = np.arange(1, top + 1, dtype=float)[None, :]
    # electrons per volume in subband n
    sub_density = ELECTRON_MASS / (math.pi * HBAR**2 * thickness) * (fermi_energy - spec.e0 * n**2)
    f = oscillator_strength(n, n_prime, thickness)
    omega0 = spec.e0 * np.abs(n_prime**2 - n**2) / HBAR
    weight = ELEMENTARY_CHARGE**2 / (VACUUM_PERMITTIVITY * ELECTRON_MASS) * sub_density * f
    with np.errstate(divide="ignore", invalid="ignore"):
        static = np.where(f != 0.0, weight / omega0**2, 0.0)
    shell_increment = np.abs(static.sum(axis=0))
    threshold = SHELL_INCREMENT_TOL * max(float(static.sum()), 1.0)
    converged = bool(shell_increment[-1] < threshold)
    if n_max is None:
        small = np.nonzero(shell_increment[n_occ:] < threshold)[0]
        if small.size:
            top = n_occ + int(small[0]) + 1
            converged = True
    mask = f[:, :top] != 0.0
    w = weight[:, :top][mask]
    w0sq = (omega0[:, :top] ** 2)[mask]
    w.setflags(write=False)
    w0sq.setflags(write=False)
    return w, w0sq, converged


def _eps_normal(fermi_energy, thickness, n_max, xi):
    w, w0sq, converged = _transitions(fermi_energy, thickness, n_max)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    out = np.empty_like(xi)
    # chunk over frequencies to bound memory for many transitions
    step = max(1, 2_000_000 // max(w.size, 1))
    for i in range(0, xi.size, step):
        block = xi[i:i + step, None]
        out[i:i + step] = 1.0 + np.sum(w / (w0sq + block**2), axis=1)
    return out, converged


def pib_dielectric_tensor(
    spectrum: PIBSpectrum, xi: float, n_max_transitions: Optional[int] = None
) -> DielectricTensorIm:
    """Lateral and normal permittivity of the film at imaginary frequency i*xi."""
    if not xi > 0.0:
        raise ValueError(f"xi must be > 0, got {xi!r}")
    if n_max_transitions is not None and n_max_transitions < spectrum.n_occupied:
        raise ValueError(
            f"n_max_transitions={n_max_transitions} is below n_occupied={spectrum.n_occupied}"
        )
    eps_lat = 1.0 + (spectrum.omega_p_eff / xi) ** 2
    eps_norm, converged = _eps_normal(
        spectrum.fermi_energy, spectrum.thickness, n_max_transitions, xi
    )
    return DielectricTensorIm(eps_lat, float(eps_norm[0]), converged)


def pib_eps_components(model, xi):
    """Vectorised (eps_lateral, eps_normal) for a UniaxialPIB model at xi > 0."""
    spectrum = model.spectrum
    xi = np.asarray(xi, dtype=float)
    eps_lat = 1.0 + (spectrum.omega_p_eff / xi) ** 2
    if not model.intersubband:
        return eps_lat, eps_lat.copy()
    eps_norm, _ = _eps_normal(model.fermi_energy, model.thickness, model.n_max_transitions, xi)
    return eps_lat, eps_norm.reshape(eps_lat.shape)


def pib_static_eps_normal(model) -> float:
    """eps_zz at zero frequency; finite because z motion is confined."""
    w, w0sq, _ = _transitions(model.fermi_energy, model.thickness, model.n_max_transitions)
    return 1.0 + math.fsum(w / w0sq)


def pib_force_free_film(
    fermi_energy: float,
    thickness: float,
    spec: Optional[EngineSpec] = None,
    intersubband: bool = True,
) -> ForceResult:
    """Force on a free-standing particle-in-a-box film in vacuum."""
    from .dielectric import UniaxialPIB, Vacuum
    from .engine import force_three_layer
    from .stack import LayerStack3

    film = UniaxialPIB(fermi_energy, thickness, intersubband=intersubband)
    return force_three_layer(LayerStack3(Vacuum(), Vacuum(), film, thickness), spec)
