"""Planar layer stacks and the reflection algebra of the Lifshitz integrand.

On the imaginary frequency axis every decay constant is real and positive,
so all quantities here are real. Each layer is summarised per frequency by

    gamma_TE^2 = k^2 + te_b
    gamma_TM^2 = tm_a k^2 + tm_b          (tm_a = eps_x/eps_z for uniaxial films)
    p_TM       = xi^order sqrt(p_alpha k^2 + p_beta)

where p_TM = gamma_TM / eps_x is the TM admittance entering the Fresnel
coefficients. At xi > 0 the order is 0; at xi = 0 divergent permittivities
are kept symbolically through the order of their divergence, and a perfect
conductor has order infinity.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .core import C_LIGHT
from .dielectric import (
    DielectricModel,
    Drude,
    PerfectConductor,
    Plasma,
    UniaxialPIB,
    Vacuum,
    susceptibility_imag,
)


class ModeKind(enum.Enum):
    TM = "TM"
    TE = "TE"


def _check_model(model, where):
    if not isinstance(model, (Vacuum, Plasma, Drude, PerfectConductor, UniaxialPIB)):
        raise TypeError(f"{where}: unknown dielectric model {model!r}")


def _check_thickness(value, name, allow_inf=False):
    ok = value > 0.0 and (allow_inf or math.isfinite(value))
    if not ok:
        raise ValueError(f"{name} must be > 0, got {value!r}")


@dataclass(frozen=True)
class LayerStack3:
    """Film eps3 of thickness d between half-spaces eps1 and eps2."""

    eps1: DielectricModel
    eps2: DielectricModel
    eps3: DielectricModel
    d: float

    def __post_init__(self):
        for name in ("eps1", "eps2", "eps3"):
            _check_model(getattr(self, name), name)
        _check_thickness(self.d, "d")
        if isinstance(self.eps3, PerfectConductor):
            raise ValueError("eps3: the film cannot be a perfect conductor")
        for name in ("eps1", "eps2"):
            if isinstance(getattr(self, name), UniaxialPIB):
                raise ValueError(f"{name}: particle-in-a-box model is only supported for the film")
        if isinstance(self.eps3, UniaxialPIB) and not math.isclose(
            self.eps3.thickness, self.d, rel_tol=1e-12
        ):
            raise ValueError("eps3: particle-in-a-box thickness must equal d")


@dataclass(frozen=True)
class LayerStack5:
    """Half-space eps4 | spacer eps1 (d1) | film eps3 (d) | spacer eps2 (d2) | half-space eps5.

    Spacer thicknesses may be ``math.inf``.
    """

    eps4: DielectricModel
    eps1: DielectricModel
    eps3: DielectricModel
    eps2: DielectricModel
    eps5: DielectricModel
    d: float
    d1: float
    d2: float

    def __post_init__(self):
        for name in ("eps4", "eps1", "eps3", "eps2", "eps5"):
            model = getattr(self, name)
            _check_model(model, name)
            if isinstance(model, UniaxialPIB):
                raise ValueError(f"{name}: particle-in-a-box model is not supported in 5-layer stacks")
        for name in ("eps1", "eps3", "eps2"):
            if isinstance(getattr(self, name), PerfectConductor):
                raise ValueError(f"{name}: perfect conductors are only allowed as half-spaces")
        _check_thickness(self.d, "d")
        _check_thickness(self.d1, "d1", allow_inf=True)
        _check_thickness(self.d2, "d2", allow_inf=True)


class Response(NamedTuple):
    te_b: np.ndarray
    tm_a: np.ndarray
    tm_b: np.ndarray
    p_alpha: np.ndarray
    p_beta: np.ndarray
    order: float
    perfect: bool
    chi: Optional[np.ndarray] = None  # eps - 1 of isotropic layers at xi > 0


def layer_response(model: DielectricModel, xi, zero: bool = False) -> Response:
    """Per-frequency layer coefficients for an array of xi (all zero if ``zero``)."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    ones = np.ones_like(xi)
    if isinstance(model, PerfectConductor):
        inf = np.full_like(xi, np.inf)
        return Response(inf, ones, inf, ones, ones, math.inf, True)
    if zero:
        return _zero_response(model, ones)
    if isinstance(model, Vacuum):
        b = (xi / C_LIGHT) ** 2
        return Response(b, ones, b, ones, b, 0.0, False, np.zeros_like(xi))
    if isinstance(model, UniaxialPIB):
        from .qse import pib_eps_components

        eps_x, eps_z = pib_eps_components(model, xi)
        b = (xi / C_LIGHT) ** 2 * eps_x
        a = eps_x / eps_z
        return Response(b, a, b, a / eps_x**2, b / eps_x**2, 0.0, False)
    chi = np.asarray(susceptibility_imag(model, xi), dtype=float).reshape(xi.shape)
    eps = 1.0 + chi
    b = (xi / C_LIGHT) ** 2 * eps
    return Response(b, ones, b, 1.0 / eps**2, b / eps**2, 0.0, False, chi)


def _zero_response(model, ones):
    zeros = np.zeros_like(ones)
    if isinstance(model, Vacuum):
        return Response(zeros, ones, zeros, ones, zeros, 0.0, False)
    if isinstance(model, Plasma) or (isinstance(model, UniaxialPIB) and not model.intersubband):
        omega = model.omega_p if isinstance(model, Plasma) else model.spectrum.omega_p_eff
        b = ones * (omega / C_LIGHT) ** 2
        # p = gamma xi^2 / omega^2
        return Response(b, ones, b, ones / omega**4, b / omega**4, 2.0, False)
    if isinstance(model, Drude):
        # xi eps -> omega^2 tau; xi^2 eps -> 0, so gamma = k and TE sees vacuum
        scale = model.omega_p**2 * model.tau
        return Response(zeros, ones, zeros, ones / scale**2, zeros, 1.0, False)
    if isinstance(model, UniaxialPIB):
        from .qse import pib_static_eps_normal

        omega = model.spectrum.omega_p_eff
        eps_z0 = pib_static_eps_normal(model)
        b = ones * (omega / C_LIGHT) ** 2
        # eps_x/eps_z diverges: TM fields do not penetrate the film at all
        inf = np.full_like(ones, np.inf)
        return Response(b, inf, b, ones / (omega**2 * eps_z0), zeros, 1.0, False)
    raise TypeError(f"unknown dielectric model {model!r}")


def _bcast(arr, ksq):
    return arr[..., None] if np.ndim(ksq) > np.ndim(arr) else arr


def gamma_te(resp: Response, ksq):
    if resp.perfect:
        return np.full(np.shape(ksq), np.inf)
    return np.sqrt(ksq + _bcast(resp.te_b, ksq))


def gamma_tm(resp: Response, ksq):
    if resp.perfect:
        return np.full(np.shape(ksq), np.inf)
    a = _bcast(resp.tm_a, ksq)
    with np.errstate(invalid="ignore"):
        g = np.sqrt(a * ksq + _bcast(resp.tm_b, ksq))
    return np.where(np.isinf(a), np.inf, g)


def admittance(resp: Response, ksq):
    if resp.perfect:
        return np.zeros(np.shape(ksq))
    return np.sqrt(_bcast(resp.p_alpha, ksq) * ksq + _bcast(resp.p_beta, ksq))


def rho_te_from(resp_m: Response, resp_n: Response, g_m, g_n):
    """(gamma_m - gamma_n)/(gamma_m + gamma_n) with perfect-conductor limits.

    Evaluated as (gamma_m^2 - gamma_n^2)/(gamma_m + gamma_n)^2 so that
    nearly equal decay constants do not cancel.
    """
    if resp_m.perfect and resp_n.perfect:
        return np.zeros(np.shape(g_m))
    if resp_n.perfect:
        return -np.ones(np.shape(g_m))
    if resp_m.perfect:
        return np.ones(np.shape(g_n))
    s = g_m + g_n
    with np.errstate(invalid="ignore", divide="ignore"):
        if resp_m.chi is not None and resp_n.chi is not None:
            xi_c2 = _bcast(resp_m.te_b / (1.0 + resp_m.chi), g_m)
            diff = xi_c2 * (_bcast(resp_m.chi, g_m) - _bcast(resp_n.chi, g_n))
        else:
            diff = _bcast(resp_m.te_b, g_m) - _bcast(resp_n.te_b, g_n)
        r = diff / (s * s)
    return np.where(s > 0.0, r, 0.0)


def rho_tm_from(resp_m: Response, resp_n: Response, p_m, p_n, ksq):
    """(p_m - p_n)/(p_m + p_n) in terms of admittances p = gamma/eps.

    Equivalent to (gamma_m eps_n - gamma_n eps_m)/(gamma_m eps_n + gamma_n eps_m).
    When the admittances vanish at different rates (xi = 0, perfect
    conductors) the one vanishing faster wins. Like the TE case it is
    evaluated through p_m^2 - p_n^2.
    """
    shape = np.broadcast_shapes(np.shape(p_m), np.shape(p_n))
    if resp_m.order < resp_n.order:
        return np.ones(shape)
    if resp_m.order > resp_n.order:
        return -np.ones(shape)
    if math.isinf(resp_m.order):
        return np.zeros(shape)
    s = p_m + p_n
    with np.errstate(invalid="ignore", divide="ignore"):
        if resp_m.chi is not None and resp_n.chi is not None:
            chi_m, chi_n = _bcast(resp_m.chi, s), _bcast(resp_n.chi, s)
            eps_m, eps_n = 1.0 + chi_m, 1.0 + chi_n
            xi_c2 = _bcast(resp_m.te_b, s) / eps_m
            diff = (chi_n - chi_m) * ((2.0 + chi_m + chi_n) * ksq / (eps_m * eps_n) + xi_c2) / (eps_m * eps_n)
        else:
            diff = (
                (_bcast(resp_m.p_alpha, s) - _bcast(resp_n.p_alpha, s)) * ksq
                + _bcast(resp_m.p_beta, s) - _bcast(resp_n.p_beta, s)
            )
        r = diff / (s * s)
    return np.where(s > 0.0, r, 0.0)


def mode_gamma(mode: ModeKind, resp: Response, ksq):
    return gamma_te(resp, ksq) if mode is ModeKind.TE else gamma_tm(resp, ksq)


def mode_rho(mode: ModeKind, resp_m: Response, resp_n: Response, ksq):
    if mode is ModeKind.TE:
        return rho_te_from(resp_m, resp_n, gamma_te(resp_m, ksq), gamma_te(resp_n, ksq))
    return rho_tm_from(resp_m, resp_n, admittance(resp_m, ksq), admittance(resp_n, ksq), ksq)


# ---------------------------------------------------------------------------
# scalar public operations


def _check_kxi(k, xi):
    if k < 0.0 or xi < 0.0:
        raise ValueError(f"k and xi must be >= 0, got k={k!r}, xi={xi!r}")


def _resp(model, xi):
    return layer_response(model, [xi], zero=(xi == 0.0))


def gamma(model: DielectricModel, k: float, xi: float) -> float:
    """Decay constant sqrt(k^2 + xi^2 eps(i xi)/c^2); ``inf`` for a perfect conductor."""
    _check_kxi(k, xi)
    return float(gamma_te(_resp(model, xi), np.array([k * k]))[0])


def rho(mode: ModeKind, model_m: DielectricModel, model_n: DielectricModel, k: float, xi: float) -> float:
    """Interface reflection coefficient rho_mn for the given polarisation."""
    _check_kxi(k, xi)
    if model_m == model_n:
        return 0.0
    ksq = np.array([k * k])
    return float(mode_rho(mode, _resp(model_m, xi), _resp(model_n, xi), ksq)[0])


def gamma_uniaxial_tm(eps_lateral: float, eps_normal: float, k: float, xi: float) -> float:
    """TM decay constant in a uniaxial layer whose optical axis is the film normal."""
    if eps_normal == 0.0:
        raise ZeroDivisionError("eps_normal = 0 is singular")
    if eps_lateral < 1.0 or eps_normal < 1.0:
        raise ValueError("eps_lateral and eps_normal must be >= 1")
    _check_kxi(k, xi)
    return math.sqrt(k * k * eps_lateral / eps_normal + (xi / C_LIGHT) ** 2 * eps_lateral)


class StackTerms(NamedTuple):
    """Reflection factors of a 5-layer stack at one (k, xi) set, for one mode."""

    rho31: np.ndarray
    rho32: np.ndarray
    rho14: np.ndarray
    rho25: np.ndarray
    g1: np.ndarray
    g3: np.ndarray
    g2: np.ndarray
    e1: np.ndarray
    e3: np.ndarray
    e2: np.ndarray


def _decay(g, thickness):
    if math.isinf(thickness):
        return np.zeros(np.shape(g))
    with np.errstate(invalid="ignore"):
        return np.exp(-2.0 * g * thickness)


def stack_terms(mode: ModeKind, resps, thicknesses, ksq) -> StackTerms:
    """``resps`` = responses of layers (4, 1, 3, 2, 5); ``thicknesses`` = (d1, d, d2)."""
    r4, r1, r3, r2, r5 = resps
    d1, d, d2 = thicknesses
    g1 = mode_gamma(mode, r1, ksq)
    g3 = mode_gamma(mode, r3, ksq)
    g2 = mode_gamma(mode, r2, ksq)
    return StackTerms(
        mode_rho(mode, r3, r1, ksq),
        mode_rho(mode, r3, r2, ksq),
        mode_rho(mode, r1, r4, ksq) if not math.isinf(d1) else np.zeros(np.shape(ksq)),
        mode_rho(mode, r2, r5, ksq) if not math.isinf(d2) else np.zeros(np.shape(ksq)),
        g1, g3, g2,
        _decay(g1, d1), _decay(g3, d), _decay(g2, d2),
    )


def _stack3_as_5(stack: LayerStack3):
    return (stack.eps1, stack.eps1, stack.eps3, stack.eps2, stack.eps2), (math.inf, stack.d, math.inf)


def _stack5_layers(stack: LayerStack5):
    return (stack.eps4, stack.eps1, stack.eps3, stack.eps2, stack.eps5), (stack.d1, stack.d, stack.d2)


def q_three_layer(mode: ModeKind, stack: LayerStack3, k: float, xi: float) -> float:
    """Q = 1 - rho31 rho32 exp(-2 d gamma3)."""
    _check_kxi(k, xi)
    layers, th = _stack3_as_5(stack)
    t = stack_terms(mode, [_resp(m, xi) for m in layers], th, np.array([k * k]))
    return float(1.0 - t.rho31[0] * t.rho32[0] * t.e3[0])


def q_five_layer_product(mode: ModeKind, stack: LayerStack5, k: float, xi: float) -> float:
    """Round-trip factor Q1*Q2 of the film cavity with both spacer-backed mirrors."""
    _check_kxi(k, xi)
    layers, th = _stack5_layers(stack)
    t = stack_terms(mode, [_resp(m, xi) for m in layers], th, np.array([k * k]))
    q1 = -(t.rho31 + t.rho14 * t.e1) / (1.0 + t.rho31 * t.rho14 * t.e1) * np.sqrt(t.e3)
    q2 = -(t.rho32 + t.rho25 * t.e2) / (1.0 + t.rho32 * t.rho25 * t.e2) * np.sqrt(t.e3)
    return float(q1[0] * q2[0])
