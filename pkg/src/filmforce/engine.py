"""Lifshitz free energy and forces for 3- and 5-layer planar stacks.

The free energy per unit area is

    E = (k_B T / 2 pi) sum'_n  int k dk  sum_modes ln D(k, i xi_n)

with the primed sum giving the n = 0 term half weight. For the stack
4 | 1 (d1) | 3 (d) | 2 (d2) | 5 the normalised mode function factorises as

    D = (1 - rho13 rho14 e1) (1 - rho23 rho25 e2) (1 - r_L r_R e3),
    e_i = exp(-2 gamma_i d_i),

where r_L, r_R are the spacer-backed reflection amplitudes seen from inside
the film. Forces are minus the analytic derivatives of E with respect to the
film thickness d (force on the film boundaries) or the gap d1 (film-substrate
force). A 3-layer stack is the special case d1 = d2 = infinity.

At T = 0 the Matsubara sum becomes (hbar / 2 pi) times an integral over xi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import (
    C_LIGHT,
    HBAR,
    K_BOLTZMANN,
    EngineSpec,
    ForceResult,
    FreeEnergyResult,
    default_engine_spec,
)
from .dielectric import plasma_frequency
from .quadrature import integrate_rows
from .stack import (
    LayerStack3,
    LayerStack5,
    ModeKind,
    Response,
    _stack3_as_5,
    _stack5_layers,
    layer_response,
    stack_terms,
)

# e-foldings of the reference exponential kept in the wavevector integral
EFOLDINGS = 36.0
# frequency floor of the Matsubara sum in units of c / (2 L)
RETARDATION_FLOOR = 10.0
TAIL_WINDOW = 5


@dataclass(frozen=True)
class _Problem:
    layers: tuple
    thicknesses: tuple  # (d1, d, d2)
    quantity: str  # "energy", "d" or "d1"

    @property
    def ref(self) -> int:
        """Index into (spacer1, film, spacer2) of the layer whose decay sets the k scale."""
        if self.quantity == "d":
            return 1
        if self.quantity == "d1":
            return 0
        return int(np.argmin(self.thicknesses))

    @property
    def length(self) -> float:
        return self.thicknesses[self.ref]

    @property
    def sign(self) -> float:
        return 1.0 if self.quantity == "energy" else -1.0


def _responses(layers, xi, zero):
    cache = {}
    out = []
    for model in layers:
        if model not in cache:
            cache[model] = layer_response(model, xi, zero=zero)
        out.append(cache[model])
    return out


def _take(resp: Response, rows) -> Response:
    return Response(
        resp.te_b[rows], resp.tm_a[rows], resp.tm_b[rows],
        resp.p_alpha[rows], resp.p_beta[rows], resp.order, resp.perfect,
        None if resp.chi is None else resp.chi[rows],
    )


def _one_minus_decay(g, thickness):
    """1 - exp(-2 g thickness) without cancellation at small g thickness."""
    if math.isinf(thickness):
        return np.ones(np.shape(g))
    with np.errstate(invalid="ignore"):
        return -np.expm1(-2.0 * g * thickness)


def _log_factor(small, full):
    """ln(1 + small), switching to ln(full) where small approaches -1."""
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(np.abs(small) < 0.5, np.log1p(small), np.log(full))


def _kernel(mode, quantity, resps, thicknesses, ksq):
    """ln D or its derivative for D = G1 G2 F3 written in cancellation-free factors.

    G_i = 1 + r_i e_i = (1 + r_i) - r_i (1 - e_i) and F3 = 1 - R e3 = (1 - R) + R (1 - e3)
    stay accurate when the reflections are ideal (r_i = -1, R = 1) and k -> 0.
    """
    t = stack_terms(mode, resps, thicknesses, ksq)
    d1, d, d2 = thicknesses
    r1 = t.rho31 * t.rho14
    r2 = t.rho32 * t.rho25
    g1 = (1.0 + r1) - r1 * _one_minus_decay(t.g1, d1)
    g2 = (1.0 + r2) - r2 * _one_minus_decay(t.g2, d2)
    a = (t.rho31 + t.rho14) - t.rho14 * _one_minus_decay(t.g1, d1)
    b = (t.rho32 + t.rho25) - t.rho25 * _one_minus_decay(t.g2, d2)
    ratio = (a / g1) * (b / g2)
    f3 = (1.0 - ratio) + ratio * _one_minus_decay(t.g3, d)
    if quantity == "energy":
        return _log_factor(r1 * t.e1, g1) + _log_factor(r2 * t.e2, g2) + _log_factor(-ratio * t.e3, f3)
    if quantity == "d":
        ge3 = np.where(t.e3 > 0.0, t.g3 * t.e3, 0.0)
        return 2.0 * ge3 * ratio / f3
    ge1 = np.where(t.e1 > 0.0, t.g1 * t.e1, 0.0)
    return -2.0 * ge1 * t.rho14 * (t.rho31 * g2 - b * t.e3) / (g1 * g2 * f3)


def _k_integrals(problem: _Problem, xi, zero: bool, qtol: float):
    """int k dk sum_modes [kernel] for every xi; returns (value, error, converged)."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    resps = _responses(problem.layers, xi, zero)
    ref_resp = resps[1 + problem.ref]
    span = 0.5 * EFOLDINGS / problem.length
    value = np.zeros(xi.size)
    error = np.zeros(xi.size)
    row_ok = np.ones(xi.size, dtype=bool)
    for mode in (ModeKind.TM, ModeKind.TE):
        if ref_resp.perfect:
            continue
        if mode is ModeKind.TE:
            a_ref, b_ref = np.ones_like(xi), ref_resp.te_b
        else:
            a_ref, b_ref = ref_resp.tm_a, ref_resp.tm_b
        # TM fields that cannot enter the reference layer contribute nothing
        live = np.nonzero(np.isfinite(a_ref))[0]
        if live.size == 0:
            continue
        a_l, b_l = a_ref[live], b_ref[live]
        sub = [_take(r, live) for r in resps]
        u0 = np.sqrt(b_l)

        def integrand(rows, u, mode=mode, a_l=a_l, b_l=b_l, sub=sub):
            ar = a_l[rows][:, None]
            ksq = np.maximum((u * u - b_l[rows][:, None]) / ar, 0.0)
            rr = [_take(r, rows) for r in sub]
            return u / ar * _kernel(mode, problem.quantity, rr, problem.thicknesses, ksq)

        # accuracy is judged on the TM + TE sum, so TE inherits TM's scale
        atol = np.maximum(qtol * np.abs(value[live]), 1e-300)
        res = integrate_rows(integrand, u0, u0 + span, qtol, atol=atol)
        value[live] += res.value
        error[live] += res.error
        row_ok[live] &= res.converged
    ok = bool(np.all(row_ok | (error <= qtol * np.abs(value))))
    return value, error, ok


def _tail_estimate(terms: Sequence[float]) -> float:
    last = abs(terms[-1])
    first = abs(terms[-TAIL_WINDOW])
    if last == 0.0 and first == 0.0:
        return 0.0
    if first == 0.0:
        return math.inf
    ratio = (last / first) ** (1.0 / (TAIL_WINDOW - 1))
    if ratio >= 1.0:
        return math.inf
    return last * ratio / (1.0 - ratio)


def _matsubara(problem: _Problem, spec: EngineSpec):
    temp = spec.temperature
    xi1 = 2.0 * math.pi * K_BOLTZMANN * temp / HBAR
    pref = problem.sign * K_BOLTZMANN * temp / (2.0 * math.pi)
    n_floor = max(1, math.ceil(RETARDATION_FLOOR * C_LIGHT / (2.0 * problem.length) / xi1))
    n_cap = int(spec.max_matsubara_terms)
    qtol = spec.quadrature_rel_tol

    v0, e0, ok = _k_integrals(problem, [0.0], True, qtol)
    terms = [0.5 * pref * v0[0]]
    quad_err = 0.5 * abs(pref) * e0[0]
    # Neumaier running sum, used only for the stopping test
    run, comp = terms[0], 0.0
    tail = math.inf
    stopped = False
    n = 1
    block = min(max(n_floor + 2 * TAIL_WINDOW, 64), 4096)
    while n < n_cap and not stopped:
        idx = np.arange(n, min(n + block, n_cap))
        v, e, block_ok = _k_integrals(problem, idx * xi1, False, qtol)
        ok = ok and block_ok
        for j, nn in enumerate(idx):
            t = pref * v[j]
            terms.append(t)
            quad_err += abs(pref) * e[j]
            s = run + t
            comp += (run - s) + t if abs(run) >= abs(t) else (t - s) + run
            run = s
            if spec.matsubara_tail_check and nn >= n_floor and len(terms) > TAIL_WINDOW:
                total = run + comp
                thr = max(spec.abs_tol, spec.rel_tol * abs(total))
                if all(abs(x) <= thr for x in terms[-TAIL_WINDOW:]):
                    tail = _tail_estimate(terms)
                    if tail + quad_err <= thr:
                        stopped = True
                        break
        n = int(idx[-1]) + 1
        block = min(2 * block, 4096)

    value = math.fsum(terms)
    if not stopped:
        tail = _tail_estimate(terms) if len(terms) > TAIL_WINDOW else math.inf
    est = quad_err + tail
    converged = ok and est <= max(spec.abs_tol, spec.rel_tol * abs(value))
    return value, est, len(terms), converged


def _zero_temperature(problem: _Problem, spec: EngineSpec):
    omega_c = max([plasma_frequency(m) for m in problem.layers] + [C_LIGHT / (2.0 * problem.length)])
    pref = problem.sign * HBAR / (4.0 * math.pi**2)
    state = {"ok": True}

    def outer(rows, t):
        xi = omega_c * t / (1.0 - t)
        jac = omega_c / (1.0 - t) ** 2
        v, _, ok = _k_integrals(problem, xi.ravel(), False, spec.quadrature_rel_tol)
        state["ok"] = state["ok"] and ok
        return v.reshape(t.shape) * jac

    atol = spec.abs_tol / abs(pref) if spec.abs_tol > 0 else 1e-300
    res = integrate_rows(outer, [0.0], [1.0], spec.rel_tol, atol=atol, initial_panels=4)
    value = pref * float(res.value[0])
    est = abs(pref) * float(res.error[0]) + spec.quadrature_rel_tol * abs(value)
    converged = state["ok"] and bool(res.converged[0]) and est <= max(
        spec.abs_tol, spec.rel_tol * abs(value)
    )
    return value, est, 0, converged


def _evaluate(layers, thicknesses, quantity, spec):
    problem = _Problem(tuple(layers), tuple(float(t) for t in thicknesses), quantity)
    if spec.zero_temperature_mode:
        return _zero_temperature(problem, spec)
    return _matsubara(problem, spec)


def _force(layers, thicknesses, quantity, spec) -> ForceResult:
    spec = spec or default_engine_spec()
    value, est, used, conv = _evaluate(layers, thicknesses, quantity, spec)
    return ForceResult(float(value), float(est), int(used), bool(conv))


def _energy(layers, thicknesses, spec) -> FreeEnergyResult:
    spec = spec or default_engine_spec()
    value, est, used, conv = _evaluate(layers, thicknesses, "energy", spec)
    return FreeEnergyResult(float(value), float(est), int(used), bool(conv))


def lifshitz_integrand_3(stack: LayerStack3, k: float, xi: float) -> float:
    """k * sum_modes gamma3 (1 - Q)/Q for a 3-layer stack at one (k, xi)."""
    if k < 0.0 or xi < 0.0:
        raise ValueError("k and xi must be >= 0")
    layers, th = _stack3_as_5(stack)
    resps = _responses(layers, [xi], xi == 0.0)
    ksq = np.array([k * k])
    total = 0.0
    for mode in (ModeKind.TM, ModeKind.TE):
        total += float(_kernel(mode, "d", resps, th, ksq)[0])
    # the kernel is d/dd ln Q = 2 gamma3 (1 - Q)/Q
    return 0.5 * k * total


def force_three_layer(stack: LayerStack3, spec: Optional[EngineSpec] = None) -> ForceResult:
    """Force per unit area on the film boundaries of a 3-layer stack."""
    layers, th = _stack3_as_5(stack)
    return _force(layers, th, "d", spec)


def free_energy_three_layer(stack: LayerStack3, spec: Optional[EngineSpec] = None) -> FreeEnergyResult:
    layers, th = _stack3_as_5(stack)
    return _energy(layers, th, spec)


def free_energy_five_layer(stack: LayerStack5, spec: Optional[EngineSpec] = None) -> FreeEnergyResult:
    layers, th = _stack5_layers(stack)
    return _energy(layers, th, spec)


def force_film_boundaries(stack: LayerStack5, spec: Optional[EngineSpec] = None) -> ForceResult:
    """F = -dE/dd at fixed spacer thicknesses; negative contracts the film."""
    layers, th = _stack5_layers(stack)
    return _force(layers, th, "d", spec)


def force_film_substrate(stack: LayerStack5, spec: Optional[EngineSpec] = None) -> ForceResult:
    """F' = -dE/dd1, the interaction across the gap between eps4 and the film."""
    if math.isinf(stack.d1):
        return ForceResult(0.0, 0.0, 0, True)
    layers, th = _stack5_layers(stack)
    return _force(layers, th, "d1", spec)


def force_zero_temperature(stack: LayerStack3, spec: Optional[EngineSpec] = None) -> ForceResult:
    """Fully retarded T = 0 force on the film boundaries of a 3-layer stack."""
    if spec is None:
        spec = EngineSpec(temperature=0.0, zero_temperature_mode=True)
    if not spec.zero_temperature_mode:
        raise ValueError("force_zero_temperature requires zero_temperature_mode=True")
    layers, th = _stack3_as_5(stack)
    return _force(layers, th, "d", spec)
