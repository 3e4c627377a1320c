"""Independent oracles shared by the test modules.

Nothing here calls into the engine's reflection or stack code: layer
responses are rebuilt from eps_imag, and mode functions come from an
explicit transfer-matrix product.
"""
import math

import numpy as np
import pytest
from hypothesis import settings

from filmforce.core import C_LIGHT, HBAR
from filmforce.dielectric import PerfectConductor, UniaxialPIB, eps_imag
from filmforce.qse import pib_eps_components

settings.register_profile("ci", deadline=None, derandomize=True, print_blob=True)
settings.load_profile("ci")

_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion and print it."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])
    capman = request.config.pluginmanager.getplugin("capturemanager")

    def report(number, checks):
        ok = all(passed for _, passed in checks)
        detail = "; ".join(f"{text} [{'ok' if passed else 'FAIL'}]" for text, passed in checks)
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} | {detail}"
        lines.append(line)
        with capman.global_and_fixture_disabled():
            print("\n" + line, flush=True)
        return ok

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def eps_pair(model, xi):
    """(eps_lateral, eps_normal) at xi > 0, vectorised."""
    xi = np.asarray(xi, dtype=float)
    if isinstance(model, UniaxialPIB):
        ex, ez = pib_eps_components(model, xi.ravel())
        return ex.reshape(xi.shape), ez.reshape(xi.shape)
    e = np.asarray(eps_imag(model, xi), dtype=float).reshape(xi.shape)
    return e, e


def wave_params(model, k, xi, mode):
    """Decay constant and the quantity continuous with the field derivative."""
    ex, ez = eps_pair(model, xi)
    if mode == "TE":
        g = np.sqrt(k * k + ex * xi * xi / C_LIGHT**2)
        return g, g
    g = np.sqrt(ex / ez * k * k + ex * xi * xi / C_LIGHT**2)
    return g, g / ex


def tmm_mode_function(models, thicknesses, k, xi, mode):
    """Normalised mode function of a planar stack by transfer matrices.

    ``models`` runs left to right; ``thicknesses`` holds the inner layers.
    A wave decaying into the left half-space is carried across every
    interface and the coefficient of the growing wave in the right
    half-space is returned. It tends to 1 at infinite separations.
    Perfect conductors may only be the outer half-spaces; their interface
    is a mirror with TM admittance 0 and TE admittance infinity.
    """
    k, xi = np.broadcast_arrays(np.asarray(k, dtype=float), np.asarray(xi, dtype=float))
    params = [None if isinstance(m, PerfectConductor) else wave_params(m, k, xi, mode) for m in models]
    a, b = np.ones_like(k), np.zeros_like(k)
    for j in range(len(models) - 1):
        mirror_sign = 1.0 if mode == "TM" else -1.0
        if params[j] is None:
            r = mirror_sign * np.ones_like(k)
        elif params[j + 1] is None:
            r = -mirror_sign * np.ones_like(k)
        else:
            _, p_j = params[j]
            _, p_n = params[j + 1]
            r = (p_n - p_j) / (p_n + p_j)
        g_n = None if params[j + 1] is None else params[j + 1][0]
        a, b = a + r * b, r * a + b
        if j + 1 < len(models) - 1:
            b = b * np.exp(-2.0 * g_n * thicknesses[j])
    return a


def _panels(upper):
    edges = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, upper]
    nodes, weights = np.polynomial.legendre.leggauss(24)
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        xs.append(0.5 * (hi - lo) * nodes + 0.5 * (hi + lo))
        ws.append(0.5 * (hi - lo) * weights)
    return np.concatenate(xs), np.concatenate(ws)


def brute_force_zero_t(models, thicknesses, index, length, s_max=64.0, q_max=64.0):
    """T = 0 force -dE/d(thicknesses[index]) from transfer-matrix ln D.

    ln D is differentiated by central differences; the (k, xi) integral uses
    q = k L and s = xi L / c on a composite Gauss-Legendre tensor grid.
    """
    h = 1e-4 * thicknesses[index]
    s, ws = _panels(s_max)
    q, wq = _panels(q_max)
    k = (q / length)[None, :]
    xi = (s * C_LIGHT / length)[:, None]
    up, dn = list(thicknesses), list(thicknesses)
    up[index] += h
    dn[index] -= h
    total = np.zeros((s.size, q.size))
    for mode in ("TE", "TM"):
        lp = np.log(tmm_mode_function(models, up, k, xi, mode))
        lm = np.log(tmm_mode_function(models, dn, k, xi, mode))
        total += k * (lp - lm) / (2.0 * h)
    val = ws @ total @ wq
    return -HBAR / (4.0 * math.pi**2) * val * C_LIGHT / length**2
