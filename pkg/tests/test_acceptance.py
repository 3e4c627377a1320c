"""Acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL`` line, repeated in the
"acceptance criteria" section of the pytest summary. Run on its own with

    pytest tests/test_acceptance.py -v
"""
import dataclasses
import math

import numpy as np

from filmforce.analytic import (
    casimir_ideal,
    nonretarded_integral,
    vdw_bimetal,
    vdw_film_on_ideal,
    vdw_free_film,
)
from filmforce.core import K_BOLTZMANN, EngineSpec
from filmforce.dielectric import Drude, PerfectConductor, Plasma, Vacuum
from filmforce.engine import (
    force_film_boundaries,
    force_film_substrate,
    force_three_layer,
    force_zero_temperature,
    free_energy_five_layer,
)
from filmforce.figures import figure3, figure7, figure10, figure13
from filmforce.qse import f_sum, pib_dielectric_tensor, pib_force_free_film, pib_spectrum
from filmforce.stack import LayerStack3, LayerStack5
from filmforce.sweeps import SweepSpec, log_grid, run_sweep

NM = 1e-9
EV = 1.602176634e-19
ZETA3 = 1.2020569031595942
THREADS = 4


def within(value, target, tol):
    return abs(value - target) <= tol


def rel_within(value, target, rel):
    return abs(value - target) <= rel * abs(target)


def free_film(omega, d):
    return LayerStack3(Vacuum(), Vacuum(), Plasma(omega), d)


def on_substrate(substrate, d, d1, omega=5e15):
    return LayerStack5(substrate, Vacuum(), Plasma(omega), Vacuum(), Vacuum(), d, d1, math.inf)


def test_criterion_1_free_film_maxima_exponents(acceptance):
    res = figure3(threads=THREADS)
    fit_f, fit_w = res.data["fit_force"], res.data["fit_omega"]
    f100 = abs(res.data["extrema"][-1].value)
    ok = acceptance(1, [
        (f"|F|max slope {fit_f.slope:.4f} vs -3.98 +- 0.15", within(fit_f.slope, -3.98, 0.15)),
        (f"omega_max slope {fit_w.slope:.4f} vs -0.98 +- 0.05", within(fit_w.slope, -0.98, 0.05)),
        (f"|F|max(100 nm) {f100:.4f} vs 1.0 +- 0.3", within(f100, 1.0, 0.3)),
        ("all maxima refined", res.converged),
    ])
    assert ok


def test_criterion_2_film_substrate_point_values(acceptance):
    f_prime = force_film_substrate(on_substrate(PerfectConductor(), 100 * NM, 100 * NM))
    f_far = force_film_boundaries(on_substrate(PerfectConductor(), 100 * NM, 10_000 * NM))
    f_thin = force_film_substrate(on_substrate(PerfectConductor(), 10 * NM, 10 * NM))
    ok = acceptance(2, [
        (f"F'(100 nm film, d1 = 100 nm) {f_prime.force:.4f} vs -4.8 +- 0.5", within(f_prime.force, -4.8, 0.5)),
        (f"F(d1 = 10 um) {f_far.force:.4f} vs -1.0 +- 0.2", within(f_far.force, -1.0, 0.2)),
        (f"F'(10 nm film, d1 = 10 nm) {f_thin.force:.1f} vs -7.5e3 +- 1.5e3", within(f_thin.force, -7.5e3, 1.5e3)),
        ("converged", f_prime.converged and f_far.converged and f_thin.converged),
    ])
    assert ok


def test_criterion_3_film_substrate_exponents(acceptance):
    res = figure7(threads=THREADS)
    s100, s10 = res.data["fit_100nm"].slope, res.data["fit_10nm"].slope
    dev = res.data["bulk_deviation"]
    ok = acceptance(3, [
        (f"100 nm film slope {s100:.4f} vs -3.29 +- 0.10", within(s100, -3.29, 0.10)),
        (f"10 nm film slope {s10:.4f} vs -3.52 +- 0.10", within(s10, -3.52, 0.10)),
        (f"100 nm film vs semi-infinite max deviation {dev:.4f} < 0.05", dev < 0.05),
        ("converged", res.converged),
    ])
    assert ok


def test_criterion_4_plasma_substrate_extrema_exponents(acceptance):
    res = figure10(threads=THREADS)
    s_min, s_max = res.data["fit_min"].slope, res.data["fit_max"].slope
    ok = acceptance(4, [
        (f"attractive minimum slope {s_min:.4f} vs -4.17 +- 0.15", within(s_min, -4.17, 0.15)),
        (f"repulsive maximum slope {s_max:.4f} vs -3.05 +- 0.15", within(s_max, -3.05, 0.15)),
        ("all extrema refined", res.converged),
    ])
    assert ok


def _single_crossing_near(grid, forces, omega3):
    step = grid[1] / grid[0]
    neg, pos = grid[forces < 0.0], grid[forces > 0.0]
    if neg.size == 0 or pos.size == 0:
        return False, float("nan")
    lo, hi = neg.max(), pos.min()
    crossing = math.sqrt(lo * hi)
    ok = lo < hi and hi / lo <= step**2 * (1 + 1e-9) and lo >= omega3 / step * (1 - 1e-9) and hi <= omega3 * step * (1 + 1e-9)
    return ok, crossing


def test_criterion_5_sign_structure(acceptance):
    checks = []
    for label, grid in (("40 per decade", log_grid(1e14, 1e17)), ("40 points", np.logspace(14, 17, 40))):
        free = run_sweep(SweepSpec("film_plasma", tuple(grid), free_film(1e15, 100 * NM), threads=THREADS))
        ideal = run_sweep(SweepSpec(
            "film_plasma", tuple(grid), LayerStack3(PerfectConductor(), Vacuum(), Plasma(1e15), 100 * NM),
            threads=THREADS,
        ))
        checks.append((f"free film attractive on {label} grid", all(r.force < 0.0 for _, r in free)))
        checks.append((f"film on ideal metal repulsive on {label} grid", all(r.force > 0.0 for _, r in ideal)))
    grid = log_grid(1e14, 1e17)
    for omega3 in (1e15, 5e15, 1e16):
        stack = LayerStack3(Plasma(1e15), Vacuum(), Plasma(omega3), 20 * NM)
        res = run_sweep(SweepSpec("substrate_plasma", tuple(grid), stack, threads=THREADS))
        ok, crossing = _single_crossing_near(grid, np.array([r.force for _, r in res]), omega3)
        checks.append((f"bimetal 20 nm, omega3 {omega3:.0e}: sign change at {crossing:.4e}", ok))
    assert acceptance(5, checks)


def test_criterion_6_oracle_equivalence(acceptance):
    zero_t = EngineSpec(temperature=0.0, zero_temperature_mode=True, rel_tol=1e-9, quadrature_rel_tol=1e-10)
    f_a = force_zero_temperature(free_film(1e15, 5 * NM), zero_t).force
    closed = vdw_free_film(1e15, 5 * NM)
    f_b = force_three_layer(LayerStack3(PerfectConductor(), PerfectConductor(), Vacuum(), 1000 * NM)).force
    ratio_worst, limit_worst, integral_worst = 0.0, 0.0, 0.0
    for omega in np.geomspace(1e13, 1e17, 9):
        for d in np.geomspace(1 * NM, 1000 * NM, 7):
            ratio_worst = max(ratio_worst, abs(vdw_film_on_ideal(omega, d) / vdw_free_film(omega, d) + 2.0) / 2.0)
            limit_worst = max(
                limit_worst,
                abs(vdw_bimetal(0.0, omega, d) / vdw_free_film(omega, d) - 1.0),
                abs(vdw_bimetal(math.inf, omega, d) / vdw_film_on_ideal(omega, d) - 1.0),
            )
            integral_worst = max(integral_worst, abs(nonretarded_integral(Plasma(omega), d) / vdw_free_film(omega, d) - 1.0))
    ok = acceptance(6, [
        (f"(a) zero-T 5 nm film {f_a:.2f} vs closed form {closed:.2f}, rel {abs(f_a / closed - 1):.4f} <= 0.03",
         rel_within(f_a, closed, 0.03)),
        (f"(b) ideal plates 1 um, 300 K {f_b:.5e} vs {casimir_ideal(1e-6):.5e}", rel_within(f_b, casimir_ideal(1e-6), 0.02)),
        (f"(c) ideal-substrate / free ratio -2 worst rel {ratio_worst:.1e}", ratio_worst <= 1e-12),
        (f"(d) bimetal limits worst rel {limit_worst:.1e}", limit_worst <= 1e-10),
        (f"(e) non-retarded quadrature vs closed form worst rel {integral_worst:.1e}", integral_worst <= 1e-8),
    ])
    assert ok


FIXED_TERMS = EngineSpec(matsubara_tail_check=False, max_matsubara_terms=400, quadrature_rel_tol=1e-11)


def _random_stack(rng):
    def material(allow_pc):
        kind = rng.integers(0, 4 if allow_pc else 3)
        omega = 10 ** rng.uniform(14, math.log10(3e16))
        if kind == 0:
            return Vacuum()
        if kind == 1:
            return Plasma(omega)
        if kind == 2:
            return Drude(omega, 10 ** rng.uniform(-15, -13))
        return PerfectConductor()

    film = Plasma(10 ** rng.uniform(14, 16.5)) if rng.random() < 0.5 else Drude(10 ** rng.uniform(14, 16.5), 1e-14)
    lengths = 10 ** rng.uniform(-8, math.log10(2e-7), 3)
    return LayerStack5(material(True), material(False), film, material(False), material(True), *lengths)


def _fd_mismatch(stack, name, func):
    x = getattr(stack, name)
    h = 1e-4 * x
    e_up = free_energy_five_layer(dataclasses.replace(stack, **{name: x + h}), FIXED_TERMS).energy
    e_dn = free_energy_five_layer(dataclasses.replace(stack, **{name: x - h}), FIXED_TERMS).energy
    fd = -(e_up - e_dn) / (2.0 * h)
    analytic = func(stack, FIXED_TERMS).force
    # E/x sets the force scale when a force vanishes identically
    scale = max(abs(fd), abs(free_energy_five_layer(stack, FIXED_TERMS).energy) / x)
    return abs(analytic - fd) / scale


def test_criterion_7_structural_invariants(acceptance):
    checks = []
    for d in (10 * NM, 100 * NM):
        free = force_three_layer(free_film(5e15, d)).force
        for name, sub in (("ideal", PerfectConductor()), ("plasma 1e16", Plasma(1e16)), ("plasma 1e15", Plasma(1e15))):
            for ratio in (10, 20):
                f = force_film_boundaries(on_substrate(sub, d, ratio * d)).force
                rel = abs(f / free - 1.0)
                checks.append((f"5->3 {d / NM:g} nm film, {name}, d1 = {ratio}d rel {rel:.1e}", rel <= 1e-3))
    rng = np.random.default_rng(20240601)
    worst = 0.0
    for _ in range(10):
        stack = _random_stack(rng)
        worst = max(worst, _fd_mismatch(stack, "d", force_film_boundaries), _fd_mismatch(stack, "d1", force_film_substrate))
    checks.append((f"finite differences on 10 random stacks worst rel {worst:.1e}", worst <= 1e-4))
    cases = [
        lambda s: force_three_layer(free_film(5e15, 100 * NM), s),
        lambda s: force_three_layer(LayerStack3(Plasma(1e16), Vacuum(), Plasma(5e15), 20 * NM), s),
        lambda s: force_film_boundaries(on_substrate(PerfectConductor(), 10 * NM, 10 * NM), s),
        lambda s: force_film_substrate(on_substrate(PerfectConductor(), 100 * NM, 50 * NM), s),
    ]
    quad_worst, terms_worst = 0.0, 0.0
    for run in cases:
        base = run(EngineSpec())
        finer = run(EngineSpec(quadrature_rel_tol=0.5e-8))
        quad_worst = max(quad_worst, abs(finer.force / base.force - 1.0))
        once = run(EngineSpec(matsubara_tail_check=False, max_matsubara_terms=base.matsubara_terms_used))
        twice = run(EngineSpec(matsubara_tail_check=False, max_matsubara_terms=2 * base.matsubara_terms_used))
        terms_worst = max(terms_worst, abs(twice.force / once.force - 1.0))
    checks.append((f"halving quadrature tolerance worst shift {quad_worst:.1e}", quad_worst < 1e-6))
    checks.append((f"doubling Matsubara terms worst shift {terms_worst:.1e}", terms_worst < 1e-6))
    assert acceptance(7, checks)


def test_criterion_8_quantum_size_effects(acceptance):
    spectrum = pib_spectrum(5.0 * EV, 10 * NM)
    f_sum_worst = max(abs(f_sum(n, 200 * n) - 1.0) for n in range(1, spectrum.n_occupied + 1))
    f_sum_200 = abs(f_sum(1, 200) - 1.0)
    lateral_exact = all(
        pib_dielectric_tensor(spectrum, xi).eps_lateral == 1.0 + (spectrum.omega_p_eff / xi) ** 2
        for xi in np.geomspace(1e12, 1e18, 25)
    )
    iso_worst = 0.0
    for ef, d in ((5.0, 10 * NM), (2.0, 50 * NM), (9.0, 30 * NM)):
        s = pib_spectrum(ef * EV, d)
        pib = pib_force_free_film(ef * EV, d, intersubband=False).force
        plasma = force_three_layer(free_film(s.omega_p_eff, d)).force
        iso_worst = max(iso_worst, abs(pib / plasma - 1.0))
    res = figure13(threads=THREADS)
    forces = res.data["forces"][0]
    i = int(np.argmin(forces))
    single = 0 < i < forces.size - 1 and np.all(np.diff(forces[: i + 1]) < 0) and np.all(np.diff(forces[i:]) > 0)
    ok = acceptance(8, [
        (f"f-sum lowest subband, 200 transitions, dev {f_sum_200:.1e}", f_sum_200 <= 1e-6),
        (f"f-sum all {spectrum.n_occupied} occupied subbands, 200 n transitions, worst dev {f_sum_worst:.1e}",
         f_sum_worst <= 1e-6),
        ("eps_lateral == 1 + omega_p_eff^2/xi^2 exactly", lateral_exact),
        (f"transitions disabled vs plasma model worst rel {iso_worst:.1e}", iso_worst <= 1e-8),
        ("50 nm box-model curve attractive", bool(np.all(forces < 0.0))),
        ("single interior maximum of |F|", bool(single)),
    ])
    assert ok


def test_criterion_9_zero_frequency_limit(acceptance):
    d = 100 * NM
    checks = []
    static = {}
    for temp in (150.0, 300.0, 600.0):
        spec = EngineSpec(temperature=temp)
        target = -K_BOLTZMANN * temp * ZETA3 / (8.0 * math.pi * d**3)
        seq = [force_three_layer(free_film(w, d), spec).force for w in (1e12, 1e11, 1e10)]
        gaps = [abs(f / target - 1.0) for f in seq]
        static[temp] = seq[-1]
        checks.append((
            f"T = {temp:g} K: |F/F_static - 1| {gaps[0]:.1e} -> {gaps[-1]:.1e} as omega_p -> 0",
            gaps[0] > gaps[1] > gaps[2] and gaps[-1] <= 1e-3,
        ))
    r2, r4 = static[300.0] / static[150.0], static[600.0] / static[150.0]
    checks.append((f"ratios 1 : {r2:.6f} : {r4:.6f} vs 1 : 2 : 4", rel_within(r2, 2.0, 1e-3) and rel_within(r4, 4.0, 1e-3)))
    assert acceptance(9, checks)


if __name__ == "__main__":  # pragma: no cover
    import sys

    import pytest

    sys.exit(pytest.main([__file__, "-v"]))
