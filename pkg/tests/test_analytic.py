import math

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from filmforce.analytic import (
    casimir_ideal,
    nonretarded_integral,
    vdw_bimetal,
    vdw_film_on_ideal,
    vdw_free_film,
)
from filmforce.core import C_LIGHT, HBAR
from filmforce.dielectric import Drude, PerfectConductor, Plasma, UnsupportedModelError, Vacuum

omegas = st.floats(1e13, 1e17)
lengths = st.floats(1e-10, 1e-5)


def test_casimir_values():
    assert casimir_ideal(1e-6) == pytest.approx(-HBAR * math.pi**2 * C_LIGHT / 240.0 / 1e-24, rel=1e-15)
    assert casimir_ideal(1e-6) == pytest.approx(-1.3002e-3, rel=1e-4)
    assert casimir_ideal(1e-7) == pytest.approx(-13.0, rel=1e-3)


def test_free_film_value():
    assert vdw_free_film(1e16, 1e-8) == pytest.approx(-7.418e3, rel=1e-4)


def test_film_on_ideal_value():
    assert vdw_film_on_ideal(1e16, 1e-8) == pytest.approx(1.4836e4, rel=1e-4)


@given(lengths)
def test_power_laws(d):
    assert casimir_ideal(2.0 * d) / casimir_ideal(d) == pytest.approx(1.0 / 16.0, rel=1e-14)
    assert vdw_free_film(1e15, 2.0 * d) / vdw_free_film(1e15, d) == pytest.approx(0.125, rel=1e-14)
    assert vdw_film_on_ideal(1e15, 2.0 * d) / vdw_film_on_ideal(1e15, d) == pytest.approx(0.125, rel=1e-14)
    assert vdw_bimetal(2e15, 1e15, 2.0 * d) / vdw_bimetal(2e15, 1e15, d) == pytest.approx(0.125, rel=1e-14)


@given(omegas, lengths)
def test_free_film_linear_in_plasma_frequency(omega, d):
    assert vdw_free_film(2.0 * omega, d) == pytest.approx(2.0 * vdw_free_film(omega, d), rel=1e-14)


@given(omegas, lengths)
def test_ideal_substrate_doubles_and_flips(omega, d):
    assert vdw_film_on_ideal(omega, d) > 0.0
    assert vdw_film_on_ideal(omega, d) / vdw_free_film(omega, d) == pytest.approx(-2.0, rel=1e-12)


@given(omegas, lengths)
def test_bimetal_limits(omega3, d):
    assert vdw_bimetal(omega3, omega3, d) == 0.0
    assert vdw_bimetal(0.0, omega3, d) == pytest.approx(vdw_free_film(omega3, d), rel=1e-10)
    assert vdw_bimetal(math.inf, omega3, d) == pytest.approx(vdw_film_on_ideal(omega3, d), rel=1e-10)
    assert vdw_bimetal(1e12 * omega3, omega3, d) == pytest.approx(vdw_film_on_ideal(omega3, d), rel=1e-10)


@given(omegas, omegas, lengths)
def test_bimetal_sign_rule(omega1, omega3, d):
    assume(omega1 != omega3)
    f = vdw_bimetal(omega1, omega3, d)
    assert math.copysign(1.0, f) == math.copysign(1.0, omega1 - omega3)


@given(omegas, st.floats(1e-9, 1e-6))
def test_nonretarded_integral_matches_closed_form(omega, d):
    assert nonretarded_integral(Plasma(omega), d) == pytest.approx(vdw_free_film(omega, d), rel=1e-8)


def test_nonretarded_integral_vacuum_and_drude():
    assert nonretarded_integral(Vacuum(), 1e-8) == 0.0
    drude = nonretarded_integral(Drude(1e16, 1e-14), 5e-9)
    plasma = nonretarded_integral(Plasma(1e16), 5e-9)
    assert drude < 0.0
    assert abs(drude) < abs(plasma)


def test_nonretarded_integral_rejects_perfect_conductor():
    with pytest.raises(UnsupportedModelError):
        nonretarded_integral(PerfectConductor(), 1e-8)


@pytest.mark.parametrize(
    "call",
    [
        lambda: casimir_ideal(0.0),
        lambda: casimir_ideal(-1e-9),
        lambda: vdw_free_film(-1.0, 1e-8),
        lambda: vdw_free_film(1e15, 0.0),
        lambda: vdw_film_on_ideal(0.0, 1e-8),
        lambda: vdw_bimetal(-1.0, 1e15, 1e-8),
        lambda: vdw_bimetal(1e15, 0.0, 1e-8),
        lambda: vdw_bimetal(1e15, 1e15, math.nan),
        lambda: nonretarded_integral(Plasma(1e15), -1e-9),
    ],
)
def test_invalid_arguments(call):
    with pytest.raises(ValueError):
        call()
