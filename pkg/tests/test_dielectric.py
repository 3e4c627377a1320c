import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from filmforce.dielectric import (
    Drude,
    PerfectConductor,
    Plasma,
    UniaxialPIB,
    UnsupportedModelError,
    Vacuum,
    eps_imag,
    plasma_frequency,
    zero_frequency_limit,
)

omegas = st.floats(1e13, 1e17)
xis = st.floats(1e11, 1e19)
taus = st.floats(1e-16, 1e-10)


def test_plasma_at_its_own_frequency():
    assert eps_imag(Plasma(1e16), 1e16) == 2.0


def test_vacuum_is_one():
    assert eps_imag(Vacuum(), 3.7e14) == 1.0


def test_drude_hand_value():
    # 1 + 1e32 / (1e15 * (1e15 + 1e14))
    assert eps_imag(Drude(1e16, 1e-14), 1e15) == pytest.approx(1.0 + 1e32 / 1.1e30, rel=1e-14)
    assert eps_imag(Drude(1e16, 1e-14), 1e15) == pytest.approx(91.91, abs=5e-3)


def test_vectorised_evaluation():
    xi = np.array([1e14, 1e15, 1e16])
    np.testing.assert_allclose(eps_imag(Plasma(1e15), xi), 1.0 + (1e15 / xi) ** 2, rtol=1e-15)


@pytest.mark.parametrize("xi", [0.0, -1.0, np.nan])
def test_eps_rejects_non_positive_frequency(xi):
    with pytest.raises(ValueError):
        eps_imag(Plasma(1e15), xi)


def test_perfect_conductor_has_no_finite_eps():
    with pytest.raises(UnsupportedModelError):
        eps_imag(PerfectConductor(), 1e15)


@pytest.mark.parametrize(
    "factory",
    [lambda: Plasma(0.0), lambda: Plasma(-1.0), lambda: Drude(1e15, 0.0),
     lambda: UniaxialPIB(0.0, 1e-8), lambda: UniaxialPIB(1e-18, -1e-8)],
)
def test_model_parameters_validated(factory):
    with pytest.raises(ValueError):
        factory()


def test_zero_frequency_limits():
    assert zero_frequency_limit(Vacuum()).kind == "finite"
    assert zero_frequency_limit(Vacuum()).value == 1.0
    lim = zero_frequency_limit(Plasma(1e16))
    assert lim.kind == "divergent_with_xi2_eps" and lim.value == 1e32
    assert zero_frequency_limit(PerfectConductor()).kind == "infinite"
    drude = zero_frequency_limit(Drude(1e16, 1e-14))
    assert drude.kind == "divergent_with_xi_eps"
    assert drude.value == pytest.approx(1e32 * 1e-14)


def test_plasma_limit_matches_small_xi_behaviour():
    model = Plasma(3e15)
    xi = 1e6
    assert xi**2 * eps_imag(model, xi) == pytest.approx(zero_frequency_limit(model).value, rel=1e-15)


def test_plasma_frequency_accessor():
    assert plasma_frequency(Plasma(2e15)) == 2e15
    assert plasma_frequency(Drude(2e15, 1e-14)) == 2e15
    assert plasma_frequency(Vacuum()) == 0.0


@given(omegas, taus, xis, xis)
def test_eps_at_least_one_and_non_increasing(omega, tau, xa, xb):
    lo, hi = min(xa, xb), max(xa, xb)
    for model in (Vacuum(), Plasma(omega), Drude(omega, tau)):
        e_lo, e_hi = eps_imag(model, lo), eps_imag(model, hi)
        assert e_hi >= 1.0 and np.isfinite(e_lo)
        assert e_lo >= e_hi


@given(omegas, taus)
def test_eps_tends_to_one_at_high_frequency(omega, tau):
    xi = omega * 1e6
    for model in (Plasma(omega), Drude(omega, tau)):
        assert eps_imag(model, xi) - 1.0 <= 1.01e-12


@given(omegas, xis)
def test_drude_reduces_to_plasma(omega, xi):
    tau = 1e7 / xi  # 1/tau = 1e-7 xi
    drude, plasma = eps_imag(Drude(omega, tau), xi), eps_imag(Plasma(omega), xi)
    assert abs(drude - plasma) / plasma < 1e-6
