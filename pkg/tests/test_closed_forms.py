import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oscidisp import DomainError, UnsupportedError
from oscidisp import closed_forms as cf
from oscidisp.closed_forms import (
    POISEUILLE,
    SHEAR,
    combined_dispersivity,
    d1,
    d2,
    large_omega_constant,
    power_law_closed_form,
    power_law_kind,
    small_omega_series,
)

KINDS = [SHEAR, POISEUILLE] + [power_law_kind(n) for n in (1, 3, 4, 5, 6)]
# omega**2 D / (int U'**2 / 2) = 1 - c / nu + O(nu**-3) at large nu
LARGE_NU_CORRECTION = {"shear": 1, "poiseuille": 3, "power1": 2, "power3": 5, "power4": 7,
                       "power5": 9, "power6": 11}


def _d1_reference(omega):
    # direct high-precision evaluation of the shear formula
    with mpmath.workdps(60):
        nu = mpmath.sqrt(mpmath.mpf(omega))
        c, ch, s, sh = mpmath.cos(nu), mpmath.cosh(nu), mpmath.sin(nu), mpmath.sinh(nu)
        return float((nu * c + nu * ch - s - sh) / (2 * nu**5 * (c + ch)))


def _d2_reference(omega):
    with mpmath.workdps(60):
        nu = mpmath.sqrt(mpmath.mpf(omega))
        c, ch, s, sh = mpmath.cos(nu), mpmath.cosh(nu), mpmath.sin(nu), mpmath.sinh(nu)
        return float((nu * c - nu * ch - 3 * s + 3 * sh) / (6 * nu**5 * (c - ch)))


def test_d1_zero_is_series_constant():
    assert d1(0.0) == 1 / 60
    assert d2(0.0) == 1 / 3780
    assert power_law_closed_form(1, 0.0) == 1 / 960


def test_d1_at_one():
    assert d1(1.0) == pytest.approx(0.016010, abs=5e-7)
    assert d1(1.0) == pytest.approx(_d1_reference(1.0), rel=1e-14)


def test_d2_at_one():
    assert d2(1.0) == pytest.approx(2.64e-4, rel=5e-3)
    assert d2(1.0) == pytest.approx(_d2_reference(1.0), rel=1e-14)


@pytest.mark.parametrize("omega", [0.3, 2.0, 7.5, 30.0, 1e3, 1e5, 1e8])
def test_against_reference_evaluation(omega):
    assert d1(omega) == pytest.approx(_d1_reference(omega), rel=1e-13)
    assert d2(omega) == pytest.approx(_d2_reference(omega), rel=1e-13)


def test_power2_is_poiseuille():
    for w in (0.0, 0.1, 1.0, 10.0, 1e4):
        assert power_law_closed_form(2, w) == d2(w)


def test_power1_is_rescaled_shear():
    # the kinked profile is two shear flows of half width
    for w in (0.05, 1.0, 10.0, 1e3, 1e6):
        assert power_law_closed_form(1, w) == pytest.approx(d1(w / 4) / 16, rel=1e-13)


@pytest.mark.parametrize("n", [7, 2.5, 0, "x"])
def test_unsupported_power(n):
    with pytest.raises(UnsupportedError, match="method=numeric"):
        power_law_kind(n)


def test_negative_frequency():
    with pytest.raises(DomainError):
        d1(-1.0)
    with pytest.raises(DomainError):
        d2(float("nan"))


def test_small_omega_series_examples():
    assert small_omega_series(SHEAR, 0.0) == 1 / 60
    assert small_omega_series("poiseuille", 0.0) == 1 / 3780
    assert small_omega_series(SHEAR, 0.1) == pytest.approx(d1(0.1), rel=1e-8)
    with pytest.raises(UnsupportedError):
        small_omega_series(power_law_kind(3), 0.1)


def test_series_coefficients_leading_terms():
    assert SHEAR.coefficients[:3] == (Fraction(1, 60), Fraction(-31, 45360),
                                      Fraction(5461, 194594400))
    assert POISEUILLE.coefficients[:3] == (Fraction(1, 3780), Fraction(-1, 1496880),
                                           Fraction(1, 583783200))


def test_combined_examples():
    assert combined_dispersivity(1, 0, 0.3, 2.0) == d1(2.0)
    assert combined_dispersivity(0, 1, math.pi / 3, 2.0) == d2(2.0)
    assert combined_dispersivity(2, 3, 0.0, 1.0) == pytest.approx(4 * d1(1) + 9 * d2(1))


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0, 2 * math.pi), st.floats(0, 1e4))
def test_combined_phase_independent(u1, u2, psi, omega):
    assert combined_dispersivity(u1, u2, psi, omega) == combined_dispersivity(u1, u2, 0.0, omega)


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.name)
def test_positive_monotone(kind):
    omegas = np.concatenate(([0.0], np.logspace(-6, 6, 400)))
    vals = np.array([kind(w) for w in omegas])
    assert np.all(np.isfinite(vals)) and np.all(vals > 0)
    assert np.all(np.diff(vals) <= 0)


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.name)
def test_branch_continuity(kind):
    # series vs high-precision formula around the switch
    for w in np.linspace(0.15, 0.35, 9):
        with mpmath.workdps(50):
            exact = float(kind.formula(mpmath.sqrt(mpmath.mpf(w)), mpmath))
        assert abs(cf.series_value(kind, w) / exact - 1) < 1e-7
    # high-precision vs float branch around the switch
    for nu in np.linspace(kind.float_nu - 0.5, kind.float_nu + 0.5, 9):
        with mpmath.workdps(50):
            exact = float(kind.formula(mpmath.mpf(nu), mpmath))
        assert abs(float(kind.formula(float(nu))) / exact - 1) < 1e-12


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.name)
def test_large_omega_no_overflow(kind):
    for w in (1e8, 1e10, 1e14):
        v = kind(w)
        assert math.isfinite(v) and v > 0
        assert v * w * w / large_omega_constant(kind) == pytest.approx(1.0, abs=5e-3)


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.name)
def test_large_omega_correction_law(kind):
    # first correction to the large-frequency limit is -c / nu
    c = LARGE_NU_CORRECTION[kind.name]
    for nu in (100.0, 300.0, 1000.0):
        w = nu * nu
        ratio = kind(w) * w * w / large_omega_constant(kind)
        assert abs(nu * (1 - ratio) - c) < 1000 / nu**2


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.name)
def test_omega_squared_converges(kind):
    # |w**2 D(w) / (4 w**2 D(2w)) - 1| < 1e-2 once c (1 - 1/sqrt 2) / nu < 1e-2
    c = LARGE_NU_CORRECTION[kind.name]
    nu0 = max(100.0, 1.1 * c * (1 - 2**-0.5) / 1e-2)
    for nu in (nu0, 2 * nu0, 10 * nu0):
        w = nu * nu
        assert abs(kind(w) / (4 * kind(2 * w)) - 1) < 1e-2


def test_shear_poiseuille_large_omega_examples():
    w = 1e4
    # exact in the limit up to exponentially small terms: 1 - c/nu
    assert d1(w) * 2 * w * w == pytest.approx(1 - 1 / 100, rel=1e-13)
    assert d2(w) * 6 * w * w == pytest.approx(1 - 3 / 100, rel=1e-13)


def test_closed_form_dispatch():
    assert cf.closed_form("shear", 2.0) == d1(2.0)
    assert cf.closed_form(POISEUILLE, 2.0) == d2(2.0)
    arr = cf.closed_form_array(SHEAR, [[0.1, 1.0], [2.0, 3.0]])
    assert arr.shape == (2, 2) and arr[0, 1] == d1(1.0)
