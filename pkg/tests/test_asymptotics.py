import math

import numpy as np
import pytest

from oscidisp import (
    ChannelConfig,
    FlowSpec,
    Harmonic,
    LinearShear,
    Poiseuille,
    PowerLaw,
    Tabulated,
    UnsupportedError,
    VerticalDrift,
    common_period,
    d1,
    d2,
    gradient_energy,
    large_omega_dispersivity,
    small_omega_dispersivity,
    steady_dispersivity,
)
from oscidisp.closed_forms import POISEUILLE, SHEAR, power_law_kind
from oscidisp.domain import DomainError

CFG = ChannelConfig()
KINDS = [(SHEAR, LinearShear(), 1), (POISEUILLE, Poiseuille(), 3)] + [
    (power_law_kind(n), PowerLaw(n), c) for n, c in ((1, 2), (3, 5), (4, 7), (5, 9), (6, 11))
]


@pytest.mark.parametrize("omega", [10.0, 1e4])
def test_large_examples(omega):
    w2 = omega * omega
    assert large_omega_dispersivity(LinearShear(), omega, CFG).value == pytest.approx(1 / (2 * w2))
    assert large_omega_dispersivity(Poiseuille(), omega, CFG).value == pytest.approx(1 / (6 * w2))
    assert large_omega_dispersivity(PowerLaw(1), omega, CFG).value == pytest.approx(1 / (2 * w2))


def test_large_scales_as_inverse_square():
    for prof in (LinearShear(), PowerLaw(5)):
        a = large_omega_dispersivity(prof, 3.0, CFG).value
        b = large_omega_dispersivity(prof, 6.0, CFG).value
        assert b == pytest.approx(a / 4, rel=1e-15)


def test_large_rejects_zero_frequency():
    with pytest.raises(DomainError):
        large_omega_dispersivity(LinearShear(), 0.0, CFG)


@pytest.mark.parametrize("kind,profile,c", KINDS, ids=lambda x: getattr(x, "name", None))
def test_closed_form_approaches_large_limit(kind, profile, c):
    # relative gap is c / nu to leading order and shrinks with omega
    gaps = []
    for w in (1e4, 1e5):
        ratio = kind(w) / large_omega_dispersivity(profile, w, CFG).value
        gaps.append(abs(ratio - 1))
        assert gaps[-1] == pytest.approx(c / math.sqrt(w), rel=0.02)
    assert gaps[1] < gaps[0]


@pytest.mark.parametrize("kind,profile,c", KINDS, ids=lambda x: getattr(x, "name", None))
def test_closed_form_approaches_small_limit(kind, profile, c):
    small = small_omega_dispersivity(CFG, FlowSpec.single(profile, 0.01)).value
    assert abs(kind(0.01) / small - 1) < 1e-3


def test_small_examples():
    assert small_omega_dispersivity(CFG, FlowSpec.single(LinearShear(), 1.0)).value == \
        pytest.approx(1 / 60, rel=1e-9)
    assert small_omega_dispersivity(CFG, FlowSpec.single(Poiseuille(), 1.0)).value == \
        pytest.approx(1 / 3780, rel=1e-9)
    assert small_omega_dispersivity(CFG, FlowSpec.single(PowerLaw(1), 1.0)).value == \
        pytest.approx(1 / 960, rel=1e-5)


def test_small_is_half_steady():
    for prof in (PowerLaw(3), PowerLaw(6)):
        steady = steady_dispersivity(CFG, prof).value
        small = small_omega_dispersivity(CFG, FlowSpec.single(prof, 2.0)).value
        assert small == pytest.approx(steady / 2, rel=1e-12)


def test_small_multi_harmonic_same_profile():
    # A cos t + B cos(t + psi) on one profile: average |A + B e^{i psi}|**2 / 2 * S
    a, b, psi = 1.5, 0.7, 1.1
    flow = FlowSpec((Harmonic(a, 1.0, LinearShear()), Harmonic(b, 1.0, LinearShear(), psi)))
    got = small_omega_dispersivity(CFG, flow).value
    expected = 0.5 * abs(a + b * complex(math.cos(psi), math.sin(psi))) ** 2 / 30
    assert got == pytest.approx(expected, rel=1e-9)


def test_small_multi_frequency_adds():
    flow = FlowSpec((Harmonic(1.0, 1.0, LinearShear()), Harmonic(2.0, 3.0, LinearShear())))
    got = small_omega_dispersivity(CFG, flow).value
    assert got == pytest.approx(0.5 * (1 + 4) / 30, rel=1e-9)


def test_small_dimensional():
    cfg = ChannelConfig(width=2.0, sigma=0.5)
    got = small_omega_dispersivity(cfg, FlowSpec.single(LinearShear(), 1.0, amplitude=3.0)).value
    assert got == pytest.approx(9 * 4 / 0.25 / 60, rel=1e-9)


def test_common_period():
    base, mult = common_period([1.0, 2.0, 3.0])
    assert base == pytest.approx(1.0) and mult == [1, 2, 3]
    base, mult = common_period([0.5, 0.75, 0.0])
    assert base == pytest.approx(0.25) and mult == [2, 3, 0]
    assert common_period([0.0]) == (0.0, [0])
    with pytest.raises(UnsupportedError):
        common_period([1.0, math.sqrt(2)])


def test_gradient_energy_analytic_vs_quadrature():
    y = np.linspace(0, 1, 20001)
    for prof in (LinearShear(), Poiseuille(), PowerLaw(3)):
        tab = Tabulated(y, prof(y))
        assert gradient_energy(tab, CFG) == pytest.approx(gradient_energy(prof, CFG), rel=1e-6)


def test_gradient_energy_with_drift():
    cfg = ChannelConfig(drift=VerticalDrift.constant(1.0))
    # slope of y(1-y) is 1-2y; weight 2 e^{2y} / (e^2 - 1)
    y = np.linspace(0, 1, 200001)
    q = 2 * np.exp(2 * y) / (math.e**2 - 1)
    expected = np.trapezoid((1 - 2 * y) ** 2 * q, y)
    assert gradient_energy(Poiseuille(), cfg) == pytest.approx(expected, rel=1e-8)


def test_gradient_energy_width():
    cfg = ChannelConfig(width=2.0)
    assert gradient_energy(LinearShear(), cfg) == pytest.approx(0.25)
