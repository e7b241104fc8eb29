"""Exact dimensionless dispersivities for oscillatory channel flows with v = 0.

Units: sigma = 1, a = 1, u = cos(omega t) P(y).  Every formula is a function
of ``nu = sqrt(omega)`` and is evaluated on three branches:

* ``omega < SERIES_OMEGA``: the exact Taylor series in ``omega**2`` from
  ``_series.py``;
* up to ``KIND.float_nu``: the displayed expression in 50-digit arithmetic,
  since the numerators cancel to ``O(nu**(4k+1))`` and lose all double
  precision digits near ``nu = 1`` for the higher power laws;
* beyond: the expression in double precision with ``exp(-nu)`` (or
  ``exp(-nu/2)``) factored out of every hyperbolic term so nothing overflows.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np

from ._series import SERIES
from .errors import DomainError, UnsupportedError

__all__ = [
    "ClosedFormKind",
    "SHEAR",
    "POISEUILLE",
    "power_law_kind",
    "d1",
    "d2",
    "power_law_closed_form",
    "small_omega_series",
    "combined_dispersivity",
    "closed_form",
    "series_value",
    "large_omega_constant",
]

# leading three coefficients as printed for the Newtonian flows
_THREE_TERM = {
    "shear": (Fraction(1, 60), Fraction(-31, 45360), Fraction(5461, 194594400)),
    "poiseuille": (Fraction(1, 3780), Fraction(-1, 1496880), Fraction(1, 583783200)),
}

SERIES_OMEGA = 0.25


class _Trig:
    """cos/sin/cosh/sinh of nu and nu/2, all multiplied by exp(-scale)."""

    def __init__(self, nu, scale, lib):
        e = lib.exp(-scale)
        # full-argument hyperbolics are unused (and may overflow) when scale = nu/2
        em = lib.exp(nu - scale) if scale == nu else 0.0
        ep = lib.exp(-nu - scale)
        hm = lib.exp(nu / 2 - scale)
        hp = lib.exp(-nu / 2 - scale)
        self.c = lib.cos(nu) * e
        self.s = lib.sin(nu) * e
        self.ch = (em + ep) / 2
        self.sh = (em - ep) / 2
        self.c2 = lib.cos(nu / 2) * e
        self.s2 = lib.sin(nu / 2) * e
        self.ch2 = (hm + hp) / 2
        self.sh2 = (hm - hp) / 2
        # products of two half-argument functions carry exp(-scale) once
        self.ch2_s2 = (hm + hp) / 2 * lib.sin(nu / 2)
        self.c2_sh2 = lib.cos(nu / 2) * (hm - hp) / 2


def _shear(nu, t):
    return (nu * t.c + nu * t.ch - t.s - t.sh) / (2 * nu**5 * (t.c + t.ch))


def _poiseuille(nu, t):
    return (nu * t.c - nu * t.ch - 3 * t.s + 3 * t.sh) / (6 * nu**5 * (t.c - t.ch))


def _power1(nu, t):
    return (nu * t.c2 + nu * t.ch2 - 2 * t.s2 - 2 * t.sh2) / (2 * nu**5 * (t.c2 + t.ch2))


def _power3(nu, t):
    n2 = nu * nu
    n4 = n2 * n2
    num = (
        nu * (-80 + n4) * t.c
        - nu * (-80 + n4) * t.ch
        + 80 * (-4 + n2) * t.ch2_s2
        - 5 * (-32 + 8 * n2 + n4) * t.s
        + 80 * (4 + n2) * t.c2_sh2
        + 5 * (-32 - 8 * n2 + n4) * t.sh
    )
    return 9 * num / (160 * nu**9 * (t.c - t.ch))


def _power4(nu, t):
    n2 = nu * nu
    n4 = n2 * n2
    num = (
        nu * (-672 + n4) * t.c
        - nu * (-672 + n4) * t.ch
        - 7 * (-144 + 24 * n2 + n4) * t.s
        + 7 * (-144 - 24 * n2 + n4) * t.sh
    )
    return num / (56 * nu**9 * (t.c - t.ch))


def _power5(nu, t):
    n2 = nu * nu
    n4 = n2 * n2
    n6 = n4 * n2
    n8 = n4 * n4
    num = (
        nu * (414720 - 13824 * n4 + 5 * n8) * t.c
        + nu * (-414720 + 13824 * n4 - 5 * n8) * t.ch
        - 17280 * (-96 + 24 * n2 + n4) * t.ch2_s2
        - 45 * (18432 - 4608 * n2 - 768 * n4 + 48 * n6 + n8) * t.s
        + 17280 * (-96 - 24 * n2 + n4) * t.c2_sh2
        + 45 * (18432 + 4608 * n2 - 768 * n4 - 48 * n6 + n8) * t.sh
    )
    return 5 * num / (4608 * nu**13 * (t.c - t.ch))


def _power6(nu, t):
    n2 = nu * nu
    n4 = n2 * n2
    n6 = n4 * n2
    n8 = n4 * n4
    num = (
        nu * (11827200 - 54560 * n4 + 7 * n8) * t.c
        + nu * (-11827200 + 54560 * n4 - 7 * n8) * t.ch
        - 77 * (230400 - 38400 * n2 - 2560 * n4 + 80 * n6 + n8) * t.s
        + 77 * (230400 + 38400 * n2 - 2560 * n4 - 80 * n6 + n8) * t.sh
    )
    return 9 * num / (39424 * nu**13 * (t.c - t.ch))


class ClosedFormKind:
    """One of the exactly solvable flows; instances are module constants."""

    def __init__(self, name, formula, series_key, half_scale, float_nu, grad_sq):
        self.name = name
        self._formula = formula
        self.series_key = series_key
        self._half = half_scale
        # double-precision evaluation is accurate to ~1e-15 from here on
        self.float_nu = float_nu
        # int_0^1 (dP/dy)**2 dy
        self.grad_sq = grad_sq
        self.coefficients = tuple(Fraction(p, q) for p, q in SERIES[series_key])

    def __repr__(self):
        return f"ClosedFormKind({self.name!r})"

    def formula(self, nu, lib=math):
        scale = nu / 2 if self._half else nu
        return self._formula(nu, _Trig(nu, scale, lib))

    def __call__(self, omega: float) -> float:
        omega = _check_omega(omega)
        if omega < SERIES_OMEGA:
            return series_value(self, omega)
        nu = math.sqrt(omega)
        if nu < self.float_nu:
            with mpmath.workdps(50):
                return float(self.formula(mpmath.sqrt(mpmath.mpf(omega)), mpmath))
        return float(self.formula(nu))


def _grad_sq_power(n):
    return n * n / ((2 * n - 1) * 4 ** (n - 1))


SHEAR = ClosedFormKind("shear", _shear, "shear", False, 2.0, 1.0)
POISEUILLE = ClosedFormKind("poiseuille", _poiseuille, "poiseuille", False, 3.0, 1.0 / 3.0)
_POWER = {
    1: ClosedFormKind("power1", _power1, "power1", True, 4.0, _grad_sq_power(1)),
    2: POISEUILLE,
    3: ClosedFormKind("power3", _power3, "power3", False, 4.5, _grad_sq_power(3)),
    4: ClosedFormKind("power4", _power4, "power4", False, 4.5, _grad_sq_power(4)),
    5: ClosedFormKind("power5", _power5, "power5", False, 7.0, _grad_sq_power(5)),
    6: ClosedFormKind("power6", _power6, "power6", False, 8.0, _grad_sq_power(6)),
}


def power_law_kind(n) -> ClosedFormKind:
    try:
        if float(n) != int(n):
            raise KeyError(n)
        return _POWER[int(n)]
    except (KeyError, ValueError, TypeError):
        raise UnsupportedError(
            f"no closed form for power-law exponent n={n!r} (only n = 1..6); "
            "use the numerical cell solver (method=numeric)"
        ) from None


def _check_omega(omega) -> float:
    omega = float(omega)
    if not (math.isfinite(omega) and omega >= 0):
        raise DomainError(f"frequency must be finite and >= 0, got {omega!r}")
    return omega


def series_value(kind: ClosedFormKind, omega: float) -> float:
    """Exact Taylor series (ten terms in omega**2), Horner in double precision."""
    w2 = omega * omega
    acc = 0.0
    for c in reversed(kind.coefficients):
        acc = acc * w2 + float(c)
    return acc


def d1(omega: float) -> float:
    """Oscillatory shear flow ``u = cos(omega t) y``."""
    return SHEAR(omega)


def d2(omega: float) -> float:
    """Oscillatory Poiseuille flow ``u = cos(omega t) y (1 - y)``."""
    return POISEUILLE(omega)


def power_law_closed_form(n: int, omega: float) -> float:
    """Power-law flow ``u = cos(omega t) (const - |y - 1/2|**n)``, n = 1..6."""
    return power_law_kind(n)(omega)


def closed_form(kind, omega: float) -> float:
    """Dispatch on a :class:`ClosedFormKind` or one of ``"shear"``, ``"poiseuille"``."""
    if isinstance(kind, str):
        kind = {"shear": SHEAR, "poiseuille": POISEUILLE}[kind]
    return kind(omega)


def small_omega_series(kind, omega: float) -> float:
    """Three-term small-frequency expansion for shear or Poiseuille flow."""
    name = kind.name if isinstance(kind, ClosedFormKind) else str(kind)
    if name not in _THREE_TERM:
        raise UnsupportedError(f"small-omega series only for shear and poiseuille, not {name!r}")
    omega = _check_omega(omega)
    c0, c1, c2 = (float(c) for c in _THREE_TERM[name])
    w2 = omega * omega
    return c0 + w2 * (c1 + w2 * c2)


def large_omega_constant(kind: ClosedFormKind) -> float:
    """``lim omega**2 D(omega)`` = half the mean squared profile gradient."""
    return 0.5 * kind.grad_sq


def combined_dispersivity(u1: float, u2: float, psi: float, omega: float) -> float:
    """``u = U1 cos(omega t) y + U2 cos(omega t + psi) y (1 - y)``.

    ``psi`` is accepted and ignored: the shear part is odd and the Poiseuille
    part even about mid-channel, so their gradients are orthogonal.
    """
    del psi
    return u1 * u1 * d1(omega) + u2 * u2 * d2(omega)


def closed_form_array(kind, omegas) -> np.ndarray:
    return np.array([closed_form(kind, w) for w in np.ravel(omegas)]).reshape(np.shape(omegas))
