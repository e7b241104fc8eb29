"""Low- and high-frequency limits of the dispersivity for arbitrary profiles.

At low frequency the cell problem is quasi-steady and the dispersivity is the
period average of the steady dispersivity of the instantaneous flow.  At high
frequency ``df/dt = u'`` dominates and

    D ~ sigma**2 U0**2 / (2 omega**2) * int (dP/dy)**2 q dy.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce

import numpy as np

from .cell_solver import DEFAULT_GRID, _solve_grid, assemble_amplitude, solve_cell_problem
from .domain import (
    ChannelConfig,
    Combination,
    DispersivityEstimate,
    FlowSpec,
    LinearShear,
    Method,
    Poiseuille,
    PowerLaw,
    Reflected,
    SpatialProfile,
    nondimensionalize,
    remove_mean,
    stationary_density,
)
from .errors import DomainError, UnsupportedError

__all__ = [
    "gradient_energy",
    "large_omega_dispersivity",
    "small_omega_dispersivity",
    "common_period",
]

QUADRATURE_NODES = 100_001
TIME_SAMPLES = 64


def _analytic_gradient_energy(profile):
    # int_0^1 (dP/ds)**2 ds for the unit-width analytic kinds
    if isinstance(profile, LinearShear):
        return 1.0
    if isinstance(profile, Poiseuille):
        return 1.0 / 3.0
    if isinstance(profile, PowerLaw):
        n = profile.n
        return n * n / ((2 * n - 1) * 4 ** (n - 1))
    if isinstance(profile, Reflected):
        return _analytic_gradient_energy(profile.base)
    if isinstance(profile, Combination) and len(profile.terms) == 1:
        w, p = profile.terms[0]
        inner = _analytic_gradient_energy(p)
        return None if inner is None else w * w * inner
    return None


def gradient_energy(profile: SpatialProfile, config: ChannelConfig) -> float:
    """``int_0^a (dP/dy)**2 q(y) dy``; exact for analytic profiles when v = 0."""
    a = config.width
    if config.drift.is_zero:
        exact = _analytic_gradient_energy(profile)
        if exact is not None:
            return exact / (a * a)
    q = stationary_density(config, QUADRATURE_NODES)
    slope = profile.derivative(q.grid, a)
    return q.integrate(slope * slope)


def large_omega_dispersivity(profile: SpatialProfile, omega: float, config: ChannelConfig,
                             amplitude: float = 1.0) -> DispersivityEstimate:
    """Leading high-frequency dispersivity of ``amplitude * cos(omega t) P(y)``."""
    omega = float(omega)
    if not (math.isfinite(omega) and omega > 0):
        raise DomainError(f"large-omega limit needs omega > 0, got {omega!r}")
    energy = gradient_energy(profile, config)
    value = config.sigma**2 * amplitude**2 * energy / (2.0 * omega * omega)
    return DispersivityEstimate(value, Method.ASYMPTOTIC_LARGE, None,
                                {"omega_hat": omega * config.width**2 / config.sigma**2})


def common_period(omegas, max_denominator=1000, rtol=1e-9):
    """Fundamental angular frequency and integer multiples for commensurate frequencies.

    Returns ``(base, multiples)`` with ``omega_k = base * multiples[k]``; zero
    frequencies map to multiple 0.  Raises :class:`UnsupportedError` when no
    common period exists within ``rtol``.
    """
    nonzero = [w for w in omegas if w > 0]
    if not nonzero:
        return 0.0, [0] * len(omegas)
    ref = min(nonzero)
    fracs = []
    for w in omegas:
        if w == 0:
            fracs.append(Fraction(0))
            continue
        r = w / ref
        f = Fraction(r).limit_denominator(max_denominator)
        if abs(float(f) - r) > rtol * r:
            raise UnsupportedError(
                f"frequencies {ref:g} and {w:g} are incommensurate; no common period"
            )
        fracs.append(f)
    lcm_den = reduce(lambda x, y: x * y // math.gcd(x, y), (f.denominator for f in fracs), 1)
    ints = [int(f * lcm_den) for f in fracs]
    g = reduce(math.gcd, (k for k in ints if k), 0)
    return ref * g / lcm_den, [k // g for k in ints]


def _steady_gradients(config, profiles, n):
    q = stationary_density(config, n + 1)
    grid = _solve_grid(config, n, False)
    grads = []
    for p in profiles:
        forcing = remove_mean(p, q)(grid, config.width).astype(complex)
        fld = solve_cell_problem(assemble_amplitude(config, 0.0, forcing, n))
        grads.append(np.real(fld.gradient))
    return grid, q, grads


def small_omega_dispersivity(config: ChannelConfig, flow: FlowSpec,
                             n: int = DEFAULT_GRID) -> DispersivityEstimate:
    """Quasi-steady limit: period average of the steady dispersivity.

    For one harmonic with omega > 0 this is half the steady dispersivity of
    the peak profile.
    """
    cfg, flw, scales = nondimensionalize(config, flow)
    hs = flw.harmonics
    grid, q, grads = _steady_gradients(cfg, [h.profile for h in hs], n)
    # steady dispersivity is the quadratic form sum c_j c_k S_jk
    k = len(hs)
    gram = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            gram[i, j] = gram[j, i] = q.integrate(grads[i] * grads[j])

    base, multiples = common_period([h.omega for h in hs])
    if base == 0.0:
        samples = 1
        times = np.zeros(1)
    else:
        samples = max(TIME_SAMPLES, 4 * max(multiples) + 1)
        times = 2 * np.pi / base * np.arange(samples) / samples
    coeffs = np.array([h.amplitude * np.cos(h.omega * times + h.phase) for h in hs])
    inst = np.einsum("it,ij,jt->t", coeffs, gram, coeffs)
    value = float(inst.mean()) * scales.dispersivity
    return DispersivityEstimate(max(value, 0.0), Method.ASYMPTOTIC_SMALL, None,
                                {"grid": n, "time_samples": samples})
