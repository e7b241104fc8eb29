"""Monte Carlo simulation of the reflected cross-channel diffusion.

    dY = sigma dB + v(Y) dt  (reflected at 0 and a),   dX = u'(t, Y) dt

Brownian convention: ``B`` has diffusivity 1/2, i.e. ``Var(B_t) = t``, so one
Euler step adds ``sigma * sqrt(dt) * xi`` with ``xi ~ N(0, 1)``.

Every particle draws from its own counter-based stream keyed by
``(seed, particle index)``, so results do not depend on thread count or
scheduling.  The halved-step run used for the bias check refines the same
Brownian path with a bridge draw from a second stream, which makes the two
estimates strongly correlated.
"""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy import stats
from scipy.fft import dct
from scipy.integrate import cumulative_trapezoid

from .domain import (
    ChannelConfig,
    DispersivityEstimate,
    FlowSpec,
    Method,
    remove_mean,
    stationary_density,
)
from .errors import InputError, PreconditionError, SimulationError, UnsupportedError

__all__ = [
    "SimParams",
    "Ensemble",
    "NormalityReport",
    "reflect",
    "simulate_paths",
    "estimate_dispersivity_mc",
    "normality_check",
    "standard_normals",
    "occupancy_ks",
    "initial_positions",
    "finite_window_rate",
    "ks_critical_value",
    "set_threads",
]

TABLE_NODES = 8193

# the bundled TBB is too old; skip probing it
if numba.config.THREADING_LAYER == "default":
    numba.config.THREADING_LAYER = "workqueue" if not hasattr(os, "fork") else "omp"

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_TAG_XI = np.uint64(0x5851F42D4C957F2D)
_TAG_ETA = np.uint64(0x14057B7EF767814F)
_TAG_INIT = np.uint64(0x2545F4914F6CDD1D)


def set_threads(n=None):
    """Apply ``OSCIDISP_THREADS`` (0 or unset means all cores) to numba."""
    if n is None:
        n = int(os.environ.get("OSCIDISP_THREADS", "0") or 0)
    n = numba.config.NUMBA_NUM_THREADS if n <= 0 else min(n, numba.config.NUMBA_NUM_THREADS)
    numba.set_num_threads(n)
    return n


@dataclass(frozen=True)
class SimParams:
    dt: float = 1e-4
    T: float = 50.0
    n_particles: int = 100_000
    burn_in: float = 5.0
    seed: int = 12345

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise InputError(f"dt must be positive, got {self.dt!r}")
        if not self.T >= 100 * self.dt:
            raise InputError("horizon T must cover at least 100 steps")
        if self.n_particles < 100:
            raise InputError("need at least 100 particles")
        if not self.burn_in >= 0:
            raise InputError("burn_in must be >= 0")
        if not 0 <= int(self.seed) < 2**64:
            raise InputError("seed must fit in 64 bits")

    @property
    def window(self) -> float:
        return self.T - self.burn_in

    def halved(self) -> "SimParams":
        return SimParams(self.dt / 2, self.T, self.n_particles, self.burn_in, self.seed)


@dataclass(frozen=True)
class Ensemble:
    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    window: float
    params: SimParams
    sigma: float = 1.0

    @property
    def n_particles(self) -> int:
        return len(self.x)


# ---------------------------------------------------------------------------
# counter-based generator


@numba.njit(inline="always")
def _mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@numba.njit(inline="always")
def _uniform(k1, k2, ctr):
    z = _mix64(_mix64(k1 + ctr * _GOLDEN) + k2)
    # (0, 1), never 0
    return (np.float64(z >> _S11) + 0.5) * (1.0 / 9007199254740992.0)


@numba.njit(inline="always")
def _keys(seed, index, tag):
    base = _mix64(seed ^ tag)
    k1 = _mix64(base + np.uint64(index) * _GOLDEN)
    k2 = _mix64(k1 ^ tag)
    return k1, k2


def _ziggurat_tables(layers=128, r=3.442619855899):
    # equal-area layers under exp(-x**2/2); layer 0 includes the tail beyond r
    f = lambda x: math.exp(-0.5 * x * x)
    tail = math.sqrt(math.pi / 2) * math.erfc(r / math.sqrt(2))
    v = r * f(r) + tail
    x = np.empty(layers + 1)
    x[0] = v / f(r)
    x[1] = r
    for i in range(1, layers - 1):
        x[i + 1] = math.sqrt(-2.0 * math.log(v / x[i] + f(x[i])))
    x[layers] = 0.0
    return x, np.exp(-0.5 * x * x)


_ZX, _ZF = _ziggurat_tables()
_ZR = float(_ZX[1])


@numba.njit(inline="always")
def _normal(k1, k2, ctr):
    """Standard normal from the stream; returns (value, next counter)."""
    zx = _ZX
    zf = _ZF
    while True:
        z = _mix64(_mix64(k1 + ctr * _GOLDEN) + k2)
        ctr += np.uint64(1)
        i = np.int64(z & np.uint64(127))
        sign = 1.0 if (z >> np.uint64(7)) & np.uint64(1) else -1.0
        u = np.float64(z >> _S11) * (1.0 / 9007199254740992.0)
        x = u * zx[i]
        if x < zx[i + 1]:
            return sign * x, ctr
        if i == 0:
            while True:
                a = -math.log(_uniform(k1, k2, ctr)) / _ZR
                b = -math.log(_uniform(k1, k2, ctr + np.uint64(1)))
                ctr += np.uint64(2)
                if 2.0 * b > a * a:
                    return sign * (_ZR + a), ctr
        u2 = _uniform(k1, k2, ctr)
        ctr += np.uint64(1)
        if zf[i] + u2 * (zf[i + 1] - zf[i]) < math.exp(-0.5 * x * x):
            return sign * x, ctr


@numba.njit(cache=True)
def _normals(seed, index, tag, count):
    k1, k2 = _keys(seed, index, tag)
    out = np.empty(count)
    ctr = np.uint64(0)
    for j in range(count):
        out[j], ctr = _normal(k1, k2, ctr)
    return out


def standard_normals(seed: int, index: int, count: int) -> np.ndarray:
    """The first ``count`` Brownian draws of particle ``index``."""
    return _normals(np.uint64(seed), index, _TAG_XI, count)


# ---------------------------------------------------------------------------
# kernel


@numba.njit(inline="always")
def _reflect(y, a):
    # mirrors at 0 and a generate translations by 2a, so repeated folding
    # is |y| mod 2a followed by one mirror
    if 0.0 <= y <= a:
        return y
    y = abs(y) % (2.0 * a)
    return 2.0 * a - y if y > a else y


def reflect(y: float, a: float = 1.0) -> float:
    """Fold ``y`` into ``[0, a]`` by repeated mirror reflection at the walls."""
    y = float(y)
    if not math.isfinite(y):
        raise InputError("cannot reflect a non-finite position")
    return _reflect(y, float(a))


@numba.njit(inline="always")
def _initial_position(seed, p, cdf_grid, cdf):
    # inverse CDF of the stationary density
    i1, i2 = _keys(seed, p, _TAG_INIT)
    u0 = _uniform(i1, i2, np.uint64(0))
    j = np.searchsorted(cdf, u0)
    j = min(max(j, 1), cdf.shape[0] - 1)
    w = (u0 - cdf[j - 1]) / (cdf[j] - cdf[j - 1])
    return cdf_grid[j - 1] + w * (cdf_grid[j] - cdf_grid[j - 1])


@numba.njit(cache=True)
def _initial_positions(seed, n, cdf_grid, cdf):
    out = np.empty(n)
    for p in range(n):
        out[p] = _initial_position(seed, p, cdf_grid, cdf)
    return out


def initial_positions(config: ChannelConfig, params: SimParams) -> np.ndarray:
    """Starting heights ``Y_0`` used by :func:`simulate_paths` for these params."""
    q = stationary_density(config, TABLE_NODES)
    return _initial_positions(np.uint64(params.seed), params.n_particles, q.grid, _cdf(q))


@numba.njit(inline="always")
def _cell(y, inv_h, last):
    s = y * inv_h
    i = int(s)
    if i > last:
        i = last
    return i, s - i


@numba.njit(parallel=True, cache=True)
def _simulate(seed, n_particles, n_burn, n_steps, substeps, dt, sigma, a,
              profiles, coef, drift, has_drift, cdf_grid, cdf, x_out, y_out, bad):
    n_harm = profiles.shape[0]
    last = profiles.shape[1] - 2
    inv_h = (profiles.shape[1] - 1) / a
    h = dt / substeps
    sq = sigma * math.sqrt(dt)
    for p in numba.prange(n_particles):
        k1, k2 = _keys(seed, p, _TAG_XI)
        e1, e2 = _keys(seed, p, _TAG_ETA)
        ck = np.uint64(0)
        ce = np.uint64(0)
        y = _initial_position(seed, p, cdf_grid, cdf)
        x = 0.0
        prof_old = np.empty(n_harm)
        i, f = _cell(y, inv_h, last)
        for k in range(n_harm):
            prof_old[k] = profiles[k, i] + f * (profiles[k, i + 1] - profiles[k, i])
        failed = -1
        for step in range(n_burn + n_steps):
            xi, ck = _normal(k1, k2, ck)
            eta = 0.0
            if substeps == 2:
                eta, ce = _normal(e1, e2, ce)
            for s in range(substeps):
                if substeps == 2:
                    dy = 0.5 * sq * (xi + eta) if s == 0 else 0.5 * sq * (xi - eta)
                else:
                    dy = sq * xi
                if has_drift:
                    i, f = _cell(y, inv_h, last)
                    dy += (drift[i] + f * (drift[i + 1] - drift[i])) * h
                y = y + dy
                if not math.isfinite(y):
                    failed = step
                    break
                y = _reflect(y, a)
                if step >= n_burn:
                    i, f = _cell(y, inv_h, last)
                    c_idx = (step - n_burn) * substeps + s
                    acc = 0.0
                    for k in range(n_harm):
                        pn = profiles[k, i] + f * (profiles[k, i + 1] - profiles[k, i])
                        acc += coef[k, c_idx] * (prof_old[k] + pn)
                        prof_old[k] = pn
                    x += 0.5 * h * acc
                    if not math.isfinite(x):
                        failed = step
                        break
                elif step == n_burn - 1 and s == substeps - 1:
                    i, f = _cell(y, inv_h, last)
                    for k in range(n_harm):
                        prof_old[k] = profiles[k, i] + f * (profiles[k, i + 1] - profiles[k, i])
            if failed >= 0:
                break
        x_out[p] = x
        y_out[p] = y
        bad[p] = failed


def _cdf(q):
    cdf = cumulative_trapezoid(q.values, q.grid, initial=0.0)
    return cdf / cdf[-1]


def _tables(config, flow):
    a = config.width
    q = stationary_density(config, TABLE_NODES)
    grid = q.grid
    profiles = np.array([h.amplitude * remove_mean(h.profile, q)(grid, a)
                         for h in flow.harmonics])
    drift = config.drift(grid)
    return grid, profiles, drift, _cdf(q)


def simulate_paths(config: ChannelConfig, flow: FlowSpec, params: SimParams,
                   *, substeps: int = 1) -> Ensemble:
    """Euler-Maruyama with mirror reflection; ``X`` uses the q-centered velocity.

    Initial positions are drawn from the stationary density.  ``X`` is
    accumulated over ``[burn_in, T]`` with the velocity at the mid-time of
    each step (trapezoid in ``Y``).  ``substeps=2`` halves the step by
    Brownian-bridge refinement of the same path, so the two runs share
    their coarse increments.
    """
    if substeps not in (1, 2):
        raise InputError("substeps must be 1 or 2")
    dt = params.dt
    sub = substeps
    n_burn = int(round(params.burn_in / dt))
    n_steps = int(round(params.window / dt))
    grid, profiles, drift, cdf = _tables(config, flow)
    h = dt / sub
    mid = params.burn_in + (np.arange(n_steps * sub) + 0.5) * h
    coef = np.array([np.cos(hm.omega * mid + hm.phase) for hm in flow.harmonics])
    n = params.n_particles
    x = np.empty(n)
    y = np.empty(n)
    bad = np.empty(n, dtype=np.int64)
    set_threads()
    _simulate(np.uint64(params.seed), n, n_burn, n_steps, sub, dt, config.sigma, config.width,
              profiles, coef, drift, not config.drift.is_zero, grid, cdf, x, y, bad)
    failed = np.flatnonzero(bad >= 0)
    if failed.size:
        raise SimulationError(
            f"non-finite state for particle {failed[0]} at step {bad[failed[0]]}"
        )
    return Ensemble(x, y, n_steps * dt, params, config.sigma)


# ---------------------------------------------------------------------------
# estimators


def estimate_dispersivity_mc(ensemble: Ensemble, window: float | None = None) -> DispersivityEstimate:
    """Sample variance of ``X`` over the window, with its standard error.

    The standard error uses ``Var(s**2) ~ (m4 - (n-3)/(n-1) s**4) / n``.
    """
    window = ensemble.window if window is None else float(window)
    if not window > 0:
        raise InputError("accumulation window must be positive")
    x = np.asarray(ensemble.x, dtype=float)
    n = len(x)
    if n < 2:
        raise PreconditionError("need at least two particles for a variance")
    dev = x - x.mean()
    s2 = float(dev @ dev) / (n - 1)
    m4 = float(np.mean(dev**4))
    var_s2 = max(m4 - (n - 3) / (n - 1) * s2 * s2, 0.0) / n
    meta = {"n_particles": n, "window": window}
    if ensemble.params is not None:
        meta.update(dt=ensemble.params.dt, seed=ensemble.params.seed)
    return DispersivityEstimate(s2 / window, Method.MONTE_CARLO, math.sqrt(var_s2) / window, meta)


@dataclass(frozen=True)
class NormalityReport:
    n: int
    skewness: float
    excess_kurtosis: float
    skewness_se: float
    kurtosis_se: float
    ks_statistic: float
    ks_pvalue: float

    @property
    def standardized_skewness(self) -> float:
        return self.skewness / self.skewness_se

    @property
    def standardized_kurtosis(self) -> float:
        return self.excess_kurtosis / self.kurtosis_se


def normality_check(ensemble: Ensemble) -> NormalityReport:
    """Shape statistics of ``X / sqrt(window)`` against ``N(0, D_hat)``."""
    z = np.asarray(ensemble.x, dtype=float) / math.sqrt(ensemble.window)
    n = len(z)
    if n < 1000:
        raise PreconditionError("normality check needs at least 1000 particles")
    sd = float(np.std(z, ddof=1))
    skew = float(stats.skew(z))
    kurt = float(stats.kurtosis(z))
    if sd > 0:
        ks = stats.kstest(z, "norm", args=(float(z.mean()), sd))
        ks_stat, ks_p = float(ks.statistic), float(ks.pvalue)
    else:
        ks_stat, ks_p = float("nan"), float("nan")
    return NormalityReport(n, skew, kurt, math.sqrt(6.0 / n), math.sqrt(24.0 / n), ks_stat, ks_p)


def ks_critical_value(n: int, alpha: float = 0.01) -> float:
    """Asymptotic one-sample Kolmogorov-Smirnov critical value."""
    return float(stats.kstwobign.isf(alpha)) / math.sqrt(n)


def occupancy_ks(ensemble: Ensemble, config: ChannelConfig):
    """KS test of the terminal positions against the stationary density.

    Terminal positions of distinct particles are independent draws, unlike
    successive positions of one path, so the classical critical values apply.
    """
    q = stationary_density(config, TABLE_NODES)
    cdf = _cdf(q)
    res = stats.kstest(np.asarray(ensemble.y), lambda y: np.interp(y, q.grid, cdf))
    return float(res.statistic), float(res.pvalue)


def finite_window_rate(config: ChannelConfig, flow: FlowSpec, t0: float, window: float,
                       modes: int = 200) -> float:
    """Exact ``E[X**2] / window`` over ``[t0, t0 + window]`` for zero drift.

    Expands the centered profile in Neumann modes ``cos(k pi y / a)`` with
    decay rates ``sigma**2 (k pi / a)**2 / 2``.  The finite-window value
    differs from the dispersivity by an oscillating ``O(1/window)`` term,
    which is what a Monte Carlo run actually estimates.
    """
    if not config.drift.is_zero:
        raise UnsupportedError("finite-window expectation is only available for zero drift")
    if len(flow.harmonics) != 1:
        raise UnsupportedError("finite-window expectation supports a single harmonic")
    if not window > 0:
        raise InputError("window must be positive")
    hm = flow.harmonics[0]
    a, omega = config.width, hm.omega
    m = TABLE_NODES - 1
    y = np.linspace(0.0, a, m + 1)
    vals = hm.amplitude * hm.profile(y, a)
    vals = vals - np.trapezoid(vals, y) / a
    # trapezoid projections onto sqrt(2/a) cos(k pi y / a)
    coeffs = dct(vals, type=1) / 2 * (a / m) * math.sqrt(2.0 / a)
    start = t0 + hm.phase / omega if omega > 0 else t0
    rho2 = cmath.exp(2j * omega * start)

    def ramp(mu):
        # int_0^window exp(mu t) dt
        if abs(mu * window) < 1e-12:
            return window
        return (cmath.exp(mu * window) - 1.0) / mu

    total = 0.0
    for k in range(1, min(modes, m) + 1):
        pk = coeffs[k]
        lam = 0.5 * config.sigma**2 * (k * math.pi / a) ** 2
        z = complex(lam, omega)
        decay = ramp(complex(-lam, omega))
        # 2 int_0^W int_0^t cos(w(s+t0)) cos(w(t+t0)) exp(-lam (t-s)) ds dt
        pair = (rho2 * (ramp(2j * omega) - decay) / z + (window - decay) / z.conjugate()).real
        total += pk * pk * pair
    # stationary density 1/a
    return total / (a * window)
