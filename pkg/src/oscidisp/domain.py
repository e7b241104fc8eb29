"""Channel, flow and density types shared by the closed-form, grid and Monte Carlo routes.

Positions ``y`` are measured across the channel, ``0 <= y <= width``.  A flow
is a finite sum of harmonics ``U0 * cos(omega * t + psi) * P(y)`` where ``P``
is a dimensionless :class:`SpatialProfile`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, InputError

__all__ = [
    "VerticalDrift",
    "ChannelConfig",
    "SpatialProfile",
    "LinearShear",
    "Poiseuille",
    "PowerLaw",
    "Tabulated",
    "Combination",
    "Reflected",
    "Harmonic",
    "FlowSpec",
    "DensityProfile",
    "Method",
    "DispersivityEstimate",
    "ScaleFactors",
    "evaluate_velocity",
    "stationary_density",
    "remove_mean",
    "nondimensionalize",
    "dimensional_dispersivity",
]


def _as_nodes(nodes, values, what):
    nodes = np.asarray(nodes, dtype=float)
    values = np.asarray(values, dtype=float)
    if nodes.ndim != 1 or nodes.shape != values.shape:
        raise InputError(f"{what}: nodes and values must be 1-d arrays of equal length")
    if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(values))):
        raise InputError(f"{what}: non-finite sample")
    if np.any(np.diff(nodes) <= 0):
        raise InputError(f"{what}: nodes must be strictly increasing")
    nodes.setflags(write=False)
    values.setflags(write=False)
    return nodes, values


def _check_cover(nodes, width, what):
    tol = 1e-12 * max(1.0, width)
    if nodes[0] > tol or nodes[-1] < width - tol:
        raise InputError(
            f"{what}: nodes span [{nodes[0]:g}, {nodes[-1]:g}] but must cover [0, {width:g}]"
        )


# ---------------------------------------------------------------------------
# vertical drift


@dataclass(frozen=True)
class VerticalDrift:
    """Cross-channel drift ``v(y)``: zero, constant, or piecewise linear."""

    kind: str = "zero"
    value: float = 0.0
    nodes: Optional[np.ndarray] = field(default=None, repr=False)
    values: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("zero", "constant", "tabulated"):
            raise InputError(f"unknown drift kind {self.kind!r}")
        if not math.isfinite(self.value):
            raise InputError("drift value must be finite")
        if self.kind == "tabulated":
            if self.nodes is None or self.values is None:
                raise InputError("tabulated drift needs nodes and values")
            nodes, values = _as_nodes(self.nodes, self.values, "drift")
            if len(nodes) < 2:
                raise InputError("tabulated drift needs at least 2 nodes")
            object.__setattr__(self, "nodes", nodes)
            object.__setattr__(self, "values", values)

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def constant(cls, c: float):
        return cls("constant", float(c))

    @classmethod
    def tabulated(cls, nodes, values):
        return cls("tabulated", 0.0, nodes, values)

    @property
    def is_zero(self) -> bool:
        if self.kind == "zero":
            return True
        if self.kind == "constant":
            return self.value == 0.0
        return bool(np.all(self.values == 0.0))

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(y)
        if self.kind == "constant":
            return np.full_like(y, self.value)
        return np.interp(y, self.nodes, self.values)

    def integral(self, y):
        """``int_0^y v``; exact for the piecewise-linear interpolant."""
        y = np.asarray(y, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(y)
        if self.kind == "constant":
            return self.value * y
        x, v = self.nodes, self.values
        cum = np.concatenate(([0.0], np.cumsum(0.5 * np.diff(x) * (v[1:] + v[:-1]))))
        # shift so that the integral starts at y = 0
        cum0 = np.interp(0.0, x, cum) if x[0] <= 0.0 else 0.0
        i = np.clip(np.searchsorted(x, y, side="right") - 1, 0, len(x) - 2)
        dy = y - x[i]
        slope = (v[i + 1] - v[i]) / (x[i + 1] - x[i])
        return cum[i] + dy * (v[i] + 0.5 * slope * dy) - cum0

    def scaled(self, length: float, velocity: float) -> "VerticalDrift":
        if self.kind == "zero":
            return self
        if self.kind == "constant":
            return VerticalDrift.constant(self.value / velocity)
        return VerticalDrift.tabulated(self.nodes / length, self.values / velocity)


@dataclass(frozen=True)
class ChannelConfig:
    width: float = 1.0
    sigma: float = 1.0
    drift: VerticalDrift = field(default_factory=VerticalDrift.zero)

    def __post_init__(self):
        if not (math.isfinite(self.width) and self.width > 0):
            raise InputError(f"width must be positive, got {self.width!r}")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise InputError(f"sigma must be positive, got {self.sigma!r}")
        if self.drift.kind == "tabulated":
            _check_cover(self.drift.nodes, self.width, "drift")

    @property
    def diffusivity(self) -> float:
        return 0.5 * self.sigma**2


# ---------------------------------------------------------------------------
# spatial profiles


class SpatialProfile:
    """Dimensionless cross-channel shape ``P(y)`` of a velocity harmonic.

    Subclasses implement ``_value(s)`` and ``_slope(s)`` on the unit interval,
    ``s = y / width``.  Profiles support ``+``, scalar ``*`` and
    :meth:`shifted`, which build :class:`Combination` objects.
    """

    symmetric = False

    def _value(self, s):
        raise NotImplementedError

    def _slope(self, s):
        raise NotImplementedError

    def __call__(self, y, width: float = 1.0):
        return self._value(np.asarray(y, dtype=float) / width)

    def derivative(self, y, width: float = 1.0):
        """dP/dy in units of 1/length."""
        return self._slope(np.asarray(y, dtype=float) / width) / width

    def shifted(self, c: float) -> "Combination":
        return Combination(((1.0, self),), constant=float(c), symmetric=self.symmetric)

    def reflected(self) -> "SpatialProfile":
        return Reflected(self)

    def __add__(self, other):
        if not isinstance(other, SpatialProfile):
            return NotImplemented
        return Combination(
            ((1.0, self), (1.0, other)), symmetric=self.symmetric and other.symmetric
        )

    def __mul__(self, k):
        if not isinstance(k, (int, float)):
            return NotImplemented
        return Combination(((float(k), self),), symmetric=self.symmetric)

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + (-1.0) * other

    def rescaled(self, width: float) -> "SpatialProfile":
        """Same profile expressed on a channel of unit width."""
        return self


@dataclass(frozen=True, eq=False)
class LinearShear(SpatialProfile):
    """``P(y) = y / a``: a channel whose upper wall slides."""

    def _value(self, s):
        return s.copy()

    def _slope(self, s):
        return np.ones_like(s)


@dataclass(frozen=True, eq=False)
class Poiseuille(SpatialProfile):
    """``P(y) = (y/a)(1 - y/a)``: pressure-driven Newtonian flow."""

    symmetric = True

    def _value(self, s):
        return s * (1.0 - s)

    def _slope(self, s):
        return 1.0 - 2.0 * s


@dataclass(frozen=True, eq=False)
class PowerLaw(SpatialProfile):
    """``P(y) = const - |y/a - 1/2|**n`` with ``n >= 1``.

    The constant defaults to ``2**-n`` (no slip at the walls); it never
    affects a dispersivity.
    """

    n: float = 2.0
    constant: Optional[float] = None
    symmetric = True

    def __post_init__(self):
        if not (math.isfinite(self.n) and self.n >= 1):
            raise InputError(f"power-law exponent must be >= 1, got {self.n!r}")
        if self.constant is None:
            object.__setattr__(self, "constant", 0.5**self.n)

    def _value(self, s):
        return self.constant - np.abs(s - 0.5) ** self.n

    def _slope(self, s):
        d = s - 0.5
        return -self.n * np.sign(d) * np.abs(d) ** (self.n - 1)


@dataclass(frozen=True, eq=False)
class Tabulated(SpatialProfile):
    """Piecewise-linear profile through samples at physical positions."""

    nodes: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        nodes, values = _as_nodes(self.nodes, self.values, "profile")
        if len(nodes) < 3:
            raise InputError("tabulated profile needs at least 3 nodes")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    def __call__(self, y, width: float = 1.0):
        _check_cover(self.nodes, width, "profile")
        return np.interp(np.asarray(y, dtype=float), self.nodes, self.values)

    def derivative(self, y, width: float = 1.0):
        _check_cover(self.nodes, width, "profile")
        y = np.asarray(y, dtype=float)
        slopes = np.diff(self.values) / np.diff(self.nodes)
        i = np.clip(np.searchsorted(self.nodes, y, side="right") - 1, 0, len(slopes) - 1)
        return slopes[i]

    def _value(self, s):
        raise InputError("tabulated profiles are evaluated at physical positions")

    _slope = _value

    def rescaled(self, width: float) -> "Tabulated":
        return Tabulated(self.nodes / width, self.values)


@dataclass(frozen=True, eq=False)
class Combination(SpatialProfile):
    """``constant + sum(weight * profile)``."""

    terms: tuple = ()
    constant: float = 0.0
    symmetric: bool = False

    def __call__(self, y, width: float = 1.0):
        y = np.asarray(y, dtype=float)
        out = np.full_like(y, self.constant)
        for w, p in self.terms:
            out = out + w * p(y, width)
        return out

    def derivative(self, y, width: float = 1.0):
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        for w, p in self.terms:
            out = out + w * p.derivative(y, width)
        return out

    def rescaled(self, width: float) -> "Combination":
        return replace(self, terms=tuple((w, p.rescaled(width)) for w, p in self.terms))


@dataclass(frozen=True, eq=False)
class Reflected(SpatialProfile):
    """Mirror image ``P(a - y)``."""

    base: SpatialProfile

    @property
    def symmetric(self):
        return self.base.symmetric

    def __call__(self, y, width: float = 1.0):
        return self.base(width - np.asarray(y, dtype=float), width)

    def derivative(self, y, width: float = 1.0):
        return -self.base.derivative(width - np.asarray(y, dtype=float), width)

    def rescaled(self, width: float) -> "Reflected":
        return Reflected(self.base.rescaled(width))


# ---------------------------------------------------------------------------
# flows


@dataclass(frozen=True)
class Harmonic:
    amplitude: float
    omega: float
    profile: SpatialProfile
    phase: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.amplitude):
            raise InputError("harmonic amplitude must be finite")
        if not (math.isfinite(self.omega) and self.omega >= 0):
            raise InputError(f"harmonic frequency must be finite and >= 0, got {self.omega!r}")
        if not math.isfinite(self.phase):
            raise InputError("harmonic phase must be finite")

    @property
    def complex_amplitude(self) -> complex:
        return self.amplitude * complex(math.cos(self.phase), math.sin(self.phase))


@dataclass(frozen=True)
class FlowSpec:
    harmonics: tuple

    def __post_init__(self):
        hs = tuple(self.harmonics)
        if not hs:
            raise InputError("a flow needs at least one harmonic")
        object.__setattr__(self, "harmonics", hs)

    @classmethod
    def single(cls, profile, omega, amplitude=1.0, phase=0.0):
        return cls((Harmonic(amplitude, omega, profile, phase),))

    @property
    def omegas(self):
        return tuple(h.omega for h in self.harmonics)


def evaluate_velocity(flow: FlowSpec, t, y, width: float = 1.0):
    """Sum of ``U0 cos(omega t + psi) P(y)`` over the harmonics of ``flow``."""
    y = np.asarray(y, dtype=float)
    if np.any(y < 0) or np.any(y > width):
        raise DomainError(f"position outside the channel [0, {width:g}]")
    out = np.zeros(np.broadcast(np.asarray(t, dtype=float), y).shape)
    for h in flow.harmonics:
        out = out + h.amplitude * np.cos(h.omega * np.asarray(t) + h.phase) * h.profile(y, width)
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# stationary density


@dataclass(frozen=True)
class DensityProfile:
    grid: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    alpha: float = 1.0

    @property
    def width(self) -> float:
        return float(self.grid[-1])

    @property
    def is_uniform(self) -> bool:
        return bool(np.all(self.values == self.values[0]))

    def __call__(self, y):
        return np.interp(np.asarray(y, dtype=float), self.grid, self.values)

    def integrate(self, f_values) -> float:
        """Trapezoid integral of ``f * q`` with ``f`` sampled on :attr:`grid`."""
        return float(np.trapezoid(np.asarray(f_values) * self.values, self.grid))


def stationary_density(config: ChannelConfig, resolution: int = 2049) -> DensityProfile:
    """Stationary cross-channel density of the reflected diffusion.

    ``q(y) = alpha * exp(2/sigma**2 * int_0^y v)``, normalized so that its
    trapezoid integral over the uniform grid is one.
    """
    if resolution < 3:
        raise InputError("density resolution must be at least 3")
    a = config.width
    grid = np.linspace(0.0, a, int(resolution))
    drift = config.drift
    if drift.kind == "tabulated":
        if not np.all(np.isfinite(drift.values)):
            raise InputError("non-finite drift sample")
    if drift.is_zero:
        values = np.full_like(grid, 1.0 / a)
        alpha = 1.0 / a
    else:
        expo = 2.0 * drift.integral(grid) / config.sigma**2
        shift = expo.max()
        raw = np.exp(expo - shift)
        norm = np.trapezoid(raw, grid)
        values = raw / norm
        alpha = math.exp(-shift) / norm
    grid.setflags(write=False)
    values.setflags(write=False)
    return DensityProfile(grid, values, alpha)


def remove_mean(profile: SpatialProfile, q: DensityProfile) -> Combination:
    """Profile minus its ``q``-weighted cross-channel mean."""
    a = q.width
    mean = q.integrate(profile(q.grid, a))
    centered = profile.shifted(-mean)
    return centered


# ---------------------------------------------------------------------------
# dispersivity estimates and scaling


class Method(str, enum.Enum):
    CLOSED_FORM = "closed"
    NUMERICAL = "numeric"
    ASYMPTOTIC_SMALL = "small"
    ASYMPTOTIC_LARGE = "large"
    MONTE_CARLO = "mc"


@dataclass(frozen=True)
class DispersivityEstimate:
    value: float
    method: Method
    uncertainty: Optional[float] = None
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (self.value >= 0):
            raise DomainError(f"dispersivity must be non-negative, got {self.value!r}")

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class ScaleFactors:
    """Units that make ``sigma = 1``, ``a = 1`` and the reference amplitude 1."""

    length: float
    time: float
    velocity: float

    def __post_init__(self):
        for name in ("length", "time", "velocity"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InputError(f"scale factor {name} must be positive, got {v!r}")

    @classmethod
    def unit(cls):
        return cls(1.0, 1.0, 1.0)

    @property
    def dispersivity(self) -> float:
        # U0**2 a**2 / sigma**2
        return self.velocity**2 * self.time

    @property
    def frequency(self) -> float:
        return 1.0 / self.time


def nondimensionalize(config: ChannelConfig, flow: FlowSpec):
    """Rescale to ``sigma = 1``, ``a = 1`` and unit reference amplitude.

    The reference amplitude is the largest ``|U0|`` among the harmonics, so
    relative amplitudes and phases are preserved.  Returns
    ``(scaled_config, scaled_flow, scales)``.
    """
    a, sigma = config.width, config.sigma
    time = a * a / sigma**2
    u_ref = max(abs(h.amplitude) for h in flow.harmonics) or 1.0
    scales = ScaleFactors(a, time, u_ref)
    drift = config.drift.scaled(a, sigma**2 / a)
    scaled_config = ChannelConfig(1.0, 1.0, drift)
    scaled_flow = FlowSpec(
        tuple(
            Harmonic(h.amplitude / u_ref, h.omega * time, h.profile.rescaled(a), h.phase)
            for h in flow.harmonics
        )
    )
    return scaled_config, scaled_flow, scales


def dimensional_dispersivity(value, scales: ScaleFactors, method=Method.NUMERICAL,
                             uncertainty=None, metadata=None) -> DispersivityEstimate:
    """Convert a dimensionless dispersivity back to ``length**2 / time``."""
    value = float(value)
    if not (value >= 0):
        raise DomainError(f"dimensionless dispersivity must be non-negative, got {value!r}")
    k = scales.dispersivity
    return DispersivityEstimate(
        value * k,
        Method(method),
        None if uncertainty is None else uncertainty * k,
        dict(metadata or {}),
    )
