"""Mirror-symmetric / antisymmetric splitting of a centered profile.

With no vertical drift the density is uniform, the cell problem commutes with
the reflection ``y -> a - y``, and the gradients forced by the even and odd
parts are orthogonal.  Their dispersivities therefore add.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cell_solver import (
    DEFAULT_GRID,
    _solve_grid,
    assemble_amplitude,
    numerical_dispersivity,
    solve_cell_problem,
)
from .domain import (
    ChannelConfig,
    Combination,
    DispersivityEstimate,
    FlowSpec,
    Harmonic,
    SpatialProfile,
    nondimensionalize,
    remove_mean,
    stationary_density,
)
from .errors import PreconditionError

__all__ = ["SymmetryParts", "decompose", "additive_dispersivity", "cross_term"]


@dataclass(frozen=True)
class SymmetryParts:
    symmetric: SpatialProfile
    antisymmetric: SpatialProfile
    width: float = 1.0


def decompose(profile: SpatialProfile, width: float = 1.0) -> SymmetryParts:
    """``U_s = (U(y) + U(a-y))/2`` and ``U_a = (U(y) - U(a-y))/2``."""
    mirror = profile.reflected()
    even = Combination(((0.5, profile), (0.5, mirror)), symmetric=True)
    odd = Combination(((0.5, profile), (-0.5, mirror)))
    return SymmetryParts(even, odd, width)


def _require_no_drift(config):
    if not config.drift.is_zero:
        raise PreconditionError(
            "dispersivities of the symmetric and antisymmetric parts add only when the "
            "vertical drift vanishes; with drift the cross term survives unless the two "
            "parts oscillate with different periods"
        )


def additive_dispersivity(parts: SymmetryParts, omega: float, config: ChannelConfig,
                          n: int = DEFAULT_GRID, amplitude: float = 1.0,
                          phases=(0.0, 0.0)) -> DispersivityEstimate:
    """``D(U_s) + D(U_a)`` from two independent cell-problem solves.

    Both parts are solved on the full channel: the discrete operator and the
    trapezoid rule commute with the reflection there, so the identity holds
    on the grid and not just in the limit.
    """
    _require_no_drift(config)
    ests = [
        numerical_dispersivity(config, FlowSpec((Harmonic(amplitude, omega, p, psi),)), n,
                               half_range=False)
        for p, psi in ((parts.symmetric, phases[0]), (parts.antisymmetric, phases[1]))
    ]
    value = ests[0].value + ests[1].value
    unc = math.hypot(ests[0].uncertainty, ests[1].uncertainty)
    return DispersivityEstimate(value, ests[0].method, unc,
                                {"grid": n, "parts": (ests[0].value, ests[1].value)})


def cross_term(parts: SymmetryParts, omega: float, config: ChannelConfig,
               n: int = DEFAULT_GRID) -> float:
    """``|int F_s' conj(F_a') q| / (||F_s'|| ||F_a'||)`` on the full channel."""
    cfg, flow, _ = nondimensionalize(
        config, FlowSpec((Harmonic(1.0, omega, parts.symmetric),
                          Harmonic(1.0, omega, parts.antisymmetric)))
    )
    q = stationary_density(cfg, n + 1)
    grid = _solve_grid(cfg, n, False)
    grads = []
    for h in flow.harmonics:
        forcing = remove_mean(h.profile, q)(grid, cfg.width).astype(complex)
        grads.append(solve_cell_problem(assemble_amplitude(cfg, h.omega, forcing, n)).gradient)
    gs, ga = grads
    inner = abs(np.trapezoid(gs * np.conj(ga) * q.values, grid))
    norms = math.sqrt(np.trapezoid(np.abs(gs) ** 2 * q.values, grid)
                      * np.trapezoid(np.abs(ga) ** 2 * q.values, grid))
    return 0.0 if norms == 0 else float(inner / norms)
