"""Weighted tent-space norms with aperture, Carleson norms, rescaling.

The cone functional at a base point x accumulates the weighted mass of
|g|^2 over balls B(x, alpha * t^(1/m)) against the measure t^beta dt dy,
normalized by t^(n/m); the tent norm is its l^p aggregate over x.  The
classical tent space is beta = -1, m = 1, alpha = 1.  p = infinity is not
a tent parameter: the Carleson norm is a separate sup-type functional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ApertureTooLargeError, RadiusTooLargeError
from .grid import Grid, GridSpec, SpaceTimeField, make_grid


@dataclass(frozen=True)
class TentParams:
    """Tent-space parameters (p, m, beta, alpha); tau = min(p, 2) derived."""

    p: float
    m: int = 1
    beta: float = -1.0
    alpha: float = 1.0

    def __post_init__(self):
        if not (self.p > 1 and math.isfinite(self.p)):
            raise ValueError(
                f"p must lie in (1, inf); use carleson_norm for p = inf (got {self.p})"
            )
        if not (isinstance(self.m, int) and self.m >= 1):
            raise ValueError(f"homogeneity m must be a positive integer, got {self.m}")
        if not (self.alpha >= 1):
            raise ValueError(f"aperture must satisfy alpha >= 1, got {self.alpha}")

    @property
    def tau(self) -> float:
        return min(self.p, 2.0)


@dataclass(frozen=True, eq=False)
class ConeField:
    """Square-function values A(x) >= 0, one per spatial grid point."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(v)):
            raise ValueError("cone functional produced non-finite values")


def cone_radii(grid: Grid, m: int, alpha: float) -> np.ndarray:
    return alpha * grid.times ** (1.0 / m)


def cone_functional(g: SpaceTimeField, params: TentParams) -> ConeField:
    """A(x) = sum_i w_i t_i^(beta - n/m) * ball_mass(|g(t_i)|^2, alpha t_i^(1/m), x).

    Computed for every center through the fast ball-sum path.  Requires
    alpha * t_max^(1/m) < X/2 so cones never wrap around the torus.
    """
    grid = g.grid
    n = grid.spec.n
    radii = cone_radii(grid, params.m, params.alpha)
    if radii.max() >= grid.extent / 2:
        raise ApertureTooLargeError(
            f"aperture {params.alpha} at t_max gives ball radius "
            f"{radii.max()!r} >= extent/2 = {grid.extent / 2!r}"
        )
    coeff = grid.weights * grid.times ** (params.beta - n / params.m)
    u = g.abs2_slices()
    acc = np.zeros(grid.spec.spatial_shape, dtype=np.float64)
    for i in range(grid.spec.nt):
        acc += coeff[i] * grid.ball_sums(u[i], radii[i])
    return ConeField(grid, acc)


def tent_norm(g: SpaceTimeField, params: TentParams) -> float:
    """(h^n sum_x A(x)^(p/2))^(1/p); absolutely 1-homogeneous in g."""
    A = cone_functional(g, params).values
    total = float(np.sum(A ** (params.p / 2.0))) * g.grid.cell_volume
    return total ** (1.0 / params.p)


def carleson_norm(g: SpaceTimeField, m: int, beta: float) -> float:
    return carleson_norm_argmax(g, m, beta)[0]


def carleson_norm_argmax(g: SpaceTimeField, m: int, beta: float):
    """Carleson-type sup norm and its maximizing box.

    Value: sup over grid centers x and radii r in the time grid of
    ( r^(-n/m) * sum_{t_i <= r} w_i t_i^beta * ball_mass(|g(t_i)|^2, r^(1/m), x) )^(1/2).

    Returns (value, center_index, r).
    """
    grid = g.grid
    n = grid.spec.n
    t = grid.times
    if t[-1] ** (1.0 / m) >= grid.extent / 2:
        raise RadiusTooLargeError(
            f"t_max^(1/m) = {t[-1] ** (1.0 / m)!r} must stay below extent/2"
        )
    u = g.abs2_slices()
    coeff = grid.weights * t**beta
    running = np.zeros(grid.spec.spatial_shape, dtype=np.float64)
    best = 0.0
    best_center: tuple[int, ...] | int = 0
    best_r = float(t[0])
    for rho in range(grid.spec.nt):
        running = running + coeff[rho] * u[rho]
        sums = grid.ball_sums(running, t[rho] ** (1.0 / m))
        scaled = t[rho] ** (-n / m) * sums
        idx = int(np.argmax(scaled))
        val = float(scaled.flat[idx])
        if val > best:
            best = val
            best_center = idx if n == 1 else np.unravel_index(idx, scaled.shape)
            best_r = float(t[rho])
    return math.sqrt(max(best, 0.0)), best_center, best_r


def rescale_homogeneity(f: SpaceTimeField, m: int, beta: float) -> SpaceTimeField:
    """Map f to h(t, y) = t^(m(beta+1)/2) f(t^m, y) on the grid with times t_i^(1/m).

    The log-spaced grid is closed under t -> t^(1/m), so no interpolation
    happens: slice i of the result is slice i of the input times the
    scalar u_i^(m(beta+1)/2).
    """
    spec = f.grid.spec
    new_spec = GridSpec(
        spec.n,
        spec.extent,
        spec.nx,
        spec.t_min ** (1.0 / m),
        spec.t_max ** (1.0 / m),
        spec.nt,
    )
    new_grid = make_grid(new_spec)
    expo = m * (beta + 1.0) / 2.0
    scale = new_grid.times**expo
    values = f.values * scale[(...,) + (None,) * spec.n]
    return SpaceTimeField(new_grid, values)
