"""Space-time discretization: a flat torus in space, a log-spaced time grid.

The spatial domain is the torus [0, X)^n sampled uniformly with step
h = X/nx; time is sampled geometrically between t_min and t_max with
trapezoid quadrature weights.  All ball geometry is resolved at grid-cell
level with closed balls: a cell belongs to the ball when its integer
offset d from the center satisfies |d|*h <= r (1-D) or
(dx^2+dy^2)*h^2 <= r^2 (2-D).  Requiring every radius to stay below X/2
keeps periodic balls from self-overlapping, so the torus model agrees
with the Euclidean one for compactly supported fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import GridMismatchError, InvalidSpecError, RadiusTooLargeError


@dataclass(frozen=True)
class GridSpec:
    """Static description of a space-time grid.

    Parameters
    ----------
    n : spatial dimension, 1 or 2.
    extent : torus side length X > 0.
    nx : spatial points per axis.
    t_min, t_max : time range, 0 < t_min < t_max.
    nt : number of log-spaced time samples.
    """

    n: int
    extent: float
    nx: int
    t_min: float
    t_max: float
    nt: int

    def __post_init__(self):
        if self.n not in (1, 2):
            raise InvalidSpecError(f"spatial dimension must be 1 or 2, got {self.n}")
        if not (self.extent > 0):
            raise InvalidSpecError("extent must be positive")
        if self.nx < 2:
            raise InvalidSpecError(f"nx must be at least 2, got {self.nx}")
        if self.nt < 2:
            raise InvalidSpecError(f"nt must be at least 2, got {self.nt}")
        if not (0 < self.t_min < self.t_max):
            raise InvalidSpecError("time range requires 0 < t_min < t_max")

    @property
    def spatial_shape(self) -> tuple[int, ...]:
        return (self.nx,) * self.n

    @property
    def num_spatial(self) -> int:
        return self.nx**self.n

    def refined(self, space_factor: int = 1, time_factor: int = 1) -> "GridSpec":
        """Same continuum domain at a finer sampling."""
        return GridSpec(
            self.n,
            self.extent,
            self.nx * space_factor,
            self.t_min,
            self.t_max,
            self.nt * time_factor,
        )


@dataclass(frozen=True, eq=False)
class Grid:
    """Materialized grid: time nodes, quadrature weights, spatial step."""

    spec: GridSpec
    times: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    h: float

    def __eq__(self, other):
        return isinstance(other, Grid) and self.spec == other.spec

    def __hash__(self):
        return hash(self.spec)

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def extent(self) -> float:
        return self.spec.extent

    @property
    def cell_volume(self) -> float:
        # explicit product: ball masses scale by exactly one multiply with this
        return self.h if self.spec.n == 1 else self.h * self.h

    def axis_coords(self) -> np.ndarray:
        return self.h * np.arange(self.spec.nx)

    # -- ball sums ---------------------------------------------------------

    def _check_radius(self, radius: float) -> None:
        if radius < 0:
            raise RadiusTooLargeError("radius must be nonnegative")
        if radius >= self.extent / 2:
            raise RadiusTooLargeError(
                f"radius {radius!r} must stay below extent/2 = {self.extent / 2!r}"
            )

    def ball_sums(self, values: np.ndarray, radius: float) -> np.ndarray:
        """h^n times the sum of `values` over the ball, for every center.

        `values` is a real spatial slice.  The result at center c equals
        ball_mass(values, radius, c) bit-for-bit.
        """
        self._check_radius(radius)
        u = np.ascontiguousarray(values, dtype=np.float64)
        if u.shape != self.spec.spatial_shape:
            raise GridMismatchError("slice shape does not match the grid")
        if self.spec.n == 1:
            k = kernels.window_halfwidth(radius, self.h, self.spec.nx)
            out = kernels.ball_sum_1d(u, k)
        else:
            kx = kernels.ball_row_halfwidths(radius, self.h, self.spec.nx)
            out = kernels.ball_sum_2d(u, kx)
        out *= self.cell_volume
        return out

    def ball_mass(self, values: np.ndarray, radius: float, center) -> float:
        """h^n times the sum of `values` over the ball around one grid center."""
        self._check_radius(radius)
        u = np.asarray(values, dtype=np.float64)
        nx = self.spec.nx
        if self.spec.n == 1:
            i = int(center)
            k = kernels.window_halfwidth(radius, self.h, nx)
            s = 0.0
            for d in range(-k, k + 1):
                s += u[(i + d) % nx]
            return s * self.cell_volume
        iy, ix = (int(center[0]), int(center[1]))
        kx = kernels.ball_row_halfwidths(radius, self.h, nx)
        K = len(kx) - 1
        s = 0.0
        for dy in range(-K, K + 1):
            w = int(kx[abs(dy)])
            row = u[(iy + dy) % nx]
            for dx in range(-w, w + 1):
                s += row[(ix + dx) % nx]
        return s * self.cell_volume

    def ball_mass_naive(self, values: np.ndarray, radius: float, center) -> float:
        """Brute-force reference: test every offset pair, same pinned order."""
        self._check_radius(radius)
        u = np.asarray(values, dtype=np.float64)
        nx = self.spec.nx
        h = self.h
        if self.spec.n == 1:
            i = int(center)
            s = 0.0
            for d in range(-(nx // 2), nx - nx // 2):
                if abs(d) * h <= radius:
                    s += u[(i + d) % nx]
            return s * self.cell_volume
        iy, ix = (int(center[0]), int(center[1]))
        hh = h * h
        rr = radius * radius
        s = 0.0
        for dy in range(-(nx // 2), nx - nx // 2):
            row = u[(iy + dy) % nx]
            for dx in range(-(nx // 2), nx - nx // 2):
                if float(dx * dx + dy * dy) * hh <= rr:
                    s += row[(ix + dx) % nx]
        return s * self.cell_volume

    # -- masks -------------------------------------------------------------

    def index_dist2(self, center) -> np.ndarray:
        """Squared integer offset distance from `center` to every cell."""
        nx = self.spec.nx
        d = np.arange(nx)
        if self.spec.n == 1:
            i = int(center)
            off = np.abs(d - i)
            off = np.minimum(off, nx - off)
            return off * off
        iy, ix = (int(center[0]), int(center[1]))
        oy = np.abs(d - iy)
        oy = np.minimum(oy, nx - oy)
        ox = np.abs(d - ix)
        ox = np.minimum(ox, nx - ox)
        return oy[:, None] ** 2 + ox[None, :] ** 2

    def ball_mask(self, center, radius: float) -> np.ndarray:
        """Boolean mask of the discrete closed ball (any radius)."""
        d2 = self.index_dist2(center).astype(np.float64)
        return d2 * (self.h * self.h) <= radius * radius


def make_grid(spec: GridSpec) -> Grid:
    """Materialize time nodes (geometric) and trapezoid weights.

    Examples: t in [1, 4] with nt=3 gives nodes {1, 2, 4}.
    """
    t = np.geomspace(spec.t_min, spec.t_max, spec.nt)
    if not np.all(np.diff(t) > 0):
        raise InvalidSpecError("time nodes are not strictly increasing")
    w = np.empty(spec.nt)
    w[0] = (t[1] - t[0]) / 2
    w[-1] = (t[-1] - t[-2]) / 2
    if spec.nt > 2:
        w[1:-1] = (t[2:] - t[:-2]) / 2
    return Grid(spec=spec, times=t, weights=w, h=spec.extent / spec.nx)


def periodic_distance(x, y, extent: float):
    """Torus distance: per-axis min(|xi-yi|, X-|xi-yi|), combined in l2.

    Scalars are treated as 1-D points; for n-D points the last axis holds
    coordinates.  Coordinates are reduced mod X first.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    scalar = x.ndim == 0 and y.ndim == 0
    d = np.abs(np.mod(x, extent) - np.mod(y, extent))
    d = np.minimum(d, extent - d)
    if scalar:
        return float(d)
    out = np.sqrt(np.sum(d * d, axis=-1))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """Complex samples g(t_i, y) on a grid; shape (nt, nx) or (nt, nx, nx)."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        expected = (self.grid.spec.nt,) + self.grid.spec.spatial_shape
        v = np.ascontiguousarray(self.values, dtype=np.complex128)
        if v.shape != expected:
            raise GridMismatchError(
                f"field shape {v.shape} does not match grid shape {expected}"
            )
        if not np.all(np.isfinite(v.view(np.float64))):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", v)

    def _require_same_grid(self, other: "SpaceTimeField") -> None:
        if self.grid != other.grid:
            raise GridMismatchError("fields live on different grids")

    def __add__(self, other: "SpaceTimeField") -> "SpaceTimeField":
        self._require_same_grid(other)
        return SpaceTimeField(self.grid, self.values + other.values)

    def __sub__(self, other: "SpaceTimeField") -> "SpaceTimeField":
        self._require_same_grid(other)
        return SpaceTimeField(self.grid, self.values - other.values)

    def __mul__(self, c) -> "SpaceTimeField":
        return SpaceTimeField(self.grid, self.values * c)

    __rmul__ = __mul__

    def abs2_slices(self) -> np.ndarray:
        """|g|^2 per slice as float64 (input to ball sums)."""
        v = self.values
        return v.real * v.real + v.imag * v.imag

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


def zero_field(grid: Grid) -> SpaceTimeField:
    shape = (grid.spec.nt,) + grid.spec.spatial_shape
    return SpaceTimeField(grid, np.zeros(shape, dtype=np.complex128))


def integrate_spacetime(g: SpaceTimeField, beta: float) -> float:
    """Weighted squared space-time integral: sum_i w_i t_i^beta h^n sum_y |g|^2."""
    u = g.abs2_slices()
    slice_sums = u.reshape(g.grid.spec.nt, -1).sum(axis=1)
    t = g.grid.times
    w = g.grid.weights
    return float(np.sum(w * t**beta * slice_sums) * g.grid.cell_volume)
