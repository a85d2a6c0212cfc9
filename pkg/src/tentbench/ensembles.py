"""Reproducible test fields: band-limited ensembles, single modes, indicators.

Fields are defined by continuum data (Fourier coefficients, smooth log-time
profiles, box supports), so the same seed yields the same continuum field
on any resolution of the same domain.  Time profiles vanish on the leading
and trailing slices with C^2 ramps, which keeps quadratures second order
and satisfies the vanishing precondition of the maximal regularity
operator.
"""

from __future__ import annotations

import numpy as np

from .grid import Grid, SpaceTimeField


def smootherstep(x: np.ndarray) -> np.ndarray:
    """C^2 ramp: 0 for x <= 0, 1 for x >= 1, 6x^5 - 15x^4 + 10x^3 between."""
    x = np.clip(x, 0.0, 1.0)
    return x * x * x * (x * (6.0 * x - 15.0) + 10.0)


def log_bump(grid: Grid, margin: float = 0.25) -> np.ndarray:
    """Smooth profile of log t: zero on the first two and last two slices.

    Ramps occupy `margin` of the log range on each side; the plateau sits
    in between.  Also vanishes for t < 2 t_min and t > t_max / 2 whenever
    the grid has at least a few nodes per octave.
    """
    t = grid.times
    u = np.log(t)
    lo = max(np.log(2.0 * grid.spec.t_min), u[2])
    hi = min(np.log(grid.spec.t_max / 2.0), u[-3])
    if hi <= lo:
        raise ValueError("time range too narrow for a supported bump")
    w = margin * (hi - lo)
    return smootherstep((u - lo) / w) * smootherstep((hi - u) / w)


def _mode_matrix(grid: Grid, kcut: int) -> np.ndarray:
    ks = np.arange(-kcut, kcut + 1)
    x = grid.axis_coords()
    return np.exp(2j * np.pi / grid.extent * np.outer(ks, x))


def band_limited_fields(
    grid: Grid,
    size: int,
    seed: int,
    kcut: int = 16,
    profiles: int = 3,
) -> list[SpaceTimeField]:
    """Random band-limited ensemble; deterministic given (seed, size, kcut).

    Spatial content: i.i.d. complex Gaussian coefficients on modes
    |k| <= kcut per axis.  Time content: for each mode, a random smooth
    combination of low-order cosines of log t under the standard bump.
    """
    if kcut < 1:
        raise ValueError("kcut must be at least 1")
    if 8 * kcut > grid.spec.nx:
        raise ValueError(
            f"mode cutoff {kcut} needs nx >= {8 * kcut} to stay well resolved"
        )
    rng = np.random.default_rng(seed)
    bump = log_bump(grid)
    u = np.log(grid.times)
    span = u[-1] - u[0] if u[-1] > u[0] else 1.0
    basis = np.stack(
        [np.cos(np.pi * q * (u - u[0]) / span) for q in range(profiles)]
    )  # (profiles, nt)
    E = _mode_matrix(grid, kcut)
    nmodes = E.shape[0]
    fields = []
    for _ in range(size):
        if grid.spec.n == 1:
            coeff = rng.standard_normal((profiles, nmodes)) + 1j * rng.standard_normal(
                (profiles, nmodes)
            )
            tmodal = basis.T @ coeff  # (nt, nmodes)
            vals = (tmodal @ E) * bump[:, None]
        else:
            coeff = rng.standard_normal((profiles, nmodes, nmodes)) + 1j * rng.standard_normal(
                (profiles, nmodes, nmodes)
            )
            tmodal = np.tensordot(basis.T, coeff, axes=(1, 0))  # (nt, my, mx)
            vals = np.einsum("tkl,ky,lx->tyx", tmodal, E, E, optimize=True)
            vals *= bump[:, None, None]
        fields.append(SpaceTimeField(grid, vals / np.sqrt(nmodes**grid.spec.n)))
    return fields


def single_mode_field(grid: Grid, mode: int | tuple[int, int]) -> SpaceTimeField:
    """One spatial Fourier mode under the standard bump profile."""
    bump = log_bump(grid)
    x = grid.axis_coords()
    if grid.spec.n == 1:
        k = int(mode)
        wave = np.exp(2j * np.pi * k / grid.extent * x)
        vals = bump[:, None] * wave[None, :]
    else:
        ky, kx = (int(mode[0]), int(mode[1]))
        wy = np.exp(2j * np.pi * ky / grid.extent * x)
        wx = np.exp(2j * np.pi * kx / grid.extent * x)
        vals = bump[:, None, None] * (wy[:, None] * wx[None, :])[None]
    return SpaceTimeField(grid, vals)


def mode_wavenumber(grid: Grid, mode: int | tuple[int, int]) -> float:
    """|xi| of the sampled mode (2 pi k / X per axis, combined in l2)."""
    if grid.spec.n == 1:
        return abs(2.0 * np.pi * int(mode) / grid.extent)
    ky, kx = (int(mode[0]), int(mode[1]))
    return float(2.0 * np.pi / grid.extent * np.hypot(ky, kx))


def ramped_profile_field(
    grid: Grid, spatial_profile: np.ndarray, ramp_decades: float = 1.0
) -> SpaceTimeField:
    """phi(y) switched on smoothly: zero before the third slice, constant
    after t = t_min * 10^ramp_decades."""
    t = grid.times
    lo = np.log(t[2])
    hi = np.log(grid.spec.t_min) + ramp_decades * np.log(10.0)
    if hi <= lo:
        raise ValueError("ramp ends before the third slice; widen the time range")
    rho = smootherstep((np.log(t) - lo) / (hi - lo))
    phi = np.asarray(spatial_profile, dtype=np.complex128)
    return SpaceTimeField(grid, rho[(...,) + (None,) * grid.spec.n] * phi[None])


def indicator_field(
    grid: Grid,
    t_range: tuple[float, float] | None = None,
    box: tuple[tuple[float, float], ...] | None = None,
) -> SpaceTimeField:
    """Indicator of a closed time window times a half-open coordinate box."""
    t = grid.times
    if t_range is None:
        tmask = np.ones_like(t, dtype=bool)
    else:
        tmask = (t >= t_range[0]) & (t <= t_range[1])
    x = grid.axis_coords()
    if box is None:
        smask = np.ones(grid.spec.spatial_shape, dtype=bool)
    elif grid.spec.n == 1:
        (lo, hi), = box
        smask = (x >= lo) & (x < hi)
    else:
        (ylo, yhi), (xlo, xhi) = box
        my = (x >= ylo) & (x < yhi)
        mx = (x >= xlo) & (x < xhi)
        smask = my[:, None] & mx[None, :]
    vals = np.where(
        tmask[(...,) + (None,) * grid.spec.n] & smask[None], 1.0 + 0.0j, 0.0j
    )
    return SpaceTimeField(grid, vals)


def rough_coefficient(
    nx: int,
    seed: int,
    blocks: int = 32,
    re_range: tuple[float, float] = (1.0, 10.0),
    im_amplitude: float = 2.0,
) -> np.ndarray:
    """Piecewise-constant complex coefficient a(x) with Re a >= re_range[0].

    Values are drawn per block, then sampled at any nx by nearest-block
    lookup, so refining the grid refines the same rough coefficient.
    """
    rng = np.random.default_rng(seed)
    re = rng.uniform(re_range[0], re_range[1], blocks)
    im = rng.uniform(-im_amplitude, im_amplitude, blocks)
    block_of = (np.arange(nx) * blocks) // nx
    return re[block_of] + 1j * im[block_of]
