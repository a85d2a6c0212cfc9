"""The maximal regularity operator: Volterra integral of L e^{-(t-s)L} f(s).

The integrand has a singularity at s = t that only cancels inside the
integral, so a direct quadrature is hopeless.  Two independent
regularizations cross-validate each other:

* SingularitySplit integrates the divided difference against the bounded
  family (t-s) L e^{-(t-s)L} and adds the commuted part in closed form:
  M f(t) = f(t) - e^{-(t - t_0) L} f(t)
         + int_{t_0}^{t} (t-s) L e^{-(t-s)L} [(f(s) - f(t))/(t-s)] ds.
  The e^{-(t - t_0)L} factor accounts exactly for the untiled piece
  s in (0, t_0) where f vanishes.

* IntegrationByParts moves the generator onto the time derivative:
  M f(t) = f(t) - int_0^t e^{-(t-s)L} (d_s f)(s) ds,
  with d_s f from centered differences on the log grid.

Both quadratures run on the log time grid restricted to s <= t with
trapezoid weights, touch only the fused bounded map near the
singularity, and are exactly causal (SingularitySplit) or causal up to
the one-slice stencil halo (IntegrationByParts).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateInputError,
    GridMismatchError,
    OffGridError,
    RangeViolationError,
    VanishingPreconditionError,
)
from .grid import Grid, SpaceTimeField, integrate_spacetime
from .semigroup import SemigroupProvider


class MlScheme(enum.Enum):
    SINGULARITY_SPLIT = "singularity_split"
    INTEGRATION_BY_PARTS = "integration_by_parts"

    @classmethod
    def from_name(cls, name: str) -> "MlScheme":
        for member in cls:
            if member.value == name:
                return member
        valid = ", ".join(m.value for m in cls)
        raise ValueError(f"unknown scheme {name!r}; expected one of: {valid}")


def restricted_trapezoid_weights(times: np.ndarray) -> np.ndarray:
    """W[i, j]: trapezoid weight of node j for the integral over [t_0, t_i]."""
    nt = times.shape[0]
    W = np.zeros((nt, nt))
    for i in range(1, nt):
        W[i, 0] = (times[1] - times[0]) / 2
        W[i, i] = (times[i] - times[i - 1]) / 2
        if i > 1:
            W[i, 1:i] = (times[2 : i + 1] - times[0 : i - 1]) / 2
    return W


def _check_preconditions(f: SpaceTimeField, provider: SemigroupProvider) -> None:
    if provider.grid != f.grid:
        raise GridMismatchError("provider grid does not match the field grid")
    scale = f.max_abs()
    if scale == 0.0:
        return
    lead = float(np.max(np.abs(f.values[:2])))
    if lead > 1e-12 * scale:
        raise VanishingPreconditionError(
            "field must vanish on the first two time slices "
            f"(leading magnitude {lead!r} vs scale {scale!r})"
        )


def log_derivative(f: SpaceTimeField) -> np.ndarray:
    """d_s f on the log grid: centered in log s, one-sided at the ends."""
    v = f.values
    t = f.grid.times
    du = float(np.log(t[1]) - np.log(t[0]))
    dv = np.empty_like(v)
    dv[1:-1] = (v[2:] - v[:-2]) / (2 * du)
    dv[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * du)
    dv[-1] = (3 * v[-1] - 4 * v[-2] + v[-3]) / (2 * du)
    shape = (slice(None),) + (None,) * f.grid.spec.n
    return dv / t[shape]


def ml_apply(
    f: SpaceTimeField,
    provider: SemigroupProvider,
    scheme: MlScheme = MlScheme.SINGULARITY_SPLIT,
) -> SpaceTimeField:
    """Evaluate the maximal regularity integral at every grid time."""
    _check_preconditions(f, provider)
    grid = f.grid
    t = grid.times
    nt = grid.spec.nt
    W = restricted_trapezoid_weights(t)
    v = f.values
    out = np.zeros_like(v)
    if scheme is MlScheme.SINGULARITY_SPLIT:
        for i in range(nt):
            fi = v[i]
            if i == 0:
                continue  # integral over [t_0, t_0] is empty and f(t_0) = 0
            taus = t[i] - t[:i]
            dd = (v[:i] - fi[None]) / taus[(...,) + (None,) * grid.spec.n]
            contrib = provider.apply_tL_exp_many(taus, dd)
            acc = np.tensordot(W[i, :i], contrib, axes=(0, 0))
            out[i] = fi - provider.apply_exp(float(t[i] - t[0]), fi) + acc
        return SpaceTimeField(grid, out)
    if scheme is MlScheme.INTEGRATION_BY_PARTS:
        dv = log_derivative(f)
        for i in range(1, nt):
            taus = t[i] - t[: i + 1]
            contrib = provider.apply_exp_many(taus, dv[: i + 1])
            acc = np.tensordot(W[i, : i + 1], contrib, axes=(0, 0))
            out[i] = v[i] - acc
        return SpaceTimeField(grid, out)
    raise ValueError(f"unsupported scheme {scheme!r}")


def halving_shift(grid: Grid, tol: float = 1e-9) -> int:
    """Index shift q with t_{i-q} = t_i / 2 on the log grid, or OffGridError."""
    t = grid.times
    ratio = np.log(t[-1] / t[0]) / (grid.spec.nt - 1)
    q = int(round(np.log(2.0) / ratio))
    if q < 1 or q >= grid.spec.nt:
        raise OffGridError("time grid does not contain t/2 for any node")
    err = np.max(np.abs(2.0 * t[:-q] - t[q:]) / t[q:])
    if err > tol:
        raise OffGridError(
            f"t/2 misses the grid by relative {err!r}; "
            "choose t_max/t_min = 2^D and nt = D*q + 1"
        )
    return q


def half_interval_check(
    f: SpaceTimeField,
    provider: SemigroupProvider,
    scheme: MlScheme = MlScheme.SINGULARITY_SPLIT,
) -> float:
    """Max relative discrepancy of the half-interval rewriting.

    The integral of L e^{-(t-s)L} g(s) over s in [t/2, t] is computed
    directly (window quadrature with its own singularity split) and via
    M g(t) - e^{-(t/2) L} M g(t/2); both use only grid nodes.
    """
    _check_preconditions(f, provider)
    grid = f.grid
    t = grid.times
    q = halving_shift(grid)
    W = restricted_trapezoid_weights(t)
    v = f.values
    ml = ml_apply(f, provider, scheme).values
    scale = f.max_abs()
    worst = 0.0
    for i in range(q, grid.spec.nt):
        j0 = i - q  # node at t_i / 2
        fi = v[i]
        # direct: g(t) - e^{-(t/2)L} g(t) + int of the divided difference
        taus = t[i] - t[j0:i]
        dd = (v[j0:i] - fi[None]) / taus[(...,) + (None,) * grid.spec.n]
        contrib = provider.apply_tL_exp_many(taus, dd)
        win = np.zeros(i - j0 + 1)
        win[0] = (t[j0 + 1] - t[j0]) / 2
        win[-1] = (t[i] - t[i - 1]) / 2
        if i - j0 > 1:
            win[1:-1] = (t[j0 + 2 : i + 1] - t[j0 : i - 1]) / 2
        acc = np.tensordot(win[:-1], contrib, axes=(0, 0))
        direct = fi - provider.apply_exp(float(t[i] - t[j0]), fi) + acc
        # identity: M g(t) - e^{-(t/2)L} M g(t/2)
        identity = ml[i] - provider.apply_exp(float(t[i] - t[j0]), ml[j0])
        na = float(np.linalg.norm(direct.ravel()))
        nb = float(np.linalg.norm(identity.ravel()))
        denom = max(na, nb)
        if denom <= 1e-14 * max(scale, 1.0):
            continue
        worst = max(worst, float(np.linalg.norm((direct - identity).ravel())) / denom)
    return worst


@dataclass(frozen=True)
class RatioResult:
    """Sup of a ratio over an ensemble, with the maximizing member."""

    ratio: float
    argmax: int
    per_field: tuple[float, ...]


def l2_weighted_ratio(
    provider: SemigroupProvider,
    beta: float,
    ensemble,
    scheme: MlScheme = MlScheme.SINGULARITY_SPLIT,
) -> RatioResult:
    """sup over the ensemble of the weighted-L2 operator ratio."""
    if beta >= 1.0:
        raise RangeViolationError(f"beta must satisfy beta < 1, got {beta}")
    fields = list(ensemble)
    if not fields:
        raise DegenerateInputError("ensemble is empty")
    ratios = []
    for f in fields:
        den = integrate_spacetime(f, beta)
        if den <= 0.0:
            raise DegenerateInputError("ensemble member has zero weighted norm")
        num = integrate_spacetime(ml_apply(f, provider, scheme), beta)
        ratios.append(float(np.sqrt(num / den)))
    arg = int(np.argmax(ratios))
    return RatioResult(ratio=ratios[arg], argmax=arg, per_field=tuple(ratios))
