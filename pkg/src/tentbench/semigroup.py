"""Analytic semigroup providers and off-diagonal decay measurement.

Three concrete generators sit behind one interface: spectral Fourier
multipliers on the torus for the heat (m = 2) and Poisson (m = 1)
semigroups, and a divergence-form operator with rough complex
coefficients realized as a dense matrix with a cached eigendecomposition
(m = 2).  The fused map tau -> tau * L * exp(-tau L) is first class
because it stays bounded as tau -> 0 while L alone does not; providers
never form that product from its factors.

Off-diagonal (Gaffney-Davies type) decay between separated sets is
measured by power iteration on the masked operator composed with its
adjoint, and the decay order is fitted by least squares against
log(1 + dist^m / t).
"""

from __future__ import annotations

import hashlib
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateFamilyError,
    EllipticityError,
    GridMismatchError,
    GridTooLargeError,
    PowerIterationError,
)
from .grid import Grid, periodic_distance

OFFDIAG_ORDER_CAP = 10.0


class SemigroupProvider(ABC):
    """Interface: e^{-tau L}, L, and the fused tau L e^{-tau L}."""

    name: str
    m: int
    grid: Grid

    @abstractmethod
    def apply_exp(self, tau: float, v: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def apply_L(self, v: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def apply_tL_exp(self, tau: float, v: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def apply_tL_exp_adjoint(self, tau: float, v: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def tl_sup_norm(self, tau: float) -> float:
        """Operator norm of tau L e^{-tau L} on l2."""

    def apply_exp_many(self, taus: np.ndarray, V: np.ndarray) -> np.ndarray:
        """Batched apply_exp; row b of V gets its own tau_b."""
        return np.stack([self.apply_exp(float(t), v) for t, v in zip(taus, V)])

    def apply_tL_exp_many(self, taus: np.ndarray, V: np.ndarray) -> np.ndarray:
        return np.stack([self.apply_tL_exp(float(t), v) for t, v in zip(taus, V)])


class _FourierProvider(SemigroupProvider):
    """Multiplier semigroup: symbol lam(xi) on the exact discrete frequencies."""

    def __init__(self, grid: Grid, name: str, m: int, lam: np.ndarray):
        self.grid = grid
        self.name = name
        self.m = m
        self.lam = lam
        self._axes = tuple(range(-grid.spec.n, 0))

    def _mult(self, mult: np.ndarray, v: np.ndarray) -> np.ndarray:
        spec = np.fft.fftn(v, axes=self._axes)
        return np.fft.ifftn(mult * spec, axes=self._axes)

    def apply_exp(self, tau, v):
        if tau == 0.0:
            return np.array(v, dtype=np.complex128, copy=True)
        return self._mult(np.exp(-tau * self.lam), np.asarray(v, dtype=np.complex128))

    def apply_L(self, v):
        return self._mult(self.lam, np.asarray(v, dtype=np.complex128))

    def apply_tL_exp(self, tau, v):
        if tau == 0.0:
            return np.zeros_like(np.asarray(v, dtype=np.complex128))
        z = tau * self.lam
        return self._mult(z * np.exp(-z), np.asarray(v, dtype=np.complex128))

    def apply_tL_exp_adjoint(self, tau, v):
        # real symbol: the multiplier operator is self-adjoint
        return self.apply_tL_exp(tau, v)

    def apply_exp_many(self, taus, V):
        taus = np.asarray(taus, dtype=np.float64)
        mult = np.exp(-taus[(...,) + (None,) * self.grid.spec.n] * self.lam)
        return self._mult(mult, np.asarray(V, dtype=np.complex128))

    def apply_tL_exp_many(self, taus, V):
        taus = np.asarray(taus, dtype=np.float64)
        z = taus[(...,) + (None,) * self.grid.spec.n] * self.lam
        return self._mult(z * np.exp(-z), np.asarray(V, dtype=np.complex128))

    def tl_sup_norm(self, tau):
        z = tau * self.lam
        return float(np.max(z * np.exp(-z)))


def _frequencies(grid: Grid) -> np.ndarray:
    xi = 2.0 * np.pi * np.fft.fftfreq(grid.spec.nx, d=grid.h)
    if grid.spec.n == 1:
        return xi * xi
    return xi[:, None] ** 2 + xi[None, :] ** 2


def heat_provider(grid: Grid) -> SemigroupProvider:
    """Heat semigroup e^{-tau |xi|^2}; homogeneity m = 2."""
    return _FourierProvider(grid, "heat", 2, _frequencies(grid))


def poisson_provider(grid: Grid) -> SemigroupProvider:
    """Poisson semigroup e^{-tau |xi|}; homogeneity m = 1."""
    return _FourierProvider(grid, "poisson", 1, np.sqrt(_frequencies(grid)))


class DivergenceFormOperator(SemigroupProvider):
    """L = D^H diag(a) D with D the periodic forward difference (m = 2).

    a(x) is complex with Re a >= lambda > 0.  Matrix functions go through
    a cached dense eigendecomposition, so the total number of spatial
    points is capped at desk scale.
    """

    MAX_POINTS = 512

    def __init__(self, grid: Grid, a: np.ndarray):
        self.grid = grid
        self.name = "divform"
        self.m = 2
        a = np.asarray(a, dtype=np.complex128).reshape(-1)
        N = grid.spec.num_spatial
        if a.shape[0] != N:
            raise GridMismatchError("coefficient field size does not match the grid")
        if N > self.MAX_POINTS:
            raise GridTooLargeError(
                f"dense spectral factorization capped at {self.MAX_POINTS} points, got {N}"
            )
        lam_min = float(np.min(a.real))
        if lam_min <= 0:
            raise EllipticityError(f"Re a must be positive; min Re a = {lam_min!r}")
        self.a = a
        self.ellipticity = lam_min
        self.bound = float(np.max(np.abs(a)))
        self.matrix = self._build_matrix()
        w, V = np.linalg.eig(self.matrix)
        self.eigenvalues = w
        self.eigenvectors = V
        self.eigenvectors_inv = np.linalg.inv(V)
        scale = float(np.max(np.abs(w)))
        if float(np.min(w.real)) < -1e-10 * max(scale, 1.0):
            raise EllipticityError(
                f"spectrum leaks into the left half plane: min Re = {np.min(w.real)!r}"
            )

    def _build_matrix(self) -> np.ndarray:
        spec = self.grid.spec
        h = self.grid.h
        N = spec.num_spatial
        if spec.n == 1:
            D = (np.eye(N, k=1) + np.diag(np.full(N, -1.0))) / h
            D[-1, 0] = 1.0 / h
            return D.conj().T @ (self.a[:, None] * D)
        # n = 2: forward differences along each axis, stacked
        nx = spec.nx
        ident = np.eye(nx)
        d1 = (np.eye(nx, k=1) - np.eye(nx)) / h
        d1[-1, 0] = 1.0 / h
        Dy = np.kron(d1, ident)
        Dx = np.kron(ident, d1)
        return Dy.conj().T @ (self.a[:, None] * Dy) + Dx.conj().T @ (self.a[:, None] * Dx)

    def _func(self, fvals: np.ndarray, v: np.ndarray) -> np.ndarray:
        flat = np.asarray(v, dtype=np.complex128).reshape(-1)
        c = self.eigenvectors_inv @ flat
        return (self.eigenvectors @ (fvals * c)).reshape(np.shape(v))

    def apply_exp(self, tau, v):
        if tau == 0.0:
            return np.array(v, dtype=np.complex128, copy=True)
        return self._func(np.exp(-tau * self.eigenvalues), v)

    def apply_L(self, v):
        flat = np.asarray(v, dtype=np.complex128).reshape(-1)
        return (self.matrix @ flat).reshape(np.shape(v))

    def apply_tL_exp(self, tau, v):
        if tau == 0.0:
            return np.zeros_like(np.asarray(v, dtype=np.complex128))
        z = tau * self.eigenvalues
        return self._func(z * np.exp(-z), v)

    def apply_tL_exp_adjoint(self, tau, v):
        if tau == 0.0:
            return np.zeros_like(np.asarray(v, dtype=np.complex128))
        z = tau * self.eigenvalues
        f = np.conj(z * np.exp(-z))
        flat = np.asarray(v, dtype=np.complex128).reshape(-1)
        c = self.eigenvectors.conj().T @ flat
        return (self.eigenvectors_inv.conj().T @ (f * c)).reshape(np.shape(v))

    def _many(self, func, taus, V):
        V = np.asarray(V, dtype=np.complex128)
        B = V.shape[0]
        flat = V.reshape(B, -1)
        c = self.eigenvectors_inv @ flat.T  # (N, B)
        z = np.outer(self.eigenvalues, np.asarray(taus, dtype=np.float64))
        out = self.eigenvectors @ (func(z) * c)
        return out.T.reshape(V.shape)

    def apply_exp_many(self, taus, V):
        return self._many(lambda z: np.exp(-z), taus, V)

    def apply_tL_exp_many(self, taus, V):
        return self._many(lambda z: z * np.exp(-z), taus, V)

    def tl_sup_norm(self, tau):
        z = tau * self.eigenvalues
        M = self.eigenvectors @ (np.diag(z * np.exp(-z)) @ self.eigenvectors_inv)
        return float(np.linalg.norm(M, 2))


def divform_provider(grid: Grid, a: np.ndarray) -> DivergenceFormOperator:
    return DivergenceFormOperator(grid, a)


def make_provider(name: str, grid: Grid, coeff: np.ndarray | None = None) -> SemigroupProvider:
    """Provider factory keyed by name: 'heat', 'poisson' or 'divform'."""
    if name == "heat":
        return heat_provider(grid)
    if name == "poisson":
        return poisson_provider(grid)
    if name == "divform":
        if coeff is None:
            raise ValueError("divform provider needs a coefficient field")
        return divform_provider(grid, coeff)
    raise ValueError(f"unknown provider {name!r}; expected heat, poisson or divform")


# ---------------------------------------------------------------------------
# separated-set geometry


@dataclass(frozen=True)
class Annulus:
    """C_j(x, t): the ball B(x, t) for j = 0, else B(x, 2^j t) \\ B(x, 2^(j-1) t)."""

    center: tuple[int, ...] | int
    scale: float
    index: int

    def mask(self, grid: Grid) -> np.ndarray:
        outer = grid.ball_mask(self.center, (2.0**self.index) * self.scale)
        if self.index == 0:
            return outer
        inner = grid.ball_mask(self.center, (2.0 ** (self.index - 1)) * self.scale)
        return outer & ~inner


def set_distance(grid: Grid, E: np.ndarray, F: np.ndarray) -> float:
    """inf of periodic distances over pairs of cells of E and F."""
    coords = grid.axis_coords()
    if grid.spec.n == 1:
        xe = coords[E]
        xf = coords[F]
        d = np.abs(xe[:, None] - xf[None, :])
        d = np.minimum(d, grid.extent - d)
        return float(d.min())
    iy, ix = np.nonzero(E)
    jy, jx = np.nonzero(F)
    dy = np.abs(coords[iy][:, None] - coords[jy][None, :])
    dy = np.minimum(dy, grid.extent - dy)
    dx = np.abs(coords[ix][:, None] - coords[jx][None, :])
    dx = np.minimum(dx, grid.extent - dx)
    return float(np.sqrt(dy * dy + dx * dx).min())


@dataclass(frozen=True, eq=False)
class SeparatedSetPair:
    """Masks E, F on the spatial grid with their separation distance."""

    grid: Grid
    E: np.ndarray = field(repr=False)
    F: np.ndarray = field(repr=False)
    dist: float = field(init=False)

    def __post_init__(self):
        E = np.asarray(self.E, dtype=bool)
        F = np.asarray(self.F, dtype=bool)
        if E.shape != self.grid.spec.spatial_shape or F.shape != self.grid.spec.spatial_shape:
            raise GridMismatchError("mask shape does not match the grid")
        if not E.any() or not F.any():
            raise ValueError("both masks must be nonempty")
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "dist", set_distance(self.grid, E, F))


def interval_pair(grid: Grid, e_range: tuple[float, float], f_range: tuple[float, float]) -> SeparatedSetPair:
    """1-D pair of coordinate intervals [lo, hi); handy for decay families."""
    x = grid.axis_coords()
    E = (x >= e_range[0]) & (x < e_range[1])
    F = (x >= f_range[0]) & (x < f_range[1])
    return SeparatedSetPair(grid, E, F)


# ---------------------------------------------------------------------------
# off-diagonal measurement


def _pair_seed(provider: SemigroupProvider, pair: SeparatedSetPair, t: float) -> int:
    digest = hashlib.blake2b(digest_size=8)
    digest.update(provider.name.encode())
    digest.update(np.float64(t).tobytes())
    digest.update(pair.E.tobytes())
    digest.update(pair.F.tobytes())
    return int.from_bytes(digest.digest(), "little")


def offdiag_ratio(
    provider: SemigroupProvider,
    pair: SeparatedSetPair,
    t: float,
    rel_tol: float = 1e-6,
    max_iter: int = 500,
) -> float:
    """Operator norm estimate of v -> 1_E * (t L e^{-t L})(1_F * v).

    Power iteration on the composition with its adjoint; the start vector
    is drawn from an RNG seeded by the call arguments, so the result is
    deterministic.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    E = pair.E
    F = pair.F

    def forward(v):
        return E * provider.apply_tL_exp(t, F * v)

    def adjoint(w):
        return F * provider.apply_tL_exp_adjoint(t, E * w)

    rng = np.random.default_rng(_pair_seed(provider, pair, t))
    shape = provider.grid.spec.spatial_shape
    x = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    x /= np.linalg.norm(x.ravel())
    sigma_prev = -1.0
    for iteration in range(1, max_iter + 1):
        y = forward(x)
        sigma = float(np.linalg.norm(y.ravel()))
        if sigma == 0.0:
            return 0.0
        if sigma_prev >= 0 and abs(sigma - sigma_prev) <= rel_tol * sigma:
            return sigma
        sigma_prev = sigma
        z = adjoint(y)
        nrm = float(np.linalg.norm(z.ravel()))
        if nrm == 0.0:
            return sigma
        x = z / nrm
    raise PowerIterationError(
        f"no convergence after {max_iter} iterations (last sigma {sigma_prev!r})"
    )


@dataclass(frozen=True)
class OffdiagFit:
    """Fitted decay order with intercept and fit residual."""

    order: float
    raw_slope: float
    intercept: float
    residual: float
    abscissae: tuple[float, ...]
    ratios: tuple[float, ...]


def fit_decay_order(abscissae, ratios) -> OffdiagFit:
    """LS slope of -log(ratio) against log(1 + d^m/t), capped at the order cap."""
    x = np.asarray(abscissae, dtype=np.float64)
    r = np.asarray(ratios, dtype=np.float64)
    if x.size < 2 or float(x.max() - x.min()) <= 0:
        raise DegenerateFamilyError("family needs at least two distinct abscissae")
    if np.any(r <= 0):
        raise DegenerateFamilyError("ratios must be positive to fit a decay order")
    y = -np.log(r)
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    order = min(float(slope), OFFDIAG_ORDER_CAP)
    return OffdiagFit(
        order=order,
        raw_slope=float(slope),
        intercept=float(intercept),
        residual=resid,
        abscissae=tuple(float(v) for v in x),
        ratios=tuple(float(v) for v in r),
    )


def offdiag_order_fit(provider: SemigroupProvider, m: int, family) -> OffdiagFit:
    """Measure ratios over a (pair, t) family and fit the decay order.

    The family must span at least one decade of 1 + dist^m / t.
    """
    pairs_t = list(family)
    if not pairs_t:
        raise DegenerateFamilyError("empty family")
    u = np.array([1.0 + pair.dist**m / t for pair, t in pairs_t])
    if float(u.max() / u.min()) < 10.0:
        raise DegenerateFamilyError(
            f"family spans {u.max() / u.min():.2f}x of 1 + d^m/t; need at least one decade"
        )
    ratios = [offdiag_ratio(provider, pair, t) for pair, t in pairs_t]
    return fit_decay_order(np.log(u), ratios)


def default_offdiag_family(grid: Grid, m: int) -> list[tuple[SeparatedSetPair, float]]:
    """Interval pairs and times spanning over a decade of 1 + d^m/t.

    For m = 2 the abscissa is driven by t at a few separations; for m = 1
    the time is held fixed and the separation grows, which probes the
    far-field kernel exponent directly.  Times are kept large enough that
    the band-limited multiplier kernels stay in their continuum decay
    regime (tail above the spectral truncation floor).
    """
    if grid.spec.n != 1:
        raise ValueError("default off-diagonal family is built for n = 1")
    X = grid.extent
    h = grid.h
    xi_max = math.pi / h
    family = []
    if m == 2:
        width = X / 8.0
        seps = np.array([0.1875, 0.25, 0.3125, 0.375]) * X
        targets = np.array([12.0, 33.0, 65.0, 129.0])
        for d_nom in seps:
            pair = interval_pair(grid, (0.0, width), (width + d_nom - h, 2 * width + d_nom - h))
            d = pair.dist
            for u in targets:
                t = max(float(d * d / (u - 1.0)), 1.2 * d / xi_max)
                family.append((pair, t))
        return family
    width = 0.01 * X
    tau = max(0.0025 * X, 13.0 / xi_max)
    targets = np.array([9.0, 16.0, 30.0, 55.0, 92.0])
    if tau * (targets[-1] - 1.0) > 0.25 * X:
        raise DegenerateFamilyError(
            "grid too small for a wrap-safe decade family; enlarge extent or nx"
        )
    for u in targets:
        d_nom = tau * (u - 1.0)
        pair = interval_pair(grid, (0.0, width), (width + d_nom - h, 2 * width + d_nom - h))
        family.append((pair, tau))
    return family
