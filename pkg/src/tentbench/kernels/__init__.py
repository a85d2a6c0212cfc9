"""Periodic ball-sum kernels with a compiled core and a NumPy fallback.

The hot inner loop of every tent-space and Carleson norm is "sum a field
over the periodic ball around every grid point".  Two interchangeable
backends implement it: a Cython extension built at install time and a
pure-NumPy fallback.  Both accumulate contributions in the same pinned
offset order (offset ascending, rows outer for 2-D), so their outputs are
bit-identical to each other and to the brute-force reference that walks
every (center, offset) pair.

Backend selection happens once at import.  Set ``TENTBENCH_PURE_PYTHON=1``
to force the fallback; ``backend(name)`` returns a specific backend for
side-by-side comparisons and benchmarks.
"""

import os

import numpy as np

from . import _fallback

_impl = None
if os.environ.get("TENTBENCH_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = None
if _impl is None:
    _impl = _fallback
    BACKEND = "fallback"
else:
    BACKEND = "compiled"


def is_compiled() -> bool:
    return BACKEND == "compiled"


def backend(name: str | None = None):
    """Return a kernel backend module: 'compiled', 'fallback' or the default."""
    if name is None:
        return _impl
    if name == "fallback":
        return _fallback
    if name == "compiled":
        from . import _core  # raises ImportError when the extension is absent

        return _core
    raise ValueError(f"unknown kernel backend {name!r}")


def window_halfwidth(radius: float, h: float, npts: int) -> int:
    """Largest offset k with k*h <= radius, for a periodic axis of npts cells.

    The predicate ``k*h <= radius`` (one float64 multiply, one compare) is
    the single membership rule shared by fast paths and the brute-force
    reference.  Raises when the window would self-overlap on the torus.
    """
    if radius < 0.0:
        raise ValueError("radius must be nonnegative")
    k = int(np.floor(radius / h))
    while (k + 1) * h <= radius:
        k += 1
    while k > 0 and k * h > radius:
        k -= 1
    if 2 * k + 1 > npts:
        from ..errors import RadiusTooLargeError

        raise RadiusTooLargeError(
            f"radius {radius!r} spans {2 * k + 1} cells on an axis of {npts}"
        )
    return k


def ball_row_halfwidths(radius: float, h: float, npts: int) -> np.ndarray:
    """Per-row half-widths of the discrete closed ball (2-D case).

    Entry ``j`` is the largest dx with (dx^2 + j^2) * h^2 <= radius^2;
    rows run j = 0..K where K is the axis half-width of the ball.
    """
    K = window_halfwidth(radius, h, npts)
    hh = h * h
    rr = radius * radius
    out = np.empty(K + 1, dtype=np.int64)
    kx = K
    for j in range(K + 1):
        while kx > 0 and float(kx * kx + j * j) * hh > rr:
            kx -= 1
        if float(kx * kx + j * j) * hh > rr:  # kx == 0 and row still outside
            raise AssertionError("row without center cell; K computation is wrong")
        out[j] = kx
    if 2 * int(out[0]) + 1 > npts:
        from ..errors import RadiusTooLargeError

        raise RadiusTooLargeError("ball wider than the torus axis")
    return out


def ball_cell_count(radius: float, h: float, npts: int, ndim: int) -> int:
    """Number of grid cells inside the discrete closed ball."""
    if ndim == 1:
        return 2 * window_halfwidth(radius, h, npts) + 1
    kx = ball_row_halfwidths(radius, h, npts)
    widths = 2 * kx + 1
    return int(widths[0] + 2 * widths[1:].sum())


def ball_sum_1d(u: np.ndarray, k: int) -> np.ndarray:
    return _impl.ball_sum_1d(u, k)


def ball_sum_2d(u: np.ndarray, kx: np.ndarray) -> np.ndarray:
    return _impl.ball_sum_2d(u, kx)
