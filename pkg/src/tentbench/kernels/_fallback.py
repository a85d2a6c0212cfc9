"""Pure-NumPy ball-sum backend.

Accumulation order is part of the contract: offsets ascend, and for 2-D
the row offset is the outer loop.  Each accumulation step is an
element-wise float64 add, so results are bit-identical to the compiled
backend (same adds in the same order per output cell).
"""

import numpy as np


def ball_sum_1d(u: np.ndarray, k: int) -> np.ndarray:
    """Sum u over the periodic window [i-k, i+k] for every center i."""
    u = np.ascontiguousarray(u, dtype=np.float64)
    n = u.shape[0]
    if k == 0:
        ext = u
    else:
        ext = np.concatenate([u[n - k :], u, u[:k]])
    out = np.zeros(n, dtype=np.float64)
    for off in range(2 * k + 1):
        out += ext[off : off + n]
    return out


def ball_sum_2d(u: np.ndarray, kx: np.ndarray) -> np.ndarray:
    """Sum u over the periodic discrete ball around every center.

    kx[j] is the x half-width of ball row |dy| = j (j = 0..K).
    """
    u = np.ascontiguousarray(u, dtype=np.float64)
    kx = np.asarray(kx, dtype=np.int64)
    K = kx.shape[0] - 1
    Kx = int(kx[0])
    ny, nx = u.shape
    ext = np.pad(u, ((K, K), (Kx, Kx)), mode="wrap")
    out = np.zeros_like(u)
    for dy in range(-K, K + 1):
        w = int(kx[abs(dy)])
        row = ext[K + dy : K + dy + ny]
        for dx in range(-w, w + 1):
            out += row[:, Kx + dx : Kx + dx + nx]
    return out
