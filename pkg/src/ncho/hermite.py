"""Scaled Hermite basis functions.

phi_n(x; alpha) = alpha**0.25 * psi_n(sqrt(alpha) * x) where psi_n are the
orthonormal Hermite functions on the line.  The three-term recurrence

    psi_0(y) = pi**-0.25 * exp(-y**2 / 2)
    psi_1(y) = sqrt(2) * y * psi_0(y)
    psi_{n+1}(y) = sqrt(2/(n+1)) * y * psi_n(y) - sqrt(n/(n+1)) * psi_{n-1}(y)

is run on Gaussian-free carriers with a per-point power-of-two exponent so
that large |y| (beyond the classical turning point, where the plain start
value exp(-y**2/2) underflows) stays representable.
"""

from __future__ import annotations

import numpy as np

from .errors import NonPositiveAlpha

# carriers are renormalized once they exceed 2**500; 512 keeps powers exact
_RENORM_LIMIT = 2.0**500
_RENORM_STEP = 512

_LN2 = float(np.log(2.0))


def _carrier_recurrence(n_max: int, y: np.ndarray):
    """Yield (n, carrier, shift) with psi_n(y) = carrier * 2**shift * exp(-y^2/2)."""
    prev = np.zeros_like(y)
    cur = np.full_like(y, np.pi**-0.25)
    shift = np.zeros_like(y)
    yield 0, cur, shift
    for n in range(n_max):
        nxt = np.sqrt(2.0 / (n + 1)) * y * cur - np.sqrt(n / (n + 1)) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > _RENORM_LIMIT
        if big.any():
            scale = 2.0**-_RENORM_STEP
            cur[big] *= scale
            prev[big] *= scale
            shift[big] += _RENORM_STEP
        yield n + 1, cur, shift


def hermite_eval(n: int, alpha: float, xs) -> np.ndarray | float:
    """Evaluate phi_n(x; alpha) at xs (scalar or array)."""
    if n < 0:
        raise ValueError(f"order must be nonnegative, got {n}")
    if alpha <= 0:
        raise NonPositiveAlpha(f"alpha must be positive, got {alpha}")
    scalar = np.isscalar(xs)
    y = np.sqrt(alpha) * np.atleast_1d(np.asarray(xs, dtype=float))
    log_gauss = -0.5 * y * y
    for k, carrier, shift in _carrier_recurrence(n, y):
        if k == n:
            vals = alpha**0.25 * carrier * np.exp(log_gauss + shift * _LN2)
            return float(vals[0]) if scalar else vals
    raise AssertionError("unreachable")


def hermite_table(n_max: int, alpha: float, xs) -> np.ndarray:
    """All orders 0..n_max at once, shape (n_max + 1, len(xs))."""
    if n_max < 0:
        raise ValueError(f"order must be nonnegative, got {n_max}")
    if alpha <= 0:
        raise NonPositiveAlpha(f"alpha must be positive, got {alpha}")
    y = np.sqrt(alpha) * np.atleast_1d(np.asarray(xs, dtype=float))
    log_gauss = -0.5 * y * y
    out = np.empty((n_max + 1, y.size))
    root = alpha**0.25
    for k, carrier, shift in _carrier_recurrence(n_max, y):
        out[k] = root * carrier * np.exp(log_gauss + shift * _LN2)
    return out


def default_grid(alpha: float, half_width: float = 20.0, n_points: int = 4001) -> np.ndarray:
    """Uniform grid of half-width 20/sqrt(alpha), 4001 points by default."""
    if alpha <= 0:
        raise NonPositiveAlpha(f"alpha must be positive, got {alpha}")
    h = half_width / np.sqrt(alpha)
    return np.linspace(-h, h, n_points)
