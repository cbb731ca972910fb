"""Integer-order Bessel and Hankel functions with domain guards.

Thin wrappers over scipy.special, which meets the 1e-10 relative accuracy
budget everywhere we evaluate.  Only real arguments and integer orders are
supported; the derivative identities for the Hankel function of the first
kind are exposed as helpers because the solver and the circle-harmonic
extension both need them.
"""

from __future__ import annotations

import numpy as np
from scipy import special

from .errors import DomainError

__all__ = [
    "bessel_j",
    "bessel_j_prime",
    "bessel_y",
    "hankel1",
    "hankel1_prime",
]


def _check_order(n) -> int:
    if int(n) != n or n < 0:
        raise DomainError(f"order must be a nonnegative integer, got {n}")
    return int(n)


def bessel_j(n: int, x):
    """J_n(x) for x >= 0."""
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("bessel_j requires x >= 0")
    return special.jv(n, x)


def bessel_j_prime(n: int, x):
    """d/dx J_n(x) for x >= 0."""
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("bessel_j_prime requires x >= 0")
    return special.jvp(n, x)


def bessel_y(n: int, x):
    """Y_n(x) for x > 0 (logarithmic singularity at 0)."""
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("bessel_y requires x > 0")
    return special.yv(n, x)


def hankel1(n: int, x):
    """H^(1)_n(x) = J_n(x) + i Y_n(x) for x > 0."""
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("hankel1 requires x > 0")
    return special.hankel1(n, x)


def hankel1_prime(n: int, x):
    """d/dx H^(1)_n(x).

    Uses (H_0)' = -H_1 and (H_n)' = H_{n-1} - (n/x) H_n for n >= 1.
    """
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("hankel1_prime requires x > 0")
    if n == 0:
        return -special.hankel1(1, x)
    return special.hankel1(n - 1, x) - (n / x) * special.hankel1(n, x)
