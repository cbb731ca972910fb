"""Incident fields and complex-exponential probe solutions.

Three incident fields drive the forward solver: a plane wave
e^{ik x.d}, the point source (i/4) H^(1)_0(k|x - y|), and the linearly
modulated plane field (x0 - x).theta e^{-ik x.d} with theta chosen so
that theta_perp = d.  The probe is the exponentially growing Helmholtz
solution e^{x.(tau omega + i sqrt(tau^2 + k^2) omega_perp)}, always
evaluated in a scaled form e^{-tau t_ref} * probe so that magnitudes stay
representable for large tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResolutionError
from .geometry import Direction
from .specialfun import hankel1, hankel1_prime

__all__ = [
    "ZeroField",
    "PlaneWave",
    "PointSource",
    "ModulatedPlane",
    "field_value",
    "field_gradient",
    "ProbeParams",
    "eval_probe",
    "probe_log_magnitude",
    "herglotz_wave",
]


@dataclass(frozen=True)
class ZeroField:
    """Identically-zero incident field (useful for null checks)."""


@dataclass(frozen=True)
class PlaneWave:
    d: Direction


@dataclass(frozen=True)
class PointSource:
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))


@dataclass(frozen=True)
class ModulatedPlane:
    """Field (x0 - x).theta e^{-ik x.d} with theta_perp = d."""

    x0: np.ndarray
    d: Direction

    def __post_init__(self):
        object.__setattr__(self, "x0", np.asarray(self.x0, dtype=float))

    @property
    def theta(self) -> np.ndarray:
        # theta = (-d_y, d_x) satisfies theta_perp = (theta_y, -theta_x) = d
        return np.array([-self.d.y, self.d.x])


def field_value(field, k: float, x):
    """Evaluate the incident field at points ``x`` (shape (..., 2))."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if isinstance(field, ZeroField):
        out = np.zeros(x.shape[0], dtype=complex)
    elif isinstance(field, PlaneWave):
        out = np.exp(1j * k * (x @ field.d.vec))
    elif isinstance(field, PointSource):
        r = np.linalg.norm(x - field.y, axis=-1)
        if np.any(r == 0):
            raise DomainError("point source evaluated at its singularity")
        out = 0.25j * hankel1(0, k * r)
    elif isinstance(field, ModulatedPlane):
        out = ((field.x0 - x) @ field.theta) * np.exp(-1j * k * (x @ field.d.vec))
    else:
        raise TypeError(f"unknown incident field {type(field)!r}")
    return out[0] if out.shape == (1,) else out


def field_gradient(field, k: float, x):
    """Analytic gradient of the incident field, shape (..., 2)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if isinstance(field, ZeroField):
        out = np.zeros((x.shape[0], 2), dtype=complex)
    elif isinstance(field, PlaneWave):
        v = np.exp(1j * k * (x @ field.d.vec))
        out = 1j * k * v[..., None] * field.d.vec
    elif isinstance(field, PointSource):
        diff = x - field.y
        r = np.linalg.norm(diff, axis=-1)
        if np.any(r == 0):
            raise DomainError("point source gradient at its singularity")
        radial = 0.25j * k * hankel1_prime(0, k * r) / r
        out = radial[..., None] * diff
    elif isinstance(field, ModulatedPlane):
        phase = np.exp(-1j * k * (x @ field.d.vec))
        amp = (field.x0 - x) @ field.theta
        out = phase[..., None] * (-field.theta - 1j * k * amp[..., None] * field.d.vec)
    else:
        raise TypeError(f"unknown incident field {type(field)!r}")
    return out[0] if out.shape == (1, 2) else out


@dataclass(frozen=True)
class ProbeParams:
    """Probe direction, growth parameter and magnitude-scaling shift."""

    omega: Direction
    tau: float
    k: float
    t_ref: float = 0.0

    def __post_init__(self):
        if self.tau <= 0 or self.k <= 0:
            raise DomainError("tau and k must be positive")

    @property
    def s(self) -> float:
        """Auxiliary parameter sqrt(tau^2 + k^2) + tau."""
        return math.hypot(self.tau, self.k) + self.tau

    @property
    def gradient_factor(self) -> np.ndarray:
        """Constant vector zeta with grad(probe) = zeta * probe."""
        kappa = math.hypot(self.tau, self.k)
        return self.tau * self.omega.vec + 1j * kappa * self.omega.perp


def eval_probe(p: ProbeParams, x):
    """Scaled probe value e^{tau (x.omega - t_ref)} e^{i kappa x.omega_perp}."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    kappa = math.hypot(p.tau, p.k)
    out = np.exp(p.tau * (x @ p.omega.vec - p.t_ref) + 1j * kappa * (x @ p.omega.perp))
    return out[0] if out.shape == (1,) else out


def probe_log_magnitude(p: ProbeParams, x):
    """log |scaled probe| = tau (x.omega - t_ref); overflow-free."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    out = p.tau * (x @ p.omega.vec - p.t_ref)
    return out[0] if out.shape == (1,) else out


def herglotz_wave(g, k: float, x):
    """Trapezoid-rule Herglotz wave sum over a uniform direction grid.

    ``g`` holds the density values at directions (cos(2 pi j / M),
    sin(2 pi j / M)); the periodic trapezoid rule is spectrally accurate
    for smooth densities.
    """
    g = np.asarray(g, dtype=complex)
    m = len(g)
    if m < 8:
        raise ResolutionError("herglotz_wave needs at least 8 direction samples")
    ang = 2 * np.pi * np.arange(m) / m
    d = np.column_stack([np.cos(ang), np.sin(ang)])
    x = np.atleast_2d(np.asarray(x, dtype=float))
    out = (2 * np.pi / m) * np.exp(1j * k * (x @ d.T)) @ g
    return out[0] if out.shape == (1,) else out
