"""Cauchy data of the total field on the measurement circle.

Two routes produce the Neumann trace: directly from the solver
representation, and by expanding the measured Dirichlet data of the
scattered part in circular harmonics and extending each mode as the
radiating exterior solution c_n H_n(k r) / H_n(k R) e^{i n theta}.  The
second route is the realistic processing chain when only Dirichlet data
are measured, and agreement between the two is a solver cross-check.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResolutionError
from .fields import PointSource, field_gradient, field_value
from .forward import ScatterSolution, eval_total, eval_total_gradient
from .specialfun import hankel1, hankel1_prime

__all__ = ["TraceData", "trace_direct", "recover_neumann", "trace_to_csv", "trace_from_csv"]


@dataclass(frozen=True)
class TraceData:
    """Total-field Dirichlet and Neumann values on equispaced circle nodes."""

    center: np.ndarray
    radius: float
    u: np.ndarray      # (N,) complex
    dudn: np.ndarray   # (N,) complex, outward radial derivative
    k: float
    provenance: str    # "direct" or "recovered"

    def __post_init__(self):
        n = len(self.u)
        if n < 2 or n & (n - 1):
            raise DomainError("trace size must be a power of two")
        if len(self.dudn) != n:
            raise DomainError("u and dudn must have matching size")
        if not (np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.dudn))):
            raise DomainError("trace values must be finite")
        if self.provenance not in ("direct", "recovered"):
            raise DomainError(f"unknown provenance {self.provenance!r}")
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))

    @property
    def n(self) -> int:
        return len(self.u)

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n) / self.n

    @property
    def points(self) -> np.ndarray:
        a = self.angles
        return self.center + self.radius * np.column_stack([np.cos(a), np.sin(a)])

    @property
    def normals(self) -> np.ndarray:
        a = self.angles
        return np.column_stack([np.cos(a), np.sin(a)])


def trace_direct(sol: ScatterSolution, radius: float, n: int, center=None) -> TraceData:
    """Sample the solved total field and its radial derivative on the circle."""
    scene = sol.scene
    center = scene.center if center is None else np.asarray(center, dtype=float)
    if isinstance(sol.incident, PointSource):
        r_y = np.linalg.norm(sol.incident.y - center)
        if abs(r_y - radius) < 1e-9 * radius:
            raise DomainError("source point lies on the measurement circle")
    ang = 2 * np.pi * np.arange(n) / n
    pts = center + radius * np.column_stack([np.cos(ang), np.sin(ang)])
    nu = np.column_stack([np.cos(ang), np.sin(ang)])
    u = eval_total(sol, pts)
    dudn = np.einsum("ic,ic->i", eval_total_gradient(sol, pts), nu.astype(complex))
    return TraceData(center=center, radius=radius, u=u, dudn=dudn, k=scene.wavenumber_k, provenance="direct")


def recover_neumann(
    u_values,
    k: float,
    y,
    radius: float,
    center=(0.0, 0.0),
    tail_tol: float = 1e-6,
) -> np.ndarray:
    """Neumann trace from Dirichlet data via the exterior Dirichlet problem.

    The scattered part E = u - Phi_0(., y) is radiating outside the circle,
    so each circular harmonic extends in closed form and its radial
    derivative on the circle is c_n k H_n'(kR) / H_n(kR).  Raises
    ResolutionError when the harmonic tail of E has not decayed.
    """
    u_values = np.asarray(u_values, dtype=complex)
    n = len(u_values)
    if n & (n - 1):
        raise DomainError("trace size must be a power of two")
    center = np.asarray(center, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.linalg.norm(y - center) <= radius:
        raise DomainError("source must lie strictly outside the measurement circle")

    ang = 2 * np.pi * np.arange(n) / n
    pts = center + radius * np.column_stack([np.cos(ang), np.sin(ang)])
    phi0 = field_value(PointSource(y), k, pts)
    coeffs = np.fft.fft(u_values - phi0) / n

    head = np.max(np.abs(coeffs))
    if head > 0:
        orders_all = np.fft.fftfreq(n, 1.0 / n).astype(int)
        tail = np.max(np.abs(coeffs[np.abs(orders_all) >= (3 * n) // 8]))
        if tail > tail_tol * head:
            raise ResolutionError(
                f"harmonic tail {tail:.2e} has not decayed below {tail_tol:.0e} "
                "of the head; increase the trace resolution"
            )

    orders = np.abs(np.fft.fftfreq(n, 1.0 / n).astype(int))
    # Radiating-mode multiplier k H_m'(kR) / H_m(kR); the ratio is even in
    # the order (H_{-m} = (-1)^m H_m).  H_m itself overflows for large m,
    # so build the ratio from the upward recursion for H_m / H_{m-1},
    # which is stable for the order-dominant Hankel solution.
    x = k * radius
    m_max = int(np.max(orders))
    ratio = np.empty(m_max + 1, dtype=complex)  # ratio[m] = H_m(x) / H_{m-1}(x)
    ratio[0] = np.nan
    if m_max >= 1:
        ratio[1] = hankel1(1, x) / hankel1(0, x)
        for m in range(1, m_max):
            ratio[m + 1] = 2 * m / x - 1.0 / ratio[m]
    log_derivative = np.empty(m_max + 1, dtype=complex)  # H_m'(x) / H_m(x)
    log_derivative[0] = -hankel1(1, x) / hankel1(0, x)
    if m_max >= 1:
        ms = np.arange(1, m_max + 1)
        log_derivative[1:] = 1.0 / ratio[1:] - ms / x
    multipliers = k * log_derivative[orders]
    de_dn = np.fft.ifft(coeffs * multipliers) * n

    nu = (pts - center) / radius
    grad_phi0 = field_gradient(PointSource(y), k, pts)
    dphi0_dn = np.einsum("ic,ic->i", grad_phi0, nu.astype(complex))
    return dphi0_dn + de_dn


def trace_to_csv(trace: TraceData, header_lines=()) -> str:
    """Serialize as CSV: angle, Re u, Im u, Re du/dn, Im du/dn."""
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf)
    writer.writerow(["angle", "re_u", "im_u", "re_dudn", "im_dudn"])
    for a, u, du in zip(trace.angles, trace.u, trace.dudn):
        writer.writerow(
            [repr(float(a)), repr(float(u.real)), repr(float(u.imag)),
             repr(float(du.real)), repr(float(du.imag))]
        )
    return buf.getvalue()


def trace_from_csv(text: str, center, radius: float, k: float, provenance: str = "direct") -> TraceData:
    rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
    body = rows[1:]  # skip column header
    u = np.array([float(r[1]) + 1j * float(r[2]) for r in body])
    dudn = np.array([float(r[3]) + 1j * float(r[4]) for r in body])
    return TraceData(center=np.asarray(center, float), radius=radius, u=u, dudn=dudn, k=k, provenance=provenance)
