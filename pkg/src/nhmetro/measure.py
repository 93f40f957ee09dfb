"""Observables, error-propagation precision, and the optimality condition.

The quantum Cramer-Rao bound is saturated exactly when the measurement
residual |f> - i c |g> vanishes with a real c, where |f> and |g> are the
centered generator and observable applied to the output state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .dynamics import evolve, expectation
from .errors import Degenerate, NotHermitian, ZeroG
from .fisher import _fd_step, generator_quadrature
from .models import HamiltonianModel

HERMITICITY_TOL = 1e-10
DEGENERATE_TOL = 1e-12
ZERO_G_TOL = 1e-12


@dataclass(frozen=True)
class Observable:
    A: np.ndarray
    label: str = ""

    def __post_init__(self):
        A = linalg.as_matrix(self.A)
        if linalg.herm_residual(A) >= HERMITICITY_TOL * max(1.0, float(np.linalg.norm(A))):
            raise NotHermitian(f"observable {self.label!r} is not Hermitian")
        object.__setattr__(self, "A", A)


@dataclass(frozen=True)
class OptimalityReport:
    """residual = ||f - i Re(c) g|| / ||f|| where c is the complex
    least-squares fit. The saturation condition demands a real proportionality
    constant, so the residual is taken against the best real one; the full
    complex fit is reported for diagnosing how the condition fails."""

    residual: float
    c: complex
    c_imag_fraction: float

    def is_optimal(self, tol: float = 1e-6) -> bool:
        return self.residual < tol and self.c_imag_fraction < tol


def error_propagation_precision(model: HamiltonianModel, theta: float, t: float,
                                psi0, A: Observable, fd_step=None) -> float:
    """Single-shot precision 1/(Delta theta) from the error-propagation formula."""
    eps = _fd_step(theta, fd_step)

    def mean_A(th):
        return expectation(evolve(model, th, t, psi0).phi_out, A.A)

    slope = (mean_A(theta + eps) - mean_A(theta - eps)) / (2 * eps)
    if abs(slope) <= DEGENERATE_TOL:
        raise Degenerate(f"d<A>/dtheta = {slope:.3e} at theta = {theta}")
    phi = evolve(model, theta, t, psi0).phi_out
    var = expectation(phi, A.A @ A.A) - expectation(phi, A.A) ** 2
    if var <= DEGENERATE_TOL ** 2:
        raise Degenerate("observable has vanishing variance on the output state")
    return abs(slope) / np.sqrt(var)


def optimality_residual(model: HamiltonianModel, theta: float, t: float,
                        psi0, A: Observable) -> OptimalityReport:
    """Least-squares fit of |f> = i c |g> on the normalized output state."""
    res = evolve(model, theta, t, psi0)
    phi = res.phi_out
    h = generator_quadrature(model, theta, t)
    f = h @ phi - np.vdot(phi, h @ phi) * phi
    g = A.A @ phi - expectation(phi, A.A) * phi
    g_norm2 = float(np.vdot(g, g).real)
    if g_norm2 <= ZERO_G_TOL ** 2:
        raise ZeroG("observable acts trivially on the output state")
    c = -1j * np.vdot(g, f) / g_norm2
    f_norm = float(np.linalg.norm(f))
    if f_norm == 0.0:
        return OptimalityReport(residual=0.0, c=0j, c_imag_fraction=0.0)
    residual = float(np.linalg.norm(f - 1j * c.real * g)) / f_norm
    c_imag_fraction = abs(c.imag) / abs(c) if abs(c) > 0 else 0.0
    return OptimalityReport(residual=residual, c=complex(c), c_imag_fraction=c_imag_fraction)


def sld_operator(model: HamiltonianModel, theta: float, t: float, psi0, fd_step=None) -> np.ndarray:
    """Symmetric logarithmic derivative 2 d(rho)/dtheta of the pure output state.

    Computed as a central difference of the normalized density matrix, which
    is gauge-free by construction.
    """
    eps = _fd_step(theta, fd_step)

    def rho(th):
        phi = evolve(model, th, t, psi0).phi_out
        return linalg.projector(phi)

    L = (rho(theta + eps) - rho(theta - eps)) / eps
    return (L + linalg.dagger(L)) / 2
