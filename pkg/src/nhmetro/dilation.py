"""Embedding of a 2x2 non-Hermitian evolution in a two-qubit Hermitian system.

The embedding rests on a Hermitian positive metric eta with
eta H = H^dag eta. With c = sum_i 1/lambda_i(eta) and zeta = c eta - I, the
four-dimensional Hermitian generator I (x) H_s + sigma_y (x) V reproduces the
non-unitary dynamics on the ancilla-|0> block; post-selecting that block
recovers the non-Hermitian output state. The ancilla is the FIRST tensor
factor throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .dynamics import check_normalized, fix_phase
from .errors import NoPositiveSolution, ZetaNotPositive

REAL_SPECTRUM_TOL = 1e-8
NULLSPACE_TOL = 1e-10
POSITIVITY_TOL = 1e-10


@dataclass(frozen=True)
class DilationSystem:
    H: np.ndarray
    eta: np.ndarray
    c: float
    zeta: np.ndarray
    H_s: np.ndarray
    V: np.ndarray
    H_tot: np.ndarray


def _eta_from_coords(u) -> np.ndarray:
    a, b, c, d = u
    return np.array([[a, b + 1j * c], [b - 1j * c, d]])


def solve_eta(H) -> np.ndarray:
    """Positive-definite Hermitian metric with eta H = H^dag eta, unit trace.

    The Hermitian 2x2 ansatz has 4 real unknowns; the intertwining relation
    is a homogeneous linear system whose nullspace is scanned for a
    positive-definite representative.
    """
    H = linalg.as_matrix(H)
    if H.shape != (2, 2):
        raise ValueError("solve_eta handles 2x2 Hamiltonians only")
    lam = np.linalg.eigvals(H)
    if np.max(np.abs(lam.imag)) > REAL_SPECTRUM_TOL * max(1.0, float(np.linalg.norm(H))):
        raise NoPositiveSolution("Hamiltonian spectrum is not real (broken regime)")

    columns = []
    for k in range(4):
        u = np.zeros(4)
        u[k] = 1.0
        eta = _eta_from_coords(u)
        resid = eta @ H - linalg.dagger(H) @ eta
        columns.append(np.concatenate([resid.ravel().real, resid.ravel().imag]))
    M = np.column_stack(columns)
    _, sing, vt = np.linalg.svd(M)
    scale = max(sing[0], 1.0)
    basis = [vt[i] for i in range(4) if (sing[i] if i < len(sing) else 0.0) < NULLSPACE_TOL * scale]
    if not basis:
        raise NoPositiveSolution("the intertwining relation has no Hermitian solution")

    def positivity(u):
        eta = _eta_from_coords(u)
        tr = np.trace(eta).real
        if tr < 0:
            eta = -eta
        w = np.linalg.eigvalsh(eta)
        return w.min() / max(abs(w).max(), 1e-300), eta

    # Prefer the nullspace projection of the identity (recovers eta = I/2 for
    # Hermitian input); otherwise scan combinations of the basis vectors.
    identity_coords = np.array([1.0, 0.0, 0.0, 1.0])
    candidates = [sum(float(np.dot(b, identity_coords)) * b for b in basis)]
    candidates += list(basis)
    if len(basis) >= 2:
        for phase in np.linspace(0.0, np.pi, 64, endpoint=False):
            candidates.append(np.cos(phase) * basis[0] + np.sin(phase) * basis[1])

    best_margin, best_eta = -np.inf, None
    for u in candidates:
        if np.linalg.norm(u) < 1e-12:
            continue
        margin, eta = positivity(u)
        if margin > best_margin:
            best_margin, best_eta = margin, eta
    if best_eta is None or best_margin <= POSITIVITY_TOL:
        raise NoPositiveSolution("no positive-definite metric in the nullspace")
    eta = best_eta / np.trace(best_eta).real
    return (eta + linalg.dagger(eta)) / 2


def build_dilation(H) -> DilationSystem:
    """Assemble the two-qubit Hermitian system reproducing exp(-i H t)."""
    H = linalg.as_matrix(H)
    eta = solve_eta(H)
    lam = np.linalg.eigvalsh(eta)
    c = float(np.sum(1.0 / lam))
    zeta = c * eta - np.eye(2)
    if np.linalg.eigvalsh(zeta).min() <= POSITIVITY_TOL:
        raise ZetaNotPositive("c*eta - I is not positive definite")
    z_half = linalg.herm_funct(zeta, "sqrt")
    z_mhalf = linalg.herm_funct(zeta, "inv_sqrt")
    # (zeta^1/2 + zeta^-1/2)^-1 evaluated spectrally for conditioning.
    w, v = np.linalg.eigh(zeta)
    s_inv = (v * (1.0 / (np.sqrt(w) + 1.0 / np.sqrt(w)))) @ linalg.dagger(v)
    H_s = (H @ z_mhalf + z_half @ H) @ s_inv
    V = 1j * (H - z_half @ H @ z_mhalf) @ s_inv
    H_s = (H_s + linalg.dagger(H_s)) / 2
    V = (V + linalg.dagger(V)) / 2
    H_tot = np.kron(np.eye(2), H_s) + np.kron(linalg.SIGMA_Y, V)
    return DilationSystem(H=H, eta=eta, c=c, zeta=zeta, H_s=H_s, V=V, H_tot=H_tot)


def evolve_dilated(sys: DilationSystem, psi0, t: float):
    """Evolve |0>(x)psi0 + |1>(x)zeta^(1/2) psi0 under H_tot and post-select.

    Returns (Psi_tot, recovered, success_prob): the full unnormalized
    two-qubit state, the renormalized ancilla-|0> block, and the
    post-selection probability.
    """
    psi0 = check_normalized(psi0)
    z_half = linalg.herm_funct(sys.zeta, "sqrt")
    Psi0 = np.concatenate([psi0, z_half @ psi0])
    Psi_t = linalg.mat_exp(-1j * t * sys.H_tot) @ Psi0
    block0 = Psi_t[:2]
    total = float(np.vdot(Psi_t, Psi_t).real)
    success_prob = float(np.vdot(block0, block0).real) / total
    recovered = fix_phase(block0 / np.linalg.norm(block0))
    return Psi_t, recovered, success_prob
