"""Catalog of parametric non-Hermitian Hamiltonians with analytic derivatives.

Besides H(theta) and dH/dtheta, the catalog families carry closed-form
evolution operators and generator-eigenvalue formulas that serve as
independent references in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import OutOfRange, UnsupportedFamily

FAMILIES = ("pt", "kappa", "ep_demo", "custom")


@dataclass(frozen=True)
class HamiltonianModel:
    family: str
    params: dict = field(default_factory=dict)
    estimated_param: str = ""
    h_func: Optional[Callable[[float], np.ndarray]] = None
    d_func: Optional[Callable[[float], np.ndarray]] = None

    def bound_params(self, theta: float) -> dict:
        p = dict(self.params)
        p[self.estimated_param] = theta
        return p

    @property
    def true_value(self) -> float:
        return float(self.params[self.estimated_param])


def pt_model(s: float, alpha: float, estimate: str = "s") -> HamiltonianModel:
    if estimate not in ("s", "alpha"):
        raise OutOfRange(f"pt family estimates 's' or 'alpha', not {estimate!r}")
    return HamiltonianModel("pt", {"s": float(s), "alpha": float(alpha)}, estimate)


def kappa_model(kappa: float) -> HamiltonianModel:
    return HamiltonianModel("kappa", {"kappa": float(kappa)}, "kappa")


def ep_demo_model(alpha: float) -> HamiltonianModel:
    return HamiltonianModel("ep_demo", {"alpha": float(alpha)}, "alpha")


def custom_model(h_func, d_func, params=None, estimated_param="theta") -> HamiltonianModel:
    """Custom family; the caller supplies analytic H(theta) and dH/dtheta."""
    return HamiltonianModel("custom", dict(params or {}), estimated_param, h_func, d_func)


def _check_pt(s: float, alpha: float):
    # s = 0 is tolerated as the trivial zero Hamiltonian.
    if s < 0:
        raise OutOfRange(f"pt family requires s >= 0, got {s}")
    if not 0 < alpha < math.pi / 2:
        raise OutOfRange(f"pt family requires 0 < alpha < pi/2, got {alpha}")


def _check_kappa(kappa: float):
    if kappa <= 0 or kappa == 1:
        raise OutOfRange(f"kappa family requires kappa > 0 and kappa != 1, got {kappa}")


def _check_ep_demo(alpha: float):
    # cos(2 alpha) > 0 keeps the spectrum real (unbroken regime).
    if not 0 < alpha < math.pi / 4:
        raise OutOfRange(f"ep_demo family requires 0 < alpha < pi/4, got {alpha}")


def hamiltonian(model: HamiltonianModel, theta: float) -> np.ndarray:
    if model.family == "pt":
        p = model.bound_params(theta)
        s, alpha = p["s"], p["alpha"]
        _check_pt(s, alpha)
        return s * np.array([[1j * math.sin(alpha), 1.0], [1.0, -1j * math.sin(alpha)]])
    if model.family == "kappa":
        kappa = model.bound_params(theta)["kappa"]
        _check_kappa(kappa)
        return np.array([[0.0, kappa], [1.0, 0.0]], dtype=complex)
    if model.family == "ep_demo":
        alpha = model.bound_params(theta)["alpha"]
        _check_ep_demo(alpha)
        c, s = math.cos(alpha), math.sin(alpha)
        return np.array([[1j * s, c], [c, -1j * s]])
    if model.family == "custom":
        return np.asarray(model.h_func(theta), dtype=complex)
    raise UnsupportedFamily(f"unknown family {model.family!r}")


def d_hamiltonian(model: HamiltonianModel, theta: float) -> np.ndarray:
    if model.family == "pt":
        p = model.bound_params(theta)
        s, alpha = p["s"], p["alpha"]
        _check_pt(s, alpha)
        if model.estimated_param == "s":
            return np.array([[1j * math.sin(alpha), 1.0], [1.0, -1j * math.sin(alpha)]])
        return np.array([[1j * s * math.cos(alpha), 0.0], [0.0, -1j * s * math.cos(alpha)]])
    if model.family == "kappa":
        _check_kappa(model.bound_params(theta)["kappa"])
        return np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    if model.family == "ep_demo":
        alpha = model.bound_params(theta)["alpha"]
        _check_ep_demo(alpha)
        c, s = math.cos(alpha), math.sin(alpha)
        return np.array([[1j * c, -s], [-s, -1j * c]])
    if model.family == "custom":
        return np.asarray(model.d_func(theta), dtype=complex)
    raise UnsupportedFamily(f"unknown family {model.family!r}")


def closed_form_U(model: HamiltonianModel, theta: float, t: float) -> np.ndarray:
    """Analytic evolution operator for the pt and kappa families."""
    if model.family == "pt":
        p = model.bound_params(theta)
        s, alpha = p["s"], p["alpha"]
        x = t * s * math.cos(alpha)
        sec = 1.0 / math.cos(alpha)
        return sec * np.array(
            [
                [math.cos(x - alpha), -1j * math.sin(x)],
                [-1j * math.sin(x), math.cos(x + alpha)],
            ]
        )
    if model.family == "kappa":
        kappa = model.bound_params(theta)["kappa"]
        rk = math.sqrt(kappa)
        x = t * rk
        return np.array(
            [
                [math.cos(x), -1j * rk * math.sin(x)],
                [-1j / rk * math.sin(x), math.cos(x)],
            ]
        )
    raise UnsupportedFamily(f"no closed-form evolution for family {model.family!r}")


def h_eigen_oracle(model: HamiltonianModel, theta: float, t: float):
    """Closed-form eigenvalue pair of the local generator at (theta, t).

    The pair is unordered (the sign convention of the source expressions is
    ambiguous); compare |lambda_+ - lambda_-| rather than individual signs.
    The radicand may be negative at small t, in which case the eigenvalues
    are purely imaginary; the complex square root handles both regimes.
    """
    csqrt = np.lib.scimath.sqrt
    if model.family == "pt":
        p = model.bound_params(theta)
        s, alpha = p["s"], p["alpha"]
        if model.estimated_param != "alpha":
            raise UnsupportedFamily("pt generator eigenvalues are only available for estimate 'alpha'")
        sec = 1.0 / math.cos(alpha)
        radicand = 4 * math.cos(2 * s * t * math.cos(alpha)) - 4 + s * s * t * t * (1 - math.cos(4 * alpha))
        lam = sec * csqrt(radicand) / (2 * math.sqrt(2))
        return lam, -lam
    if model.family == "kappa":
        # Denominator 8*kappa**2, not 8*kappa: the latter disagrees with the
        # generator matrix itself by a factor sqrt(kappa) whenever kappa != 1.
        kappa = model.bound_params(theta)["kappa"]
        lam = csqrt((-1 + 2 * kappa * t * t + math.cos(2 * t * math.sqrt(kappa)))
                    / (8 * kappa * kappa))
        return lam, -lam
    if model.family == "ep_demo":
        alpha = model.bound_params(theta)["alpha"]
        sec2 = 1.0 / math.cos(2 * alpha)
        root = math.sqrt(math.cos(2 * alpha))
        radicand = (math.cos(2 * t * root) + t * t * math.sin(2 * alpha) * math.sin(4 * alpha) - 1) / 2
        lam = sec2 * csqrt(radicand)
        return lam, -lam
    raise UnsupportedFamily(f"no generator eigenvalue formula for family {model.family!r}")
