"""Swift-Hohenberg / phase-field-crystal model layer.

The dynamics is the gradient flow ``u_t = M (L_kappa u - f_kappa(u))``
where the stabilized operator ``L_kappa = (I + Lap)^2 + kappa`` and the
shifted bulk ``f_kappa(u) = kappa*u + f(u)``, ``f(u) = eps*u - u^3``.
The mobility ``M`` is ``-I`` for the Swift-Hohenberg (L2) flow and
``Lap`` for the volume-conserving phase-field-crystal (H^-1) flow.

Nonlinear products are formed pointwise on the collocation grid
(interpolatory convention, no dealiasing).
"""

from __future__ import annotations

import numpy as np

from .spectral import SpectralGrid

__all__ = [
    "MOBILITY_SH",
    "MOBILITY_PFC",
    "ModelSpec",
    "bulk_f",
    "bulk_f_kappa",
    "free_energy",
    "c0_bound",
    "kappa_floor",
]

MOBILITY_SH = "sh"
MOBILITY_PFC = "pfc"


def bulk_f(u: np.ndarray, eps: float) -> np.ndarray:
    """Nonlinear bulk eps*u - u^3, pointwise on grid values."""
    return eps * u - u**3


def bulk_f_kappa(u: np.ndarray, eps: float, kappa: float) -> np.ndarray:
    """Stabilized bulk kappa*u + f(u)."""
    return kappa * u + bulk_f(u, eps)


def free_energy(grid: SpectralGrid, u: np.ndarray, eps: float) -> float:
    """Free energy 0.5*||(I+Lap)u||^2 + <u^4/4 - eps*u^2/2, 1>.

    The quadratic part is evaluated spectrally, the potential by the
    collocation quadrature h^2 * sum.
    """
    quad = 0.5 * grid.seminorm_h2(u) ** 2
    pot = grid.h * grid.h * float(np.sum(0.25 * u**4 - 0.5 * eps * u**2))
    return quad + pot


def c0_bound(E0: float, eps: float) -> float:
    """Solution-norm radius sqrt(4*E0 + (1+eps)^2) implied by an energy bound."""
    rad = 4.0 * E0 + (1.0 + eps) ** 2
    if rad < 0.0:
        raise ValueError(f"negative radicand {rad}; E0 is below the energy floor")
    return float(np.sqrt(rad))


def kappa_floor(c_bound: float, eps: float) -> float:
    """Smallest stabilization that dominates |f'| on the ball |xi| <= c_bound.

    max over |xi| <= c_bound of |eps - 3*xi^2| = max(eps, 3*c_bound^2 - eps).
    """
    if c_bound < 0:
        raise ValueError("c_bound must be nonnegative")
    return max(eps, 3.0 * c_bound * c_bound - eps)


class ModelSpec:
    """One concrete problem: grid, mobility choice, eps, and stabilization.

    Carries the per-mode symbols of the mobility and of the stabilized
    operator; both are diagonal in Fourier space. Immutable.
    """

    def __init__(self, grid: SpectralGrid, mobility: str, epsilon: float, kappa: float):
        if mobility not in (MOBILITY_SH, MOBILITY_PFC):
            raise ValueError(f"unknown mobility {mobility!r}; use 'sh' or 'pfc'")
        if not 0.0 < epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
        if kappa < 0.0:
            raise ValueError(f"kappa must be nonnegative, got {kappa}")
        self.grid = grid
        self.mobility = mobility
        self.epsilon = float(epsilon)
        self.kappa = float(kappa)

        if mobility == MOBILITY_SH:
            self.mob_symbol = -np.ones_like(grid.lap_symbol)
        else:
            self.mob_symbol = grid.lap_symbol.copy()
        # (1 + lap)^2 + kappa > 0 at every mode
        self.lkappa_symbol = (1.0 + grid.lap_symbol) ** 2 + self.kappa
        self.mob_symbol.setflags(write=False)
        self.lkappa_symbol.setflags(write=False)

    @property
    def conserves_volume(self) -> bool:
        return self.mobility == MOBILITY_PFC

    def f(self, u: np.ndarray) -> np.ndarray:
        return bulk_f(u, self.epsilon)

    def f_kappa(self, u: np.ndarray) -> np.ndarray:
        return bulk_f_kappa(u, self.epsilon, self.kappa)

    def energy(self, u: np.ndarray) -> float:
        return free_energy(self.grid, u, self.epsilon)

    def __repr__(self) -> str:
        return (
            f"ModelSpec(mobility={self.mobility!r}, epsilon={self.epsilon}, "
            f"kappa={self.kappa}, grid={self.grid!r})"
        )
