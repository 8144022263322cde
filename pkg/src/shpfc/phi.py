"""Stable evaluation of the exponential-integrator phi functions.

phi_0(z) = exp(z) and phi_{k+1}(z) = (phi_k(z) - 1/k!) / z, equivalently
phi_j(z) = int_0^1 exp((1-s)z) s^(j-1)/(j-1)! ds for j >= 1.

The recursion loses roughly a factor 1/|z| of accuracy per level, so it
is only used for |z| >= 0.5; below that a truncated Taylor series
phi_j(z) = sum_m z^m / (m+j)! is summed by Horner's rule. The two
branches agree to ~1e-12 across the overlap band.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["phi", "phi_stack", "SERIES_CUTOFF"]

SERIES_CUTOFF = 0.5
_SERIES_TERMS = 25
_JMAX = 4


def _series(j: int, z: np.ndarray) -> np.ndarray:
    # Horner from the highest retained term; terms below ~1e-18 at |z|<0.5
    acc = np.full_like(z, 1.0 / math.factorial(_SERIES_TERMS - 1 + j))
    for m in range(_SERIES_TERMS - 2, -1, -1):
        acc = acc * z + 1.0 / math.factorial(m + j)
    return acc


def phi_stack(z: np.ndarray, jmax: int) -> np.ndarray:
    """Evaluate phi_0..phi_jmax elementwise on an array of z <= 0.

    Returns an array of shape (jmax+1,) + z.shape.
    """
    z = np.asarray(z, dtype=float)
    if z.size and z.max() > 0.0:
        raise ValueError("phi functions are evaluated on z <= 0 only")
    out = np.empty((jmax + 1,) + z.shape)
    small = np.abs(z) < SERIES_CUTOFF
    # recursion branch; guard the division where the series applies instead
    zsafe = np.where(small, -1.0, z)
    rec = np.exp(z)
    out[0] = rec
    for k in range(jmax):
        rec = (rec - 1.0 / math.factorial(k)) / zsafe
        out[k + 1] = np.where(small, _series(k + 1, z), rec)
    if small.any():
        out[0] = np.where(small, np.exp(z), out[0])
    return out


def phi(j: int, z: float) -> float:
    """Scalar phi_j(z) for 0 <= j <= 4 and z <= 0; absolute error <= 1e-13."""
    if not 0 <= j <= _JMAX:
        raise ValueError(f"j must lie in 0..{_JMAX}, got {j}")
    if z > 0.0:
        raise ValueError(f"z must be <= 0, got {z}")
    return float(phi_stack(np.asarray(z, dtype=float), j)[j])
