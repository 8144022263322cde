"""Stage differentiation matrices D(z) and their spectral certification.

Every registered method admits a unified differential form whose
lower-triangular stage-coupling matrix D(z) controls energy stability:
if the minimum eigenvalue of the symmetric part S(D) = (D + D^T)/2 has a
positive z-independent floor, the scheme dissipates the free energy at
every stage. This module builds D(z) per family,

* ierk:          D(z) = D_E - z * D_EI  with  D_E = A_exp^{-1} E,
                 D_EI = A_exp^{-1} A_imp E - E + I/2,
* eerk / cifrk:  D(z) = A(z)^{-1} E + z E - (z/2) I,

(E is the lower-triangular all-ones matrix), inverts it into the
orthogonal-convolution kernels Theta(z) = D(z)^{-1}, and scans min eig
of S(D(z)) over a log grid of z <= 0 to certify the per-method floors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .methods import (
    FAMILY_EERK,
    FAMILY_CIFRK_TIF,
    FAMILY_CIFRK_NIF,
    FAMILY_IERK,
    FAMILY_LAWSON,
    MethodSpec,
    build_method,
    certified_eig_bounds,
    cif_variants,
    registered_methods,
)

__all__ = [
    "DiffMatrixSample",
    "DocKernels",
    "ScanResult",
    "CertRecord",
    "SingularStageError",
    "tri_inv",
    "diff_matrix",
    "diff_matrix_entries",
    "doc_kernels",
    "sym_min_eig",
    "jacobi_eigvals",
    "default_z_grid",
    "scan_lambda",
    "certify_method",
    "certify_all",
    "write_curve_csv",
    "CERT_TOL",
]

CERT_TOL = 1e-6          # absolute slack on the certified eigenvalue floors
_JACOBI_TOL = 1e-14
_TAIL_START = -1.0e3     # slope fitted on grid points with z <= this


class SingularStageError(ValueError):
    """A stage coefficient matrix has a (near-)zero diagonal entry."""

    def __init__(self, stage: int):
        super().__init__(f"singular stage coefficient at stage {stage + 1}")
        self.stage = stage


def tri_inv(A: np.ndarray) -> np.ndarray:
    """Invert a lower-triangular matrix by forward substitution.

    Entries may be scalars or ndarrays (shape ``(s, s) + tail``), so one
    call inverts the coefficient matrix at every Fourier mode at once.
    """
    s = A.shape[0]
    B = np.zeros_like(A)
    for i in range(s):
        d = A[i, i]
        if np.min(np.abs(d)) < 1e-250:
            raise SingularStageError(i)
        B[i, i] = 1.0 / d
        for j in range(i - 1, -1, -1):
            acc = A[i, j] * B[j, j]
            for k in range(j + 1, i):
                acc = acc + A[i, k] * B[k, j]
            B[i, j] = -acc / d
    return B


def _lower_ones_product(B: np.ndarray) -> np.ndarray:
    # (B @ E)_{ij} = sum_{k=j}^{i} B_{ik} for the all-ones lower triangle E
    s = B.shape[0]
    out = np.zeros_like(B)
    for i in range(s):
        acc = B[i, i].copy()
        out[i, i] = acc
        for j in range(i - 1, -1, -1):
            acc = acc + B[i, j]
            out[i, j] = acc
    return out


def diff_matrix_entries(method: MethodSpec, z) -> np.ndarray:
    """Entries d_ij(z) of the differentiation matrix, vectorized over z.

    Returns shape ``(s, s) + z.shape``; z must be <= 0 everywhere.
    """
    z = np.asarray(z, dtype=float)
    if z.size and z.max() > 0.0:
        raise ValueError("differentiation matrices are defined for z <= 0")
    s = method.s
    eye = np.zeros((s, s) + z.shape)
    for i in range(s):
        eye[i, i] = 1.0
    ones_lower = np.zeros((s, s) + z.shape)
    for i in range(s):
        for j in range(i + 1):
            ones_lower[i, j] = 1.0

    if method.family == FAMILY_IERK:
        AEinv = tri_inv(method.A_exp)
        DE = _lower_ones_product(AEinv)
        DEI = (_lower_ones_product(AEinv @ method.A_imp)
               - np.tril(np.ones((s, s))) + 0.5 * np.eye(s))
        return (DE.reshape((s, s) + (1,) * z.ndim)
                - z * DEI.reshape((s, s) + (1,) * z.ndim)) * np.ones_like(eye)
    if method.family in (FAMILY_EERK, FAMILY_CIFRK_TIF, FAMILY_CIFRK_NIF):
        B = tri_inv(method.coeff_matrix(z))
        return _lower_ones_product(B) + z * ones_lower - 0.5 * z * eye
    raise ValueError(f"no differentiation matrix for family {method.family!r}")


@dataclass
class DiffMatrixSample:
    """D(z) at a single z, with the minimum eigenvalue of its symmetric part."""

    z: float
    D: np.ndarray
    sym_min_eig: float


@dataclass
class DocKernels:
    """Lower-triangular inverse Theta(z) = D(z)^{-1} (orthogonal-convolution kernels)."""

    z: float
    theta: np.ndarray


def jacobi_eigvals(S: np.ndarray, tol: float = _JACOBI_TOL, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.

    Sweeps until the off-diagonal Frobenius norm falls below
    ``tol * max(1, ||S||_F)``; deterministic rotation order.
    """
    A = np.array(S, dtype=float, copy=True)
    n = A.shape[0]
    if n == 1:
        return A.diagonal().copy()
    scale = max(1.0, math.sqrt(float((A * A).sum())))
    for _ in range(max_sweeps):
        off = math.sqrt(2.0 * sum(A[p, q] ** 2 for p in range(n - 1)
                                  for q in range(p + 1, n)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                G = np.eye(n)
                G[p, p] = G[q, q] = c
                G[p, q] = s
                G[q, p] = -s
                A = G.T @ A @ G
                A[p, q] = A[q, p] = 0.0
    return np.sort(A.diagonal())


def sym_min_eig(D: np.ndarray) -> float:
    """Minimum eigenvalue of (D + D^T)/2."""
    return float(jacobi_eigvals(0.5 * (D + D.T))[0])


def diff_matrix(method: MethodSpec, z: float) -> DiffMatrixSample:
    """D(z) at a single scalar z <= 0."""
    D = diff_matrix_entries(method, float(z))
    return DiffMatrixSample(z=float(z), D=D, sym_min_eig=sym_min_eig(D))


def doc_kernels(sample) -> DocKernels:
    """Invert a lower-triangular D by the orthogonal-convolution recursion.

    Accepts a DiffMatrixSample or a bare (s, s) matrix.
    """
    if isinstance(sample, DiffMatrixSample):
        z, D = sample.z, sample.D
    else:
        z, D = float("nan"), np.asarray(sample, dtype=float)
    s = D.shape[0]
    if np.abs(np.triu(D, 1)).max() > 0.0:
        raise ValueError("doc_kernels expects a lower-triangular matrix")
    theta = np.zeros_like(D)
    for k in range(s):
        if D[k, k] == 0.0:
            raise SingularStageError(k)
        theta[k, k] = 1.0 / D[k, k]
        for j in range(k - 1, -1, -1):
            acc = 0.0
            for ell in range(j + 1, k + 1):
                acc += theta[k, ell] * D[ell, j]
            theta[k, j] = -acc / D[j, j]
    return DocKernels(z=z, theta=theta)


# ---------------------------------------------------------------------------
# certification scans
# ---------------------------------------------------------------------------

def default_z_grid(n_points: int = 2000, z_min: float = -1.0e4,
                   z_max: float = -1.0e-6) -> np.ndarray:
    """Log-spaced scan grid, descending from z_max toward z_min (all < 0)."""
    return -np.logspace(math.log10(-z_max), math.log10(-z_min), n_points)


@dataclass
class ScanResult:
    """Minimum-eigenvalue landscape of one D(z) curve."""

    label: str
    z: np.ndarray
    lam: np.ndarray
    grid_min: float
    grid_argmin: float
    refined_min: float
    refined_argmin: float
    limit_zero: float
    tail_slope: float


def _curve(method: MethodSpec, z_grid: np.ndarray) -> np.ndarray:
    entries = diff_matrix_entries(method, z_grid)
    s = method.s
    lam = np.empty(z_grid.shape)
    for idx in range(z_grid.size):
        D = entries[(slice(None), slice(None)) + np.unravel_index(idx, z_grid.shape)]
        lam[np.unravel_index(idx, z_grid.shape)] = sym_min_eig(D)
    return lam


def _golden_refine(method: MethodSpec, a: float, b: float,
                   iters: int = 90) -> tuple:
    # deterministic golden-section minimization of min-eig over [a, b], a < b < 0
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    f = lambda z: sym_min_eig(diff_matrix_entries(method, z))
    x1 = b - inv_phi * (b - a)
    x2 = a + inv_phi * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if abs(b - a) <= 1e-12 * max(1.0, abs(a)):
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv_phi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def scan_lambda(method: MethodSpec, z_grid: np.ndarray | None = None,
                refine: bool = True) -> ScanResult:
    """Scan min eig of S(D(z)) over the grid plus the exact z -> 0 sample.

    The reported minimum location is refined by a golden-section search
    between the neighbours of the grid argmin (ties resolved toward the
    most negative z).
    """
    if z_grid is None:
        z_grid = default_z_grid()
    z_grid = np.asarray(z_grid, dtype=float)
    if z_grid.size == 0:
        raise ValueError("empty scan grid")
    if z_grid.max() > 0.0:
        raise ValueError("scan grid must satisfy z <= 0")
    lam = _curve(method, z_grid)
    limit_zero = sym_min_eig(diff_matrix_entries(method, 0.0))

    vmin = float(lam.min())
    ties = np.flatnonzero(lam == vmin)
    pick = ties[np.argmin(z_grid[ties])]
    grid_argmin = float(z_grid[pick])

    refined_min, refined_argmin = vmin, grid_argmin
    order = np.argsort(z_grid)          # ascending (most negative first)
    pos = int(np.searchsorted(z_grid[order], grid_argmin))
    if refine and 0 < pos < z_grid.size - 1:
        a = float(z_grid[order][pos - 1])
        b = float(z_grid[order][pos + 1])
        zr, vr = _golden_refine(method, a, b)
        if vr < refined_min:
            refined_min, refined_argmin = float(vr), float(zr)
    if limit_zero < refined_min:
        refined_min, refined_argmin = limit_zero, 0.0

    tail = z_grid <= _TAIL_START
    if tail.sum() >= 2:
        tail_slope = float(np.polyfit(z_grid[tail], lam[tail], 1)[0])
    else:
        tail_slope = float("nan")

    label = method.name
    variant = method.params.get("variant")
    if variant:
        label = f"{method.name}:{variant}"
    return ScanResult(label=label, z=z_grid, lam=lam,
                      grid_min=min(vmin, limit_zero), grid_argmin=grid_argmin,
                      refined_min=refined_min, refined_argmin=refined_argmin,
                      limit_zero=limit_zero, tail_slope=tail_slope)


@dataclass
class CertRecord:
    """Certification outcome of one registered method (all variants)."""

    name: str
    eig_bound: float
    scans: list = field(default_factory=list)
    passed: bool = False
    warnings: list = field(default_factory=list)

    @property
    def overall_min(self) -> float:
        return min(s.refined_min for s in self.scans)


def certify_method(name: str, z_grid: np.ndarray | None = None) -> CertRecord:
    """Certify one registered method against its eigenvalue floor.

    Integrating-factor methods must pass with both correction variants.
    """
    bounds = certified_eig_bounds()
    if name not in bounds:
        raise KeyError(f"{name!r} is not a certified method")
    rec = CertRecord(name=name, eig_bound=bounds[name])
    for variant in cif_variants(name):
        spec = build_method(name) if variant is None else build_method(name, variant=variant)
        rec.scans.append(scan_lambda(spec, z_grid))
    rec.passed = all(s.refined_min >= rec.eig_bound - CERT_TOL for s in rec.scans)
    for s in rec.scans:
        if rec.passed and -1.0e3 < s.refined_argmin < -10.0 and s.refined_argmin != 0.0:
            rec.warnings.append(
                f"{s.label}: minimum at z={s.refined_argmin:.6g} lies in the "
                "unplotted range (-1e3, -10); bound still holds"
            )
    return rec


def certify_all(names=None, z_grid: np.ndarray | None = None) -> list:
    if names is None:
        names = registered_methods()
    return [certify_method(n, z_grid) for n in names]


def write_curve_csv(path, results) -> None:
    """Write scan curves as CSV rows (method, z, lambda_min)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("method,z,lambda_min\n")
        for res in results:
            for z, lam in zip(res.z, res.lam):
                fh.write(f"{res.label},{z:.17g},{lam:.17g}\n")
