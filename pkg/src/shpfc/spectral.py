"""Fourier pseudo-spectral discretization on a periodic square grid.

All spatial operators used by the solvers (Laplacian, the stabilized
fourth-order operator, the mobility, and every matrix function of their
product) are diagonal in Fourier space, so a grid carries precomputed
per-mode symbol arrays and fields are plain real ``(M, M)`` ndarrays on
the collocation points ``x_j = j*h``, ``h = L/M``.

Transform convention: ``to_fourier`` returns coefficients normalized so
that ``u = sum_k  uhat_k  exp(i*nu*(m*x + n*y))`` with ``nu = 2*pi/L``,
hence ``to_physical(to_fourier(u)) == u`` to round-off and Parseval reads
``<u, v> = L^2 * sum_k uhat_k * conj(vhat_k)``.
"""

from __future__ import annotations

import numpy as np

__all__ = ["SpectralGrid"]

# tolerances fixed by the discretization contract
_ROUNDTRIP_TOL = 1e-12
_SYMBOL_SYMMETRY_TOL = 1e-13
_MEAN_ZERO_TOL = 1e-12


class SpectralGrid:
    """Periodic M x M collocation grid with per-mode operator symbols.

    Parameters
    ----------
    M : int
        Modes (= grid points) per dimension; even, at least 4.
    L : float
        Edge length of the square domain.

    Immutable after construction; safe to share between threads.
    """

    def __init__(self, M: int, L: float):
        if M != int(M) or M % 2 != 0 or M < 4:
            raise ValueError(f"M must be an even integer >= 4, got {M}")
        if not L > 0:
            raise ValueError(f"L must be positive, got {L}")
        self.M = int(M)
        self.L = float(L)
        self.h = self.L / self.M
        self.nu = 2.0 * np.pi / self.L

        # integer mode numbers in FFT storage order: 0..M/2-1, -M/2..-1
        modes = np.fft.fftfreq(self.M, d=1.0 / self.M)
        self.mode_x = modes[:, None]
        self.mode_y = modes[None, :]
        ksq = self.nu**2 * (self.mode_x**2 + self.mode_y**2)
        self.lap_symbol = -ksq

        x = self.h * np.arange(self.M)
        self.x, self.y = np.meshgrid(x, x, indexing="ij")

        # index map k -> -k (mod M) used for symmetry checks
        self._neg = (-np.arange(self.M)) % self.M

        for arr in (self.lap_symbol, self.x, self.y, self.mode_x, self.mode_y):
            arr.setflags(write=False)

    # -- transforms ----------------------------------------------------

    def to_fourier(self, values: np.ndarray) -> np.ndarray:
        """Forward transform to normalized pseudo-spectral coefficients."""
        values = self._check_shape(values)
        return np.fft.fft2(values) / (self.M * self.M)

    def to_physical(self, coeffs: np.ndarray) -> np.ndarray:
        """Inverse transform; the imaginary residue must be negligible."""
        coeffs = self._check_shape(coeffs)
        w = np.fft.ifft2(coeffs) * (self.M * self.M)
        scale = max(1.0, float(np.abs(w.real).max()))
        resid = float(np.abs(w.imag).max())
        if resid > _ROUNDTRIP_TOL * scale:
            raise ValueError(
                f"inverse transform has imaginary residue {resid:.3e}; "
                "coefficients are not conjugate-symmetric"
            )
        return np.ascontiguousarray(w.real)

    def apply_symbol(self, values: np.ndarray, symbol: np.ndarray) -> np.ndarray:
        """Apply a diagonal-in-Fourier operator given by a real symbol array."""
        self.check_symbol(symbol)
        return self.to_physical(symbol * self.to_fourier(values))

    def check_symbol(self, symbol: np.ndarray) -> None:
        """Reject symbols that would map real fields to complex ones."""
        symbol = self._check_shape(symbol)
        mirrored = symbol[np.ix_(self._neg, self._neg)]
        scale = max(1.0, float(np.abs(symbol).max()))
        err = float(np.abs(symbol - mirrored).max())
        if err > _SYMBOL_SYMMETRY_TOL * scale:
            raise ValueError(
                f"symbol violates (m,n) -> (-m,-n) symmetry by {err:.3e}"
            )

    # -- inner products and norms --------------------------------------

    def inner(self, u: np.ndarray, v: np.ndarray) -> float:
        """Discrete L2 inner product h^2 * sum(u * v)."""
        return float(self.h * self.h * np.sum(self._check_shape(u) * self._check_shape(v)))

    def norm_l2(self, u: np.ndarray) -> float:
        return float(np.sqrt(self.h * self.h * np.sum(self._check_shape(u) ** 2)))

    def norm_max(self, u: np.ndarray) -> float:
        return float(np.abs(self._check_shape(u)).max())

    def field_mean(self, u: np.ndarray) -> float:
        """Mean value <u, 1> / L^2."""
        return float(np.mean(self._check_shape(u)))

    def seminorm_h2(self, u: np.ndarray) -> float:
        """|| (I + Lap) u ||, evaluated spectrally."""
        uhat = self.to_fourier(u)
        w = (1.0 + self.lap_symbol) * uhat
        return float(np.sqrt(self.L * self.L * np.sum(np.abs(w) ** 2)))

    def inner_grad(self, u: np.ndarray, v: np.ndarray) -> float:
        """<grad u, grad v>, evaluated spectrally (= <-Lap u, v>)."""
        uhat = self.to_fourier(u)
        vhat = self.to_fourier(v)
        return float(self.L * self.L * np.sum((-self.lap_symbol) * (uhat * np.conj(vhat)).real))

    def norm_grad(self, u: np.ndarray) -> float:
        return float(np.sqrt(max(self.inner_grad(u, u), 0.0)))

    def norm_hm1(self, u: np.ndarray) -> float:
        """H^{-1} norm of a mean-zero field via the inverse-Laplacian symbol."""
        u = self._check_shape(u)
        mean = abs(self.inner(u, np.ones_like(u)))
        if mean > _MEAN_ZERO_TOL * max(self.norm_l2(u), 1e-300):
            raise ValueError(f"norm_hm1 requires a mean-zero field; <u,1> = {mean:.3e}")
        uhat = self.to_fourier(u)
        inv = np.zeros_like(self.lap_symbol)
        nonzero = self.lap_symbol < 0
        inv[nonzero] = 1.0 / (-self.lap_symbol[nonzero])
        return float(np.sqrt(self.L * self.L * np.sum(inv * np.abs(uhat) ** 2)))

    # -- helpers --------------------------------------------------------

    def _check_shape(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a)
        if a.shape != (self.M, self.M):
            raise ValueError(f"expected shape {(self.M, self.M)}, got {a.shape}")
        return a

    def __repr__(self) -> str:
        return f"SpectralGrid(M={self.M}, L={self.L})"
