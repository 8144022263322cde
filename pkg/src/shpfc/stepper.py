"""Time integration of the SH/PFC gradient flows, mode-diagonal in Fourier space.

Each step advances the solution through s interior stages plus the
stiffly-accurate final stage. All linear solves and coefficient
applications act independently per Fourier mode through the scalar
z_k = tau * mob_k * lkappa_k <= 0; modes couple only through the
physical-space bulk term, which is re-evaluated at every stage.

Two mathematically equivalent formulations are implemented: the native
family forms (implicit-explicit steady-state preserving, exponential,
corrected integrating-factor) and the unified differential form driven
by the stage differentiation matrix. They agree to round-off and the
test suite certifies this pairwise.
"""

from __future__ import annotations

import numpy as np

from .diffmat import diff_matrix_entries
from .methods import (
    FAMILY_CIFRK_NIF,
    FAMILY_CIFRK_TIF,
    FAMILY_EERK,
    FAMILY_IERK,
    FAMILY_LAWSON,
    MethodSpec,
)
from .model import ModelSpec

__all__ = ["Stepper", "BlowUpError"]


class BlowUpError(RuntimeError):
    """A non-finite value appeared in a stage field."""

    def __init__(self, step: int, stage: int):
        super().__init__(f"solution blew up at step {step}, stage {stage}")
        self.step = step
        self.stage = stage


class Stepper:
    """Advances one field with one method at a fixed step size.

    Per-mode coefficient caches (A(z_k), implicit denominators, the
    differentiation-matrix entries) are built once at construction; a
    new Stepper is the way to change tau, kappa, or the grid.

    The ``linear_only`` flag replaces the bulk by its linearization
    (kappa + eps) * u. It exists solely so tests can compare against
    exact scalar solutions; production runs keep the full bulk.
    """

    def __init__(self, model: ModelSpec, method: MethodSpec, tau: float,
                 u0: np.ndarray, linear_only: bool = False):
        if not tau > 0.0:
            raise ValueError(f"tau must be positive, got {tau}")
        self.model = model
        self.method = method
        self.tau = float(tau)
        self.linear_only = bool(linear_only)
        grid = model.grid
        self.grid = grid

        self.z = self.tau * model.mob_symbol * model.lkappa_symbol
        if self.z.max() > 0.0:
            raise AssertionError("per-mode z must be nonpositive")

        self.u = np.array(grid._check_shape(u0), dtype=float, copy=True)
        self.uhat = grid.to_fourier(self.u)
        self.n = 0

        s = method.s
        if method.family == FAMILY_IERK:
            # pivots 1 - z*a_{ii} >= 1 since z <= 0 and the diagonal is positive
            self._pivots = [1.0 - self.z * method.A_imp[i, i] for i in range(s)]
        elif method.family == FAMILY_LAWSON:
            self._coeffs = method.coeff_matrix(self.z)
            self._propagators = [np.exp(method.c[i + 1] * self.z) for i in range(s)]
        else:
            self._coeffs = method.coeff_matrix(self.z)
        self._d_entries = None  # built on first differential-form step

        # retained stage values of the most recent step (physical, fourier)
        self.stage_fields = [self.u]
        self.stage_hats = [self.uhat]

    # -- bulk term -------------------------------------------------------

    def _g_hat(self, u_phys: np.ndarray, stage: int) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            if self.linear_only:
                g = (self.model.kappa + self.model.epsilon) * u_phys
            else:
                g = self.model.f_kappa(u_phys)
        if not np.isfinite(g).all():
            raise BlowUpError(self.n + 1, stage)
        return self.grid.to_fourier(g)

    # -- native family forms ----------------------------------------------

    def _stages_native(self):
        m = self.method
        s = m.s
        mob = self.model.mob_symbol
        lk = self.model.lkappa_symbol
        u1hat = self.uhat
        lu1 = lk * u1hat
        hats = [u1hat]
        fields = [self.u]
        ghats = []

        for i in range(s):
            ghats.append(self._g_hat(fields[i], i + 1))
            if m.family == FAMILY_IERK:
                rhs = self._pivots[i] * u1hat
                for j in range(i):
                    rhs = rhs + self.z * m.A_imp[i, j] * (hats[j + 1] - u1hat)
                for j in range(i + 1):
                    rhs = rhs - self.tau * m.A_exp[i, j] * (mob * (ghats[j] - lu1))
                new = rhs / self._pivots[i]
            elif m.family == FAMILY_LAWSON:
                new = self._propagators[i] * u1hat
                for j in range(i + 1):
                    new = new - self.tau * self._coeffs[i, j] * (mob * ghats[j])
            else:
                new = u1hat
                for j in range(i + 1):
                    new = new - self.tau * self._coeffs[i, j] * (mob * (ghats[j] - lu1))
            hats.append(new)
            fields.append(self.grid.to_physical(new))
            if not np.isfinite(fields[-1]).all():
                raise BlowUpError(self.n + 1, i + 2)
        return fields, hats

    # -- unified differential form -----------------------------------------

    def _stages_differential(self):
        m = self.method
        if m.family == FAMILY_LAWSON:
            raise ValueError("the uncorrected integrating-factor scheme has no "
                             "certified differential form")
        if self._d_entries is None:
            self._d_entries = diff_matrix_entries(m, self.z)
        d = self._d_entries
        s = m.s
        mob = self.model.mob_symbol
        hats = [self.uhat]
        fields = [self.u]
        half_z = 0.5 * self.z

        for i in range(s):
            ghat = self._g_hat(fields[i], i + 1)
            num = (d[i, i] + half_z) * hats[i] - self.tau * mob * ghat
            for j in range(i):
                num = num - d[i, j] * (hats[j + 1] - hats[j])
            new = num / (d[i, i] - half_z)
            hats.append(new)
            fields.append(self.grid.to_physical(new))
            if not np.isfinite(fields[-1]).all():
                raise BlowUpError(self.n + 1, i + 2)
        return fields, hats

    # -- stepping ----------------------------------------------------------

    def step(self, differential_form: bool = False):
        """Advance one step; returns the new field. Stage values are retained."""
        if differential_form:
            fields, hats = self._stages_differential()
        else:
            fields, hats = self._stages_native()
        self.stage_fields = fields
        self.stage_hats = hats
        self.u = fields[-1]
        self.uhat = hats[-1]
        self.n += 1
        return self.u

    def run(self, n_steps: int, on_stage=None, on_step=None,
            differential_form: bool = False) -> np.ndarray:
        """Iterate steps, reporting every stage to the diagnostics hooks.

        ``on_stage(n, i, t, u, uhat)`` fires for i = 1..s+1 of step n
        (stage 1 is the step's starting field); ``on_step(n, fields,
        hats)`` fires once per completed step with all retained stages.
        """
        if n_steps < 0:
            raise ValueError("n_steps must be nonnegative")
        c = self.method.c
        for _ in range(n_steps):
            t0 = self.n * self.tau
            if on_stage is not None:
                on_stage(self.n + 1, 1, t0, self.u, self.uhat)
            self.step(differential_form=differential_form)
            if on_stage is not None:
                for i in range(2, self.method.s + 2):
                    on_stage(self.n, i, (self.n - 1) * self.tau + c[i - 1] * self.tau,
                             self.stage_fields[i - 1], self.stage_hats[i - 1])
            if on_step is not None:
                on_step(self.n, self.stage_fields, self.stage_hats)
        return self.u
