"""Stage-resolved energy and norm monitoring for solver runs.

Every stage of every step is logged as an EnergyRecord (free energy,
L2 norm, the second-order seminorm ||(I+Lap)u||, max norm, mean). On
step completion the two sides of the stage-cumulative energy inequality

    E[u^{n,k+1}] - E[u^{n,1}]  <=  (1/tau) * sum_{i<=k} <M^{-1} du^{i+1},
                                    sum_{j<=i} d_ij(tau*M*L_kappa) du^{j+1}>

are evaluated spectrally for every k and attached to the stage rows, so
a certified run shows lhs <= rhs <= 0 throughout. Checks for energy
monotonicity, the solution-norm radius, and volume conservation read
the record stream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diffmat import diff_matrix_entries
from .model import c0_bound
from .stepper import Stepper

__all__ = [
    "EnergyRecord",
    "EnergyMonitor",
    "CheckReport",
    "check_monotonic",
    "check_bounds",
    "check_volume",
    "check_energy_inequality",
    "bulk_descent_check",
    "write_energy_csv",
    "RunResult",
    "run_with_diagnostics",
]

CSV_HEADER = "n,stage,t,energy,l2,h2semi,maxnorm,mean,ineq_lhs,ineq_rhs"


@dataclass
class EnergyRecord:
    n: int
    stage: int
    t: float
    energy: float
    l2: float
    h2semi: float
    maxnorm: float
    mean: float
    ineq_lhs: float = 0.0
    ineq_rhs: float = 0.0


class EnergyMonitor:
    """Collects EnergyRecords from a Stepper via its stage/step hooks."""

    def __init__(self, stepper: Stepper):
        self.stepper = stepper
        self.model = stepper.model
        self.grid = stepper.model.grid
        self.records: list[EnergyRecord] = []
        self.max_embed_ratio = 0.0
        self._d = None
        mob = self.model.mob_symbol
        self._inv_mob = np.where(mob < 0.0, 1.0 / np.where(mob < 0.0, mob, -1.0), 0.0)

    def on_stage(self, n, i, t, u, uhat):
        grid = self.grid
        lam = grid.lap_symbol
        h2 = float(np.sqrt(grid.L**2 * np.sum(np.abs((1.0 + lam) * uhat) ** 2)))
        eps = self.model.epsilon
        pot = grid.h * grid.h * float(np.sum(0.25 * u**4 - 0.5 * eps * u**2))
        energy = 0.5 * h2 * h2 + pot
        l2 = grid.norm_l2(u)
        rec = EnergyRecord(n=n, stage=i, t=t, energy=energy, l2=l2, h2semi=h2,
                           maxnorm=grid.norm_max(u), mean=grid.field_mean(u))
        if not all(np.isfinite(v) for v in
                   (energy, l2, h2, rec.maxnorm, rec.mean)):
            raise FloatingPointError(f"non-finite diagnostic at step {n} stage {i}")
        if l2 + h2 > 0.0:
            self.max_embed_ratio = max(self.max_embed_ratio, rec.maxnorm / (l2 + h2))
        self.records.append(rec)

    def on_step(self, n, fields, hats):
        if self._d is None:
            self._d = diff_matrix_entries(self.stepper.method, self.stepper.z)
        s = self.stepper.method.s
        tau = self.stepper.tau
        L2 = self.grid.L**2
        deltas = [hats[j + 1] - hats[j] for j in range(s)]
        step_rows = self.records[-(s + 1):]
        e1 = step_rows[0].energy
        rhs = 0.0
        for i in range(s):
            for j in range(i + 1):
                rhs += (L2 / tau) * float(np.sum(
                    self._inv_mob * self._d[i, j]
                    * (deltas[i] * np.conj(deltas[j])).real))
            row = step_rows[i + 1]
            row.ineq_lhs = row.energy - e1
            row.ineq_rhs = rhs


# ---------------------------------------------------------------------------
# checks over a record stream
# ---------------------------------------------------------------------------

@dataclass
class CheckReport:
    name: str
    passed: bool
    detail: str
    worst: float = 0.0


def check_monotonic(records, rel_tol: float = 1e-9,
                    consecutive: bool = False) -> CheckReport:
    """Energy dissipation check at stage granularity.

    Default mode asserts what the stability theory guarantees: within a
    step every stage energy stays at or below the step-start energy, and
    the step-start energies decrease monotonically. ``consecutive=True``
    additionally demands decrease between successive stages, which can
    legitimately fail for tableaux whose abscissas are not monotone.
    """
    worst = 0.0
    first = None
    by_step: dict[int, list] = {}
    for r in records:
        by_step.setdefault(r.n, []).append(r)
    prev_start = None
    for n in sorted(by_step):
        rows = sorted(by_step[n], key=lambda r: r.stage)
        e1 = rows[0].energy
        if prev_start is not None:
            excess = e1 - prev_start
            tol = rel_tol * (1.0 + abs(prev_start))
            if excess > tol and first is None:
                first = (n, 1, excess)
            worst = max(worst, excess)
        prev_start = e1
        for k, r in enumerate(rows[1:], start=1):
            ref = rows[k - 1].energy if consecutive else e1
            excess = r.energy - ref
            tol = rel_tol * (1.0 + abs(ref))
            if excess > tol and first is None:
                first = (r.n, r.stage, excess)
            worst = max(worst, excess)
    if first is None:
        return CheckReport("monotonic", True,
                           f"energy nonincreasing (worst excess {worst:.3e})", worst)
    n, stage, excess = first
    return CheckReport("monotonic", False,
                       f"first energy increase {excess:.3e} at step {n} stage {stage}",
                       worst)


def check_bounds(records, C0: float, tol: float = 1e-9) -> CheckReport:
    """||u|| + ||(I+Lap)u|| <= C0 at every stage."""
    if not records:
        return CheckReport("bounds", True, "no stages recorded")
    worst = -np.inf
    first = None
    for r in records:
        excess = (r.l2 + r.h2semi) - C0
        worst = max(worst, excess)
        if excess > tol and first is None:
            first = (r.n, r.stage, excess)
    if first is None:
        return CheckReport("bounds", True,
                           f"norm radius holds (margin {-worst:.3e})", worst)
    return CheckReport("bounds", False,
                       f"radius exceeded by {first[2]:.3e} at step {first[0]} "
                       f"stage {first[1]}", worst)


def check_volume(records, L: float, tol: float = 1e-11) -> CheckReport:
    """Relative drift of <u, 1> over the run."""
    if not records:
        return CheckReport("volume", True, "no stages recorded")
    vol0 = records[0].mean * L * L
    worst = 0.0
    for r in records:
        drift = abs(r.mean * L * L - vol0) / (1.0 + abs(vol0))
        worst = max(worst, drift)
    passed = worst <= tol
    return CheckReport("volume", passed, f"max relative drift {worst:.3e}", worst)


def check_energy_inequality(records, tol: float = 1e-9) -> CheckReport:
    """Per completed step: lhs <= rhs <= 0 within tol*(1+|lhs|)."""
    if not records:
        return CheckReport("inequality", True, "no stages recorded")
    worst = 0.0
    first = None
    last_stage = max(r.stage for r in records)
    for r in records:
        if r.stage != last_stage:
            continue
        gap = r.ineq_lhs - r.ineq_rhs
        scale = 1.0 + abs(r.ineq_lhs)
        bad = max(gap / scale, r.ineq_rhs / scale)
        worst = max(worst, bad)
        if (gap > tol * scale or r.ineq_rhs > tol) and first is None:
            first = (r.n, gap, r.ineq_rhs)
    if first is None:
        return CheckReport("inequality", True,
                           f"lhs <= rhs <= 0 at every step (worst {worst:.3e})", worst)
    return CheckReport("inequality", False,
                       f"violated at step {first[0]}: gap {first[1]:.3e}, "
                       f"rhs {first[2]:.3e}", worst)


def bulk_descent_check(model, v_prev, v_next):
    """Both sides of the stabilized-bulk descent inequality for one update.

    Returns (lhs, rhs) with lhs = <v_next - v_prev,
    f_kappa(v_prev) - L_kappa(v_next + v_prev)/2> and rhs =
    E[v_prev] - E[v_next]; lhs <= rhs whenever kappa dominates |f'| on
    the relevant max-norm ball.
    """
    grid = model.grid
    diff = v_next - v_prev
    mid = grid.apply_symbol(v_next + v_prev, model.lkappa_symbol)
    lhs = grid.inner(diff, model.f_kappa(v_prev) - 0.5 * mid)
    rhs = model.energy(v_prev) - model.energy(v_next)
    return lhs, rhs


def write_energy_csv(path, records) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in records:
            fh.write(
                f"{r.n},{r.stage},{r.t:.17g},{r.energy:.17g},{r.l2:.17g},"
                f"{r.h2semi:.17g},{r.maxnorm:.17g},{r.mean:.17g},"
                f"{r.ineq_lhs:.17g},{r.ineq_rhs:.17g}\n"
            )


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------

@dataclass
class RunResult:
    final: np.ndarray
    records: list
    reports: list
    E0: float
    C0: float
    max_embed_ratio: float

    @property
    def passed(self) -> bool:
        return all(rep.passed for rep in self.reports)


def run_with_diagnostics(stepper: Stepper, n_steps: int,
                         rel_tol: float = 1e-9,
                         check_ineq: bool = True,
                         consecutive: bool = False) -> RunResult:
    """Run a stepper under full monitoring and evaluate all run checks."""
    model = stepper.model
    E0 = model.energy(stepper.u)
    C0 = c0_bound(E0, model.epsilon)
    monitor = EnergyMonitor(stepper)
    on_step = monitor.on_step if check_ineq else None
    stepper.run(n_steps, on_stage=monitor.on_stage, on_step=on_step)
    reports = [
        check_monotonic(monitor.records, rel_tol=rel_tol, consecutive=consecutive),
        check_bounds(monitor.records, C0),
    ]
    if model.conserves_volume:
        reports.append(check_volume(monitor.records, model.grid.L))
    if check_ineq:
        reports.append(check_energy_inequality(monitor.records))
    return RunResult(final=stepper.u, records=monitor.records, reports=reports,
                     E0=E0, C0=C0, max_embed_ratio=monitor.max_embed_ratio)
