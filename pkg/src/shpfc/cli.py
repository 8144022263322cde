"""Command-line front end: runs, eigenvalue scans, convergence studies, self-tests.

Subcommands
-----------
simulate     time-integrate one configuration under full diagnostics;
             writes the stage-resolved energy CSV, a final-field
             snapshot, and a pass/fail run summary.
scan-eigs    scan the stage differentiation matrices of the registered
             methods and certify their eigenvalue floors; writes one
             CSV curve per method plus a certification report.
convergence  self-refinement order study (or exact-solution study with
             the linearized-bulk hook).
selftest     quick oracle suites: phi-function quadrature, kernel
             inversion identity, dual-formulation stepping, Green
             identities.

Configuration is flat INI-style key=value text with sections [run],
[initial], [output], [checks]; every key has a matching command-line
flag and flags override the file. Random initial data uses the PCG64
generator with an explicit seed, so runs reproduce bit-for-bit.

Exit codes: 0 all enabled checks passed; 1 a check or certification
failed; 2 configuration or I/O error; 3 the run blew up.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import io
import math
import os
import struct
import sys

import numpy as np

from . import diffmat
from .diffmat import certify_all, default_z_grid, doc_kernels, diff_matrix_entries
from .methods import build_method, registered_methods
from .model import MOBILITY_PFC, MOBILITY_SH, ModelSpec, c0_bound, kappa_floor
from .phi import phi
from .spectral import SpectralGrid
from .stepper import BlowUpError, Stepper
from .diagnostics import run_with_diagnostics, write_energy_csv

__all__ = [
    "RunConfig",
    "load_config",
    "config_text",
    "build_initial",
    "write_snapshot",
    "read_snapshot",
    "main",
]

SNAPSHOT_MAGIC = b"SHPFCv1\x00"

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_BLOWUP = 3


@dataclasses.dataclass
class RunConfig:
    model: str = "sh"
    method: str = "eerk2"
    variant: str = "tif"            # integrating-factor correction variant
    method_params: dict = dataclasses.field(default_factory=dict)
    M: int = 64
    L: float = 32.0
    epsilon: float = 0.25
    kappa: object = 2.0             # float, or the string "auto"
    kappa_radius_factor: float = 1.0
    tau: float = 0.1
    steps: int = 200
    ic_kind: str = "random"         # zero | constant | random | cosine | file
    ic_amplitude: float = 0.1
    ic_seed: int | None = 1
    ic_value: float = 0.0
    ic_mode: tuple = (1, 0)
    ic_path: str = ""
    out_energy_csv: str = ""
    out_snapshot: str = ""
    out_summary: str = ""
    check_monotonic: bool = True
    check_bounds: bool = True
    check_volume: bool = True
    check_inequality: bool = True
    rel_tol: float = 1e-9
    consecutive: bool = False

    def validate(self):
        if self.model not in (MOBILITY_SH, MOBILITY_PFC):
            raise ValueError(f"model must be sh or pfc, got {self.model!r}")
        if self.ic_kind not in ("zero", "constant", "random", "cosine", "file"):
            raise ValueError(f"unknown initial condition {self.ic_kind!r}")
        if self.ic_kind == "random" and self.ic_seed is None:
            raise ValueError("random initial data requires an explicit seed")
        if self.ic_kind == "file" and not self.ic_path:
            raise ValueError("file initial data requires a path")
        if self.steps < 0:
            raise ValueError("steps must be nonnegative")
        if isinstance(self.kappa, str) and self.kappa != "auto":
            raise ValueError(f"kappa must be a number or 'auto', got {self.kappa!r}")


def load_config(path_or_text: str, from_text: bool = False) -> RunConfig:
    """Parse a config file (or raw text) into a RunConfig."""
    cp = configparser.ConfigParser()
    if from_text:
        cp.read_string(path_or_text)
    else:
        if not cp.read(path_or_text):
            raise FileNotFoundError(path_or_text)
    cfg = RunConfig()
    run = cp["run"] if cp.has_section("run") else {}
    cfg.model = run.get("model", cfg.model)
    cfg.method = run.get("method", cfg.method)
    cfg.variant = run.get("variant", cfg.variant)
    cfg.M = int(run.get("m", cfg.M))
    cfg.L = float(run.get("l", cfg.L))
    cfg.epsilon = float(run.get("epsilon", cfg.epsilon))
    kap = run.get("kappa", cfg.kappa)
    cfg.kappa = kap if kap == "auto" else float(kap)
    cfg.kappa_radius_factor = float(run.get("kappa_radius_factor",
                                            cfg.kappa_radius_factor))
    cfg.tau = float(run.get("tau", cfg.tau))
    cfg.steps = int(run.get("steps", cfg.steps))
    cfg.method_params = {}
    for key in ("a33", "a43", "c2", "c3"):
        if key in run:
            cfg.method_params[key] = float(run[key])
    if cp.has_section("initial"):
        ini = cp["initial"]
        cfg.ic_kind = ini.get("kind", cfg.ic_kind)
        cfg.ic_amplitude = float(ini.get("amplitude", cfg.ic_amplitude))
        if "seed" in ini:
            cfg.ic_seed = int(ini["seed"])
        cfg.ic_value = float(ini.get("value", cfg.ic_value))
        cfg.ic_mode = (int(ini.get("mode_x", cfg.ic_mode[0])),
                       int(ini.get("mode_y", cfg.ic_mode[1])))
        cfg.ic_path = ini.get("path", cfg.ic_path)
    if cp.has_section("output"):
        out = cp["output"]
        cfg.out_energy_csv = out.get("energy_csv", cfg.out_energy_csv)
        cfg.out_snapshot = out.get("snapshot", cfg.out_snapshot)
        cfg.out_summary = out.get("summary", cfg.out_summary)
    if cp.has_section("checks"):
        ck = cp["checks"]
        cfg.check_monotonic = ck.getboolean("monotonic", cfg.check_monotonic)
        cfg.check_bounds = ck.getboolean("bounds", cfg.check_bounds)
        cfg.check_volume = ck.getboolean("volume", cfg.check_volume)
        cfg.check_inequality = ck.getboolean("inequality", cfg.check_inequality)
        cfg.rel_tol = float(ck.get("rel_tol", cfg.rel_tol))
        cfg.consecutive = ck.getboolean("consecutive", cfg.consecutive)
    cfg.validate()
    return cfg


def config_text(cfg: RunConfig) -> str:
    """Serialize a RunConfig; load_config(config_text(c), from_text=True) == c."""
    buf = io.StringIO()
    buf.write("[run]\n")
    buf.write(f"model = {cfg.model}\n")
    buf.write(f"method = {cfg.method}\n")
    buf.write(f"variant = {cfg.variant}\n")
    buf.write(f"m = {cfg.M}\n")
    buf.write(f"l = {cfg.L!r}\n")
    buf.write(f"epsilon = {cfg.epsilon!r}\n")
    buf.write(f"kappa = {cfg.kappa if isinstance(cfg.kappa, str) else repr(cfg.kappa)}\n")
    buf.write(f"kappa_radius_factor = {cfg.kappa_radius_factor!r}\n")
    buf.write(f"tau = {cfg.tau!r}\n")
    buf.write(f"steps = {cfg.steps}\n")
    for key, val in sorted(cfg.method_params.items()):
        buf.write(f"{key} = {val!r}\n")
    buf.write("\n[initial]\n")
    buf.write(f"kind = {cfg.ic_kind}\n")
    buf.write(f"amplitude = {cfg.ic_amplitude!r}\n")
    if cfg.ic_seed is not None:
        buf.write(f"seed = {cfg.ic_seed}\n")
    buf.write(f"value = {cfg.ic_value!r}\n")
    buf.write(f"mode_x = {cfg.ic_mode[0]}\nmode_y = {cfg.ic_mode[1]}\n")
    if cfg.ic_path:
        buf.write(f"path = {cfg.ic_path}\n")
    buf.write("\n[output]\n")
    if cfg.out_energy_csv:
        buf.write(f"energy_csv = {cfg.out_energy_csv}\n")
    if cfg.out_snapshot:
        buf.write(f"snapshot = {cfg.out_snapshot}\n")
    if cfg.out_summary:
        buf.write(f"summary = {cfg.out_summary}\n")
    buf.write("\n[checks]\n")
    buf.write(f"monotonic = {str(cfg.check_monotonic).lower()}\n")
    buf.write(f"bounds = {str(cfg.check_bounds).lower()}\n")
    buf.write(f"volume = {str(cfg.check_volume).lower()}\n")
    buf.write(f"inequality = {str(cfg.check_inequality).lower()}\n")
    buf.write(f"rel_tol = {cfg.rel_tol!r}\n")
    buf.write(f"consecutive = {str(cfg.consecutive).lower()}\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# initial conditions and snapshots
# ---------------------------------------------------------------------------

def build_initial(cfg: RunConfig, grid: SpectralGrid) -> np.ndarray:
    if cfg.ic_kind == "zero":
        return np.zeros((grid.M, grid.M))
    if cfg.ic_kind == "constant":
        return np.full((grid.M, grid.M), cfg.ic_value)
    if cfg.ic_kind == "random":
        rng = np.random.Generator(np.random.PCG64(cfg.ic_seed))
        a = cfg.ic_amplitude
        return rng.uniform(-a, a, size=(grid.M, grid.M))
    if cfg.ic_kind == "cosine":
        mx, my = cfg.ic_mode
        return cfg.ic_amplitude * np.cos(grid.nu * (mx * grid.x + my * grid.y))
    if cfg.ic_kind == "file":
        M, L, _t, values = read_snapshot(cfg.ic_path)
        if M != grid.M or abs(L - grid.L) > 1e-12 * grid.L:
            raise ValueError(
                f"snapshot grid ({M}, L={L}) does not match run grid "
                f"({grid.M}, L={grid.L})")
        return values
    raise ValueError(cfg.ic_kind)


def write_snapshot(path: str, grid: SpectralGrid, t: float, values: np.ndarray) -> None:
    """32-byte header (magic, M, L, t) then M*M little-endian float64, row-major."""
    header = struct.pack("<8sqdd", SNAPSHOT_MAGIC, grid.M, grid.L, float(t))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(values, dtype="<f8").tobytes())


def read_snapshot(path: str):
    with open(path, "rb") as fh:
        header = fh.read(32)
        if len(header) != 32:
            raise ValueError(f"{path}: truncated snapshot header")
        magic, M, L, t = struct.unpack("<8sqdd", header)
        if magic != SNAPSHOT_MAGIC:
            raise ValueError(f"{path}: bad snapshot magic {magic!r}")
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != M * M:
        raise ValueError(f"{path}: expected {M * M} values, found {data.size}")
    return int(M), float(L), float(t), data.reshape(M, M).astype(float)


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def _resolve_kappa(cfg: RunConfig, model_grid: SpectralGrid, u0: np.ndarray) -> float:
    if not isinstance(cfg.kappa, str):
        return float(cfg.kappa)
    # fold the unknown embedding constant into a user radius knob
    from .model import free_energy
    E0 = free_energy(model_grid, u0, cfg.epsilon)
    radius = 4.0 * c0_bound(E0, cfg.epsilon) * cfg.kappa_radius_factor
    return kappa_floor(radius, cfg.epsilon)


def cmd_simulate(cfg: RunConfig, out=sys.stdout) -> int:
    try:
        cfg.validate()
        grid = SpectralGrid(cfg.M, cfg.L)
        u0 = build_initial(cfg, grid)
        kappa = _resolve_kappa(cfg, grid, u0)
        params = dict(cfg.method_params)
        spec0 = build_method(cfg.method)
        if spec0.family in ("cifrk_tif", "cifrk_nif"):
            params["variant"] = cfg.variant
        method = build_method(cfg.method, **params)
        model = ModelSpec(grid, cfg.model, cfg.epsilon, kappa)
        stepper = Stepper(model, method, cfg.tau, u0)
    except (ValueError, KeyError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    try:
        result = run_with_diagnostics(
            stepper, cfg.steps, rel_tol=cfg.rel_tol,
            check_ineq=cfg.check_inequality, consecutive=cfg.consecutive)
    except BlowUpError as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP

    enabled = {"monotonic": cfg.check_monotonic, "bounds": cfg.check_bounds,
               "volume": cfg.check_volume, "inequality": cfg.check_inequality}
    reports = [r for r in result.reports if enabled.get(r.name, True)]
    passed = all(r.passed for r in reports)

    lines = [
        f"model={cfg.model} method={method.label} variant="
        f"{cfg.variant if method.family.startswith('cifrk') else '-'}",
        f"grid M={cfg.M} L={cfg.L} epsilon={cfg.epsilon} kappa={kappa} "
        f"tau={cfg.tau} steps={cfg.steps}",
        f"E0={result.E0:.17g} C0={result.C0:.17g}",
        f"max_embed_ratio={result.max_embed_ratio:.17g}  (observational only)",
    ]
    from .methods import certified_eig_bounds
    floors = certified_eig_bounds()
    if cfg.method in floors:
        # informational step-size threshold with the configured radius knob;
        # the true constant involves the non-numeric embedding constant
        lam = floors[cfg.method]
        radius = 4.0 * result.C0 * cfg.kappa_radius_factor
        ckap = cfg.epsilon + kappa + (radius / 4.0) ** 2
        s = method.s
        if cfg.model == MOBILITY_SH:
            tau0 = min(lam / (2.0 * ckap * s), 6.0 * lam / (ckap**2 * s))
            lines.append(
                f"tau0 hint = min(floor/(2*Ck*s), 6*floor/(Ck^2*s)) = {tau0:.6g} "
                f"with Ck = eps+kappa+(radius/4)^2 = {ckap:.6g} (informational)")
        else:
            tau0 = lam / (4.0 * ckap * s)
            lines.append(
                f"tau0 hint = floor/(4*Ck*s) = {tau0:.6g} with Ck = "
                f"eps+kappa+(radius/4)^2 = {ckap:.6g} (informational; the "
                f"seminorm branch needs the non-numeric gradient constant)")
    for rep in reports:
        lines.append(f"check {rep.name}: {'PASS' if rep.passed else 'FAIL'} - {rep.detail}")
    lines.append(f"result: {'PASS' if passed else 'FAIL'}")
    text = "\n".join(lines) + "\n"
    out.write(text)

    try:
        if cfg.out_energy_csv:
            write_energy_csv(cfg.out_energy_csv, result.records)
        if cfg.out_snapshot:
            write_snapshot(cfg.out_snapshot, grid, cfg.steps * cfg.tau, result.final)
        if cfg.out_summary:
            with open(cfg.out_summary, "w", encoding="utf-8") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    return EXIT_OK if passed else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# scan-eigs
# ---------------------------------------------------------------------------

def cmd_scan_eigs(methods, out_dir: str = "", n_points: int = 2000,
                  z_min: float = -1.0e4, out=sys.stdout) -> int:
    if not methods:
        print("config error: empty method list", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    known = set(registered_methods())
    bad = [m for m in methods if m not in known]
    if bad:
        print(f"config error: unknown methods {bad}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    grid = default_z_grid(n_points=n_points, z_min=z_min)
    records = certify_all(methods, grid)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    all_pass = True
    report_lines = ["method        floor     min         at z          limit(z->0)  tail slope   status"]
    for rec in records:
        all_pass &= rec.passed
        for scan in rec.scans:
            report_lines.append(
                f"{scan.label:13s} {rec.eig_bound:<9.6g} {scan.refined_min:<11.8g} "
                f"{scan.refined_argmin:<13.6g} {scan.limit_zero:<12.8g} "
                f"{scan.tail_slope:<12.6g} {'PASS' if rec.passed else 'FAIL'}")
        for w in rec.warnings:
            report_lines.append(f"  WARN {w}")
        if out_dir:
            diffmat.write_curve_csv(
                os.path.join(out_dir, f"scan_{rec.name}.csv"), rec.scans)
    report_lines.append(f"certification: {'PASS' if all_pass else 'FAIL'} "
                        f"({len(records)} methods)")
    text = "\n".join(report_lines) + "\n"
    out.write(text)
    if out_dir:
        with open(os.path.join(out_dir, "certification.txt"), "w",
                  encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK if all_pass else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# convergence
# ---------------------------------------------------------------------------

def _exact_linear_final(model: ModelSpec, u0: np.ndarray, T: float) -> np.ndarray:
    # u' = M (L_kappa - kappa - eps) u, diagonal per mode
    grid = model.grid
    sym = model.mob_symbol * (model.lkappa_symbol - model.kappa - model.epsilon)
    return grid.to_physical(np.exp(T * sym) * grid.to_fourier(u0))


def observed_orders(method_name: str, levels: int = 6, tau0: float = 0.2,
                    steps0: int = 10, M: int = 16, L: float = 32.0,
                    epsilon: float = 0.25, kappa: float = 2.0,
                    model_kind: str = MOBILITY_SH, amplitude: float = 0.1,
                    linear_only: bool = False, variant: str = "tif"):
    """Errors and pairwise orders of a tau-refinement study.

    The finest level is the reference (or the exact per-mode solution
    when the linearized-bulk hook is active). The headline order
    averages the pair estimates whose finer level sits at least three
    refinements from the reference; those are free of self-reference
    bias.
    """
    if levels < 3:
        raise ValueError("need at least 3 refinement levels")
    grid = SpectralGrid(M, L)
    model = ModelSpec(grid, model_kind, epsilon, kappa)
    u0 = amplitude * np.cos(grid.nu * grid.x)

    params = {}
    spec0 = build_method(method_name)
    if spec0.family in ("cifrk_tif", "cifrk_nif"):
        params["variant"] = variant
    finals = []
    for k in range(levels):
        method = build_method(method_name, **params)
        stepper = Stepper(model, method, tau0 / 2**k, u0, linear_only=linear_only)
        stepper.run(steps0 * 2**k)
        finals.append(stepper.u)
    if linear_only:
        ref = _exact_linear_final(model, u0, tau0 * steps0)
        errs = [grid.norm_max(f - ref) for f in finals]
        pairs = [np.log2(errs[k] / errs[k + 1]) for k in range(levels - 1)]
        headline = float(np.mean(pairs[:max(1, levels - 3)]))
    else:
        ref = finals[-1]
        errs = [grid.norm_max(f - ref) for f in finals[:-1]]
        pairs = [np.log2(errs[k] / errs[k + 1]) for k in range(len(errs) - 1)]
        unbiased = [p for k, p in enumerate(pairs) if (levels - 1) - (k + 1) >= 3]
        headline = float(np.mean(unbiased if unbiased else pairs[:1]))
    return errs, pairs, headline


def cmd_convergence(methods, levels: int, tau0: float, steps0: int,
                    M: int, L: float, epsilon: float, kappa: float,
                    model_kind: str, linear_only: bool, out=sys.stdout) -> int:
    if levels < 3:
        print("config error: need at least 3 levels", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    if not methods:
        print("config error: empty method list", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    out.write("method        expecting  observed   pair orders\n")
    status = EXIT_OK
    for name in methods:
        try:
            spec = build_method(name)
            _errs, pairs, headline = observed_orders(
                name, levels=levels, tau0=tau0, steps0=steps0, M=M, L=L,
                epsilon=epsilon, kappa=kappa, model_kind=model_kind,
                linear_only=linear_only)
        except BlowUpError as exc:
            print(f"blow-up during {name}: {exc}", file=sys.stderr)
            return EXIT_BLOWUP
        except KeyError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG_ERROR
        pair_text = " ".join(f"{p:.3f}" for p in pairs)
        out.write(f"{name:13s} {spec.order:<10d} {headline:<10.4f} {pair_text}\n")
    return status


# ---------------------------------------------------------------------------
# selftest
# ---------------------------------------------------------------------------

def _selftest_phi() -> float:
    from scipy.integrate import quad
    worst = 0.0
    zs = [-50.0, -20.0, -5.0, -1.0, -0.4, -0.01, 0.0]
    for z in zs:
        for j in range(5):
            if j == 0:
                exact = np.exp(z)
            else:
                val, _err = quad(lambda s: np.exp((1 - s) * z) * s**(j - 1)
                                 / math.factorial(j - 1), 0.0, 1.0,
                                 epsabs=1e-15, epsrel=1e-14, limit=200)
                exact = val
            worst = max(worst, abs(phi(j, z) - exact))
    return worst


def _selftest_doc() -> float:
    rng = np.random.Generator(np.random.PCG64(2024))
    worst = 0.0
    zs = -np.exp(rng.uniform(np.log(1e-6), np.log(1e4), size=50))
    for name in registered_methods():
        from .methods import cif_variants
        for variant in cif_variants(name):
            spec = build_method(name) if variant is None else build_method(
                name, variant=variant)
            for z in zs:
                D = diff_matrix_entries(spec, float(z))
                theta = doc_kernels(D).theta
                worst = max(worst, float(np.abs(theta @ D - np.eye(spec.s)).max()))
    return worst


def _selftest_dual() -> float:
    rng = np.random.Generator(np.random.PCG64(7))
    grid = SpectralGrid(32, 32.0)
    worst = 0.0
    for name in registered_methods():
        u0 = rng.uniform(-0.1, 0.1, size=(32, 32))
        for kind in (MOBILITY_SH, MOBILITY_PFC):
            model = ModelSpec(grid, kind, 0.25, 2.0)
            method = build_method(name)
            a = Stepper(model, method, 0.1, u0)
            b = Stepper(model, method, 0.1, u0)
            a.step()
            b.step(differential_form=True)
            worst = max(worst, grid.norm_max(a.u - b.u))
    return worst


def _selftest_green() -> float:
    rng = np.random.Generator(np.random.PCG64(11))
    grid = SpectralGrid(32, 17.0)
    worst = 0.0
    for _ in range(20):
        v = rng.standard_normal((32, 32))
        w = rng.standard_normal((32, 32))
        lap_v = grid.apply_symbol(v, grid.lap_symbol)
        lap2_v = grid.apply_symbol(v, grid.lap_symbol**2)
        lap_w = grid.apply_symbol(w, grid.lap_symbol)
        scale = max(1.0, abs(grid.inner(lap_v, lap_w)))
        worst = max(worst, abs(grid.inner(-lap_v, w) - grid.inner_grad(v, w)) / scale)
        worst = max(worst, abs(grid.inner(lap2_v, w) - grid.inner(lap_v, lap_w)) / scale)
    return worst


def cmd_selftest(out=sys.stdout) -> int:
    suites = [
        ("phi-vs-quadrature", _selftest_phi, 1e-13),
        ("kernel-inversion-identity", _selftest_doc, 1e-12),
        ("dual-formulation-stepping", _selftest_dual, 1e-10),
        ("green-identities", _selftest_green, 1e-11),
    ]
    failed = []
    for name, fn, tol in suites:
        worst = fn()
        ok = worst <= tol
        out.write(f"{name:28s} worst={worst:.3e} tol={tol:.0e} "
                  f"{'PASS' if ok else 'FAIL'}\n")
        if not ok:
            failed.append(name)
    if failed:
        out.write(f"selftest FAILED: {', '.join(failed)}\n")
        return EXIT_CHECK_FAILED
    out.write("selftest PASS\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_simulate_flags(p):
    p.add_argument("--config", help="config file; flags override its values")
    p.add_argument("--model", choices=["sh", "pfc"])
    p.add_argument("--method")
    p.add_argument("--variant", choices=["tif", "nif"])
    p.add_argument("--grid-size", type=int, dest="M")
    p.add_argument("--domain", type=float, dest="L")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--kappa")
    p.add_argument("--kappa-radius-factor", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--ic", choices=["zero", "constant", "random", "cosine", "file"])
    p.add_argument("--amplitude", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--value", type=float)
    p.add_argument("--mode-x", type=int)
    p.add_argument("--mode-y", type=int)
    p.add_argument("--ic-file")
    p.add_argument("--energy-csv")
    p.add_argument("--snapshot")
    p.add_argument("--summary")
    p.add_argument("--rel-tol", type=float)
    p.add_argument("--consecutive", action="store_true", default=None,
                   help="also require decrease between successive stages")
    p.add_argument("--no-inequality", action="store_true", default=None)


def _apply_simulate_flags(cfg: RunConfig, args) -> RunConfig:
    if args.model is not None:
        cfg.model = args.model
    if args.method is not None:
        cfg.method = args.method
    if args.variant is not None:
        cfg.variant = args.variant
    if args.M is not None:
        cfg.M = args.M
    if args.L is not None:
        cfg.L = args.L
    if args.epsilon is not None:
        cfg.epsilon = args.epsilon
    if args.kappa is not None:
        cfg.kappa = args.kappa if args.kappa == "auto" else float(args.kappa)
    if args.kappa_radius_factor is not None:
        cfg.kappa_radius_factor = args.kappa_radius_factor
    if args.tau is not None:
        cfg.tau = args.tau
    if args.steps is not None:
        cfg.steps = args.steps
    if args.ic is not None:
        cfg.ic_kind = args.ic
    if args.amplitude is not None:
        cfg.ic_amplitude = args.amplitude
    if args.seed is not None:
        cfg.ic_seed = args.seed
    if args.value is not None:
        cfg.ic_value = args.value
    if args.mode_x is not None:
        cfg.ic_mode = (args.mode_x, cfg.ic_mode[1])
    if args.mode_y is not None:
        cfg.ic_mode = (cfg.ic_mode[0], args.mode_y)
    if args.ic_file is not None:
        cfg.ic_path = args.ic_file
    if args.energy_csv is not None:
        cfg.out_energy_csv = args.energy_csv
    if args.snapshot is not None:
        cfg.out_snapshot = args.snapshot
    if args.summary is not None:
        cfg.out_summary = args.summary
    if args.rel_tol is not None:
        cfg.rel_tol = args.rel_tol
    if args.consecutive:
        cfg.consecutive = True
    if args.no_inequality:
        cfg.check_inequality = False
    return cfg


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="shpfc",
        description="Energy-stable Runge-Kutta solvers for the SH/PFC gradient flows")
    sub = parser.add_subparsers(dest="command")

    p_sim = sub.add_parser("simulate", help="run one configuration with diagnostics")
    _add_simulate_flags(p_sim)

    p_scan = sub.add_parser("scan-eigs", help="certify eigenvalue floors")
    p_scan.add_argument("--methods", default="all",
                        help="comma-separated registry names, or 'all'")
    p_scan.add_argument("--out-dir", default="")
    p_scan.add_argument("--points", type=int, default=2000)
    p_scan.add_argument("--z-min", type=float, default=-1.0e4)

    p_conv = sub.add_parser("convergence", help="tau-refinement order study")
    p_conv.add_argument("--methods", default="all")
    p_conv.add_argument("--levels", type=int, default=6)
    p_conv.add_argument("--tau0", type=float, default=0.2)
    p_conv.add_argument("--steps0", type=int, default=10)
    p_conv.add_argument("--grid-size", type=int, default=16, dest="M")
    p_conv.add_argument("--domain", type=float, default=32.0, dest="L")
    p_conv.add_argument("--epsilon", type=float, default=0.25)
    p_conv.add_argument("--kappa", type=float, default=2.0)
    p_conv.add_argument("--model", choices=["sh", "pfc"], default="sh")
    p_conv.add_argument("--linear-hook", action="store_true",
                        help="linearized bulk; compare against the exact solution")

    sub.add_parser("selftest", help="run the oracle suites")

    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_CONFIG_ERROR

    if args.command == "simulate":
        try:
            cfg = load_config(args.config) if args.config else RunConfig()
            cfg = _apply_simulate_flags(cfg, args)
            cfg.validate()
        except (ValueError, OSError, configparser.Error) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG_ERROR
        return cmd_simulate(cfg)

    if args.command == "scan-eigs":
        names = (list(registered_methods()) if args.methods == "all"
                 else [m for m in args.methods.split(",") if m])
        return cmd_scan_eigs(names, out_dir=args.out_dir, n_points=args.points,
                             z_min=args.z_min)

    if args.command == "convergence":
        names = (list(registered_methods()) if args.methods == "all"
                 else [m for m in args.methods.split(",") if m])
        return cmd_convergence(names, args.levels, args.tau0, args.steps0,
                               args.M, args.L, args.epsilon, args.kappa,
                               args.model, args.linear_hook)

    if args.command == "selftest":
        return cmd_selftest()

    parser.print_help()
    return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
