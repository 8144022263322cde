"""Energy-stable Runge-Kutta solvers for the Swift-Hohenberg and
phase-field-crystal gradient flows, with a stability toolkit that builds
each method's stage differentiation matrix, certifies its eigenvalue
floor, and monitors the free-energy dissipation law at every stage.
"""

from .spectral import SpectralGrid
from .model import (
    MOBILITY_PFC,
    MOBILITY_SH,
    ModelSpec,
    bulk_f,
    bulk_f_kappa,
    c0_bound,
    free_energy,
    kappa_floor,
)
from .phi import phi, phi_stack
from .methods import (
    MethodSpec,
    build_method,
    certified_eig_bounds,
    cifrk_coeff,
    eerk_coeff,
    ierk_tableau,
    registered_methods,
)
from .diffmat import (
    CertRecord,
    DiffMatrixSample,
    DocKernels,
    ScanResult,
    certify_all,
    certify_method,
    default_z_grid,
    diff_matrix,
    diff_matrix_entries,
    doc_kernels,
    jacobi_eigvals,
    scan_lambda,
    sym_min_eig,
)
from .stepper import BlowUpError, Stepper
from .diagnostics import (
    EnergyMonitor,
    EnergyRecord,
    RunResult,
    bulk_descent_check,
    check_bounds,
    check_energy_inequality,
    check_monotonic,
    check_volume,
    run_with_diagnostics,
    write_energy_csv,
)

__version__ = "0.1.0"

__all__ = [
    "SpectralGrid",
    "ModelSpec",
    "MOBILITY_SH",
    "MOBILITY_PFC",
    "bulk_f",
    "bulk_f_kappa",
    "free_energy",
    "c0_bound",
    "kappa_floor",
    "phi",
    "phi_stack",
    "MethodSpec",
    "build_method",
    "registered_methods",
    "certified_eig_bounds",
    "ierk_tableau",
    "eerk_coeff",
    "cifrk_coeff",
    "DiffMatrixSample",
    "DocKernels",
    "ScanResult",
    "CertRecord",
    "diff_matrix",
    "diff_matrix_entries",
    "doc_kernels",
    "sym_min_eig",
    "jacobi_eigvals",
    "default_z_grid",
    "scan_lambda",
    "certify_method",
    "certify_all",
    "Stepper",
    "BlowUpError",
    "EnergyRecord",
    "EnergyMonitor",
    "RunResult",
    "run_with_diagnostics",
    "check_monotonic",
    "check_bounds",
    "check_volume",
    "check_energy_inequality",
    "bulk_descent_check",
    "write_energy_csv",
    "__version__",
]
