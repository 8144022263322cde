"""Registry of the certified Runge-Kutta methods.

Three families are provided, all globally stiffly accurate with
abscissas c_1 = 0 and c_{s+1} = 1:

* ``ierk``   - implicit-explicit pairs with constant Butcher tableaux;
  the implicit part treats the stiff operator, the explicit part the
  stabilized bulk.
* ``eerk``   - explicit exponential methods whose coefficient matrix
  A(z) is assembled from phi functions of the scaled operator.
* ``cifrk``  - integrating-factor methods corrected to preserve steady
  states for any step size, in the telescopic (``tif``) and
  bulk-translation (``nif``) variants, built on the classical Heun and
  Ralston explicit schemes.

An uncorrected integrating-factor scheme (``lawson``) is registered as
a reference stepper only; it is excluded from stability certification.

Coefficient generators accept scalar or ndarray ``z`` (the per-mode
product tau * mobility * stabilized-operator, always <= 0) and return
lower-triangular coefficients of shape ``(s, s) + z.shape``.
"""

from __future__ import annotations

import math

import numpy as np

from .phi import phi_stack

__all__ = [
    "MethodSpec",
    "build_method",
    "registered_methods",
    "certified_eig_bounds",
    "ierk_tableau",
    "eerk_coeff",
    "cifrk_coeff",
    "FAMILY_IERK",
    "FAMILY_EERK",
    "FAMILY_CIFRK_TIF",
    "FAMILY_CIFRK_NIF",
    "FAMILY_LAWSON",
]

FAMILY_IERK = "ierk"
FAMILY_EERK = "eerk"
FAMILY_CIFRK_TIF = "cifrk_tif"
FAMILY_CIFRK_NIF = "cifrk_nif"
FAMILY_LAWSON = "lawson"

_ROW_SUM_TOL = 1e-14
_SQRT2 = math.sqrt(2.0)


class MethodSpec:
    """One concrete method: identity, abscissas, and coefficient source.

    For the ierk family the constant lower-triangular pair
    ``(A_imp, A_exp)`` holds the implicit block ``a_{i+1,j+1}`` and the
    explicit block ``ahat_{i+1,j}`` of the steady-state preserving form
    (the stiff first-column entries drop out). For the exponential
    families ``coeff_matrix(z)`` evaluates A(z).
    """

    def __init__(self, name, family, c, order, params, full_imp=None,
                 full_exp=None, matrix_fn=None):
        self.name = name
        self.family = family
        self.c = np.asarray(c, dtype=float)
        self.s = len(self.c) - 1
        self.order = order
        self.params = dict(params)
        self.full_imp = None if full_imp is None else np.asarray(full_imp, dtype=float)
        self.full_exp = None if full_exp is None else np.asarray(full_exp, dtype=float)
        # blocks entering the steady-state preserving form: the implicit
        # part loses its first column, the explicit part its empty last one
        self.A_imp = None if full_imp is None else self.full_imp[1:, 1:]
        self.A_exp = None if full_exp is None else self.full_exp[1:, :self.s]
        self._matrix_fn = matrix_fn
        if self.c[0] != 0.0 or self.c[-1] != 1.0:
            raise ValueError(f"{name}: abscissas must start at 0 and end at 1")

    def coeff_matrix(self, z):
        """Lower-triangular stage coefficients A(z); z <= 0 scalar or array."""
        if self._matrix_fn is None:
            raise ValueError(f"{self.name} has constant tableaux; use A_imp / A_exp")
        z = np.asarray(z, dtype=float)
        if z.size and z.max() > 0.0:
            raise ValueError("coefficients are defined for z <= 0 only")
        return self._matrix_fn(z)

    @property
    def label(self) -> str:
        extra = ",".join(f"{k}={v:g}" for k, v in self.params.items() if k != "variant")
        return f"{self.name}({extra})" if extra else self.name

    def __repr__(self) -> str:
        return f"MethodSpec({self.name!r}, family={self.family!r}, s={self.s})"


# ---------------------------------------------------------------------------
# implicit-explicit tableaux
# ---------------------------------------------------------------------------

def _check_row_sums(name, full_imp, full_exp, c):
    """Both tableau blocks must have row sums equal to the abscissas."""
    err_i = np.abs(full_imp.sum(axis=1) - c).max()
    err_e = np.abs(full_exp.sum(axis=1) - c).max()
    if max(err_i, err_e) > _ROW_SUM_TOL:
        raise AssertionError(
            f"{name}: tableau row sums deviate from abscissas by "
            f"{max(err_i, err_e):.3e}"
        )


def _ierk2(a33: float) -> MethodSpec:
    lo = (1.0 + _SQRT2) / 4.0
    if a33 < lo - 1e-12:
        raise ValueError(f"ierk2 requires a33 >= (1+sqrt(2))/4 ~ {lo:.6f}, got {a33}")
    c = np.array([0.0, _SQRT2 / 2.0, 1.0])
    full_imp = np.array([
        [0.0, 0.0, 0.0],
        [_SQRT2 / 2.0 - a33, a33, 0.0],
        [(_SQRT2 - 1.0 + (2.0 - _SQRT2) * a33) / _SQRT2, (1.0 - 2.0 * a33) / _SQRT2, a33],
    ])
    full_exp = np.array([
        [0.0, 0.0, 0.0],
        [_SQRT2 / 2.0, 0.0, 0.0],
        [(2.0 - _SQRT2) / 2.0, _SQRT2 / 2.0, 0.0],
    ])
    _check_row_sums("ierk2", full_imp, full_exp, c)
    return MethodSpec("ierk2", FAMILY_IERK, c, order=2, params={"a33": a33},
                      full_imp=full_imp, full_exp=full_exp)


def _ierk3(a43: float) -> MethodSpec:
    if not -0.633312 - 1e-12 <= a43 <= -0.371114 + 1e-12:
        raise ValueError(f"ierk3 requires a43 in [-0.633312, -0.371114], got {a43}")
    a41 = 0.75 * a43 + 7277.0 / 12600.0
    a42 = -1.75 * a43 - 1229.0 / 12600.0
    c = np.array([0.0, 4.0 / 5.0, 7.0 / 5.0, 6.0 / 5.0, 1.0])
    full_imp = np.array([
        [0.0, 0.0, 0.0, 0.0, 0.0],
        [2.0 / 25.0, 18.0 / 25.0, 0.0, 0.0, 0.0],
        [3.0 / 8.0, 61.0 / 200.0, 18.0 / 25.0, 0.0, 0.0],
        [a41, a42, a43, 18.0 / 25.0, 0.0],
        [1030769.0 / 2877000.0, 276523.0 / 1233000.0, -196127.0 / 1078875.0,
         -2068.0 / 17125.0, 18.0 / 25.0],
    ])
    full_exp = np.array([
        [0.0, 0.0, 0.0, 0.0, 0.0],
        [4.0 / 5.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 5.0, 4.0 / 5.0, 0.0, 0.0, 0.0],
        [10111.0 / 10080.0, -6079.0 / 10080.0, 4.0 / 5.0, 0.0, 0.0],
        [313.0 / 840.0, 131.0 / 360.0, -169.0 / 315.0, 4.0 / 5.0, 0.0],
    ])
    _check_row_sums("ierk3", full_imp, full_exp, c)
    return MethodSpec("ierk3", FAMILY_IERK, c, order=3, params={"a43": a43},
                      full_imp=full_imp, full_exp=full_exp)


# ---------------------------------------------------------------------------
# exponential coefficient matrices
# ---------------------------------------------------------------------------

def _eerk2_matrix(z, c2):
    p = phi_stack(z, 2)
    p1c2 = phi_stack(c2 * z, 1)[1]
    A = np.zeros((2, 2) + z.shape)
    A[0, 0] = c2 * p1c2
    A[1, 0] = p[1] - p[2] / c2
    A[1, 1] = p[2] / c2
    return A


def _eerk2w_matrix(z, c2):
    p1 = phi_stack(z, 1)[1]
    p1c2 = phi_stack(c2 * z, 1)[1]
    A = np.zeros((2, 2) + z.shape)
    A[0, 0] = c2 * p1c2
    A[1, 0] = p1 * (1.0 - 0.5 / c2)
    A[1, 1] = p1 * (0.5 / c2)
    return A


def _eerk3_1_matrix(z, c2):
    c3 = 2.0 / 3.0
    p = phi_stack(z, 2)
    p1c2 = phi_stack(c2 * z, 1)[1]
    pc3 = phi_stack(c3 * z, 2)
    A = np.zeros((3, 3) + z.shape)
    A[0, 0] = c2 * p1c2
    A[1, 0] = c3 * pc3[1] - (4.0 / (9.0 * c2)) * pc3[2]
    A[1, 1] = (4.0 / (9.0 * c2)) * pc3[2]
    A[2, 0] = p[1] - 1.5 * p[2]
    A[2, 2] = 1.5 * p[2]
    return A


def _eerk3_2_matrix(z, c2, c3):
    gamma = (3.0 * c3 - 2.0) * c3 / ((2.0 - 3.0 * c2) * c2)
    p = phi_stack(z, 2)
    pc2 = phi_stack(c2 * z, 2)
    pc3 = phi_stack(c3 * z, 2)
    a32 = gamma * c2 * pc2[2] + (c3 * c3 / c2) * pc3[2]
    a42 = gamma / (gamma * c2 + c3) * p[2]
    a43 = 1.0 / (gamma * c2 + c3) * p[2]
    A = np.zeros((3, 3) + z.shape)
    A[0, 0] = c2 * pc2[1]
    A[1, 0] = c3 * pc3[1] - a32
    A[1, 1] = a32
    A[2, 0] = p[1] - a42 - a43
    A[2, 1] = a42
    A[2, 2] = a43
    return A


# ---------------------------------------------------------------------------
# integrating-factor corrections
# ---------------------------------------------------------------------------

# underlying explicit tableaux (A(0), abscissas)
_HEUN2 = (np.array([[1.0, 0.0], [0.5, 0.5]]),
          np.array([0.0, 1.0, 1.0]))
_RALSTON2 = (np.array([[2.0 / 3.0, 0.0], [0.25, 0.75]]),
             np.array([0.0, 2.0 / 3.0, 1.0]))
_HEUN3 = (np.array([[1.0 / 3.0, 0.0, 0.0],
                    [0.0, 2.0 / 3.0, 0.0],
                    [0.25, 0.0, 0.75]]),
          np.array([0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]))
_RALSTON3 = (np.array([[0.5, 0.0, 0.0],
                       [0.0, 0.75, 0.0],
                       [2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0]]),
             np.array([0.0, 0.5, 0.75, 1.0]))


def _tif_matrix(z, ae, c):
    """Telescopic correction: each row of the underlying tableau is
    reweighted by exponentials of the abscissa gaps and renormalized so
    that steady states are fixed points for any step size.

    Evaluated with the largest exponential factored out of numerator and
    denominator, which keeps every term bounded for arbitrarily large |z|.
    """
    s = ae.shape[0]
    A = np.zeros((s, s) + z.shape)
    for i in range(s):
        cols = [j for j in range(i + 1) if ae[i, j] != 0.0]
        cm = max(c[j] for j in cols)
        denom = np.exp(cm * z).astype(float)
        terms = {}
        for j in cols:
            terms[j] = ae[i, j] * np.exp((cm - c[j]) * z)
            denom = denom - z * terms[j]
        for j in cols:
            A[i, j] = terms[j] / denom
    return A


def _nif_matrix(z, ae, c):
    """Bulk-translation correction: off-diagonal entries keep their
    integrating-factor weights exp((c_{i+1}-c_j) z); the diagonal is set
    so each row sums to c_{i+1}*phi_1(c_{i+1} z), which is what fixes
    steady states.
    """
    s = ae.shape[0]
    A = np.zeros((s, s) + z.shape)
    for i in range(s):
        ci1 = c[i + 1]
        rowsum = np.zeros(z.shape)
        for j in range(i):
            if ae[i, j] != 0.0:
                A[i, j] = ae[i, j] * np.exp((ci1 - c[j]) * z)
                rowsum = rowsum + A[i, j]
        A[i, i] = ci1 * phi_stack(ci1 * z, 1)[1] - rowsum
    return A


def _lawson_matrix(z, ae, c):
    """Uncorrected integrating-factor weights ahat_{i+1,j}(0) e^((c_{i+1}-c_j) z)."""
    s = ae.shape[0]
    A = np.zeros((s, s) + z.shape)
    for i in range(s):
        for j in range(i + 1):
            if ae[i, j] != 0.0:
                A[i, j] = ae[i, j] * np.exp((c[i + 1] - c[j]) * z)
    return A


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

def _build_eerk2(c2=0.5):
    if not 0.5 - 1e-12 <= c2 <= 1.0 + 1e-12:
        raise ValueError(f"eerk2 requires c2 in [1/2, 1], got {c2}")
    c = np.array([0.0, c2, 1.0])
    return MethodSpec("eerk2", FAMILY_EERK, c, order=2, params={"c2": c2},
                      matrix_fn=lambda z: _eerk2_matrix(z, c2))


def _build_eerk2w(c2=3.0 / 11.0):
    if not 3.0 / 11.0 - 1e-12 <= c2 <= 1.0 + 1e-12:
        raise ValueError(f"eerk2w requires c2 in [3/11, 1], got {c2}")
    c = np.array([0.0, c2, 1.0])
    return MethodSpec("eerk2w", FAMILY_EERK, c, order=2, params={"c2": c2},
                      matrix_fn=lambda z: _eerk2w_matrix(z, c2))


def _build_eerk3_1(c2=4.0 / 9.0):
    if not 4.0 / 9.0 - 1e-12 <= c2 <= 1.0 + 1e-12:
        raise ValueError(f"eerk3_1 requires c2 in [4/9, 1], got {c2}")
    c = np.array([0.0, c2, 2.0 / 3.0, 1.0])
    return MethodSpec("eerk3_1", FAMILY_EERK, c, order=3, params={"c2": c2},
                      matrix_fn=lambda z: _eerk3_1_matrix(z, c2))


def _build_eerk3_2(c2=0.5, c3=0.7):
    if abs(c2 - 2.0 / 3.0) < 1e-12 or abs(c2 - c3) < 1e-12:
        raise ValueError("eerk3_2 requires c2 != 2/3 and c2 != c3")
    c = np.array([0.0, c2, c3, 1.0])
    return MethodSpec("eerk3_2", FAMILY_EERK, c, order=3,
                      params={"c2": c2, "c3": c3},
                      matrix_fn=lambda z: _eerk3_2_matrix(z, c2, c3))


_CIF_BASES = {
    "cif2_heun": (_HEUN2, 2),
    "cif2_ralston": (_RALSTON2, 2),
    "cif3_heun": (_HEUN3, 3),
    "cif3_ralston": (_RALSTON3, 3),
}


def _build_cif(name, variant="tif"):
    if variant not in ("tif", "nif"):
        raise ValueError(f"variant must be 'tif' or 'nif', got {variant!r}")
    (ae, c), order = _CIF_BASES[name]
    family = FAMILY_CIFRK_TIF if variant == "tif" else FAMILY_CIFRK_NIF
    fn = _tif_matrix if variant == "tif" else _nif_matrix
    return MethodSpec(name, family, c, order=order, params={"variant": variant},
                      matrix_fn=lambda z: fn(z, ae, c))


def _build_lawson():
    ae, c = _HEUN2
    return MethodSpec("lawson", FAMILY_LAWSON, c, order=2, params={},
                      matrix_fn=lambda z: _lawson_matrix(z, ae, c))


_BUILDERS = {
    "ierk2": lambda a33=(1.0 + _SQRT2) / 4.0: _ierk2(a33),
    "ierk3": lambda a43=-0.5: _ierk3(a43),
    "eerk2": _build_eerk2,
    "eerk2_c1": lambda: _build_eerk2(c2=1.0),
    "eerk2w": _build_eerk2w,
    "eerk2w_c12": lambda: _build_eerk2w(c2=0.5),
    "eerk3_1": _build_eerk3_1,
    "eerk3_2": _build_eerk3_2,
    "cif2_heun": lambda variant="tif": _build_cif("cif2_heun", variant),
    "cif2_ralston": lambda variant="tif": _build_cif("cif2_ralston", variant),
    "cif3_heun": lambda variant="tif": _build_cif("cif3_heun", variant),
    "cif3_ralston": lambda variant="tif": _build_cif("cif3_ralston", variant),
    "lawson": _build_lawson,
}

# the twelve certified methods and their z-independent eigenvalue floors
_EIG_BOUNDS = {
    "ierk2": 1.0,
    "ierk3": 0.13,
    "eerk2": 0.5,
    "eerk2_c1": 0.5,
    "eerk2w": 0.12,
    "eerk2w_c12": 0.79,
    "eerk3_1": 0.91,
    "eerk3_2": 1.04,
    "cif2_heun": 0.79,
    "cif2_ralston": 0.99,
    "cif3_heun": 0.67,
    "cif3_ralston": 0.76,
}


def build_method(name: str, **params) -> MethodSpec:
    """Construct a method by registry name; params override the defaults."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise KeyError(
            f"unknown method {name!r}; known: {', '.join(sorted(_BUILDERS))}"
        ) from None
    spec = builder(**params)
    spec.name = name  # parameter variants keep their registry identity
    return spec


def registered_methods() -> tuple:
    """Names of the twelve certified methods (excludes the lawson reference)."""
    return tuple(_EIG_BOUNDS)


def certified_eig_bounds() -> dict:
    """Certified lower bounds on min eig of the symmetrized D(z), per method."""
    return dict(_EIG_BOUNDS)


def cif_variants(name: str) -> tuple:
    """Correction variants a registry name must satisfy during certification."""
    return ("tif", "nif") if name in _CIF_BASES else (None,)


# spec-level convenience wrappers -------------------------------------------

def ierk_tableau(name: str, **params) -> MethodSpec:
    if name not in ("ierk2", "ierk3"):
        raise KeyError(f"{name!r} is not an implicit-explicit method")
    return build_method(name, **params)


def eerk_coeff(name: str, z, **params) -> np.ndarray:
    """A(z) for an exponential method at one or many z <= 0."""
    spec = build_method(name, **params)
    if spec.family != FAMILY_EERK:
        raise KeyError(f"{name!r} is not an exponential method")
    return spec.coeff_matrix(z)


def cifrk_coeff(name: str, variant: str, z) -> np.ndarray:
    """Corrected integrating-factor coefficients at one or many z <= 0."""
    if name not in _CIF_BASES:
        raise KeyError(f"{name!r} is not a corrected integrating-factor method")
    return build_method(name, variant=variant).coeff_matrix(z)
