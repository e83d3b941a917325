"""DOS <-> coupling-function translation and spectral-density tools.

The scalar relation implemented here is

    C(w)^2 * d_s = g(w)^2 * D(w),

with the tensor generalisation C C^T = g^2 M D handled by
:func:`factor_coupling_tensor` for a unit-trace positive polarization
matrix M. The bath spectral density is taken as J(w) = C(w)^2 / w;
conventions in the literature differ by constant prefactors, but only
the low-frequency exponent matters for Ohmicity classification, so the
prefactor is fixed to 1 here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .models import DosModel, TabulatedDos, eval_dos

__all__ = [
    "GConstant",
    "GPowerLaw",
    "CouplingSpec",
    "CouplingFunction",
    "SpectralDensity",
    "OhmicityReport",
    "eval_g",
    "coupling_from_dos",
    "dos_from_coupling",
    "classify_ohmicity",
    "factor_coupling_tensor",
    "psd_sqrt",
    "OHMIC_BAND",
]

# |s - 1| <= OHMIC_BAND counts as Ohmic; the band absorbs regression
# noise when classifying sampled spectral densities
OHMIC_BAND = 0.1

# validation tolerance for polarization matrices (symmetry, PSD, trace)
_M_TOL = 1e-9

# eigenvalues of g^2 M D in [-1e-12 * scale, 0] are treated as roundoff
_PSD_CLAMP = 1e-12


@dataclass(frozen=True)
class GConstant:
    """Frequency-independent coupling strength g >= 0."""

    g: float

    def __post_init__(self):
        if self.g < 0:
            raise ValueError("coupling strength must be nonnegative")


@dataclass(frozen=True)
class GPowerLaw:
    """Power-law coupling g(w) = g0 * (w / omega_ref)^p."""

    g0: float
    p: float
    omega_ref: float

    def __post_init__(self):
        if self.g0 < 0:
            raise ValueError("coupling amplitude must be nonnegative")
        if not self.omega_ref > 0:
            raise ValueError("reference frequency must be positive")


GModel = Union[GConstant, GPowerLaw]


def eval_g(g_model: GModel, omega):
    """Coupling strength g(w) at angular frequency omega."""
    if isinstance(g_model, GConstant):
        w = np.asarray(omega, dtype=float)
        out = np.full_like(w, g_model.g)
        return out if w.ndim else float(out)
    if isinstance(g_model, GPowerLaw):
        w = np.asarray(omega, dtype=float)
        out = g_model.g0 * (w / g_model.omega_ref) ** g_model.p
        return out if w.ndim else float(out)
    raise TypeError(f"not a coupling model: {type(g_model).__name__}")


def _validated_polarization(m, d_s: int) -> np.ndarray:
    m = np.asarray(m)
    if np.iscomplexobj(m):
        if np.max(np.abs(m.imag)) > _M_TOL:
            raise ValueError("only real-valued polarization matrices are supported")
        m = m.real
    m = m.astype(float)
    if m.shape != (d_s, d_s):
        raise ValueError(f"polarization matrix must be {d_s}x{d_s}, got {m.shape}")
    if np.max(np.abs(m - m.T)) > _M_TOL:
        raise ValueError("polarization matrix must be symmetric")
    tr = float(np.trace(m))
    if abs(tr - 1.0) > _M_TOL:
        raise ValueError(f"polarization matrix must have unit trace, got {tr!r}")
    evals = np.linalg.eigvalsh(0.5 * (m + m.T))
    if evals.min() < -_M_TOL:
        raise ValueError("polarization matrix must be positive semidefinite")
    m = m.copy()
    m.setflags(write=False)
    return m


@dataclass(frozen=True, eq=False)
class CouplingSpec:
    """How the system couples to the bath.

    Attributes
    ----------
    g_model : constant or power-law frequency dependence of the coupling
    d_s : system dimension (number of coupled system components)
    d : bath dimension, at least d_s
    m : optional d_s x d_s polarization matrix (symmetric, PSD, unit
        trace); omitted means the isotropic default 1/d_s.
    """

    g_model: GModel
    d_s: int = 3
    d: int = 3
    m: Optional[np.ndarray] = None

    def __post_init__(self):
        if not (isinstance(self.d_s, (int, np.integer)) and self.d_s >= 1):
            raise ValueError("system dimension d_s must be a positive integer")
        if not (isinstance(self.d, (int, np.integer)) and self.d >= self.d_s):
            raise ValueError("bath dimension d must be an integer >= d_s")
        if not isinstance(self.g_model, (GConstant, GPowerLaw)):
            raise TypeError("g_model must be GConstant or GPowerLaw")
        if self.m is not None:
            object.__setattr__(self, "m", _validated_polarization(self.m, self.d_s))

    def __eq__(self, other):
        if not isinstance(other, CouplingSpec):
            return NotImplemented
        if (self.g_model, self.d_s, self.d) != (other.g_model, other.d_s, other.d):
            return False
        if self.m is None or other.m is None:
            return self.m is None and other.m is None
        return np.array_equal(self.m, other.m)

    @property
    def polarization(self) -> np.ndarray:
        """Explicit polarization matrix, isotropic 1/d_s when none was given."""
        if self.m is not None:
            return self.m
        return np.eye(self.d_s) / self.d_s


@dataclass(frozen=True)
class CouplingFunction:
    """Scalar coupling C(w) = g(w) sqrt(D(w) / d_s) derived from a DOS model."""

    dos: DosModel
    spec: CouplingSpec

    def __call__(self, omega):
        d = np.asarray(eval_dos(self.dos, omega), dtype=float)
        if np.any(d < 0):
            raise ValueError("DOS is negative at a requested frequency; coupling undefined")
        out = eval_g(self.spec.g_model, omega) * np.sqrt(d / self.spec.d_s)
        return out if np.ndim(omega) else float(out)


@dataclass(frozen=True)
class SpectralDensity:
    """Bath spectral density J(w) = C(w)^2 / w (prefactor convention 1)."""

    coupling: CouplingFunction

    def __call__(self, omega):
        w = np.asarray(omega, dtype=float)
        if np.any(w <= 0):
            raise ValueError("spectral density is defined for positive frequencies only")
        out = self.coupling(w) ** 2 / w
        return out if np.ndim(omega) else float(out)


@dataclass(frozen=True)
class OhmicityReport:
    """Fitted low-frequency exponent of J(w) and its class.

    ``classification`` is "ohmic" for |s - 1| <= 0.1, "sub_ohmic" for
    s < 0.9 and "super_ohmic" for s > 1.1.
    """

    s: float
    classification: str
    window: tuple
    r_squared: float
    n_samples: int


def coupling_from_dos(dos: DosModel, spec: CouplingSpec) -> CouplingFunction:
    """Coupling function with C(w)^2 d_s = g(w)^2 D(w) pointwise."""
    return CouplingFunction(dos, spec)


def dos_from_coupling(coupling: CouplingFunction, grid) -> TabulatedDos:
    """Invert the scalar relation on a caller-supplied grid (rad/ps).

    Returns a tabulated model with D = d_s C^2 / g^2 at the grid nodes,
    which round-trips with :func:`coupling_from_dos` to machine accuracy.
    """
    grid = np.asarray(grid, dtype=float)
    g = np.asarray(eval_g(coupling.spec.g_model, grid), dtype=float)
    c = np.asarray(coupling(grid), dtype=float)
    bad = (g == 0) & (c != 0)
    if np.any(bad):
        w_bad = grid[bad][0]
        raise ValueError(
            f"g(w) = 0 at w = {w_bad:g} rad/ps while C(w) != 0; relation inconsistent"
        )
    safe_g = np.where(g > 0, g, 1.0)
    values = coupling.spec.d_s * (c / safe_g) ** 2
    values = np.where(g > 0, values, 0.0)
    return TabulatedDos(grid, values, unit_note="derived from coupling function (per rad/ps)")


def _class_for(s: float) -> str:
    if abs(s - 1.0) <= OHMIC_BAND:
        return "ohmic"
    return "sub_ohmic" if s < 1.0 else "super_ohmic"


def classify_ohmicity(j: Callable, window, n_samples: int = 64) -> OhmicityReport:
    """Least-squares slope of log J vs log w over log-spaced sample points.

    ``j`` may be a :class:`SpectralDensity` or any callable accepting an
    ndarray of angular frequencies. All sampled values must be positive.
    """
    lo, hi = float(window[0]), float(window[1])
    if not (0 < lo < hi):
        raise ValueError("window must satisfy 0 < lo < hi")
    if n_samples < 2:
        raise ValueError("need at least 2 sample points")
    w = np.geomspace(lo, hi, n_samples)
    vals = np.asarray(j(w), dtype=float)
    if vals.shape != w.shape:
        raise ValueError("spectral density callable must evaluate elementwise on arrays")
    if np.any(vals <= 0) or not np.all(np.isfinite(vals)):
        raise ValueError("spectral density must be positive and finite on the window")
    x = np.log(w)
    y = np.log(vals)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    # a flat log-log curve has ss_tot at roundoff level; that is a perfect fit
    if ss_tot <= 1e-20 * max(float((y ** 2).sum()), 1.0):
        r2 = 1.0
    else:
        r2 = 1.0 - float((resid ** 2).sum()) / ss_tot
    return OhmicityReport(float(slope), _class_for(float(slope)), (lo, hi), r2, n_samples)


def psd_sqrt(h: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition.

    Eigenvalues in [-1e-12 * scale, 0] are clamped to zero; anything
    more negative means the input was not PSD and raises.
    """
    h = np.asarray(h, dtype=float)
    evals, evecs = np.linalg.eigh(0.5 * (h + h.T))
    floor = -_PSD_CLAMP * max(float(evals.max(initial=0.0)), 1.0)
    if evals.min(initial=0.0) < floor:
        raise ValueError("matrix is not positive semidefinite")
    evals = np.clip(evals, 0.0, None)
    return (evecs * np.sqrt(evals)) @ evecs.T


def factor_coupling_tensor(d_value: float, spec: CouplingSpec, omega: float) -> np.ndarray:
    """One d_s x d factor C of the tensor relation C C^T = g^2 M D.

    The PSD square root of g^2 M D occupies the first d_s columns and the
    remaining bath directions are zero-padded. The factor is unique only
    up to right-multiplication by an orthogonal matrix.
    """
    if d_value < 0:
        raise ValueError("DOS value must be nonnegative")
    m = spec.polarization
    g = eval_g(spec.g_model, omega)
    root = psd_sqrt((g * g * d_value) * m)
    c = np.zeros((spec.d_s, spec.d))
    c[:, : spec.d_s] = root
    return c
