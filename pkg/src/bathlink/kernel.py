"""Memory kernels K(tau) of the bath response.

The scalar isotropic kernel is

    K(tau) = int_0^inf dw  (g(w)^2 / d_s) D(w) sin(w tau) / w,   tau > 0,

and K(tau) = 0 for tau <= 0 (the bath only responds to the past).
Lorentzian sums and Debye models have closed forms; everything else goes
through :func:`kernel_quadrature`, a composite Gauss-Legendre scheme
with at least 20 panels per period of the fastest oscillation and, for
Lorentzian sums with constant coupling, an analytic correction for the
truncated 1/w^3 tail of the integrand.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import sici

from .models import (
    DebyeParams,
    DosModel,
    LorentzianSumModel,
    TabulatedDos,
    eval_dos,
)
from .translate import CouplingSpec, GConstant, GPowerLaw, eval_g

__all__ = [
    "KernelCurve",
    "MemoryTimeReport",
    "kernel_quadrature",
    "kernel_lorentzian_analytic",
    "kernel_debye_analytic",
    "analytic_kernel",
    "memory_times",
    "LORENTZ_TAIL_WIDTHS",
    "DOMINANT_WEIGHT_THRESHOLD",
]

GL_ORDER = 12
PANELS_PER_PERIOD = 20
MIN_PANELS = 16
# panel width resolves the sharpest Lorentzian peak to a quarter width
STRUCT_FRACTION = 0.25
DEBYE_BASE_PANELS = 32
# Lorentzian quadrature domain ends at w0_max + 50 * Gamma_max
LORENTZ_TAIL_WIDTHS = 50.0
# peaks with |W_j / W_1| below this do not count towards the dominant memory time
DOMINANT_WEIGHT_THRESHOLD = 0.05
# relative tail estimate above which a truncation warning is attached
TAIL_WARN_LEVEL = 1e-3
# cap on shared quadrature nodes before switching to blockwise evaluation
_NODE_BUDGET = 1_500_000


@dataclass(frozen=True, eq=False)
class KernelCurve:
    """Sampled memory kernel on a nonnegative time grid (ps).

    ``method`` records how the samples were produced ("analytic" or
    "quadrature"); ``warning`` carries a truncation note when the
    quadrature tail estimate was not negligible.
    """

    taus: np.ndarray
    values: np.ndarray
    method: str
    warning: Optional[str] = None

    def __post_init__(self):
        taus = np.asarray(self.taus, dtype=float).copy()
        values = np.asarray(self.values, dtype=float).copy()
        if taus.ndim != 1 or taus.shape != values.shape or taus.size < 1:
            raise ValueError("taus and values must be 1d arrays of equal length >= 1")
        if np.any(taus < 0):
            raise ValueError("kernel times must be nonnegative")
        if taus.size > 1 and np.any(np.diff(taus) <= 0):
            raise ValueError("kernel times must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("kernel values must be finite")
        if np.any(values[taus == 0.0] != 0.0):
            raise ValueError("K(0) must vanish")
        if self.method not in ("analytic", "quadrature"):
            raise ValueError(f"unknown kernel method {self.method!r}")
        taus.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "taus", taus)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True, eq=False)
class MemoryTimeReport:
    """Per-peak memory times 1/Gamma_j in ps and the dominant one."""

    times: np.ndarray
    dominant: float
    threshold: float = DOMINANT_WEIGHT_THRESHOLD


def _require_constant_g(spec: CouplingSpec) -> float:
    if not isinstance(spec.g_model, GConstant):
        raise ValueError(
            "the analytic kernel is only valid for a frequency-independent "
            "coupling; use kernel_quadrature for power-law g(w)"
        )
    return spec.g_model.g


def _damped_response(omega0: float, gamma: float, t: np.ndarray) -> np.ndarray:
    """exp(-G t/2) * sin(w1 t)/w1 with w1^2 = w0^2 - G^2/4, continued across w1 = 0.

    Overdamped peaks (G > 2 w0) turn the sine into a hyperbolic sine;
    the two exponentials are combined directly so nothing overflows.
    """
    delta = omega0 * omega0 - 0.25 * gamma * gamma
    if delta > 0:
        w1 = np.sqrt(delta)
        return np.exp(-0.5 * gamma * t) * np.sin(w1 * t) / w1
    if delta < 0:
        kappa = np.sqrt(-delta)
        x = kappa * t
        small = x < 350.0
        safe = np.minimum(x, 350.0)
        return np.where(
            small,
            np.exp(-0.5 * gamma * t) * np.sinh(safe) / kappa,
            (np.exp((kappa - 0.5 * gamma) * t) - np.exp(-(kappa + 0.5 * gamma) * t))
            / (2.0 * kappa),
        )
    return np.exp(-0.5 * gamma * t) * t


def kernel_lorentzian_analytic(model: LorentzianSumModel, spec: CouplingSpec, tau):
    """Closed-form kernel of a Lorentzian-sum DOS with constant coupling.

    K(tau) = (g^2 pi / (2 d_s)) sum_j W_j exp(-G_j tau/2) sin(w1_j tau)/w1_j
    for tau > 0 and zero otherwise, with the overdamped branch continued
    hyperbolically.
    """
    cg = _require_constant_g(spec)
    t = np.asarray(tau, dtype=float)
    scalar = t.ndim == 0
    tv = np.atleast_1d(t).astype(float)
    out = np.zeros_like(tv)
    mask = tv > 0
    if np.any(mask):
        tp = tv[mask]
        acc = np.zeros_like(tp)
        for p in model.peaks:
            acc += p.weight * _damped_response(p.omega0, p.gamma, tp)
        out[mask] = (0.5 * np.pi * cg * cg / spec.d_s) * acc
    return float(out[0]) if scalar else out.reshape(t.shape)


def _sin_minus_xcos(x: np.ndarray) -> np.ndarray:
    """sin x - x cos x, with a series for small x to dodge cancellation."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 0.25
    xs = np.where(small, x, 0.0)
    x2 = xs * xs
    series = xs * x2 * (
        1.0 / 3.0
        + x2 * (-1.0 / 30.0 + x2 * (1.0 / 840.0 + x2 * (-1.0 / 45360.0 + x2 / 3991680.0)))
    )
    return np.where(small, series, np.sin(x) - x * np.cos(x))


def kernel_debye_analytic(params: DebyeParams, spec: CouplingSpec, tau):
    """Closed-form kernel of the Debye DOS with constant coupling.

    In 3D this is (g^2 / d_s) * (3/(2 pi^2 c^3)) (sin x - x cos x)/tau^2
    with x = w_D tau; the 2D and 1D cutoffs give (1 - cos x)/tau and the
    sine integral Si(x) respectively.
    """
    cg = _require_constant_g(spec)
    t = np.asarray(tau, dtype=float)
    scalar = t.ndim == 0
    tv = np.atleast_1d(t).astype(float)
    out = np.zeros_like(tv)
    mask = tv > 0
    if np.any(mask):
        tp = tv[mask]
        c = params.sound_speed
        x = params.cutoff * tp
        if params.dim == 3:
            val = 3.0 / (2.0 * np.pi ** 2 * c ** 3) * _sin_minus_xcos(x) / tp ** 2
        elif params.dim == 2:
            val = 1.0 / (np.pi * c * c) * 2.0 * np.sin(0.5 * x) ** 2 / tp
        else:
            val = 1.0 / (np.pi * c) * sici(x)[0]
        out[mask] = (cg * cg / spec.d_s) * val
    return float(out[0]) if scalar else out.reshape(t.shape)


def analytic_kernel(model: DosModel, spec: CouplingSpec, taus) -> KernelCurve:
    """KernelCurve from the closed form appropriate to the model type."""
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if isinstance(model, LorentzianSumModel):
        values = kernel_lorentzian_analytic(model, spec, taus)
    elif isinstance(model, DebyeParams):
        values = kernel_debye_analytic(model, spec, taus)
    else:
        raise TypeError(
            "no closed-form kernel for tabulated models; use kernel_quadrature"
        )
    return KernelCurve(taus, values, "analytic")


def _quadrature_domain(dos: DosModel):
    """(lo, hi, structural panel count, extra panel edges)."""
    if isinstance(dos, DebyeParams):
        return 0.0, dos.cutoff, DEBYE_BASE_PANELS, None
    if isinstance(dos, LorentzianSumModel):
        hi = float(dos.omega0s.max() + LORENTZ_TAIL_WIDTHS * dos.gammas.max())
        width = STRUCT_FRACTION * float(dos.gammas.min())
        return 0.0, hi, int(np.ceil(hi / width)), None
    if isinstance(dos, TabulatedDos):
        return float(dos.grid[0]), float(dos.grid[-1]), dos.grid.size - 1, dos.grid
    raise TypeError(f"not a DOS model: {type(dos).__name__}")


def _gl_nodes(lo: float, hi: float, n_panels: int, extra_edges):
    edges = np.linspace(lo, hi, n_panels + 1)
    if extra_edges is not None:
        edges = np.unique(np.concatenate([edges, np.asarray(extra_edges, dtype=float)]))
    x, w = np.polynomial.legendre.leggauss(GL_ORDER)
    mids = 0.5 * (edges[1:] + edges[:-1])
    halfs = 0.5 * np.diff(edges)
    nodes = (mids[:, None] + halfs[:, None] * x).ravel()
    weights = (halfs[:, None] * w).ravel()
    return nodes, weights


def _lorentz_tail_correction(model, cg2_over_ds, taus, lam):
    """Analytic estimate of int_lam^inf of the truncated integrand.

    Uses the large-w expansion D(w)/w = sum_j W_j G_j (w^-3 +
    (2 w0_j^2 - G_j^2) w^-5 + O(w^-7)); both explicit orders are summed
    via sine/cosine integrals, leaving a residual O(lam^-7).
    """
    x = lam * taus
    si = sici(x)[0]
    sx, cx = np.sin(x), np.cos(x)
    t3 = sx / (2.0 * x * x) + cx / (2.0 * x) - 0.5 * (0.5 * np.pi - si)
    t5 = sx / (4.0 * x ** 4) + cx / (12.0 * x ** 3) - t3 / 12.0
    wg = model.weights * model.gammas
    c3 = float(wg.sum())
    c5 = float((wg * (2.0 * model.omega0s ** 2 - model.gammas ** 2)).sum())
    return cg2_over_ds * (c3 * taus ** 2 * t3 + c5 * taus ** 4 * t5)


def _tail_note(dos, spec, taus_pos, values, lam):
    """Truncation warning when the neglected tail is not negligible."""
    if not isinstance(dos, LorentzianSumModel):
        return None  # compact support, nothing truncated
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    if scale == 0.0:
        return None
    if isinstance(spec.g_model, GPowerLaw):
        if spec.g_model.p >= 1.0:
            return (
                "integrand does not decay beyond the truncation frequency for "
                f"p = {spec.g_model.p:g}; kernel values are unreliable"
            )
        # integration-by-parts bound, 2 |f(lam)| / tau, on the ignored tail
        env = abs(eval_g(spec.g_model, lam)) ** 2 * abs(eval_dos(dos, lam)) / (
            spec.d_s * lam
        )
        bound = 2.0 * env / float(taus_pos.min())
        if bound / scale > TAIL_WARN_LEVEL:
            return (
                f"truncated tail estimate {bound / scale:.2e} of the kernel scale "
                "exceeds 1e-3; increase the truncation or use a constant coupling"
            )
        return None
    # constant g: tail was corrected analytically; bound the next order
    wg = np.abs(dos.weights) * dos.gammas
    c7 = float((wg * (2.0 * dos.omega0s ** 2 + dos.gammas ** 2) ** 2).sum())
    bound = (spec.g_model.g ** 2 / spec.d_s) * c7 * float(taus_pos.max()) / (5.0 * lam ** 5)
    if bound / scale > TAIL_WARN_LEVEL:
        return "post-correction tail bound exceeds 1e-3 of the kernel scale"
    return None


def kernel_quadrature(dos: DosModel, spec: CouplingSpec, taus) -> KernelCurve:
    """Memory kernel by composite Gauss-Legendre quadrature.

    The domain is truncated at the model's support (the Debye cutoff,
    the tabulated grid end, or w0_max + 50 Gamma_max for Lorentzian
    sums, where the dropped tail is instead estimated analytically).
    Panels subdivide the domain finely enough to resolve both the DOS
    structure and the sin(w tau) oscillation at the largest tau.
    """
    tv = np.atleast_1d(np.asarray(taus, dtype=float))
    if np.any(tv < 0):
        raise ValueError("kernel times must be nonnegative")
    if tv.size > 1 and np.any(np.diff(tv) <= 0):
        raise ValueError("kernel times must be strictly increasing")
    lo, hi, n_struct, extra = _quadrature_domain(dos)
    inv_ds = 1.0 / spec.d_s
    out = np.zeros_like(tv)
    pos = np.nonzero(tv > 0)[0]

    def block_eval(idx):
        tmax = tv[idx[-1]]
        n_osc = int(np.ceil(PANELS_PER_PERIOD * (hi - lo) * tmax / (2.0 * np.pi)))
        n = max(MIN_PANELS, n_struct, n_osc)
        nodes, wts = _gl_nodes(lo, hi, n, extra)
        f = wts * eval_g(spec.g_model, nodes) ** 2 * eval_dos(dos, nodes) * inv_ds / nodes
        for i in idx:
            out[i] = f @ np.sin(nodes * tv[i])

    if pos.size:
        tmax_all = tv[pos[-1]]
        n_all = max(
            MIN_PANELS,
            n_struct,
            int(np.ceil(PANELS_PER_PERIOD * (hi - lo) * tmax_all / (2.0 * np.pi))),
        )
        if n_all * GL_ORDER <= _NODE_BUDGET:
            block_eval(pos)
        else:
            for start in range(0, pos.size, 16):
                block_eval(pos[start : start + 16])
        if isinstance(dos, LorentzianSumModel) and isinstance(spec.g_model, GConstant):
            cg = spec.g_model.g
            out[pos] += _lorentz_tail_correction(dos, cg * cg * inv_ds, tv[pos], hi)

    warning = _tail_note(dos, spec, tv[pos], out, hi) if pos.size else None
    return KernelCurve(tv, out, "quadrature", warning)


def memory_times(model: LorentzianSumModel) -> MemoryTimeReport:
    """Per-peak characteristic memory times 1/Gamma_j.

    The dominant time is the longest one among peaks whose weight ratio
    |W_j / W_1| is at least 0.05; tiny satellite peaks do not count.
    """
    times = 1.0 / model.gammas
    ratios = np.abs(model.ratios())
    eligible = ratios >= DOMINANT_WEIGHT_THRESHOLD
    dominant = float(times[eligible].max())
    return MemoryTimeReport(times, dominant)
