"""Multi-peak Lorentzian fits to tabulated DOS data.

The engine is a damped least-squares (Levenberg-Marquardt) minimiser of
the summed squared residuals with an analytic Jacobian. Peak centers and
widths are fitted in log space so they stay positive without explicit
constraints; weights are fitted linearly and clamped to be nonnegative
unless negative weights are explicitly allowed. Multi-peak objectives
are multi-modal, so the fit runs a deterministic set of jittered
restarts and keeps the best.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .models import LorentzianPeak, LorentzianSumModel, TabulatedDos
from .translate import (
    CouplingSpec,
    GConstant,
    SpectralDensity,
    classify_ohmicity,
    coupling_from_dos,
)
from .units import HBAR_MEV_PS, TWO_PI

__all__ = [
    "FitOptions",
    "FitReport",
    "PositivityReport",
    "CalibrationInput",
    "CalibrationResult",
    "init_peaks",
    "fit_lorentzian",
    "validate_positivity",
    "calibrate_amplitude",
    "low_frequency_slope",
]

# Levenberg-Marquardt damping schedule
_LAMBDA_START = 1e-3
_LAMBDA_GROW = 10.0
_LAMBDA_SHRINK = 10.0
_LAMBDA_MAX = 1e12
_LAMBDA_MIN = 1e-13

# restart jitter amplitude (multiplicative, uniform)
_JITTER = 0.2

# initialization constants
_SMOOTH_WINDOW = 5
_PROMINENCE_FRACTION = 0.02

# positivity flag tolerance: min DOS >= -1e-9 * max DOS
_POSITIVITY_TOL = 1e-9


@dataclass(frozen=True)
class FitOptions:
    """Knobs for :func:`fit_lorentzian`.

    ``n_restarts`` jittered restarts (+-20% on the initial guess, the
    first restart unjittered) are run deterministically from ``seed``
    and the lowest-cost result wins, ties broken by restart index.
    """

    n_peaks: int
    max_iter: int = 200
    tol: float = 1e-10
    allow_negative_weights: bool = False
    initial_guess: Optional[Sequence[LorentzianPeak]] = None
    seed: int = 0
    n_restarts: int = 8

    def __post_init__(self):
        if self.n_peaks < 1:
            raise ValueError("number of peaks must be at least 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.n_restarts < 1:
            raise ValueError("n_restarts must be at least 1")


@dataclass(frozen=True)
class FitReport:
    """Converged parameters and diagnostics of one fit."""

    peaks: tuple
    ratios: tuple
    cost: float
    rms_residual: float
    iterations: int
    converged: bool
    positivity_ok: bool

    @property
    def model(self) -> LorentzianSumModel:
        return LorentzianSumModel(self.peaks)


@dataclass(frozen=True)
class PositivityReport:
    ok: bool
    worst_omega: float
    worst_value: float


@dataclass(frozen=True)
class CalibrationInput:
    """Material inputs pinning the absolute DOS amplitude.

    eta : dimensionless Gilbert damping
    gamma_e : gyromagnetic ratio in Hz/T
    kappa : proportionality constant of the calibration convention
    """

    eta: float
    gamma_e: float
    kappa: float = 1.0

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("Gilbert damping must be positive")
        if not self.gamma_e > 0:
            raise ValueError("gyromagnetic ratio must be positive")
        if not self.kappa > 0:
            raise ValueError("calibration constant must be positive")


@dataclass(frozen=True)
class CalibrationResult:
    """Calibrated first-peak amplitude, the applied rescale, and the model."""

    a1: float
    scale: float
    model: LorentzianSumModel


def _moving_average(y: np.ndarray, window: int) -> np.ndarray:
    half = window // 2
    csum = np.concatenate(([0.0], np.cumsum(y)))
    idx = np.arange(y.size)
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half + 1, y.size)
    return (csum[hi] - csum[lo]) / (hi - lo)


def _prominence(s: np.ndarray, i: int) -> float:
    left_min = s[i]
    j = i - 1
    while j >= 0 and s[j] <= s[i]:
        left_min = min(left_min, s[j])
        j -= 1
    right_min = s[i]
    j = i + 1
    while j < s.size and s[j] <= s[i]:
        right_min = min(right_min, s[j])
        j += 1
    return float(s[i] - max(left_min, right_min))


def _fwhm(x: np.ndarray, s: np.ndarray, i: int) -> Optional[float]:
    """Full width of the peak at index i at half its height, if resolvable."""
    half = 0.5 * s[i]
    left = right = None
    for j in range(i - 1, -1, -1):
        if s[j] <= half:
            frac = (s[j + 1] - half) / (s[j + 1] - s[j])
            left = x[j + 1] - frac * (x[j + 1] - x[j])
            break
    for j in range(i + 1, x.size):
        if s[j] <= half:
            frac = (s[j - 1] - half) / (s[j - 1] - s[j])
            right = x[j - 1] + frac * (x[j] - x[j - 1])
            break
    if left is not None and right is not None:
        return float(right - left)
    if left is not None:
        return float(2.0 * (x[i] - left))
    if right is not None:
        return float(2.0 * (right - x[i]))
    return None


def init_peaks(data: TabulatedDos, nu: int) -> list:
    """Heuristic starting peaks from smoothed local maxima.

    Up to ``nu`` maxima of the 5-point moving average with prominence of
    at least 2% of the maximum seed peak positions; widths come from a
    local FWHM estimate (the FWHM of a single Lorentzian DOS peak equals
    its Gamma) and weights from height * width. Missing peaks are seeded
    equally spaced across the data span.
    """
    if nu < 1:
        raise ValueError("number of peaks must be at least 1")
    x, y = data.grid, data.values
    if x.size < 2 * nu + 2:
        raise ValueError(f"need at least {2 * nu + 2} samples to seed {nu} peaks")
    s = _moving_average(y, _SMOOTH_WINDOW)
    span = float(x[-1] - x[0])
    fallback_gamma = span / (4.0 * nu)

    candidates = []
    for i in range(1, x.size - 1):
        if s[i] > s[i - 1] and s[i] >= s[i + 1]:
            prom = _prominence(s, i)
            if prom >= _PROMINENCE_FRACTION * float(s.max()):
                candidates.append((prom, i))
    candidates.sort(key=lambda t: -t[0])
    chosen = sorted(i for _, i in candidates[:nu])

    peaks = []
    for i in chosen:
        gamma = _fwhm(x, s, i) or fallback_gamma
        gamma = min(max(gamma, 1e-6 * span), 2.0 * span)
        peaks.append(LorentzianPeak(float(x[i]), gamma, float(s[i] * gamma)))

    missing = nu - len(peaks)
    if missing > 0:
        fillers = np.linspace(x[0], x[-1], missing + 2)[1:-1]
        for pos in fillers:
            pos = float(max(pos, x[0] + 1e-9 * span))
            height = float(np.interp(pos, x, s))
            peaks.append(LorentzianPeak(pos, fallback_gamma, height * fallback_gamma))
    peaks.sort(key=lambda p: p.omega0)
    return peaks


def _pack(peaks) -> np.ndarray:
    w0 = np.array([p.omega0 for p in peaks])
    g = np.array([p.gamma for p in peaks])
    wt = np.array([p.weight for p in peaks])
    return np.concatenate([np.log(w0), np.log(g), wt])


def _unpack(theta: np.ndarray):
    nu = theta.size // 3
    return np.exp(theta[:nu]), np.exp(theta[nu : 2 * nu]), theta[2 * nu :]


def _model_values(theta: np.ndarray, x: np.ndarray) -> np.ndarray:
    w0, g, wt = _unpack(theta)
    x2 = x[:, None] ** 2
    q = (w0 ** 2 - x2) ** 2 + (g ** 2) * x2
    return ((wt * g) * x2 / q).sum(axis=1)


def _model_jacobian(theta: np.ndarray, x: np.ndarray):
    """Model values and the Jacobian wrt (log w0_j, log G_j, W_j)."""
    w0, g, wt = _unpack(theta)
    x2 = x[:, None] ** 2
    dsq = w0 ** 2 - x2
    q = dsq ** 2 + (g ** 2) * x2
    per_peak = (wt * g) * x2 / q
    f = per_peak.sum(axis=1)
    # d f / d log w0 = -4 W G x^2 w0^2 (w0^2 - x^2) / q^2
    d_logw0 = -4.0 * (wt * g) * x2 * (w0 ** 2) * dsq / q ** 2
    # d f / d log G = W G x^2 (q - 2 G^2 x^2) / q^2
    d_logg = (wt * g) * x2 * (q - 2.0 * (g ** 2) * x2) / q ** 2
    d_w = g * x2 / q
    return f, np.concatenate([d_logw0, d_logg, d_w], axis=1)


@dataclass
class _LMResult:
    theta: np.ndarray
    cost: float
    iterations: int
    converged: bool
    cost_trace: list = field(default_factory=list)


def _levenberg_marquardt(theta0, x, y, max_iter, tol, allow_negative) -> _LMResult:
    nu = theta0.size // 3
    theta = theta0.copy()
    if not allow_negative:
        theta[2 * nu :] = np.maximum(theta[2 * nu :], 0.0)
    f = _model_values(theta, x)
    r = f - y
    cost = float(r @ r)
    trace = [cost]
    lam = _LAMBDA_START
    tiny = 1e-300
    floor = 1e-24 * max(float(y @ y), 1.0)

    iterations = 0
    converged = cost <= floor
    while not converged and iterations < max_iter:
        iterations += 1
        _, jac = _model_jacobian(theta, x)
        a = jac.T @ jac
        grad = jac.T @ r
        dg = np.diag(a).copy()
        dg = np.maximum(dg, 1e-12 * max(float(dg.max(initial=0.0)), tiny))
        accepted = False
        while lam <= _LAMBDA_MAX:
            try:
                step = np.linalg.solve(a + lam * np.diag(dg), -grad)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(a + lam * np.diag(dg), -grad, rcond=None)[0]
            trial = theta + step
            # keep log parameters in a representable range
            trial[: 2 * nu] = np.clip(trial[: 2 * nu], -60.0, 60.0)
            if not allow_negative:
                trial[2 * nu :] = np.maximum(trial[2 * nu :], 0.0)
            f_t = _model_values(trial, x)
            r_t = f_t - y
            cost_t = float(r_t @ r_t)
            if np.isfinite(cost_t) and cost_t < cost:
                accepted = True
                break
            lam *= _LAMBDA_GROW
        if not accepted:
            break
        rel_drop = (cost - cost_t) / max(cost, tiny)
        step_rel = float(np.linalg.norm(trial - theta)) / max(
            float(np.linalg.norm(theta)), tiny
        )
        theta, r, cost = trial, r_t, cost_t
        trace.append(cost)
        lam = max(lam / _LAMBDA_SHRINK, _LAMBDA_MIN)
        if rel_drop < tol or step_rel < tol or cost <= floor:
            converged = True
    return _LMResult(theta, cost, iterations, converged, trace)


def _jittered(base_theta: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    nu = base_theta.size // 3
    factors = 1.0 + _JITTER * rng.uniform(-1.0, 1.0, size=base_theta.size)
    out = base_theta.copy()
    # +-20% on w0 and Gamma acts multiplicatively, i.e. additively on the logs
    out[: 2 * nu] += np.log(factors[: 2 * nu])
    out[2 * nu :] *= factors[2 * nu :]
    return out


def fit_lorentzian(data: TabulatedDos, opts: FitOptions) -> FitReport:
    """Least-squares fit of a Lorentzian-sum DOS to tabulated data.

    Returns a report rather than raising when no restart manages to
    converge; inspect ``converged``. Input data containing NaN or Inf is
    rejected up front.
    """
    x, y = data.grid, data.values
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("data contains NaN or Inf")
    base = (
        list(opts.initial_guess)
        if opts.initial_guess is not None
        else init_peaks(data, opts.n_peaks)
    )
    if len(base) != opts.n_peaks:
        raise ValueError(
            f"initial guess has {len(base)} peaks but n_peaks = {opts.n_peaks}"
        )
    theta0 = _pack(base)
    rng = np.random.default_rng(opts.seed)
    floor = 1e-18 * max(float(y @ y), 1.0)

    best = None
    for k in range(opts.n_restarts):
        start = theta0 if k == 0 else _jittered(theta0, rng)
        res = _levenberg_marquardt(
            start, x, y, opts.max_iter, opts.tol, opts.allow_negative_weights
        )
        if best is None or res.cost < best.cost:
            best = res
        if best.cost <= floor:
            break

    w0, g, wt = _unpack(best.theta)
    order = np.argsort(w0)
    peaks = tuple(
        LorentzianPeak(float(w0[i]), float(g[i]), float(wt[i])) for i in order
    )
    model = LorentzianSumModel(peaks)
    w1 = peaks[0].weight
    ratios = tuple(float(p.weight / w1) if w1 != 0 else float(p.weight) for p in peaks)
    lo = float(x[0]) if x[0] > 0 else float(x[1])
    positivity = validate_positivity(model, (lo, float(x[-1])), 2048)
    return FitReport(
        peaks=peaks,
        ratios=ratios,
        cost=best.cost,
        rms_residual=float(np.sqrt(best.cost / x.size)),
        iterations=best.iterations,
        converged=best.converged,
        positivity_ok=positivity.ok,
    )


def validate_positivity(model: LorentzianSumModel, grid_span, n: int) -> PositivityReport:
    """Check that the summed DOS stays nonnegative on a mixed sampling grid.

    Half the nodes are log-spaced and half linear over ``grid_span``
    (rad/ps); the flag tolerates dips down to -1e-9 of the maximum.
    """
    if n < 100:
        raise ValueError("need at least 100 sample nodes")
    lo, hi = float(grid_span[0]), float(grid_span[1])
    if not (0 < lo < hi):
        raise ValueError("grid span must satisfy 0 < lo < hi")
    nodes = np.unique(
        np.concatenate([np.geomspace(lo, hi, n // 2), np.linspace(lo, hi, n - n // 2)])
    )
    vals = model.dos(nodes)
    worst = int(np.argmin(vals))
    ok = bool(vals[worst] >= -_POSITIVITY_TOL * float(vals.max()))
    return PositivityReport(ok, float(nodes[worst]), float(vals[worst]))


def low_frequency_slope(model: LorentzianSumModel) -> float:
    """lim_{w->0} J(w)/w in the g = 1, d_s = 3 convention.

    Each peak contributes W_j Gamma_j / w0_j^4 to the limit of
    D(w)/w^2, and J/w = g^2 D / (d_s w^2).
    """
    return float(
        (model.weights * model.gammas / model.omega0s ** 4).sum() / 3.0
    )


def calibrate_amplitude(model: LorentzianSumModel, cal: CalibrationInput) -> CalibrationResult:
    """Pin the absolute weight scale from the Gilbert damping.

    The weight vector is rescaled so that the model's low-frequency
    Ohmic slope lim J(w)/w matches kappa * eta * gamma_e^2 * hbar/2 in
    the library convention (gamma_e converted to rad THz/T, hbar/2 in
    meV ps, g = 1, d_s = 3). The published material calibrations fix
    kappa; only ratios between calibrated amplitudes are
    convention-free. Returns the first-peak amplitude
    a1 = (pi/6) W_1 of the rescaled model, in the table convention
    (rad THz T)^2/meV up to kappa.
    """
    w0_min = float(model.omega0s.min())
    spec = CouplingSpec(GConstant(1.0), d_s=3, d=3)
    j = SpectralDensity(coupling_from_dos(model, spec))
    try:
        report = classify_ohmicity(j, (w0_min / 100.0, w0_min / 10.0), 32)
    except ValueError as exc:
        raise ValueError(f"model is not Ohmic at low frequency: {exc}") from exc
    if not (0.9 <= report.s <= 1.1):
        raise ValueError(
            f"model is not Ohmic at low frequency (exponent {report.s:.3f})"
        )
    slope = low_frequency_slope(model)
    gamma_tilde = TWO_PI * cal.gamma_e * 1e-12  # rad THz per tesla
    target = cal.kappa * cal.eta * gamma_tilde ** 2 * (0.5 * HBAR_MEV_PS)
    rho = target / slope
    calibrated = model.scaled(rho)
    a1 = (np.pi / 6.0) * calibrated.peaks[0].weight
    return CalibrationResult(a1=float(a1), scale=float(rho), model=calibrated)
