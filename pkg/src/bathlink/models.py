"""Bath density-of-states models and their pointwise evaluation.

Three model families are supported and share the ``dos(omega)`` method:

* :class:`DebyeParams` -- acoustic dispersion with a sharp cutoff,
* :class:`LorentzianSumModel` -- a sum of resonance peaks,
* :class:`TabulatedDos` -- measured data on a frequency grid.

All types are immutable and every operation is a pure function of its
inputs, so everything here is safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .units import TWO_PI, K_B, HBAR, omega_from_thz

__all__ = [
    "DebyeParams",
    "LorentzianPeak",
    "LorentzianSumModel",
    "TabulatedDos",
    "DosModel",
    "SOLID_ANGLE",
    "eval_debye_dos",
    "eval_lorentzian_dos",
    "eval_tabulated_dos",
    "eval_dos",
    "debye_from_temperature",
    "total_weight",
    "support_interval",
]

# d-dimensional solid angles for d = 1, 2, 3
SOLID_ANGLE = {1: 2.0, 2: TWO_PI, 3: 2.0 * TWO_PI}

# negative tabulated values up to this fraction of the maximum are treated
# as measurement noise and clamped to zero on ingestion
NEGATIVE_NOISE_FRACTION = 1e-3


def _check_nonnegative(w: np.ndarray) -> None:
    if np.any(w < 0):
        raise ValueError("frequencies must be nonnegative")


@dataclass(frozen=True)
class DebyeParams:
    """Acoustic bath with linear dispersion up to a sharp cutoff.

    The model carries the full set of ``dim`` acoustic branches, so in
    3D the density of states is 3 w^2 / (2 pi^2 c^3) below the cutoff.

    Attributes
    ----------
    sound_speed : averaged sound speed in km/s (= nm/ps)
    cutoff : Debye frequency in rad/ps
    dim : bath dimension, one of 1, 2, 3
    """

    sound_speed: float
    cutoff: float
    dim: int = 3

    def __post_init__(self):
        if self.dim not in SOLID_ANGLE:
            raise ValueError(f"bath dimension must be 1, 2 or 3, got {self.dim}")
        if not self.sound_speed > 0:
            raise ValueError("sound speed must be positive")
        if not self.cutoff > 0:
            raise ValueError("Debye cutoff must be positive")

    def dos(self, omega):
        return eval_debye_dos(self, omega)


@dataclass(frozen=True)
class LorentzianPeak:
    """One resonance: center and width in rad/ps plus a signed weight.

    The weight may be negative; structured spectra occasionally need a
    few negative peaks to carve out gaps, as long as the summed DOS
    stays nonnegative.
    """

    omega0: float
    gamma: float
    weight: float

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ValueError("peak frequency must be positive")
        if not self.gamma > 0:
            raise ValueError("peak width must be positive")


@dataclass(frozen=True)
class LorentzianSumModel:
    """Sum of Lorentzian resonance peaks, W G w^2 / ((w0^2-w^2)^2 + G^2 w^2)."""

    peaks: tuple

    def __post_init__(self):
        object.__setattr__(self, "peaks", tuple(self.peaks))
        if len(self.peaks) < 1:
            raise ValueError("at least one peak is required")

    @classmethod
    def from_thz(cls, rows: Iterable[Sequence[float]]) -> "LorentzianSumModel":
        """Build from (nu0_thz, gamma_thz, weight) rows, converting to rad/ps."""
        return cls(tuple(
            LorentzianPeak(omega_from_thz(nu0), omega_from_thz(gam), wt)
            for nu0, gam, wt in rows
        ))

    @property
    def omega0s(self) -> np.ndarray:
        return np.array([p.omega0 for p in self.peaks])

    @property
    def gammas(self) -> np.ndarray:
        return np.array([p.gamma for p in self.peaks])

    @property
    def weights(self) -> np.ndarray:
        return np.array([p.weight for p in self.peaks])

    def ratios(self) -> np.ndarray:
        """Peak weights relative to the first peak."""
        w = self.weights
        if w[0] == 0:
            raise ValueError("first peak weight is zero; ratios undefined")
        return w / w[0]

    def scaled(self, factor: float) -> "LorentzianSumModel":
        """Same peaks with all weights multiplied by ``factor``."""
        return LorentzianSumModel(tuple(
            LorentzianPeak(p.omega0, p.gamma, p.weight * factor) for p in self.peaks
        ))

    def dos(self, omega):
        return eval_lorentzian_dos(self, omega)


@dataclass(frozen=True, eq=False)
class TabulatedDos:
    """Measured DOS samples on a strictly increasing frequency grid.

    The constructor is strict (values must already be nonnegative); use
    :meth:`from_samples` to ingest raw measured data, which sorts the
    rows, averages duplicate frequencies and clamps small negative
    excursions.
    """

    grid: np.ndarray
    values: np.ndarray
    unit_note: str = ""

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float).copy()
        values = np.asarray(self.values, dtype=float).copy()
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
            raise ValueError("grid and values must be 1d arrays of equal length >= 2")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if grid[0] < 0:
            raise ValueError("frequencies must be nonnegative")
        if not np.all(np.isfinite(grid)) or not np.all(np.isfinite(values)):
            raise ValueError("grid and values must be finite")
        if np.any(values < 0):
            raise ValueError(
                "DOS values must be nonnegative; use TabulatedDos.from_samples for noisy data"
            )
        grid.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def __eq__(self, other):
        if not isinstance(other, TabulatedDos):
            return NotImplemented
        return (
            np.array_equal(self.grid, other.grid)
            and np.array_equal(self.values, other.values)
            and self.unit_note == other.unit_note
        )

    @classmethod
    def from_samples(cls, grid, values, unit_note: str = "") -> "TabulatedDos":
        """Ingest raw samples: sort, average duplicates, clamp noise.

        Negative values of magnitude up to 1e-3 of the maximum are set
        to zero; anything more negative raises, since measured DOS are
        physically nonnegative.
        """
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise ValueError("grid and values must be 1d arrays of equal length")
        if not np.all(np.isfinite(grid)) or not np.all(np.isfinite(values)):
            raise ValueError("grid and values must be finite")
        order = np.argsort(grid, kind="stable")
        grid = grid[order]
        values = values[order]
        uniq, inverse = np.unique(grid, return_inverse=True)
        if uniq.size != grid.size:
            sums = np.bincount(inverse, weights=values)
            counts = np.bincount(inverse)
            grid, values = uniq, sums / counts
        vmax = float(values.max()) if values.size else 0.0
        tol = NEGATIVE_NOISE_FRACTION * max(vmax, 0.0)
        worst = float(values.min()) if values.size else 0.0
        if worst < -tol:
            raise ValueError(
                f"DOS value {worst:g} is more negative than the noise tolerance {-tol:g}"
            )
        values = np.maximum(values, 0.0)
        return cls(grid, values, unit_note)

    def dos(self, omega):
        return eval_tabulated_dos(self, omega)


DosModel = Union[DebyeParams, LorentzianSumModel, TabulatedDos]


def eval_debye_dos(params: DebyeParams, omega):
    """Debye DOS, dim * Omega_d * w^(d-1) / (2 pi c)^d below the cutoff, 0 above.

    The prefactor includes one acoustic branch per bath dimension, which
    reproduces the familiar 3 w^2 / (2 pi^2 c^3) in 3D.
    """
    w = np.asarray(omega, dtype=float)
    _check_nonnegative(w)
    d = params.dim
    pref = d * SOLID_ANGLE[d] / (TWO_PI * params.sound_speed) ** d
    out = np.where(w <= params.cutoff, pref * w ** (d - 1), 0.0)
    return out if w.ndim else float(out)


def eval_lorentzian_dos(model: LorentzianSumModel, omega):
    """Total DOS of a Lorentzian sum; finite for all w >= 0 since widths are positive."""
    w = np.asarray(omega, dtype=float)
    _check_nonnegative(w)
    w2 = w[..., np.newaxis] ** 2
    w0sq = model.omega0s ** 2
    g = model.gammas
    den = (w0sq - w2) ** 2 + (g ** 2) * w2
    out = ((model.weights * g) * w2 / den).sum(axis=-1)
    return out if w.ndim else float(out)


def eval_tabulated_dos(table: TabulatedDos, omega):
    """Linear interpolation of tabulated samples; exact at the grid nodes.

    Frequencies outside the tabulated range raise, because extrapolating
    measured data silently is worse than making the caller clamp.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w < table.grid[0]) or np.any(w > table.grid[-1]):
        raise ValueError(
            f"frequency outside the tabulated range "
            f"[{table.grid[0]:g}, {table.grid[-1]:g}] rad/ps"
        )
    out = np.interp(w, table.grid, table.values)
    return out if w.ndim else float(out)


def eval_dos(model: DosModel, omega):
    """Evaluate any DOS model at angular frequency omega (rad/ps)."""
    if isinstance(model, DebyeParams):
        return eval_debye_dos(model, omega)
    if isinstance(model, LorentzianSumModel):
        return eval_lorentzian_dos(model, omega)
    if isinstance(model, TabulatedDos):
        return eval_tabulated_dos(model, omega)
    raise TypeError(f"not a DOS model: {type(model).__name__}")


def debye_from_temperature(t_kelvin: float) -> float:
    """Debye cutoff in rad/ps from the Debye temperature, hbar w_D = k_B T_D."""
    if not t_kelvin > 0:
        raise ValueError("Debye temperature must be positive")
    return K_B * t_kelvin / HBAR * 1e-12


def total_weight(model: LorentzianSumModel) -> float:
    """Exact frequency integral of the model DOS.

    Each peak integrates to (pi/2) W_j because
    int_0^inf w^2 dw / ((w0^2-w^2)^2 + G^2 w^2) = pi / (2 G).
    """
    return float(0.5 * np.pi * model.weights.sum())


def support_interval(model: DosModel) -> tuple:
    """Frequency interval outside of which the model is identically zero.

    Lorentzian sums have unbounded support, reported as (0, inf).
    """
    if isinstance(model, DebyeParams):
        return (0.0, model.cutoff)
    if isinstance(model, TabulatedDos):
        return (float(model.grid[0]), float(model.grid[-1]))
    if isinstance(model, LorentzianSumModel):
        return (0.0, np.inf)
    raise TypeError(f"not a DOS model: {type(model).__name__}")
