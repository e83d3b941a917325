"""bathlink: bath densities of states <-> open-system coupling functions.

Translate a bosonic bath's density of states into the coupling function
and spectral density of the equivalent frequency-space bath (and back),
fit multi-peak Lorentzian models to tabulated phonon DOS data, and
evaluate the resulting memory kernels analytically or by quadrature.
"""

from .models import (
    DebyeParams,
    LorentzianPeak,
    LorentzianSumModel,
    TabulatedDos,
    debye_from_temperature,
    eval_debye_dos,
    eval_dos,
    eval_lorentzian_dos,
    eval_tabulated_dos,
    support_interval,
    total_weight,
)
from .translate import (
    CouplingFunction,
    CouplingSpec,
    GConstant,
    GPowerLaw,
    OhmicityReport,
    SpectralDensity,
    classify_ohmicity,
    coupling_from_dos,
    dos_from_coupling,
    eval_g,
    factor_coupling_tensor,
    psd_sqrt,
)
from .kernel import (
    KernelCurve,
    MemoryTimeReport,
    analytic_kernel,
    kernel_debye_analytic,
    kernel_lorentzian_analytic,
    kernel_quadrature,
    memory_times,
)
from .fitting import (
    CalibrationInput,
    CalibrationResult,
    FitOptions,
    FitReport,
    PositivityReport,
    calibrate_amplitude,
    fit_lorentzian,
    init_peaks,
    low_frequency_slope,
    validate_positivity,
)

__version__ = "0.1.0"
