"""Bundled example models: published multi-peak fit tables.

The peak tables (center frequency, width, weight ratio; frequencies as
nu = omega/2pi in THz) reproduce published Lorentzian parametrisations
of the phonon DOS of gold, iron and yttrium iron garnet (YIG), plus the
matching Debye cutoffs. All absolute weight scales are arbitrary; the
first-peak weight is set to 1 so stored weights coincide with the
published ratios.

The same models ship as ready-made JSON documents under ``data/`` so the
CLI can be exercised without any external downloads; see
:func:`load_document` and :func:`document_path`.
"""

from __future__ import annotations

from importlib import resources

from .document import ModelDocument, parse
from .models import DebyeParams, LorentzianSumModel, debye_from_temperature

__all__ = [
    "gold_two_peak",
    "iron_single_peak",
    "iron_three_peak",
    "iron_five_peak",
    "yig_single_peak",
    "yig_eighteen_peak",
    "gold_debye",
    "iron_debye",
    "DOCUMENT_NAMES",
    "load_document",
    "document_path",
]

# (nu0 [THz], Gamma [THz], weight ratio)
GOLD_TWO_PEAK_THZ = (
    (2.11, 1.3, 1.0),
    (4.05, 0.56, 0.15),
)

IRON_SINGLE_THZ = ((6.27, 3.71, 1.0),)

IRON_THREE_THZ = (
    (5.23, 2.04, 1.0),
    (6.77, 1.74, 0.50),
    (8.45, 0.71, 0.62),
)

IRON_FIVE_THZ = (
    (4.67, 1.87, 1.0),
    (5.46, 0.74, 0.34),
    (6.63, 1.41, 1.20),
    (8.03, 0.78, 0.27),
    (8.49, 0.44, 0.68),
)

YIG_SINGLE_THZ = ((5.91, 12.4, 1.0),)

YIG_EIGHTEEN_THZ = (
    (2.56, 0.99, 1.0),
    (3.66, 1.35, 16.20),
    (4.89, 1.22, 10.10),
    (6.45, 0.55, 1.47),
    (7.16, 0.99, 7.75),
    (8.10, 1.20, 10.60),
    (9.20, 1.18, 11.50),
    (10.20, 0.54, 1.70),
    (10.80, 1.82, 11.30),
    (12.60, 1.67, 33.20),
    (13.70, 0.83, 9.07),
    (13.80, 3.80, -86.60),
    (14.40, 1.30, 19.60),
    (16.10, 1.07, -13.70),
    (16.40, 1.83, 40.10),
    (18.70, 1.46, 6.08),
    (20.10, 0.94, 4.27),
    (20.90, 0.45, 2.20),
)

GOLD_DEBYE_NU_THZ = 3.54
GOLD_SOUND_SPEED_KM_S = 2.0  # scale only; classification and kernels are c-independent
IRON_DEBYE_TEMP_K = 420.0
IRON_SOUND_SPEED_KM_S = 3.5

DOCUMENT_NAMES = (
    "gold_lorentz2",
    "gold_debye",
    "iron_lorentz1",
    "iron_lorentz3",
    "iron_lorentz5",
    "iron_debye",
    "yig_lorentz1",
    "yig_lorentz18",
)

EXAMPLE_DATA_FILES = DOCUMENT_NAMES + ("gold_synthetic_dos",)


def gold_two_peak() -> LorentzianSumModel:
    return LorentzianSumModel.from_thz(GOLD_TWO_PEAK_THZ)


def iron_single_peak() -> LorentzianSumModel:
    return LorentzianSumModel.from_thz(IRON_SINGLE_THZ)


def iron_three_peak() -> LorentzianSumModel:
    return LorentzianSumModel.from_thz(IRON_THREE_THZ)


def iron_five_peak() -> LorentzianSumModel:
    return LorentzianSumModel.from_thz(IRON_FIVE_THZ)


def yig_single_peak() -> LorentzianSumModel:
    return LorentzianSumModel.from_thz(YIG_SINGLE_THZ)


def yig_eighteen_peak() -> LorentzianSumModel:
    return LorentzianSumModel.from_thz(YIG_EIGHTEEN_THZ)


def gold_debye() -> DebyeParams:
    from .units import omega_from_thz

    return DebyeParams(GOLD_SOUND_SPEED_KM_S, omega_from_thz(GOLD_DEBYE_NU_THZ), 3)


def iron_debye() -> DebyeParams:
    return DebyeParams(IRON_SOUND_SPEED_KM_S, debye_from_temperature(IRON_DEBYE_TEMP_K), 3)


def _data_file(name: str):
    suffix = ".csv" if name == "gold_synthetic_dos" else ".json"
    return resources.files("bathlink").joinpath("data", name + suffix)


def document_path(name: str):
    """Filesystem path of a bundled data file (document JSON or CSV)."""
    if name not in EXAMPLE_DATA_FILES:
        raise KeyError(f"unknown example {name!r}; choose from {EXAMPLE_DATA_FILES}")
    return _data_file(name)


def load_document(name: str) -> ModelDocument:
    if name not in DOCUMENT_NAMES:
        raise KeyError(f"unknown document {name!r}; choose from {DOCUMENT_NAMES}")
    return parse(_data_file(name).read_text(encoding="utf-8"))
