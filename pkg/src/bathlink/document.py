"""Model documents: the JSON interchange format of the CLI.

Documents carry parameters in CLI units (ordinary frequencies in THz,
sound speeds in km/s), so serialisation round-trips losslessly: floats
pass through JSON unchanged and no unit conversion happens until a
document is turned into a runtime model. Weights are stored absolutely
per peak; the weight ratios relative to the first peak are emitted as a
redundant, human-oriented field and ignored on parsing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .models import (
    DebyeParams,
    DosModel,
    LorentzianPeak,
    LorentzianSumModel,
    TabulatedDos,
)
from .translate import CouplingSpec, GConstant, GPowerLaw
from .units import omega_from_thz, thz_from_omega

__all__ = [
    "PeakDoc",
    "DebyeDoc",
    "LorentzianDoc",
    "TabulatedDoc",
    "CouplingDoc",
    "ModelDocument",
    "dumps",
    "parse",
    "save",
    "load",
    "to_model",
    "from_model",
    "as_dict",
    "spec_from_doc",
]

SCHEMA_VERSION = "1"
KINDS = ("debye", "lorentzian_sum", "tabulated")


@dataclass(frozen=True)
class PeakDoc:
    nu0_thz: float
    gamma_thz: float
    weight: float


@dataclass(frozen=True)
class DebyeDoc:
    sound_speed_km_s: float
    cutoff_thz: float
    dim: int


@dataclass(frozen=True)
class LorentzianDoc:
    peaks: tuple


@dataclass(frozen=True)
class TabulatedDoc:
    nu_thz: tuple
    dos: tuple
    unit_note: str = ""


@dataclass(frozen=True)
class CouplingDoc:
    g_type: str = "constant"
    g: Optional[float] = 1.0
    g0: Optional[float] = None
    p: Optional[float] = None
    nu_ref_thz: Optional[float] = None
    d_s: int = 3
    d: int = 3

    def __post_init__(self):
        if self.g_type not in ("constant", "power_law"):
            raise ValueError(f"unknown coupling type {self.g_type!r}")
        if self.g_type == "constant" and self.g is None:
            raise ValueError("constant coupling needs g")
        if self.g_type == "power_law" and None in (self.g0, self.p, self.nu_ref_thz):
            raise ValueError("power-law coupling needs g0, p and nu_ref_thz")


@dataclass(frozen=True)
class ModelDocument:
    """One DOS model plus its coupling spec, in CLI units."""

    kind: str
    coupling: CouplingDoc = field(default_factory=CouplingDoc)
    debye: Optional[DebyeDoc] = None
    lorentzian_sum: Optional[LorentzianDoc] = None
    tabulated: Optional[TabulatedDoc] = None
    provenance: str = ""
    schema_version: str = SCHEMA_VERSION

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        payload = {
            "debye": self.debye,
            "lorentzian_sum": self.lorentzian_sum,
            "tabulated": self.tabulated,
        }
        if payload[self.kind] is None:
            raise ValueError(f"document of kind {self.kind!r} is missing its payload")
        for kind, value in payload.items():
            if kind != self.kind and value is not None:
                raise ValueError(f"document of kind {self.kind!r} also carries {kind!r}")


def _coupling_dict(c: CouplingDoc) -> dict:
    if c.g_type == "constant":
        g_model = {"type": "constant", "g": c.g}
    else:
        g_model = {"type": "power_law", "g0": c.g0, "p": c.p, "nu_ref_thz": c.nu_ref_thz}
    return {"g_model": g_model, "d_s": c.d_s, "d": c.d}


def as_dict(doc: ModelDocument) -> dict:
    out = {
        "schema_version": doc.schema_version,
        "kind": doc.kind,
        "provenance": doc.provenance,
        "coupling": _coupling_dict(doc.coupling),
    }
    if doc.kind == "debye":
        d = doc.debye
        out["debye"] = {
            "sound_speed_km_s": d.sound_speed_km_s,
            "cutoff_thz": d.cutoff_thz,
            "dim": d.dim,
        }
    elif doc.kind == "lorentzian_sum":
        peaks = doc.lorentzian_sum.peaks
        out["lorentzian_sum"] = {
            "peaks": [
                {"nu0_thz": p.nu0_thz, "gamma_thz": p.gamma_thz, "weight": p.weight}
                for p in peaks
            ]
        }
        w1 = peaks[0].weight
        if w1 != 0:
            out["lorentzian_sum"]["ratios"] = [p.weight / w1 for p in peaks]
    else:
        t = doc.tabulated
        out["tabulated"] = {
            "nu_thz": list(t.nu_thz),
            "dos": list(t.dos),
            "unit_note": t.unit_note,
        }
    return out


def dumps(doc: ModelDocument) -> str:
    """Canonical JSON text: two-space indent, LF line endings, '.' decimals."""
    return json.dumps(as_dict(doc), indent=2) + "\n"


def _need(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ValueError(f"{context} is missing the {key!r} field")
    return mapping[key]


def _parse_coupling(raw: dict) -> CouplingDoc:
    gm = _need(raw, "g_model", "coupling")
    g_type = _need(gm, "type", "g_model")
    d_s = int(_need(raw, "d_s", "coupling"))
    d = int(_need(raw, "d", "coupling"))
    if g_type == "constant":
        return CouplingDoc("constant", g=float(_need(gm, "g", "g_model")), d_s=d_s, d=d)
    if g_type == "power_law":
        return CouplingDoc(
            "power_law",
            g=None,
            g0=float(_need(gm, "g0", "g_model")),
            p=float(_need(gm, "p", "g_model")),
            nu_ref_thz=float(_need(gm, "nu_ref_thz", "g_model")),
            d_s=d_s,
            d=d,
        )
    raise ValueError(f"unknown coupling type {g_type!r}")


def parse(text: str) -> ModelDocument:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValueError("model document must be a JSON object")
    version = str(_need(raw, "schema_version", "document"))
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version {version!r}")
    kind = _need(raw, "kind", "document")
    coupling = _parse_coupling(_need(raw, "coupling", "document"))
    provenance = str(raw.get("provenance", ""))
    debye = lorentz = tabulated = None
    if kind == "debye":
        d = _need(raw, "debye", "document")
        debye = DebyeDoc(
            float(_need(d, "sound_speed_km_s", "debye")),
            float(_need(d, "cutoff_thz", "debye")),
            int(_need(d, "dim", "debye")),
        )
    elif kind == "lorentzian_sum":
        l = _need(raw, "lorentzian_sum", "document")
        rows = _need(l, "peaks", "lorentzian_sum")
        if not rows:
            raise ValueError("lorentzian_sum must contain at least one peak")
        lorentz = LorentzianDoc(tuple(
            PeakDoc(
                float(_need(r, "nu0_thz", "peak")),
                float(_need(r, "gamma_thz", "peak")),
                float(_need(r, "weight", "peak")),
            )
            for r in rows
        ))
    elif kind == "tabulated":
        t = _need(raw, "tabulated", "document")
        tabulated = TabulatedDoc(
            tuple(float(v) for v in _need(t, "nu_thz", "tabulated")),
            tuple(float(v) for v in _need(t, "dos", "tabulated")),
            str(t.get("unit_note", "")),
        )
    else:
        raise ValueError(f"unknown model kind {kind!r}")
    return ModelDocument(
        kind=kind,
        coupling=coupling,
        debye=debye,
        lorentzian_sum=lorentz,
        tabulated=tabulated,
        provenance=provenance,
        schema_version=version,
    )


def save(doc: ModelDocument, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(doc))


def load(path) -> ModelDocument:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


def spec_from_doc(c: CouplingDoc) -> CouplingSpec:
    if c.g_type == "constant":
        g_model = GConstant(c.g)
    else:
        g_model = GPowerLaw(c.g0, c.p, omega_from_thz(c.nu_ref_thz))
    return CouplingSpec(g_model, d_s=c.d_s, d=c.d)


def to_model(doc: ModelDocument):
    """(DosModel, CouplingSpec) in internal rad/ps units."""
    spec = spec_from_doc(doc.coupling)
    if doc.kind == "debye":
        d = doc.debye
        model = DebyeParams(d.sound_speed_km_s, omega_from_thz(d.cutoff_thz), d.dim)
    elif doc.kind == "lorentzian_sum":
        model = LorentzianSumModel(tuple(
            LorentzianPeak(
                omega_from_thz(p.nu0_thz), omega_from_thz(p.gamma_thz), p.weight
            )
            for p in doc.lorentzian_sum.peaks
        ))
    else:
        t = doc.tabulated
        model = TabulatedDos(
            [omega_from_thz(v) for v in t.nu_thz], list(t.dos), t.unit_note
        )
    return model, spec


def from_model(model: DosModel, spec: CouplingSpec, provenance: str = "") -> ModelDocument:
    """Document from runtime objects, converting to CLI units."""
    if isinstance(spec.g_model, GConstant):
        coupling = CouplingDoc("constant", g=spec.g_model.g, d_s=spec.d_s, d=spec.d)
    else:
        coupling = CouplingDoc(
            "power_law",
            g=None,
            g0=spec.g_model.g0,
            p=spec.g_model.p,
            nu_ref_thz=thz_from_omega(spec.g_model.omega_ref),
            d_s=spec.d_s,
            d=spec.d,
        )
    if isinstance(model, DebyeParams):
        return ModelDocument(
            "debye",
            coupling,
            debye=DebyeDoc(model.sound_speed, thz_from_omega(model.cutoff), model.dim),
            provenance=provenance,
        )
    if isinstance(model, LorentzianSumModel):
        return ModelDocument(
            "lorentzian_sum",
            coupling,
            lorentzian_sum=LorentzianDoc(tuple(
                PeakDoc(thz_from_omega(p.omega0), thz_from_omega(p.gamma), p.weight)
                for p in model.peaks
            )),
            provenance=provenance,
        )
    if isinstance(model, TabulatedDos):
        return ModelDocument(
            "tabulated",
            coupling,
            tabulated=TabulatedDoc(
                tuple(thz_from_omega(v) for v in model.grid),
                tuple(float(v) for v in model.values),
                model.unit_note,
            ),
            provenance=provenance,
        )
    raise TypeError(f"not a DOS model: {type(model).__name__}")
