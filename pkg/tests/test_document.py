import json

import numpy as np
import pytest

import bathlink.datasets as ds
from bathlink import DebyeParams, GPowerLaw, TabulatedDos
from bathlink.document import (
    CouplingDoc,
    DebyeDoc,
    LorentzianDoc,
    ModelDocument,
    PeakDoc,
    TabulatedDoc,
    dumps,
    from_model,
    load,
    parse,
    save,
    to_model,
)
from bathlink.translate import CouplingSpec, GConstant
from bathlink.units import omega_from_thz

IRON_NU_D_THZ = 8.75138003179758  # k_B * 420 K / h


class TestRoundTrip:
    def test_parse_print_identity_on_bundled_documents(self):
        for name in ds.DOCUMENT_NAMES:
            doc = ds.load_document(name)
            assert parse(dumps(doc)) == doc

    def test_bundled_files_are_canonical(self):
        # the stored bytes equal the canonical serialisation of their parse
        for name in ds.DOCUMENT_NAMES:
            text = ds.document_path(name).read_text(encoding="utf-8")
            assert dumps(parse(text)) == text

    def test_tabulated_roundtrip(self):
        doc = ModelDocument(
            "tabulated",
            CouplingDoc(),
            tabulated=TabulatedDoc((0.5, 1.0, 2.0), (0.1, 0.9, 0.2), "per meV, arbitrary"),
            provenance="unit test",
        )
        assert parse(dumps(doc)) == doc

    def test_power_law_coupling_roundtrip(self):
        doc = ModelDocument(
            "debye",
            CouplingDoc("power_law", g=None, g0=2.0, p=0.5, nu_ref_thz=3.0, d_s=2, d=3),
            debye=DebyeDoc(2.0, 3.54, 3),
        )
        again = parse(dumps(doc))
        assert again == doc
        _, spec = to_model(again)
        assert isinstance(spec.g_model, GPowerLaw)
        assert spec.g_model.omega_ref == pytest.approx(omega_from_thz(3.0), rel=1e-15)
        assert (spec.d_s, spec.d) == (2, 3)

    def test_save_load(self, tmp_path):
        doc = ds.load_document("gold_lorentz2")
        path = tmp_path / "doc.json"
        save(doc, path)
        assert load(path) == doc


class TestDatasetConsistency:
    def test_gold_document_matches_dataset_model(self):
        model, spec = to_model(ds.load_document("gold_lorentz2"))
        assert model == ds.gold_two_peak()
        assert spec == CouplingSpec(GConstant(1.0), 3, 3)

    def test_all_lorentzian_documents_match_tables(self):
        pairs = {
            "gold_lorentz2": ds.gold_two_peak,
            "iron_lorentz1": ds.iron_single_peak,
            "iron_lorentz3": ds.iron_three_peak,
            "iron_lorentz5": ds.iron_five_peak,
            "yig_lorentz1": ds.yig_single_peak,
            "yig_lorentz18": ds.yig_eighteen_peak,
        }
        for name, factory in pairs.items():
            model, _ = to_model(ds.load_document(name))
            assert model == factory(), name

    def test_iron_debye_cutoff_from_temperature(self):
        doc = ds.load_document("iron_debye")
        assert doc.debye.cutoff_thz == pytest.approx(IRON_NU_D_THZ, rel=1e-12)

    def test_gold_debye_cutoff_verbatim(self):
        assert ds.load_document("gold_debye").debye.cutoff_thz == 3.54

    def test_ratios_field_matches_weights(self):
        raw = json.loads(ds.document_path("yig_lorentz18").read_text())
        peaks = raw["lorentzian_sum"]["peaks"]
        ratios = raw["lorentzian_sum"]["ratios"]
        w1 = peaks[0]["weight"]
        assert ratios == [p["weight"] / w1 for p in peaks]
        assert -86.60 in ratios and -13.70 in ratios


class TestFromModel:
    def test_model_document_model_cycle(self):
        model = ds.iron_five_peak()
        spec = CouplingSpec(GConstant(0.7), 3, 3)
        doc = from_model(model, spec, provenance="cycle")
        back, spec2 = to_model(parse(dumps(doc)))
        assert spec2 == spec
        for a, b in zip(back.peaks, model.peaks):
            assert a.omega0 == pytest.approx(b.omega0, rel=1e-15)
            assert a.gamma == pytest.approx(b.gamma, rel=1e-15)
            assert a.weight == b.weight

    def test_tabulated_from_model(self):
        table = TabulatedDos(omega_from_thz(np.array([1.0, 2.0])), [0.3, 0.4], "note")
        doc = from_model(table, CouplingSpec(GConstant(1.0)))
        back, _ = to_model(doc)
        assert np.allclose(back.grid, table.grid, rtol=1e-15)
        assert back.unit_note == "note"

    def test_debye_from_model(self):
        deb = DebyeParams(3.5, omega_from_thz(8.75), 2)
        doc = from_model(deb, CouplingSpec(GConstant(1.0), d_s=2, d=2))
        assert doc.kind == "debye"
        assert doc.debye.dim == 2
        back, _ = to_model(doc)
        assert back.cutoff == pytest.approx(deb.cutoff, rel=1e-15)


class TestSchemaErrors:
    def test_unknown_version(self):
        text = dumps(ds.load_document("gold_debye")).replace('"schema_version": "1"', '"schema_version": "9"')
        with pytest.raises(ValueError, match="schema version"):
            parse(text)

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="kind"):
            ModelDocument("gaussian", CouplingDoc())

    def test_missing_payload(self):
        with pytest.raises(ValueError, match="payload"):
            ModelDocument("debye", CouplingDoc())

    def test_conflicting_payload(self):
        with pytest.raises(ValueError, match="also carries"):
            ModelDocument(
                "debye",
                CouplingDoc(),
                debye=DebyeDoc(1.0, 1.0, 3),
                lorentzian_sum=LorentzianDoc((PeakDoc(1.0, 1.0, 1.0),)),
            )

    def test_not_json(self):
        with pytest.raises(ValueError, match="JSON"):
            parse("not json at all")

    def test_missing_field(self):
        raw = json.loads(dumps(ds.load_document("gold_debye")))
        del raw["debye"]["cutoff_thz"]
        with pytest.raises(ValueError, match="cutoff_thz"):
            parse(json.dumps(raw))

    def test_empty_peak_list(self):
        raw = json.loads(dumps(ds.load_document("gold_lorentz2")))
        raw["lorentzian_sum"]["peaks"] = []
        with pytest.raises(ValueError, match="at least one peak"):
            parse(json.dumps(raw))
