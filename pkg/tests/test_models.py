import numpy as np
import pytest
from scipy.integrate import quad

import bathlink.datasets as ds
from bathlink import (
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
from bathlink.units import TWO_PI, omega_from_thz, thz_from_omega

# Frozen oracles, computed independently with plain-python arithmetic:
# term-by-term sum of the two gold peaks at nu = 3 THz, and
# k_B * 420 K / hbar / 2pi with CODATA constants.
GOLD_DOS_AT_3THZ = 0.05396718907888789
IRON_NU_D_THZ = 8.75138003179758  # k_B * 420 K / h


def quad_total_weight(model):
    """Independent adaptive-quadrature oracle for the DOS integral.

    scipy.integrate.quad over [0, 200 Gamma_max] plus the remaining
    tail out to infinity (the tail holds a few 1e-3 of the total and
    cannot be dropped at 1e-4 accuracy).
    """
    lam = 200.0 * float(model.gammas.max())
    pts = [float(w) for w in model.omega0s if w < lam]
    head, _ = quad(lambda w: eval_lorentzian_dos(model, w), 0.0, lam, points=pts, limit=400)
    tail, _ = quad(lambda w: eval_lorentzian_dos(model, w), lam, np.inf, limit=400)
    return head + tail


class TestDebye:
    def test_omega_squared_scaling_ratio(self):
        p = DebyeParams(1.7, omega_from_thz(3.54), 3)
        assert eval_debye_dos(p, p.cutoff / 2) / eval_debye_dos(p, p.cutoff) == pytest.approx(0.25, rel=1e-14)

    def test_zero_above_cutoff(self):
        p = DebyeParams(1.7, omega_from_thz(3.54), 3)
        assert eval_debye_dos(p, 1.01 * p.cutoff) == 0.0
        assert eval_debye_dos(p, p.cutoff) > 0.0

    def test_3d_matches_explicit_form(self):
        rng = np.random.default_rng(11235)
        for _ in range(100):
            c = rng.uniform(0.5, 8.0)
            p = DebyeParams(c, rng.uniform(5.0, 60.0), 3)
            w = rng.uniform(0.0, p.cutoff)
            expected = 3.0 * w * w / (2.0 * np.pi ** 2 * c ** 3)
            assert eval_debye_dos(p, w) == pytest.approx(expected, rel=1e-12)

    def test_1d_is_constant(self):
        p = DebyeParams(2.5, 30.0, 1)
        vals = eval_debye_dos(p, np.array([0.0, 1.0, 7.7, 29.9]))
        assert np.allclose(vals, 2.0 / (TWO_PI * 2.5), rtol=1e-14)

    def test_2d_is_linear(self):
        p = DebyeParams(2.5, 30.0, 2)
        assert eval_debye_dos(p, 10.0) == pytest.approx(2 * eval_debye_dos(p, 5.0), rel=1e-14)

    def test_continuous_below_cutoff(self):
        p = DebyeParams(3.0, 20.0, 3)
        w = np.linspace(0.01, 19.99, 4001)
        vals = eval_debye_dos(p, w)
        assert np.all(np.abs(np.diff(vals)) < 0.02 * vals.max())

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            DebyeParams(1.0, 10.0, 4)
        with pytest.raises(ValueError):
            DebyeParams(-1.0, 10.0, 3)
        with pytest.raises(ValueError):
            DebyeParams(1.0, 0.0, 3)
        p = DebyeParams(1.0, 10.0, 3)
        with pytest.raises(ValueError):
            eval_debye_dos(p, -1.0)


class TestLorentzian:
    def test_zero_at_zero_frequency(self):
        assert eval_lorentzian_dos(ds.gold_two_peak(), 0.0) == 0.0

    def test_single_peak_height(self):
        peak = LorentzianPeak(12.0, 3.0, 0.7)
        model = LorentzianSumModel((peak,))
        assert eval_lorentzian_dos(model, 12.0) == pytest.approx(0.7 / 3.0, rel=1e-14)

    def test_gold_value_matches_term_by_term_oracle(self):
        got = eval_lorentzian_dos(ds.gold_two_peak(), omega_from_thz(3.0))
        assert got == pytest.approx(GOLD_DOS_AT_3THZ, rel=1e-14)

    def test_nonnegative_for_positive_weights(self):
        rng = np.random.default_rng(7)
        w = np.linspace(0.0, 80.0, 3000)
        for _ in range(20):
            n = int(rng.integers(1, 8))
            model = LorentzianSumModel(tuple(
                LorentzianPeak(rng.uniform(2, 40), rng.uniform(0.3, 8), rng.uniform(0.1, 5))
                for _ in range(n)
            ))
            assert np.all(eval_lorentzian_dos(model, w) >= 0.0)

    def test_peak_validation(self):
        with pytest.raises(ValueError):
            LorentzianPeak(0.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            LorentzianPeak(1.0, 0.0, 1.0)
        LorentzianPeak(1.0, 1.0, -2.0)  # negative weight is allowed
        with pytest.raises(ValueError):
            LorentzianSumModel(())


class TestTotalWeight:
    def test_single_peak_normalisation(self):
        model = LorentzianSumModel((LorentzianPeak(10.0, 2.0, 2.0 / np.pi),))
        assert total_weight(model) == pytest.approx(1.0, rel=1e-15)

    def test_linear_in_peaks(self):
        one = LorentzianSumModel((LorentzianPeak(10.0, 2.0, 0.8),))
        two = LorentzianSumModel((LorentzianPeak(10.0, 2.0, 0.8),) * 2)
        assert total_weight(two) == pytest.approx(2 * total_weight(one), rel=1e-15)

    def test_gold_against_quadrature_oracle(self):
        model = ds.gold_two_peak()
        assert total_weight(model) == pytest.approx(quad_total_weight(model), rel=1e-4)

    def test_random_models_against_quadrature_oracle(self):
        rng = np.random.default_rng(42)
        for trial in range(12):
            n = int(rng.integers(1, 21))
            weights = rng.uniform(0.2, 3.0, n)
            if trial % 3 == 0 and n > 1:
                # a small negative satellite; the summed DOS stays positive
                weights[-1] = -0.02 * weights[:-1].sum()
            model = LorentzianSumModel(tuple(
                LorentzianPeak(rng.uniform(3, 40), rng.uniform(0.5, 6), float(wt))
                for wt in weights
            ))
            probe = np.linspace(0.01, 120.0, 1500)
            if np.any(eval_lorentzian_dos(model, probe) < 0):
                continue
            assert total_weight(model) == pytest.approx(quad_total_weight(model), rel=1e-4)


class TestTabulated:
    def test_exact_at_nodes(self):
        t = TabulatedDos([1.0, 2.0, 4.0], [0.3, 0.9, 0.1])
        for w, v in zip(t.grid, t.values):
            assert eval_tabulated_dos(t, w) == v

    def test_linear_midpoint(self):
        t = TabulatedDos([1.0, 2.0], [0.4, 1.0])
        assert eval_tabulated_dos(t, 1.5) == pytest.approx(0.7, rel=1e-15)

    def test_two_node_thz_example(self):
        t = TabulatedDos(omega_from_thz(np.array([1.0, 2.0])), [0.0, 4.0])
        assert eval_tabulated_dos(t, omega_from_thz(1.25)) == pytest.approx(1.0, rel=1e-12)

    def test_out_of_range_raises(self):
        t = TabulatedDos([1.0, 2.0], [0.0, 4.0])
        with pytest.raises(ValueError, match="outside the tabulated range"):
            eval_tabulated_dos(t, 2.5)
        with pytest.raises(ValueError, match="outside the tabulated range"):
            eval_tabulated_dos(t, np.array([1.5, 0.5]))

    def test_monotone_between_monotone_nodes(self):
        rng = np.random.default_rng(5)
        grid = np.sort(rng.uniform(1, 50, 30))
        values = np.sort(rng.uniform(0, 2, 30))
        t = TabulatedDos(grid, values)
        q = np.sort(rng.uniform(grid[0], grid[-1], 500))
        out = eval_tabulated_dos(t, q)
        assert np.all(np.diff(out) >= -1e-15)

    def test_from_samples_sorts_and_averages_duplicates(self):
        t = TabulatedDos.from_samples([3.0, 1.0, 3.0], [0.6, 0.1, 0.2])
        assert np.array_equal(t.grid, [1.0, 3.0])
        assert np.allclose(t.values, [0.1, 0.4])

    def test_from_samples_clamps_small_negatives(self):
        t = TabulatedDos.from_samples([1.0, 2.0, 3.0], [1.0, -0.0005, 0.5])
        assert t.values[1] == 0.0

    def test_from_samples_rejects_large_negatives(self):
        with pytest.raises(ValueError, match="negative"):
            TabulatedDos.from_samples([1.0, 2.0, 3.0], [1.0, -0.1, 0.5])

    def test_validation(self):
        with pytest.raises(ValueError):
            TabulatedDos([1.0], [1.0])
        with pytest.raises(ValueError):
            TabulatedDos([2.0, 1.0], [0.1, 0.2])
        with pytest.raises(ValueError):
            TabulatedDos([1.0, 1.0], [0.1, 0.2])
        with pytest.raises(ValueError):
            TabulatedDos([1.0, 2.0], [0.1, -0.2])
        with pytest.raises(ValueError):
            TabulatedDos([-1.0, 2.0], [0.1, 0.2])


class TestDebyeFromTemperature:
    def test_iron_value(self):
        assert thz_from_omega(debye_from_temperature(420.0)) == pytest.approx(
            IRON_NU_D_THZ, rel=1e-12
        )

    def test_linear(self):
        assert debye_from_temperature(840.0) == pytest.approx(
            2 * debye_from_temperature(420.0), rel=1e-15
        )
        assert debye_from_temperature(1e-9) < 1e-9

    def test_nonpositive_raises(self):
        with pytest.raises(ValueError):
            debye_from_temperature(0.0)
        with pytest.raises(ValueError):
            debye_from_temperature(-5.0)


def test_eval_dos_dispatch_and_support():
    deb = DebyeParams(2.0, 10.0, 3)
    lor = ds.gold_two_peak()
    tab = TabulatedDos([1.0, 2.0], [0.5, 0.5])
    assert eval_dos(deb, 5.0) == eval_debye_dos(deb, 5.0)
    assert eval_dos(lor, 5.0) == eval_lorentzian_dos(lor, 5.0)
    assert eval_dos(tab, 1.5) == eval_tabulated_dos(tab, 1.5)
    assert support_interval(deb) == (0.0, 10.0)
    assert support_interval(tab) == (1.0, 2.0)
    assert support_interval(lor)[1] == np.inf
    with pytest.raises(TypeError):
        eval_dos(object(), 1.0)
