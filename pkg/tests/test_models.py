import numpy as np
import pytest
from scipy.integrate import quad
from scipy.linalg import expm

from tdpt_resum import models
from tdpt_resum.engine import TimeGrid, bohr_frequencies, compute_coefficients, integrate_exact
from tdpt_resum.models import ModelId
from tdpt_resum.series import (TruncatedSeries, arcsin_transform_reim, eval_exp_resummed,
                               eval_sin_resummed, log_transform)

GAP = models.TwoLevelGapParams(e1=1.0, e2=2.0, gamma=0.05)
DEGEN = models.TwoLevelDegenerateParams(e0=1.0, gamma=0.1)
RES = models.SpinResonanceParams(omega0=1.0, omega1=0.02, omega=-1.0)
TOY = models.ToyPhaseParams(omega=1.0, epsilon=0.01)
CATALOG = [(ModelId.TOY_PHASE, TOY), (ModelId.TWO_LEVEL_GAP, GAP),
           (ModelId.TWO_LEVEL_DEGENERATE, DEGEN), (ModelId.SPIN_RESONANCE, RES)]


class TestParams:
    @pytest.mark.parametrize("name", ["two-level-gap", "two_level_gap", "TWO-LEVEL-GAP"])
    def test_parse_ids(self, name):
        assert ModelId.parse(name) is ModelId.TWO_LEVEL_GAP

    def test_unknown_id(self):
        with pytest.raises(models.InvalidParamsError):
            ModelId.parse("three_level")

    @pytest.mark.parametrize("values", [
        dict(e1=2.0, e2=1.0, gamma=0.1),
        dict(e1=0.0, e2=1.0, gamma=0.1),
        dict(e1=1.0, e2=2.0, gamma=0.0),
        dict(e1=1.0, e2=2.0),
        dict(e1=1.0, e2=2.0, gamma=0.1, e0=3.0),
        dict(e1=1.0, e2=np.inf, gamma=0.1),
    ])
    def test_invalid_gap_params(self, values):
        with pytest.raises(models.InvalidParamsError):
            models.make_params(ModelId.TWO_LEVEL_GAP, values)

    def test_wrong_params_type(self):
        with pytest.raises(models.InvalidParamsError):
            models.build_system(ModelId.TWO_LEVEL_GAP, DEGEN)


class TestBuildSystem:
    def test_gap(self):
        spec = models.build_system(ModelId.TWO_LEVEL_GAP, GAP)
        assert spec.dim == 2 and bohr_frequencies(spec)[1, 0] == 1.0
        np.testing.assert_array_equal(spec.matrices([0.0, 7.0]), [[[0, 0.05], [0.05, 0]]] * 2)

    def test_degenerate(self):
        assert np.all(bohr_frequencies(models.build_system(ModelId.TWO_LEVEL_DEGENERATE, DEGEN)) == 0)

    def test_toy_is_one_level(self):
        spec = models.build_system(ModelId.TOY_PHASE, TOY)
        assert spec.dim == 1
        assert spec.matrices([3.0])[0, 0, 0] == 0.01

    def test_spin_interaction_integrand(self):
        # h_fi(t) exp(i w_fi t) = -(omega1/2) exp(i (omega0 + omega) t)
        p = models.SpinResonanceParams(1.0, 0.02, -0.7)
        spec = models.build_system(ModelId.SPIN_RESONANCE, p)
        t = np.linspace(0, 20, 9)
        integrand = spec.matrices(t)[:, 1, 0] * np.exp(1j * bohr_frequencies(spec)[1, 0] * t)
        np.testing.assert_allclose(integrand, -0.01 * np.exp(0.3j * t), atol=1e-16)

    def test_spin_matches_pauli_form(self):
        p = models.SpinResonanceParams(1.3, 0.1, 0.4)
        spec = models.build_system(ModelId.SPIN_RESONANCE, p)
        sx = np.array([[0, 1], [1, 0]])
        sy = np.array([[0, -1j], [1j, 0]])
        sz = np.diag([1, -1])
        t = 2.2
        np.testing.assert_allclose(np.diag(spec.energies), -0.5 * 1.3 * sz)
        np.testing.assert_allclose(spec.matrices([t])[0],
                                   -0.05 * (sx * np.cos(0.4 * t) + sy * np.sin(0.4 * t)), atol=1e-16)


class TestClosedForms:
    def test_gap_first_order_diagonal_is_zero(self):
        t = np.linspace(0, 50, 101)
        assert np.all(models.closed_form_coefficients(ModelId.TWO_LEVEL_GAP, GAP, t, 1)[:, 0] == 0)

    def test_degenerate_values(self):
        assert models.closed_form_coefficients(ModelId.TWO_LEVEL_DEGENERATE, DEGEN, 2.0, 1)[1] == pytest.approx(-0.2j)
        assert models.closed_form_coefficients(ModelId.TWO_LEVEL_DEGENERATE, DEGEN, 2.0, 2)[0] == pytest.approx(-0.02)

    def test_resonance_value(self):
        p = models.SpinResonanceParams(1.0, 0.02, -1.0)
        # omega1 T = 0.4
        assert models.closed_form_coefficients(ModelId.SPIN_RESONANCE, p, 20.0, 1)[1] == pytest.approx(0.2j, rel=1e-15)

    def test_off_resonance_matches_textbook_form(self):
        p = models.SpinResonanceParams(1.0, 0.02, -0.6)
        t = np.linspace(0, 40, 11)
        d = p.omega0 + p.omega
        ref = -(p.omega1 / 2) * (1 - np.exp(1j * d * t)) / d
        np.testing.assert_allclose(models.closed_form_coefficients(ModelId.SPIN_RESONANCE, p, t, 1)[:, 1],
                                   ref, atol=1e-16)

    def test_gap_second_order_against_nested_quadrature(self):
        # oracle: adaptive quadrature of the two nested integrals
        g, w = GAP.gamma, GAP.omega

        def c2_first(s):
            return (1 / 1j) * g * (np.exp(1j * w * s) - 1) / (1j * w)

        for t in (0.7, 3.0, 11.5):
            re = quad(lambda s: ((1 / 1j) * g * np.exp(-1j * w * s) * c2_first(s)).real, 0, t)[0]
            im = quad(lambda s: ((1 / 1j) * g * np.exp(-1j * w * s) * c2_first(s)).imag, 0, t)[0]
            got = models.closed_form_coefficients(ModelId.TWO_LEVEL_GAP, GAP, t, 2)[0]
            assert got == pytest.approx(re + 1j * im, abs=1e-13)

    def test_toy_series(self):
        t = 3.0
        for r in range(1, 6):
            got = models.closed_form_coefficients(ModelId.TOY_PHASE, TOY, t, r)[0]
            assert got == pytest.approx((-0.03j) ** r / np.prod(range(1, r + 1)), rel=1e-15)

    @pytest.mark.parametrize("model, params, order", [
        (ModelId.TWO_LEVEL_GAP, GAP, 3), (ModelId.SPIN_RESONANCE, RES, 2), (ModelId.TOY_PHASE, TOY, 0)])
    def test_unsupported(self, model, params, order):
        with pytest.raises(models.UnsupportedOrderError):
            models.closed_form_coefficients(model, params, 1.0, order)


class TestExactAmplitude:
    def test_gap_decoupled_limit(self):
        p = models.TwoLevelGapParams(1.0, 2.0, 1e-12)
        t = np.linspace(0, 100, 101)
        amp = models.exact_amplitude(ModelId.TWO_LEVEL_GAP, p, t)
        np.testing.assert_allclose(np.abs(amp.interaction[:, 0]), 1, atol=1e-15)

    def test_full_transfer_at_pi_pulse(self):
        p = models.SpinResonanceParams(1.0, 0.02, -1.0)
        amp = models.exact_amplitude(ModelId.SPIN_RESONANCE, p, np.pi / 0.02)
        assert amp.probabilities[1] == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("gamma", [0.01, 0.3, 2.0])
    def test_gap_normalized(self, gamma):
        t = np.linspace(0, 80, 801)
        p = models.TwoLevelGapParams(0.5, 1.7, gamma)
        np.testing.assert_allclose(models.exact_amplitude(ModelId.TWO_LEVEL_GAP, p, t).probabilities.sum(1),
                                   1, atol=1e-15)

    def test_gap_schrodinger_amplitude_matches_diagonalization(self):
        p = models.TwoLevelGapParams(0.8, 2.1, 0.3)
        h = np.array([[0.8, 0.3], [0.3, 2.1]])
        for t in (0.0, 1.3, 17.0):
            amp = models.exact_amplitude(ModelId.TWO_LEVEL_GAP, p, t)
            np.testing.assert_allclose(amp.schrodinger, expm(-1j * h * t)[:, 0], atol=1e-13)

    def test_no_off_resonance_closed_form(self):
        p = models.SpinResonanceParams(1.0, 0.02, -0.5)
        assert not models.has_exact_closed_form(ModelId.SPIN_RESONANCE, p)
        with pytest.raises(models.NoClosedFormError):
            models.exact_amplitude(ModelId.SPIN_RESONANCE, p, 1.0)

    def test_toy(self):
        amp = models.exact_amplitude(ModelId.TOY_PHASE, TOY, 10.0)
        assert amp.schrodinger[0] == pytest.approx(np.exp(-1.01j * 10))


@pytest.mark.parametrize("model, params", CATALOG)
def test_oracle_triangle(model, params):
    spec = models.build_system(model, params)
    grid = TimeGrid(50.0, 10_000)
    t = grid.points
    orders = models.closed_form_orders(model) or (1, 2)
    tab = compute_coefficients(spec, grid, max(orders))
    for r in orders:
        ref = models.closed_form_coefficients(model, params, t, r)
        assert np.max(np.abs(tab.values[r - 1] - ref)) / max(1.0, np.max(np.abs(ref))) <= 1e-6
    rk4 = integrate_exact(spec, grid)
    assert np.max(np.abs(rk4 - models.exact_amplitude(model, params, t).interaction)) <= 1e-8


def _eq31_bracket(g, w, t):
    return np.exp(1j * g**2 * t / w) - (g / w) ** 2 * (1 - np.exp(-1j * w * t))


def test_gap_expanded_resummation_is_eq31_bracket():
    g, w = 0.05, 1.0
    t = np.linspace(0, 500, 5001)
    expanded = (np.exp(1j * (g / w) ** 2 * w * t) - 1j * (g / w) ** 2 * np.sin(w * t)
                - 2 * (g / w) ** 2 * np.sin(w * t / 2) ** 2)
    np.testing.assert_allclose(expanded, _eq31_bracket(g, w, t), atol=1e-15)


def test_gap_full_resummation_agrees_with_eq31_at_fourth_order():
    t = np.linspace(0, 50, 5001)
    diffs = []
    for g in (0.05, 0.025):
        p = models.TwoLevelGapParams(1.0, 2.0, g)
        c2 = models.closed_form_coefficients(ModelId.TWO_LEVEL_GAP, p, t, 2)[:, 0]
        diffs.append(np.max(np.abs(np.exp(c2) - _eq31_bracket(g, 1.0, t))))
    assert diffs[0] < 10 * 0.05**4 * 50
    assert 14 < diffs[0] / diffs[1] < 18


@pytest.mark.parametrize("model, params, exact_sign", [
    (ModelId.TWO_LEVEL_DEGENERATE, DEGEN, -1),
    (ModelId.SPIN_RESONANCE, RES, 1),
])
def test_sine_resummation_is_exact(model, params, exact_sign):
    t = np.linspace(0, 300, 3001)
    c1 = models.closed_form_coefficients(model, params, t, 1)[:, 1]
    amp = eval_sin_resummed(*arcsin_transform_reim(TruncatedSeries(c1[None, :])))
    exact = models.exact_amplitude(model, params, t).interaction[:, 1]
    np.testing.assert_allclose(amp, exact, atol=1e-12)


def test_toy_resummed_modulus_is_one():
    t = np.linspace(0, 1e4, 1001)
    c1 = models.closed_form_coefficients(ModelId.TOY_PHASE, TOY, t, 1)[:, 0]
    x = eval_exp_resummed(log_transform(TruncatedSeries(c1[None, :])))
    np.testing.assert_allclose(np.abs(x), 1, atol=1e-14)
