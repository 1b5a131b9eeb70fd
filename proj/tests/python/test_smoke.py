import math
import os
import tempfile

import numpy as np
import pytest

import _mevagg as mv


def test_softmax_and_mva_agree_on_diagonal():
    w = mv.softmax_weights(np.log([1.0, 4.0]))
    assert w == pytest.approx([0.8, 0.2], abs=1e-12)
    w2 = mv.mva_weights(np.diag([1.0, 4.0]))
    assert np.max(np.abs(w - w2)) < 1e-12


def test_weights_sum_to_one():
    rng = np.random.default_rng(0)
    for _ in range(20):
        lv = rng.normal(size=5)
        assert mv.softmax_weights(lv).sum() == pytest.approx(1.0, abs=1e-12)


def test_mea_weights_unnormalized():
    w = mv.mea_weights(np.eye(2), np.array([1.0, 0.0]))
    assert w == pytest.approx([1.0, 0.0], abs=1e-12)


def test_krr_interpolates():
    x = np.array([[0.0], [0.5], [1.0]])
    y = np.array([[1.0], [-1.0], [0.5]])
    model = mv.krr_fit(x, y, "matern32", 0.7, 0.0)
    for xi, yi in zip(x, y):
        assert model.predict(xi)[0] == pytest.approx(yi[0], abs=1e-8)


def test_meva_pipeline_prefers_better_model():
    rng = np.random.default_rng(1)
    n = 40
    inputs = rng.uniform(size=(n, 1))
    y = np.sin(3 * inputs[:, 0])
    models = np.stack([y + 0.01 * rng.normal(size=n), y + 1.0 * rng.normal(size=n)], axis=1)
    samples = mv.ErrorSamples.from_values(inputs, models, y)
    agg = mv.fit_meva_sharp(samples, "rbf", 0.3, 1e-6)
    w, value = agg.predict(np.array([0.4]), np.array([1.0, 5.0]))
    assert w[0] > 0.9
    assert w.sum() == pytest.approx(1.0, abs=1e-10)


def test_laplace_spectral_single_mode():
    n = 48
    xs = np.linspace(0.0, 1.0, n)
    f = 2 * math.pi**2 * np.outer(np.sin(math.pi * xs), np.sin(math.pi * xs))
    u, diverged = mv.laplace_spectral(f)
    assert not diverged
    truth = np.outer(np.sin(math.pi * xs), np.sin(math.pi * xs))
    assert np.max(np.abs(u - truth)) < 1e-10


def test_burgers_constant_fixed_point():
    u0 = np.full(64, 0.3)
    for scheme in ("explicit", "implicit", "lax_wendroff", "spectral", "fvm", "tvd", "riemann"):
        field, diverged = mv.burgers_solve(u0, scheme, 2e-3, 65)
        assert not diverged
        assert np.max(np.abs(field - 0.3)) < 1e-12


def test_burgers_ic_deterministic():
    a = mv.sample_burgers_ic(7, 64)
    b = mv.sample_burgers_ic(7, 64)
    assert np.array_equal(a, b)


def test_grid_roundtrip():
    values = np.random.default_rng(3).normal(size=(5, 4))
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "field.grid")
        mv.write_grid(values, path)
        back = mv.read_grid(path)
    assert np.array_equal(values, back)


def test_closed_forms_consistency():
    case = mv.random_theorem_case(3, 3, 0.1, 0.5)
    forms = mv.closed_forms(case)
    assert 0.0 <= forms.mix_lambda <= 1.0
    assert mv.true_loss(forms.alpha_star, case) == pytest.approx(forms.loss_star, rel=1e-10)
    assert mv.true_loss(forms.alpha_v, case) == pytest.approx(forms.loss_v, rel=1e-10)


def test_geometric_mean():
    assert mv.geometric_mean_log10_mse([1e-2, 1e-4]) == pytest.approx(-3.0, abs=1e-12)
