import numpy as np
import pytest
from scipy.optimize import curve_fit

from qaoa_depth.errors import FitError
from qaoa_depth.fitting import fit_logistic, fit_scaling, logistic

ALPHAS = np.arange(1, 17) * 0.25


def synthetic(p_max=10.0, kappa=2.0, alpha_c=1.0):
    return [(a, float(logistic(a, p_max, kappa, alpha_c)), None) for a in ALPHAS]


def test_noiseless_recovery():
    fit = fit_logistic(synthetic())
    assert abs(fit.p_max - 10) < 1e-6
    assert abs(fit.kappa - 2) < 1e-6
    assert abs(fit.alpha_c - 1) < 1e-6
    assert fit.residual_norm < 1e-10


@pytest.mark.parametrize("truth", [(6.0, 1.5, 1.3), (14.0, 3.0, 0.7)])
def test_recovery_from_default_start(truth):
    fit = fit_logistic(synthetic(*truth))
    np.testing.assert_allclose([fit.p_max, fit.kappa, fit.alpha_c], truth, atol=1e-6)


def test_midpoint():
    fit = fit_logistic(synthetic(8.0, 1.7, 1.1))
    assert fit(fit.alpha_c) == fit.p_max / 2


def test_matches_curve_fit_on_noisy_weighted_data():
    rng = np.random.default_rng(0)
    y = logistic(ALPHAS, 9.0, 2.2, 1.05)
    sigma = 0.1 + 0.05 * rng.random(ALPHAS.size)
    y = y + sigma * rng.normal(size=ALPHAS.size)
    fit = fit_logistic(list(zip(ALPHAS, y, sigma)))
    popt, pcov = curve_fit(logistic, ALPHAS, y, p0=(y.max(), 2, 1), sigma=sigma, absolute_sigma=True)
    np.testing.assert_allclose([fit.p_max, fit.kappa, fit.alpha_c], popt, rtol=1e-6)
    np.testing.assert_allclose(fit.parameter_standard_errors, np.sqrt(np.diag(pcov)), rtol=1e-4)


def test_unweighted_stderr_matches_curve_fit():
    rng = np.random.default_rng(1)
    y = logistic(ALPHAS, 9.0, 2.2, 1.05) + 0.2 * rng.normal(size=ALPHAS.size)
    fit = fit_logistic([(a, v, None) for a, v in zip(ALPHAS, y)])
    popt, pcov = curve_fit(logistic, ALPHAS, y, p0=(y.max(), 2, 1))
    np.testing.assert_allclose([fit.p_max, fit.kappa, fit.alpha_c], popt, rtol=1e-6)
    np.testing.assert_allclose(fit.parameter_standard_errors, np.sqrt(np.diag(pcov)), rtol=1e-4)


def test_residual_not_worse_than_start():
    rng = np.random.default_rng(2)
    pts = [(a, float(v), 0.3) for a, v in zip(ALPHAS, logistic(ALPHAS, 7, 1.4, 1.2) + 0.3 * rng.normal(size=16))]
    fit = fit_logistic(pts)
    y = np.array([p[1] for p in pts])
    start = np.sqrt(np.sum(((y - logistic(ALPHAS, y.max(), 2.0, 1.0)) / 0.3) ** 2))
    assert fit.residual_norm <= start


def test_zero_sigma_rows_are_usable():
    pts = [(a, v, 0.0 if a < 1 else 0.2) for a, v, _ in synthetic()]
    fit = fit_logistic(pts)
    assert fit.alpha_c == pytest.approx(1.0, abs=1e-6)


def test_too_few_points():
    with pytest.raises(ValueError):
        fit_logistic(synthetic()[:3])


def test_iteration_budget_exhaustion():
    with pytest.raises(FitError) as err:
        fit_logistic(synthetic(), max_iter=1)
    assert set(err.value.best) >= {"p_max", "kappa", "alpha_c", "residual"}


def test_decreasing_data_fails():
    pts = [(a, 10 - 2 * a, None) for a in ALPHAS]
    with pytest.raises(FitError):
        fit_logistic(pts)


def test_json_shape():
    d = fit_logistic(synthetic()).as_dict()
    assert set(d) == {"p_max", "kappa", "alpha_c", "stderr", "residual"}
    assert len(d["stderr"]) == 3


class TestScaling:
    def test_exact_line(self):
        res = fit_scaling([(5, 4.0), (10, 7.0), (15, 10.0)])
        assert res.slope == pytest.approx(0.6)
        assert res.intercept == pytest.approx(1.0)
        assert res.correlation == pytest.approx(1.0)

    def test_accepts_fit_objects(self):
        fits = [(n, fit_logistic(synthetic(0.5 * n + 2, 2, 1))) for n in (5, 6, 7, 8)]
        res = fit_scaling(fits)
        assert res.slope == pytest.approx(0.5, abs=1e-6)

    def test_permutation_control(self):
        rng = np.random.default_rng(7)
        n = np.arange(5, 45)
        y = 0.3 * n + 1 + 0.01 * rng.normal(size=n.size)
        assert fit_scaling(zip(n, y)).correlation > 0.99
        shuffled = rng.permutation(y)
        assert abs(fit_scaling(zip(n, shuffled)).correlation) < 0.5

    def test_needs_three_sizes(self):
        with pytest.raises(ValueError):
            fit_scaling([(5, 4.0), (10, 7.0)])
        with pytest.raises(ValueError):
            fit_scaling([(5, 4.0), (5, 5.0), (10, 7.0)])
