import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from censfit.exceptions import (
    CensoredAtomError,
    DimensionError,
    ParameterError,
    ZeroDensityError,
)
from censfit.families import NormalLinear, WeibullAFT, get_family

from conftest import fd_gradient, random_point, rel_err

# Frozen from a 50-digit mpmath evaluation of the closed forms.
NORMAL_LOGPDF_SIGMA5 = -2.6083764456387731164
NORMAL_LOGSF_U8 = -35.013437159914549896
HALF_LOG_2PI = 0.91893853320467274178


class TestLogDensity:
    def test_normal_at_mean(self):
        fam = NormalLinear(2)
        assert fam.log_density([2, 1, 1], [1, 0], 2.0) == pytest.approx(-HALF_LOG_2PI, abs=1e-15)
        assert fam.log_density([2, 1, 1], [1, 3], 5.0) == pytest.approx(-HALF_LOG_2PI, abs=1e-15)

    def test_unit_exponential(self):
        assert WeibullAFT(1).log_density([0.0, 1.0], [1.0], 1.0) == -1.0

    def test_normal_extended_precision_oracle(self):
        value = NormalLinear(2).log_density([2, 1, 5], [1, -4], 0.0)
        assert value == pytest.approx(NORMAL_LOGPDF_SIGMA5, rel=1e-15)

    def test_outside_support_is_neg_inf(self):
        fam = WeibullAFT(1)
        assert fam.log_density([0.0, 2.0], [1.0], -1.0) == -np.inf
        assert fam.log_survival([0.0, 2.0], [1.0], -1.0) == 0.0

    def test_vectorized_matches_scalar(self, family, rng):
        theta, _, _ = random_point(family, rng)
        X = np.column_stack([np.ones(5), rng.uniform(-1, 1, 5)])
        y = family.sample(theta, X, rng)
        vec = family.log_density(theta, X, y)
        assert vec.shape == (5,)
        for i in range(5):
            assert vec[i] == family.log_density(theta, X[i], y[i])


class TestLogSurvival:
    @pytest.mark.parametrize("beta,sigma,x", [((2, 1), 1.0, (1, 0)), ((-3, 0.5), 4.0, (1, 2))])
    def test_median(self, beta, sigma, x):
        fam = NormalLinear(2)
        y = float(np.dot(beta, x))
        assert fam.log_survival([*beta, sigma], x, y) == pytest.approx(math.log(0.5), abs=1e-15)

    def test_unit_exponential(self):
        assert WeibullAFT(1).log_survival([0.0, 1.0], [1.0], 3.0) == pytest.approx(-3.0, rel=1e-15)

    def test_normal_far_tail_uses_complement(self):
        value = NormalLinear(2).log_survival([2, 1, 1], [1, 0], 10.0)
        assert value == pytest.approx(NORMAL_LOGSF_U8, rel=1e-13)

    def test_underflow_maps_to_neg_inf(self):
        fam = NormalLinear(2)
        assert fam.log_survival([2, 1, 1], [1, 0], 42.0) == -np.inf
        assert np.isfinite(fam.log_survival([2, 1, 1], [1, 0], 30.0))
        assert fam.cdf([2, 1, 1], [1, 0], 42.0) == 1.0

    def test_monotone_on_grid(self, family, rng):
        for _ in range(5):
            theta, x, _ = random_point(family, rng)
            lo, hi = (-20.0, 20.0) if isinstance(family, NormalLinear) else (1e-6, 50.0)
            grid = np.linspace(lo, hi, 1000)
            ls = family.log_survival(theta, np.tile(x, (1000, 1)), grid)
            assert np.all(ls[1:] <= ls[:-1])


class TestGradients:
    def test_normal_zero_residual(self):
        fam = NormalLinear(2)
        g = fam.grad_log_density([2, 1, 1], [1, 3], 5.0)
        np.testing.assert_array_equal(g[:2], 0.0)
        assert g[2] == -1.0

    def test_normal_survival_flat_far_left(self):
        fam = NormalLinear(2)
        theta = np.array([2.0, 1.0, 1.5])
        x = np.array([1.0, 0.7])
        y = theta[:2] @ x - 20 * theta[2]
        np.testing.assert_allclose(fam.grad_log_survival(theta, x, y), 0.0, atol=1e-8)

    def test_weibull_shape_component(self):
        g = WeibullAFT(1).grad_log_survival([0.0, 1.0], [1.0], 2.0)
        assert g[1] == pytest.approx(-2 * math.log(2), rel=1e-14)
        fd = fd_gradient(lambda t: WeibullAFT(1).log_survival(t, [1.0], 2.0), [0.0, 1.0])
        assert g[1] == pytest.approx(fd[1], rel=1e-6)

    def test_first_derivatives_match_finite_differences(self, family, rng):
        worst = 0.0
        for _ in range(100):
            theta, x, y = random_point(family, rng)
            g = family.grad_log_density(theta, x, y)
            fd = fd_gradient(lambda t: family.log_density(t, x, y), theta)
            worst = max(worst, rel_err(g, fd))
            g = family.grad_log_survival(theta, x, y)
            fd = fd_gradient(lambda t: family.log_survival(t, x, y), theta)
            worst = max(worst, rel_err(g, fd))
        assert worst < 1e-6

    def test_second_derivatives_match_finite_differences(self, family, rng):
        worst = 0.0
        for _ in range(100):
            theta, x, y = random_point(family, rng)
            h_f, h_s = family.hess_log_lik_terms(theta, x, y)
            fd_f = fd_gradient(lambda t: family.grad_log_density(t, x, y), theta)
            fd_s = fd_gradient(lambda t: family.grad_log_survival(t, x, y), theta)
            worst = max(worst, rel_err(h_f, fd_f), rel_err(h_s, fd_s))
            assert np.max(np.abs(h_f - h_f.T)) <= 1e-12
            assert np.max(np.abs(h_s - h_s.T)) <= 1e-12
        assert worst < 1e-5

    def test_normal_beta_block_is_minus_xx_over_sigma2(self, rng):
        fam = NormalLinear(3)
        x = rng.normal(size=3)
        for y in (-4.0, 0.3, 12.0):
            h = fam.hess_log_density([0.2, -1, 2, 1.7], x, y)
            np.testing.assert_allclose(h[:3, :3], -np.outer(x, x) / 1.7**2, rtol=1e-14)

    def test_atom_signalled(self):
        fam = NormalLinear(2)
        with pytest.raises(CensoredAtomError):
            fam.grad_log_survival([2, 1, 1], [1, 0], 45.0)
        with pytest.raises(CensoredAtomError):
            fam.hess_log_survival([2, 1, 1], [1, 0], 45.0)

    def test_zero_density_signalled(self):
        with pytest.raises(ZeroDensityError):
            WeibullAFT(1).grad_log_density([0.0, 1.0], [1.0], -2.0)


class TestIntegrals:
    def _support(self, family):
        return (-np.inf, np.inf) if isinstance(family, NormalLinear) else (0.0, np.inf)

    def test_density_integrates_to_one(self, family, rng):
        lo, hi = self._support(family)
        for _ in range(10):
            theta, x, _ = random_point(family, rng)
            total, _ = integrate.quad(lambda y: math.exp(family.log_density(theta, x, y)),
                                      lo, hi, epsabs=1e-11, limit=200)
            assert total == pytest.approx(1.0, abs=1e-6)

    def test_cdf_matches_integrated_density(self, family, rng):
        lo, _ = self._support(family)
        for _ in range(10):
            theta, x, y = random_point(family, rng)
            mass, _ = integrate.quad(lambda v: math.exp(family.log_density(theta, x, v)),
                                     lo, y, epsabs=1e-11, limit=200)
            cdf = 1.0 - math.exp(family.log_survival(theta, x, y))
            assert mass == pytest.approx(cdf, abs=1e-6)


class TestValidation:
    def test_wrong_theta_length(self):
        with pytest.raises(DimensionError):
            NormalLinear(2).log_density([1, 2], [1, 0], 0.0)

    def test_wrong_covariate_length(self):
        with pytest.raises(DimensionError):
            NormalLinear(2).log_density([1, 2, 1], [1, 0, 3], 0.0)

    @pytest.mark.parametrize("last", [0.0, -1.0, np.nan])
    def test_nonpositive_scale(self, last):
        with pytest.raises(ParameterError):
            WeibullAFT(2).log_survival([1, 2, last], [1, 0], 1.0)

    def test_lookup(self):
        assert get_family("weibull-aft", 3) == WeibullAFT(3)
        with pytest.raises(ValueError):
            get_family("gamma", 2)

    def test_param_names(self):
        assert NormalLinear(2).param_names == ["beta1", "beta2", "sigma"]
        assert WeibullAFT(1).param_names == ["beta1", "k"]


@settings(max_examples=200, deadline=None)
@given(
    b0=st.floats(-5, 5), b1=st.floats(-3, 3), scale=st.floats(0.05, 20),
    u=st.floats(-5, 5), y1=st.floats(-60, 60), y2=st.floats(-60, 60),
)
def test_normal_cdf_bounds_and_order(b0, b1, scale, u, y1, y2):
    fam = NormalLinear(2)
    theta, x = [b0, b1, scale], [1.0, u]
    lo, hi = sorted((y1, y2))
    f_lo, f_hi = fam.cdf(theta, x, lo), fam.cdf(theta, x, hi)
    assert 0.0 <= f_lo <= f_hi <= 1.0
    assert fam.log_survival(theta, x, lo) >= fam.log_survival(theta, x, hi)
    assert fam.log_density(theta, x, lo) <= -math.log(scale) - 0.5 * math.log(2 * math.pi) + 1e-12


@settings(max_examples=200, deadline=None)
@given(
    b0=st.floats(-2, 2), k=st.floats(0.2, 5), y1=st.floats(1e-3, 40), y2=st.floats(1e-3, 40),
)
def test_weibull_cdf_bounds_and_order(b0, k, y1, y2):
    fam = WeibullAFT(1)
    lo, hi = sorted((y1, y2))
    f_lo, f_hi = fam.cdf([b0, k], [1.0], lo), fam.cdf([b0, k], [1.0], hi)
    assert 0.0 <= f_lo <= f_hi <= 1.0
    assert fam.density([b0, k], [1.0], lo) >= 0.0
