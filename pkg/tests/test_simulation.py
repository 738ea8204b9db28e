import dataclasses
import math

import numpy as np
import pytest

from censfit.exceptions import ScenarioError
from censfit.families import NormalLinear
from censfit.inference import sigma_population
from censfit.optimize import FitConfig
from censfit.simulation import (
    COVARIATE_LAW,
    Scenario,
    censor,
    coverage,
    format_table,
    generate,
    parse_scenarios,
    replication_rng,
    run_study,
    standardized_moments,
    summarize,
)


class TestGenerate:
    def test_ties_count_as_observed(self):
        z, delta = censor([1.0, 2.0, 3.0], [1.0, 1.5, 4.0])
        np.testing.assert_array_equal(z, [1.0, 1.5, 3.0])
        np.testing.assert_array_equal(delta, [1, 0, 1])

    def test_design(self):
        data = generate(Scenario(n=2000, seed=3), 0)
        np.testing.assert_array_equal(data.X[:, 0], 1.0)
        assert -5 <= data.X[:, 1].min() and data.X[:, 1].max() <= 5
        assert abs(data.X[:, 1].mean()) < 0.3

    def test_unreachable_censoring(self):
        data = generate(Scenario(mu_c=1e9, n=10**4, seed=4), 0)
        assert data.censoring_rate == 0.0

    def test_censoring_rate_near_ten_percent(self):
        data = generate(Scenario(mu_c=9.0, n=10**5, seed=5), 0)
        assert abs(data.censoring_rate - 0.10) <= 0.01

    def test_streams_are_deterministic_and_distinct(self):
        scen = Scenario(n=50, seed=9)
        a, b = generate(scen, 3), generate(scen, 3)
        np.testing.assert_array_equal(a.z, b.z)
        assert not np.array_equal(generate(scen, 4).z, a.z)
        assert not np.array_equal(generate(dataclasses.replace(scen, seed=10), 3).z, a.z)

    def test_substream_independent_of_index_order(self):
        first = replication_rng(123, 7).standard_normal(5)
        replication_rng(123, 2).standard_normal(100)
        np.testing.assert_array_equal(replication_rng(123, 7).standard_normal(5), first)


class TestScenario:
    @pytest.mark.parametrize("kwargs,key", [
        ({"sigma0": 0.0}, "sigma0"),
        ({"censoring_sd": -1.0}, "censoring_sd"),
        ({"n": 3}, "n"),
        ({"replications": 0}, "replications"),
        ({"seed": -1}, "seed"),
        ({"beta0": (1.0, 2.0, 3.0)}, "beta0"),
        ({"family": "gamma"}, "family"),
    ])
    def test_invalid(self, kwargs, key):
        with pytest.raises(ScenarioError) as info:
            Scenario(**kwargs)
        assert info.value.key == key

    def test_theta0_packing(self):
        np.testing.assert_array_equal(Scenario(beta0=(1, 2), sigma0=5).theta0, [1.0, 2.0, 5.0])


class TestStudy:
    def test_single_replication(self):
        report = run_study(Scenario(n=100, replications=1, seed=2))
        np.testing.assert_array_equal(report.std_dev, 0.0)
        np.testing.assert_allclose(report.mse, report.bias**2, rtol=1e-14)
        assert report.n_converged == 1

    def test_mse_identity(self):
        report = run_study(Scenario(n=100, replications=30, seed=6))
        R = report.n_converged
        np.testing.assert_allclose(report.mse, report.bias**2 + report.std_dev**2 * (R - 1) / R,
                                   rtol=0, atol=1e-10)
        assert 0 <= report.mean_censoring_rate <= 1

    def test_repeatable(self):
        scen = Scenario(n=100, replications=10, seed=8)
        a, b = run_study(scen), run_study(scen)
        assert a.to_dict() == b.to_dict()
        np.testing.assert_array_equal(a.estimates, b.estimates)

    def test_thread_count_does_not_matter(self):
        scen = Scenario(n=100, replications=12, seed=8, mu_c=2.0)
        a, b = run_study(scen, threads=1), run_study(scen, threads=3)
        assert a.to_dict() == b.to_dict()
        np.testing.assert_array_equal(a.std_errors, b.std_errors)

    def test_failures_counted_not_aggregated(self):
        report = run_study(Scenario(n=100, replications=5, seed=1),
                           config=FitConfig(max_iterations=1, grad_tolerance=1e-300))
        assert report.failures == 5
        assert report.n_converged == 0
        assert np.all(np.isnan(report.mse))
        assert report.to_dict()["failures"] == 5

    def test_summarize_by_hand(self):
        scen = Scenario(n=100, replications=2)
        est = np.array([[1.1, 2.0, 1.0], [0.9, 2.2, 0.8]])
        report = summarize(scen, est, np.ones_like(est), [0.1, 0.3], 0)
        np.testing.assert_allclose(report.mean_estimate, [1.0, 2.1, 0.9])
        np.testing.assert_allclose(report.bias, [0.0, 0.1, -0.1], atol=1e-15)
        np.testing.assert_allclose(report.std_dev, [math.sqrt(0.02)] * 3)
        np.testing.assert_allclose(report.mse, [0.01, 0.02, 0.02])
        assert report.mean_censoring_rate == pytest.approx(0.2)

    def test_coverage_and_moments(self):
        scen = Scenario(n=200, replications=60, seed=12)
        report = run_study(scen)
        cov = coverage(report)
        assert cov.shape == (3,)
        assert np.all((cov > 0.8) & (cov <= 1.0))
        pop = sigma_population(NormalLinear(2), scen.theta0, scen.censoring, COVARIATE_LAW)
        moments = standardized_moments(report, pop.sigma)
        assert moments.shape == (4, 3)
        assert np.all(np.abs(moments[0]) < 0.5)
        assert np.all(np.abs(moments[1] - 1) < 0.5)


SCENARIO_TEXT = """
# comment line
family = normal-linear
beta0 = 1, 2
sigma0 = 1, 5
mu_c = 9
n = 100, 200
replications = 3
seed = 17   # trailing comment
"""


class TestScenarioFiles:
    def test_grid_expansion(self):
        scens = parse_scenarios(SCENARIO_TEXT)
        assert [(s.sigma0, s.n) for s in scens] == [(1, 100), (1, 200), (5, 100), (5, 200)]
        assert all(s.seed == 17 and s.replications == 3 and s.beta0 == (1, 2) for s in scens)
        assert all(s.censoring_sd == 1.0 for s in scens)

    @pytest.mark.parametrize("text,key", [
        ("beta0 = 1, 2\nsigma0 = 1\nmu_c = 9\nn = 100\nmu = 3", "mu"),
        ("beta0 = 1, 2\nsigma0 = 1\nmu_c = 9", "n"),
        ("beta0 = 1, 2\nsigma0 = 1\nsigma0 = 2\nmu_c = 9\nn = 100", "sigma0"),
        ("beta0 = 1, x\nsigma0 = 1\nmu_c = 9\nn = 100", "beta0"),
        ("beta0 = 1, 2\nsigma0 = 1\nmu_c = 9\nn = 1.5", "n"),
        ("beta0 = 1, 2\nsigma0 = 1\nmu_c = 9\nn = 100\nreplications = 0", "replications"),
    ])
    def test_errors_name_the_key(self, text, key):
        with pytest.raises(ScenarioError) as info:
            parse_scenarios(text)
        assert info.value.key == key
        assert key in str(info.value)

    def test_table_layout(self):
        scens = parse_scenarios(SCENARIO_TEXT)[:2]
        text = format_table([run_study(s) for s in scens])
        lines = text.splitlines()
        assert "Mean Est." in lines[2] and "Std. Dev." in lines[2]
        cols = lines[2].split()
        assert cols.index("Bias") < cols.index("Std.") < cols.index("MSE")
        assert sum(line.startswith("beta1") for line in lines) == 2
        assert sum(line.startswith("sigma") for line in lines) == 2
