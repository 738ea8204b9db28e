"""Monte Carlo accuracy study for the censored MLE.

Data follow the design ``X = (1, U)`` with ``U ~ Uniform(-5, 5)``, a
conditional law from one of the families, and independent normal censoring
``C ~ N(mu_c, censoring_sd^2)``.  Every replication draws from its own
Philox substream keyed by ``(seed, replication index)``, so results do not
depend on how replications are scheduled.
"""

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from censfit.exceptions import CensfitError, ScenarioError
from censfit.families import FAMILIES, get_family
from censfit.inference import infer
from censfit.laws import CensoringLaw, CovariateLaw
from censfit.likelihood import Dataset
from censfit.optimize import FitConfig, fit

COVARIATE_LAW = CovariateLaw.intercept_uniform(-5.0, 5.0)


@dataclass(frozen=True)
class Scenario:
    beta0: tuple = (1.0, 2.0)
    sigma0: float = 1.0
    mu_c: float = 9.0
    n: int = 100
    censoring_sd: float = 1.0
    replications: int = 100
    seed: int = 0
    family: str = "normal-linear"

    def __post_init__(self):
        object.__setattr__(self, "beta0", tuple(float(b) for b in self.beta0))
        if self.family not in FAMILIES:
            raise ScenarioError(f"unknown family {self.family!r}", key="family")
        if len(self.beta0) != COVARIATE_LAW.p:
            raise ScenarioError(
                f"beta0 must have {COVARIATE_LAW.p} entries (intercept, slope)", key="beta0"
            )
        if not self.sigma0 > 0:
            raise ScenarioError("sigma0 must be positive", key="sigma0")
        if not self.censoring_sd > 0:
            raise ScenarioError("censoring_sd must be positive", key="censoring_sd")
        if self.n < len(self.beta0) + 2:
            raise ScenarioError("n must be at least q + 1", key="n")
        if self.replications < 1:
            raise ScenarioError("replications must be >= 1", key="replications")
        if not 0 <= self.seed < 2**64:
            raise ScenarioError("seed must be an unsigned 64-bit integer", key="seed")

    @property
    def theta0(self):
        return np.array(self.beta0 + (self.sigma0,))

    @property
    def model(self):
        return get_family(self.family, len(self.beta0))

    @property
    def censoring(self):
        return CensoringLaw.normal(self.mu_c, self.censoring_sd)


def replication_rng(seed, index):
    """Independent generator for one replication."""
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(index,))
    return np.random.Generator(np.random.Philox(seq))


def censor(y, c):
    """Observed times and indicators; ties count as uncensored."""
    y = np.asarray(y, dtype=float)
    c = np.asarray(c, dtype=float)
    return np.minimum(y, c), (y <= c).astype(np.int8)


def generate(scenario, index):
    """Dataset for replication ``index`` of ``scenario``."""
    rng = replication_rng(scenario.seed, index)
    X = COVARIATE_LAW.sample(rng, scenario.n)
    y = scenario.model.sample(scenario.theta0, X, rng)
    c = scenario.censoring.sample(rng, scenario.n)
    z, delta = censor(y, c)
    return Dataset(X, z, delta)


def _replicate(scenario, index, config):
    data = generate(scenario, index)
    fam = scenario.model
    q = fam.q
    nan = np.full(q, np.nan)
    try:
        res = fit(fam, data, config)
    except CensfitError:
        return False, nan, nan, data.censoring_rate
    if not res.converged:
        return False, nan, nan, data.censoring_rate
    report = infer(fam, res.theta_hat, data)
    return True, res.theta_hat, report.std_errors, data.censoring_rate


def _replicate_star(args):
    return _replicate(*args)


@dataclass
class ReplicationReport:
    """Per-parameter accuracy summary over replications.

    ``bias = mean - truth``, ``std_dev`` uses the ``R - 1`` denominator and
    ``mse = mean((estimate - truth)^2)``, so
    ``mse = bias^2 + std_dev^2 (R - 1) / R``.  Non-converged fits are left
    out of the aggregates and counted in ``failures``.
    """

    scenario: Scenario
    param_names: list
    true_values: np.ndarray
    mean_estimate: np.ndarray
    bias: np.ndarray
    std_dev: np.ndarray
    mse: np.ndarray
    mean_censoring_rate: float
    failures: int
    estimates: np.ndarray = field(repr=False)
    std_errors: np.ndarray = field(repr=False)
    censoring_rates: np.ndarray = field(repr=False)

    @property
    def n_converged(self):
        return self.estimates.shape[0]

    def to_dict(self):
        return {
            "scenario": asdict(self.scenario),
            "parameters": [
                {
                    "name": name,
                    "true": float(t),
                    "mean_estimate": float(m),
                    "bias": float(b),
                    "std_dev": float(s),
                    "mse": float(e),
                }
                for name, t, m, b, s, e in zip(
                    self.param_names, self.true_values, self.mean_estimate,
                    self.bias, self.std_dev, self.mse,
                )
            ],
            "mean_censoring_rate": float(self.mean_censoring_rate),
            "replications": int(self.scenario.replications),
            "converged": int(self.n_converged),
            "failures": int(self.failures),
        }


def _column_mean(a):
    return np.array([math.fsum(col) / len(col) for col in a.T])


def summarize(scenario, estimates, std_errors, censoring_rates, failures):
    fam = scenario.model
    truth = scenario.theta0
    R = estimates.shape[0]
    if R == 0:
        nan = np.full(fam.q, np.nan)
        mean = bias = sd = mse = nan
    else:
        mean = _column_mean(estimates)
        bias = mean - truth
        dev = estimates - mean
        sd = np.sqrt(_column_mean(dev * dev) * R / (R - 1)) if R > 1 else np.zeros(fam.q)
        err = estimates - truth
        mse = _column_mean(err * err)
    return ReplicationReport(
        scenario=scenario,
        param_names=fam.param_names,
        true_values=truth,
        mean_estimate=mean,
        bias=bias,
        std_dev=sd,
        mse=mse,
        mean_censoring_rate=math.fsum(censoring_rates) / len(censoring_rates),
        failures=failures,
        estimates=estimates,
        std_errors=std_errors,
        censoring_rates=np.asarray(censoring_rates),
    )


def run_study(scenario, threads=1, config=None):
    """Fit every replication of ``scenario`` and aggregate the estimates."""
    config = config or FitConfig()
    jobs = [(scenario, i, config) for i in range(scenario.replications)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_replicate_star, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    else:
        results = [_replicate(*job) for job in jobs]
    ok = np.array([r[0] for r in results], dtype=bool)
    q = scenario.model.q
    est = np.array([r[1] for r in results]).reshape(-1, q)[ok]
    se = np.array([r[2] for r in results]).reshape(-1, q)[ok]
    rates = [r[3] for r in results]
    return summarize(scenario, est, se, rates, int((~ok).sum()))


def coverage(report, level=0.95):
    """Fraction of converged replications whose Wald interval covers the truth."""
    z = stats.norm.ppf(0.5 + 0.5 * level)
    hit = np.abs(report.estimates - report.true_values) <= z * report.std_errors
    return hit.mean(axis=0)


def standardized_moments(report, sigma):
    """Mean, variance, skewness and excess kurtosis of the scaled errors.

    Errors ``sqrt(n) (theta_hat - theta0)`` are divided by the square roots
    of the diagonal of ``sigma^{-1}``; under asymptotic normality the four
    rows approach ``0, 1, 0, 0``.
    """
    cov = np.linalg.inv(np.asarray(sigma, dtype=float))
    scaled = math.sqrt(report.scenario.n) * (report.estimates - report.true_values)
    scaled /= np.sqrt(np.diag(cov))
    return np.vstack([
        scaled.mean(axis=0),
        scaled.var(axis=0, ddof=1),
        stats.skew(scaled, axis=0),
        stats.kurtosis(scaled, axis=0),
    ])


# -- scenario files -----------------------------------------------------------

SCENARIO_KEYS = (
    "family", "beta0", "sigma0", "mu_c", "censoring_sd", "n", "replications", "seed",
)
GRID_KEYS = ("sigma0", "mu_c", "censoring_sd", "n")
REQUIRED_KEYS = ("beta0", "sigma0", "mu_c", "n")


def _parse_number(key, text, kind):
    try:
        return kind(text)
    except ValueError:
        raise ScenarioError(f"{key}: cannot parse {text!r} as {kind.__name__}", key=key) from None


def parse_scenarios(text):
    """Parse a ``key = value`` scenario file into a list of scenarios.

    ``n``, ``sigma0``, ``mu_c`` and ``censoring_sd`` may list several
    comma-separated values; the result is their cartesian product with ``n``
    varying fastest.
    """
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected 'key = value'", key=line)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in SCENARIO_KEYS:
            raise ScenarioError(f"unknown scenario key {key!r}", key=key)
        if key in raw:
            raise ScenarioError(f"duplicate scenario key {key!r}", key=key)
        raw[key] = value
    for key in REQUIRED_KEYS:
        if key not in raw:
            raise ScenarioError(f"missing scenario key {key!r}", key=key)

    fixed = {}
    if "family" in raw:
        fixed["family"] = raw["family"]
    fixed["beta0"] = tuple(_parse_number("beta0", v.strip(), float) for v in raw["beta0"].split(","))
    for key, kind in (("replications", int), ("seed", int)):
        if key in raw:
            fixed[key] = _parse_number(key, raw[key], kind)

    grids = {}
    for key in GRID_KEYS:
        if key in raw:
            kind = int if key == "n" else float
            grids[key] = [_parse_number(key, v.strip(), kind) for v in raw[key].split(",")]
    order = [k for k in ("sigma0", "mu_c", "censoring_sd", "n") if k in grids]
    scenarios = []
    for values in itertools.product(*(grids[k] for k in order)):
        scenarios.append(Scenario(**fixed, **dict(zip(order, values))))
    return scenarios


def load_scenarios(path):
    with open(path, encoding="utf-8") as fh:
        return parse_scenarios(fh.read())


def format_table(reports):
    """Human-readable accuracy table, one block per parameter, one row per n."""
    lines = []
    if not reports:
        return ""
    names = reports[0].param_names
    rates = ", ".join(f"{100 * r.mean_censoring_rate:.1f}%" for r in reports)
    head = reports[0].scenario
    lines.append(
        f"family={head.family}  beta0={head.beta0}  sigma0={head.sigma0:g}  "
        f"mu_c={head.mu_c:g}  censoring_sd={head.censoring_sd:g}  R={head.replications}"
    )
    lines.append(f"Mean censoring rates: {rates}")
    lines.append(f"{'':<8}{'n':>6}{'True':>10}{'Mean Est.':>12}{'Bias':>12}{'Std. Dev.':>12}{'MSE':>12}")
    for j, name in enumerate(names):
        lines.append("-" * 72)
        for r in reports:
            lines.append(
                f"{name:<8}{r.scenario.n:>6}{r.true_values[j]:>10.5g}{r.mean_estimate[j]:>12.5f}"
                f"{r.bias[j]:>12.5f}{r.std_dev[j]:>12.5f}{r.mse[j]:>12.5f}"
            )
    failures = sum(r.failures for r in reports)
    if failures:
        lines.append(f"non-converged fits excluded: {failures}")
    return "\n".join(lines)
