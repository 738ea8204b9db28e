"""Asymptotic covariance, standard errors and Wald intervals.

The scaled estimator ``sqrt(n) (theta_hat - theta0)`` is asymptotically
normal with covariance ``Sigma^{-1}``, where ``Sigma`` is the covariance of a
single-observation score.  Three estimates of ``Sigma`` are offered:

* :func:`sigma_observed` - observed information divided by ``n`` (default);
* :func:`sigma_outer` - mean outer product of per-observation scores;
* :func:`sigma_population` - the exact value for known censoring and
  covariate laws, by quadrature.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import stats

from censfit import likelihood
from censfit.exceptions import SingularInformationError
from censfit.laws import QuadConfig
from censfit.quadrature import integrate_windows

CONDITION_WARN = 1e10


class IllConditionedWarning(RuntimeWarning):
    pass


def sigma_observed(fam, theta, data):
    return likelihood.observed_information(fam, theta, data) / data.n


def sigma_outer(fam, theta, data):
    s = likelihood.score_terms(fam, theta, data)
    outer = likelihood.exact_sum(s[:, :, None] * s[:, None, :]) / data.n
    return 0.5 * (outer + outer.T)


def spd_inverse(matrix):
    """Invert a symmetric positive definite matrix via Cholesky.

    Raises:
        SingularInformationError: if the matrix is not positive definite.
    """
    matrix = np.asarray(matrix, dtype=float)
    try:
        chol = np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        raise SingularInformationError("matrix is not positive definite") from None
    eig = np.linalg.eigvalsh(matrix)
    cond = eig[-1] / eig[0]
    if cond > CONDITION_WARN:
        warnings.warn(f"information matrix condition number {cond:.3g}", IllConditionedWarning,
                      stacklevel=2)
    inv_chol = np.linalg.solve(chol, np.eye(matrix.shape[0]))
    inv = inv_chol.T @ inv_chol
    return 0.5 * (inv + inv.T)


def influence_values(fam, theta_hat, sigma_hat, data):
    """Per-observation influence values ``Sigma^{-1} s_i``, shape ``(n, q)``."""
    s = likelihood.score_terms(fam, theta_hat, data)
    return s @ spd_inverse(sigma_hat)


def wald_intervals(theta_hat, cov_theta, level=0.95):
    """Symmetric normal-theory intervals ``theta_hat +/- z * se``."""
    if not 0 < level < 1:
        raise ValueError(f"confidence level must lie in (0, 1), got {level}")
    theta_hat = np.asarray(theta_hat, dtype=float)
    se = np.sqrt(np.diag(np.asarray(cov_theta, dtype=float)))
    z = stats.norm.ppf(0.5 + 0.5 * level)
    return theta_hat - z * se, theta_hat + z * se


@dataclass
class InferenceReport:
    theta_hat: np.ndarray
    sigma_hat: np.ndarray
    cov_theta: np.ndarray
    std_errors: np.ndarray
    ci_lower: np.ndarray
    ci_upper: np.ndarray
    level: float
    ok: bool
    condition_number: float
    message: str = ""


def infer(fam, theta_hat, data, level=0.95, estimator="observed"):
    """Standard errors and Wald intervals at ``theta_hat``.

    A non positive definite ``Sigma`` estimate does not raise; the report is
    returned with ``ok = False`` and NaN standard errors.
    """
    theta_hat = fam.check_theta(theta_hat)
    if estimator == "observed":
        sigma_hat = sigma_observed(fam, theta_hat, data)
    elif estimator == "outer":
        sigma_hat = sigma_outer(fam, theta_hat, data)
    else:
        raise ValueError(f"unknown estimator {estimator!r}")
    eig = np.linalg.eigvalsh(sigma_hat)
    cond = float(eig[-1] / eig[0]) if eig[0] > 0 else np.inf
    try:
        cov = spd_inverse(sigma_hat) / data.n
    except SingularInformationError as exc:
        nan = np.full(fam.q, np.nan)
        return InferenceReport(theta_hat, sigma_hat, np.full((fam.q, fam.q), np.nan),
                               nan, nan, nan, level, False, cond, str(exc))
    lower, upper = wald_intervals(theta_hat, cov, level)
    return InferenceReport(theta_hat, sigma_hat, cov, np.sqrt(np.diag(cov)),
                           lower, upper, level, True, cond)


@dataclass
class PopulationSigma:
    """Population information matrix ``sigma = sigma1 + sigma2``.

    ``sigma1`` collects uncensored responses weighted by ``P(C >= y)``;
    ``sigma2`` collects censored ones.  ``ok`` is false when any inner
    integral missed its tolerance.
    """

    sigma: np.ndarray
    sigma1: np.ndarray
    sigma2: np.ndarray
    abserr: float
    ok: bool

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.sigma, dtype=dtype)


def sigma_population(fam, theta0, censoring, covariates, quad=None):
    """Exact ``Sigma`` at ``theta0`` for known censoring and covariate laws.

    ``sigma1 = E[P(C >= Y) g g']`` with ``g`` the score of ``log f`` and
    ``sigma2 = E[S(C) h h']`` with ``h`` the score of ``log S`` at the
    censoring time; the latter integrand is zero wherever ``S(C) = 0``.
    """
    quad = quad or QuadConfig()
    theta0 = fam.check_theta(theta0)
    X, w = covariates.nodes(quad.covariate_nodes)
    q = fam.q

    def outer(g):
        return g[:, :, None] * g[:, None, :]

    lo, hi, log_scale = fam.integration_window(theta0, X, quad.tail_cut)

    def uncensored(y):
        weight = np.exp(fam._log_density(theta0, X, y)) * censoring.survival(y)
        return weight[:, None, None] * outer(fam._grad_log_density(theta0, X, y))

    s1, err1, ok1 = integrate_windows(uncensored, lo, hi, quad, log_scale)
    sigma1 = np.einsum("j,jrs->rs", w, s1)

    if censoring.censors:
        a, b = censoring.window(quad.tail_cut)

        def censored(c):
            log_s = fam._log_survival(theta0, X, c)
            live = np.isfinite(log_s)
            out = np.zeros((X.shape[0], q, q))
            g = fam._grad_log_survival(theta0, X[live], c[live])
            weight = censoring.pdf(c[live]) * np.exp(log_s[live])
            out[live] = weight[:, None, None] * outer(g)
            return out

        s2, err2, ok2 = integrate_windows(
            censored, np.full(X.shape[0], a), np.full(X.shape[0], b), quad
        )
        sigma2 = np.einsum("j,jrs->rs", w, s2)
    else:
        sigma2, err2, ok2 = np.zeros((q, q)), 0.0, True

    sigma1 = 0.5 * (sigma1 + sigma1.T)
    sigma2 = 0.5 * (sigma2 + sigma2.T)
    ok = ok1 and ok2
    if not ok:
        warnings.warn("sigma_population: quadrature tolerance not met", RuntimeWarning,
                      stacklevel=2)
    return PopulationSigma(sigma1 + sigma2, sigma1, sigma2, err1 + err2, ok)
