"""Kullback-Leibler information under random censoring with covariates.

For parameters ``theta1, theta2``, a censoring law ``G`` and a covariate law
``H`` the extended information is::

    K(theta1, theta2) = E_X E_C [ int_{y <= C} log(f1 / f2) f1 dy
                                  + S1(C) log(S1(C) / S2(C)) ]

with ``f_i = f(. | theta_i, X)`` and ``S_i = 1 - F(. | theta_i, X)``, and with
``0 log(0/0) = 0``.  Swapping the ``C`` and ``y`` integrals turns the first
part into ``E_X int log(f1/f2) f1 P(C >= y) dy``; both parts are then
evaluated by adaptive quadrature per covariate node.  The expected
log-likelihood ``L(theta0, theta)`` is the same construction with
``log f(y | theta)`` in place of the log-ratio, and
``K(t1, t2) = L(t1, t1) - L(t1, t2)``.
"""

import numpy as np

from censfit.exceptions import DimensionError, QuadratureError
from censfit.laws import CensoringLaw, QuadConfig
from censfit.quadrature import integrate_windows


def _nodes(fam, covariates, quad):
    if covariates.p != fam.p:
        raise DimensionError(
            f"covariate law has dimension {covariates.p}, family expects {fam.p}"
        )
    return covariates.nodes(quad.covariate_nodes)


def _response_part(fam, weight_theta, log_term, X, censoring, quad):
    """``int log_term(y) f(y | weight_theta, x_j) P(C >= y) dy`` for every node."""
    lo, hi, log_scale = fam.integration_window(weight_theta, X, quad.tail_cut)

    def integrand(y):
        f = np.exp(fam._log_density(weight_theta, X, y))
        val = f * censoring.survival(y)
        with np.errstate(invalid="ignore"):
            out = val * log_term(y)
        return np.where(val == 0.0, 0.0, out)

    return integrate_windows(integrand, lo, hi, quad, log_scale)


def _censored_part(fam, weight_theta, log_term, X, censoring, quad):
    """``int g(c) S(c | weight_theta, x_j) log_term(c) dc`` for every node."""
    if not censoring.censors:
        return np.zeros(X.shape[0]), 0.0, True
    a, b = censoring.window(quad.tail_cut)
    lo, hi = np.full(X.shape[0], a), np.full(X.shape[0], b)

    def integrand(c):
        s1 = np.exp(fam._log_survival_raw(weight_theta, X, c))
        val = censoring.pdf(c) * s1
        with np.errstate(invalid="ignore"):
            out = val * log_term(c)
        # 0 log(0/0) = 0 whenever the weighting survival probability vanishes
        return np.where(val == 0.0, 0.0, out)

    return integrate_windows(integrand, lo, hi, quad)


def _combine(fam, theta_w, log_f, log_s, censoring, covariates, quad):
    X, w = _nodes(fam, covariates, quad)
    resp, err1, ok1 = _response_part(fam, theta_w, lambda y: log_f(X, y), X, censoring, quad)
    cens, err2, ok2 = _censored_part(fam, theta_w, lambda c: log_s(X, c), X, censoring, quad)
    value = float(w @ (resp + cens))
    return value, err1 + err2, ok1 and ok2


def _finish(value, abserr, ok, full_output, what):
    if not ok or not np.isfinite(abserr):
        raise QuadratureError(
            f"{what}: quadrature error estimate {abserr:.3g} above tolerance", abserr
        )
    if full_output:
        return value, abserr
    return value


def expected_loglik(fam, theta0, theta, censoring, covariates, quad=None, full_output=False):
    """Limit of ``l_n(theta) / n`` when the data follow ``theta0``.

    Returns ``value`` or, with ``full_output``, ``(value, abserr)``.

    Raises:
        QuadratureError: if the requested tolerance is not met.
    """
    quad = quad or QuadConfig()
    theta0 = fam.check_theta(theta0)
    theta = fam.check_theta(theta)
    value, abserr, ok = _combine(
        fam, theta0,
        lambda X, y: fam._log_density(theta, X, y),
        lambda X, c: fam._log_survival_raw(theta, X, c),
        censoring, covariates, quad,
    )
    return _finish(value, abserr, ok, full_output, "expected_loglik")


def kl_extended(fam, theta1, theta2, censoring, covariates, quad=None, full_output=False):
    """Extended Kullback-Leibler information of ``theta2`` relative to ``theta1``.

    The log-ratio is integrated directly rather than as a difference of two
    expected log-likelihoods, so ``kl_extended(t, t)`` is exactly zero.
    """
    quad = quad or QuadConfig()
    theta1 = fam.check_theta(theta1)
    theta2 = fam.check_theta(theta2)
    value, abserr, ok = _combine(
        fam, theta1,
        lambda X, y: fam._log_density(theta1, X, y) - fam._log_density(theta2, X, y),
        lambda X, c: (fam._log_survival_raw(theta1, X, c)
                      - fam._log_survival_raw(theta2, X, c)),
        censoring, covariates, quad,
    )
    return _finish(value, abserr, ok, full_output, "kl_extended")


def kl_uncensored(fam, theta1, theta2, covariates, quad=None, full_output=False):
    """Covariate-averaged information without censoring (``G`` at +infinity)."""
    return kl_extended(fam, theta1, theta2, CensoringLaw.none(), covariates, quad, full_output)
