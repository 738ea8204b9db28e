"""Maximum likelihood fitting by damped Newton ascent.

The optimizer works on an unconstrained parameterization in which every
positive component (scale or shape) is replaced by its logarithm.  Each
iteration tries a Newton step built from the observed information; when the
information is not positive definite it falls back to the gradient.  Steps
are accepted under an Armijo rule, so the log-likelihood never decreases.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from censfit import likelihood
from censfit.exceptions import IdentifiabilityError, InitializationError

logger = logging.getLogger(__name__)


@dataclass
class FitConfig:
    """Optimizer settings.

    ``grad_tolerance`` applies to the mean score ``max|s_n| / n``.
    ``fixed`` maps parameter indices to values held constant during the fit.
    ``max_step`` caps each step, in the log-scale coordinates, at
    ``max_step * max(1, max|psi|)``.
    """

    max_iterations: int = 200
    grad_tolerance: float = 1e-8
    step_tolerance: float = 1e-10
    line_search_shrink: float = 0.5
    armijo: float = 1e-4
    max_backtracks: int = 60
    divergence_bound: float = 1e8
    max_step: float = 5.0
    init: np.ndarray = None
    fixed: dict = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        for name in ("grad_tolerance", "step_tolerance", "armijo"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if not self.max_step > 0:
            raise ValueError("max_step must be strictly positive")
        if not 0 < self.line_search_shrink < 1:
            raise ValueError("line_search_shrink must lie in (0, 1)")


@dataclass
class FitResult:
    theta_hat: np.ndarray
    loglik: float
    iterations: int
    converged: bool
    gradient_norm: float
    message: str = ""
    history: list = field(default_factory=list)
    n: int = 0


def check_identifiable(fam, data):
    if data.p != fam.p:
        raise IdentifiabilityError(
            f"dataset has {data.p} covariates but family {fam.name} expects {fam.p}"
        )
    if not np.any(data.delta == 1):
        raise IdentifiabilityError("all observations are censored")
    rank = np.linalg.matrix_rank(data.X)
    if rank < data.p:
        raise IdentifiabilityError(
            f"covariate matrix is rank deficient (rank {rank} < {data.p})"
        )


def default_init(fam, data):
    """Starting point from a least-squares fit that ignores censoring."""
    check_identifiable(fam, data)
    return fam.check_theta(fam.initial_guess(data.X, data.z, data.delta))


def _to_free(theta, pos):
    psi = theta.copy()
    psi[pos] = np.log(theta[pos])
    return psi


def _from_free(psi, pos):
    theta = psi.copy()
    theta[pos] = np.exp(psi[pos])
    return theta


def fit(fam, data, config=None):
    """Maximize the censored log-likelihood.

    Returns a :class:`FitResult`; non-convergence is reported through
    ``converged = False`` with the best iterate, never raised.

    Raises:
        IdentifiabilityError: all observations censored or rank-deficient design.
        InitializationError: the log-likelihood is ``-inf`` at the start.
    """
    config = config or FitConfig()
    check_identifiable(fam, data)
    if config.init is not None:
        theta = fam.check_theta(np.array(config.init, dtype=float))
    else:
        theta = default_init(fam, data)
    fixed = dict(config.fixed or {})
    for j, value in fixed.items():
        theta[j] = value
    theta = fam.check_theta(theta)
    free = np.array([j for j in range(fam.q) if j not in fixed], dtype=int)
    pos = np.zeros(fam.q, dtype=bool)
    pos[fam.positive_index] = True

    terms = likelihood.log_lik_terms(fam, theta, data)
    bad = np.flatnonzero(~np.isfinite(terms))
    if bad.size:
        i = int(bad[0])
        raise InitializationError(
            f"log-likelihood is -inf at the initial point: observation {i} "
            f"(z={data.z[i]!r}, delta={int(data.delta[i])}) has zero likelihood",
            index=i,
        )

    n = data.n
    psi = _to_free(theta, pos)
    history = []
    message = "maximum iterations reached"
    converged = False
    iterations = 0
    ll, g, info = likelihood.evaluate(fam, theta, data)
    history.append(ll)

    for iterations in range(1, config.max_iterations + 1):
        gnorm = float(np.max(np.abs(g[free]))) / n if free.size else 0.0
        if gnorm <= config.grad_tolerance:
            converged = True
            message = "gradient tolerance reached"
            iterations -= 1
            break

        # chain rule to the log scale of positive components
        jac = np.where(pos, theta, 1.0)
        g_psi = g * jac
        neg_hess = info * np.outer(jac, jac) - np.diag(np.where(pos, g * theta, 0.0))
        gf = g_psi[free]
        A = neg_hess[np.ix_(free, free)]
        try:
            chol = np.linalg.cholesky(A)
            direction = np.linalg.solve(chol.T, np.linalg.solve(chol, gf))
        except np.linalg.LinAlgError:
            direction = gf / max(1.0, float(np.max(np.abs(gf))))
        cap = config.max_step * max(1.0, float(np.max(np.abs(psi))))
        longest = float(np.max(np.abs(direction))) if direction.size else 0.0
        if longest > cap:
            direction = direction * (cap / longest)
        slope = float(gf @ direction)

        step = 1.0
        accepted = diverged = False
        for _ in range(config.max_backtracks):
            trial_psi = psi.copy()
            trial_psi[free] += step * direction
            with np.errstate(over="ignore"):
                trial = _from_free(trial_psi, pos)
            if np.all(np.isfinite(trial)):
                trial_ll = likelihood.log_lik(fam, trial, data)
                if trial_ll >= ll + config.armijo * step * slope:
                    accepted = True
                    diverged = float(np.max(np.abs(trial))) > config.divergence_bound
                    break
            step *= config.line_search_shrink

        if diverged:
            message = "iterates diverged"
            break
        if not accepted:
            message = "line search failed to increase the log-likelihood"
            break

        change = float(np.max(np.abs(trial_psi - psi))) / max(1.0, float(np.max(np.abs(psi))))
        psi, theta = trial_psi, trial
        ll, g, info = likelihood.evaluate(fam, theta, data)
        if ll < history[-1]:
            raise AssertionError("log-likelihood decreased on an accepted step")
        history.append(ll)
        if change <= config.step_tolerance:
            gnorm = float(np.max(np.abs(g[free]))) / n if free.size else 0.0
            converged = gnorm <= config.grad_tolerance
            message = "step tolerance reached"
            break
    else:
        gnorm = float(np.max(np.abs(g[free]))) / n if free.size else 0.0
        converged = gnorm <= config.grad_tolerance

    gnorm = float(np.max(np.abs(g[free]))) / n if free.size else 0.0
    if not converged:
        logger.warning("fit did not converge: %s (|s|/n = %.3g)", message, gnorm)
    return FitResult(
        theta_hat=theta,
        loglik=ll,
        iterations=iterations,
        converged=converged,
        gradient_norm=gnorm,
        message=message,
        history=history,
        n=n,
    )
