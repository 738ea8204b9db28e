"""Censored log-likelihood, score and observed information.

For observations ``(x_i, z_i, d_i)`` the log-likelihood is::

    l_n(theta) = sum_i  d_i log f(z_i | theta, x_i)
                      + (1 - d_i) log(1 - F(z_i | theta, x_i))

The censoring indicator is looked at first: a censored term whose survival
probability is zero in floating point contributes exactly 0, and so do its
derivatives.  All sums over observations are exactly rounded
(``math.fsum``), so results do not depend on observation order.
"""

import math
from dataclasses import dataclass

import numpy as np

from censfit.exceptions import DimensionError


@dataclass(frozen=True)
class Observation:
    x: tuple
    z: float
    delta: int


@dataclass(frozen=True, eq=False)
class Dataset:
    """Right-censored regression sample.

    Attributes:
        X: covariate matrix, shape ``(n, p)``.
        z: observed times ``min(y, c)``, shape ``(n,)``.
        delta: 1 for an uncensored observation, 0 for a censored one.
    """

    X: np.ndarray
    z: np.ndarray
    delta: np.ndarray

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        z = np.array(self.z, dtype=float)
        delta = np.asarray(self.delta)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2 or X.shape[0] == 0:
            raise DimensionError(f"covariates must be a nonempty (n, p) array, got {X.shape}")
        n = X.shape[0]
        if z.shape != (n,) or delta.shape != (n,):
            raise DimensionError(
                f"z and delta must have shape ({n},), got {z.shape} and {delta.shape}"
            )
        if not np.all(np.isin(delta, (0, 1))):
            raise ValueError("delta must contain only 0 and 1")
        if not np.all(np.isfinite(z)):
            raise ValueError("observed times must be finite")
        if not np.all(np.isfinite(X)):
            raise ValueError("covariates must be finite")
        for arr in (X, z):
            arr.setflags(write=False)
        delta = delta.astype(np.int8)
        delta.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "delta", delta)

    @classmethod
    def from_observations(cls, observations):
        observations = list(observations)
        if not observations:
            raise DimensionError("dataset must be nonempty")
        p = len(observations[0].x)
        if any(len(o.x) != p for o in observations):
            raise DimensionError("covariate dimension differs between observations")
        return cls(
            X=[o.x for o in observations],
            z=[o.z for o in observations],
            delta=[o.delta for o in observations],
        )

    def __len__(self):
        return self.X.shape[0]

    def __iter__(self):
        for x, z, d in zip(self.X, self.z, self.delta):
            yield Observation(tuple(x.tolist()), float(z), int(d))

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    @property
    def censoring_rate(self):
        return 1.0 - float(np.mean(self.delta))

    def take(self, index):
        index = np.asarray(index)
        return Dataset(self.X[index], self.z[index], self.delta[index])

    def concat(self, other):
        if other.p != self.p:
            raise DimensionError("cannot concatenate datasets with different p")
        return Dataset(
            np.vstack([self.X, other.X]),
            np.concatenate([self.z, other.z]),
            np.concatenate([self.delta, other.delta]),
        )


def exact_sum(values):
    """Exactly rounded sum over the first axis."""
    values = np.asarray(values, dtype=float)
    flat = values.reshape(values.shape[0], -1)
    out = np.array([math.fsum(col) for col in flat.T])
    return out.reshape(values.shape[1:])


def _check(fam, theta, data):
    theta = fam.check_theta(theta)
    if data.p != fam.p:
        raise DimensionError(
            f"dataset has {data.p} covariates but family {fam.name} expects {fam.p}"
        )
    return theta


def _parts(fam, theta, data):
    """Split into uncensored rows and censored rows with positive survival."""
    unc = data.delta == 1
    cens = np.flatnonzero(~unc)
    log_surv = fam._log_survival(theta, data.X[cens], data.z[cens])
    live = cens[np.isfinite(log_surv)]
    return np.flatnonzero(unc), live, cens, log_surv


def log_lik_terms(fam, theta, data):
    """Per-observation contributions to the log-likelihood."""
    theta = _check(fam, theta, data)
    unc, _, cens, log_surv = _parts(fam, theta, data)
    terms = np.zeros(data.n)
    terms[unc] = fam._log_density(theta, data.X[unc], data.z[unc])
    terms[cens] = np.where(np.isneginf(log_surv), 0.0, log_surv)
    return terms


def log_lik(fam, theta, data):
    """Censored log-likelihood ``l_n(theta)``."""
    return math.fsum(log_lik_terms(fam, theta, data))


def score_terms(fam, theta, data):
    """Per-observation scores, shape ``(n, q)``.

    Rows of censored observations with ``F == 1`` are zero.
    """
    theta = _check(fam, theta, data)
    unc, live, _, _ = _parts(fam, theta, data)
    out = np.zeros((data.n, fam.q))
    out[unc] = fam._grad_log_density(theta, data.X[unc], data.z[unc])
    out[live] = fam._grad_log_survival(theta, data.X[live], data.z[live])
    return out


def score(fam, theta, data):
    """Score vector ``s_n(theta)``, the gradient of ``log_lik``."""
    return exact_sum(score_terms(fam, theta, data))


def hessian_terms(fam, theta, data):
    """Per-observation Hessians of the log-likelihood, shape ``(n, q, q)``."""
    theta = _check(fam, theta, data)
    unc, live, _, _ = _parts(fam, theta, data)
    out = np.zeros((data.n, fam.q, fam.q))
    out[unc] = fam._hess_log_density(theta, data.X[unc], data.z[unc])
    out[live] = fam._hess_log_survival(theta, data.X[live], data.z[live])
    return out


def observed_information(fam, theta, data):
    """Negative Hessian of the log-likelihood, symmetrized."""
    info = -exact_sum(hessian_terms(fam, theta, data))
    return 0.5 * (info + info.T)


def evaluate(fam, theta, data):
    """Log-likelihood, score and observed information in one pass."""
    theta = _check(fam, theta, data)
    unc, live, cens, log_surv = _parts(fam, theta, data)
    X, z = data.X, data.z
    terms = np.zeros(data.n)
    terms[unc] = fam._log_density(theta, X[unc], z[unc])
    terms[cens] = np.where(np.isneginf(log_surv), 0.0, log_surv)
    grads = np.zeros((data.n, fam.q))
    grads[unc] = fam._grad_log_density(theta, X[unc], z[unc])
    grads[live] = fam._grad_log_survival(theta, X[live], z[live])
    hess = np.zeros((data.n, fam.q, fam.q))
    hess[unc] = fam._hess_log_density(theta, X[unc], z[unc])
    hess[live] = fam._hess_log_survival(theta, X[live], z[live])
    info = -exact_sum(hess)
    return math.fsum(terms), exact_sum(grads), 0.5 * (info + info.T)
