"""Parametric conditional distribution families.

A family describes the law of ``Y`` given ``X = x`` through a parameter
vector ``theta`` of length ``q``.  The packing order is fixed: regression
coefficients first, then the scale or shape component last.  All methods
take and return parameters on their natural scale.

Every method broadcasts over observations.  ``x`` may be a single covariate
vector of shape ``(p,)`` together with a scalar ``y``, in which case scalars
(or single vectors / matrices) are returned, or a design matrix of shape
``(n, p)`` together with ``y`` of shape ``(n,)``.
"""

import math

import numpy as np
from scipy import special, stats

from censfit.exceptions import (
    CensoredAtomError,
    DimensionError,
    ParameterError,
    ZeroDensityError,
)

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# exp() of anything below this is 0.0 in double precision, i.e. F == 1
LOG_SURVIVAL_FLOOR = math.log(np.nextafter(0.0, 1.0))


def _atoms_to_neginf(log_surv):
    return np.where(log_surv < LOG_SURVIVAL_FLOOR, -np.inf, log_surv)


class Family:
    """Base class for conditional families ``f(y | theta, x)``.

    Subclasses implement the private ``_log_density``, ``_log_survival``,
    ``_grad_*`` and ``_hess_*`` methods on 2-d inputs; the public wrappers
    here validate and reshape.
    """

    name = None
    support = (-np.inf, np.inf)

    def __init__(self, p):
        p = int(p)
        if p < 1:
            raise DimensionError(f"covariate dimension must be >= 1, got {p}")
        self.p = p
        self.q = p + 1

    def __repr__(self):
        return f"{type(self).__name__}(p={self.p})"

    def __eq__(self, other):
        return type(self) is type(other) and self.p == other.p

    def __hash__(self):
        return hash((type(self).__name__, self.p))

    @property
    def param_names(self):
        return [f"beta{j + 1}" for j in range(self.p)] + [self._last_name]

    @property
    def positive_index(self):
        """Indices of components constrained to be strictly positive."""
        return [self.q - 1]

    # -- validation -------------------------------------------------------

    def check_theta(self, theta):
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.q,):
            raise DimensionError(
                f"{self.name}: expected theta of length {self.q}, got shape {theta.shape}"
            )
        if not np.all(np.isfinite(theta)):
            raise ParameterError(f"{self.name}: theta must be finite, got {theta}")
        if not np.all(theta[self.positive_index] > 0):
            raise ParameterError(
                f"{self.name}: {self._last_name} must be > 0, got {theta[-1]}"
            )
        return theta

    def _prepare(self, theta, x, y):
        theta = self.check_theta(theta)
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        single = x.ndim == 1
        X = np.atleast_2d(x)
        if X.ndim != 2 or X.shape[1] != self.p:
            raise DimensionError(
                f"{self.name}: expected covariates with {self.p} columns, got shape {x.shape}"
            )
        if single:
            if y.ndim != 0:
                raise DimensionError("a single covariate vector needs a scalar y")
            y = y.reshape(1)
        elif y.shape != (X.shape[0],):
            raise DimensionError(
                f"{self.name}: y has shape {y.shape}, expected ({X.shape[0]},)"
            )
        return theta, X, y, single

    @staticmethod
    def _out(value, single):
        return value[0] if single else value

    # -- public API -------------------------------------------------------

    def log_density(self, theta, x, y):
        """``log f(y | theta, x)``; ``-inf`` outside the support."""
        theta, X, y, single = self._prepare(theta, x, y)
        return self._out(self._log_density(theta, X, y), single)

    def log_survival(self, theta, x, y):
        """``log(1 - F(y | theta, x))`` evaluated on the complementary CDF.

        Returns ``-inf`` where ``1 - F`` underflows to zero in double
        precision, which is the floating-point meaning of ``F == 1``.
        """
        theta, X, y, single = self._prepare(theta, x, y)
        return self._out(self._log_survival(theta, X, y), single)

    def cdf(self, theta, x, y):
        theta, X, y, single = self._prepare(theta, x, y)
        return self._out(-np.expm1(self._log_survival(theta, X, y)), single)

    def density(self, theta, x, y):
        theta, X, y, single = self._prepare(theta, x, y)
        return self._out(np.exp(self._log_density(theta, X, y)), single)

    def grad_log_density(self, theta, x, y):
        """Gradient of ``log f`` in theta, shape ``(q,)`` or ``(n, q)``."""
        theta, X, y, single = self._prepare(theta, x, y)
        if np.any(~np.isfinite(self._log_density(theta, X, y))):
            raise ZeroDensityError(f"{self.name}: density is zero at some y")
        return self._out(self._grad_log_density(theta, X, y), single)

    def grad_log_survival(self, theta, x, y):
        """Gradient of ``log(1 - F)`` in theta.

        Raises:
            CensoredAtomError: if ``F`` evaluates to 1 at any point.
        """
        theta, X, y, single = self._prepare(theta, x, y)
        self._check_atoms(theta, X, y)
        return self._out(self._grad_log_survival(theta, X, y), single)

    def hess_log_density(self, theta, x, y):
        theta, X, y, single = self._prepare(theta, x, y)
        if np.any(~np.isfinite(self._log_density(theta, X, y))):
            raise ZeroDensityError(f"{self.name}: density is zero at some y")
        return self._out(self._hess_log_density(theta, X, y), single)

    def hess_log_survival(self, theta, x, y):
        theta, X, y, single = self._prepare(theta, x, y)
        self._check_atoms(theta, X, y)
        return self._out(self._hess_log_survival(theta, X, y), single)

    def hess_log_lik_terms(self, theta, x, y):
        """Pair ``(Hessian of log f, Hessian of log(1 - F))`` at ``(x, y)``."""
        return self.hess_log_density(theta, x, y), self.hess_log_survival(theta, x, y)

    def _check_atoms(self, theta, X, y):
        if np.any(np.isneginf(self._log_survival(theta, X, y))):
            raise CensoredAtomError(f"{self.name}: F(y | theta, x) == 1")

    def sample(self, theta, X, rng):
        """Draw one response per row of ``X``."""
        theta = self.check_theta(theta)
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return self._sample(theta, X, rng)

    def integration_window(self, theta, X, tail_cut):
        """Bounds holding all but a ``Phi(-tail_cut)`` tail of each conditional law.

        Returns ``(lo, hi, log_scale)``; with ``log_scale`` the bounds refer to
        ``log y`` and integrals must carry the ``dy = y dv`` Jacobian.
        """
        raise NotImplementedError

    def initial_guess(self, X, z, delta):
        raise NotImplementedError


def _outer(a, b):
    return a[:, :, None] * b[:, None, :]


class NormalLinear(Family):
    """``Y | x ~ N(beta' x, sigma^2)`` with ``theta = (beta, sigma)``."""

    name = "normal-linear"
    _last_name = "sigma"

    def _split(self, theta, X, y):
        beta, sigma = theta[:-1], theta[-1]
        u = (y - X @ beta) / sigma
        return sigma, u

    def _log_density(self, theta, X, y):
        sigma, u = self._split(theta, X, y)
        with np.errstate(over="ignore"):
            return -LOG_SQRT_2PI - math.log(sigma) - 0.5 * u * u

    def _log_survival(self, theta, X, y):
        return _atoms_to_neginf(self._log_survival_raw(theta, X, y))

    def _log_survival_raw(self, theta, X, y):
        _, u = self._split(theta, X, y)
        return special.log_ndtr(-u)

    def _grad_log_density(self, theta, X, y):
        sigma, u = self._split(theta, X, y)
        g = np.empty((X.shape[0], self.q))
        g[:, :-1] = (u / sigma)[:, None] * X
        g[:, -1] = (u * u - 1.0) / sigma
        return g

    def _hess_log_density(self, theta, X, y):
        sigma, u = self._split(theta, X, y)
        n = X.shape[0]
        h = np.empty((n, self.q, self.q))
        h[:, :-1, :-1] = -_outer(X, X) / sigma**2
        cross = (-2.0 * u / sigma**2)[:, None] * X
        h[:, :-1, -1] = cross
        h[:, -1, :-1] = cross
        h[:, -1, -1] = (1.0 - 3.0 * u * u) / sigma**2
        return h

    @staticmethod
    def _mills(u):
        # hazard of the standard normal at u: phi(u) / (1 - Phi(u))
        return np.exp(-LOG_SQRT_2PI - 0.5 * u * u - special.log_ndtr(-u))

    def _grad_log_survival(self, theta, X, y):
        sigma, u = self._split(theta, X, y)
        lam = self._mills(u)
        g = np.empty((X.shape[0], self.q))
        g[:, :-1] = (lam / sigma)[:, None] * X
        g[:, -1] = lam * u / sigma
        return g

    def _hess_log_survival(self, theta, X, y):
        sigma, u = self._split(theta, X, y)
        lam = self._mills(u)
        dlam = lam * (lam - u)
        n = X.shape[0]
        h = np.empty((n, self.q, self.q))
        h[:, :-1, :-1] = -(dlam / sigma**2)[:, None, None] * _outer(X, X)
        cross = (-(dlam * u + lam) / sigma**2)[:, None] * X
        h[:, :-1, -1] = cross
        h[:, -1, :-1] = cross
        h[:, -1, -1] = -u * (dlam * u + 2.0 * lam) / sigma**2
        return h

    def _sample(self, theta, X, rng):
        return X @ theta[:-1] + theta[-1] * rng.standard_normal(X.shape[0])

    def integration_window(self, theta, X, tail_cut):
        theta = self.check_theta(theta)
        mean = np.atleast_2d(X) @ theta[:-1]
        half = tail_cut * theta[-1]
        return mean - half, mean + half, False

    def initial_guess(self, X, z, delta):
        coef, *_ = np.linalg.lstsq(X, z, rcond=None)
        resid = z - X @ coef
        sigma = max(math.sqrt(float(np.mean(resid * resid))), 1e-3)
        return np.append(coef, sigma)


class WeibullAFT(Family):
    """Weibull law with shape ``k`` and scale ``exp(beta' x)``; ``theta = (beta, k)``.

    With ``w = log y - beta' x`` and ``t = exp(k w)``::

        log f = log k - log y + k w - t
        log S = -t
    """

    name = "weibull-aft"
    support = (0.0, np.inf)
    _last_name = "k"

    def _split(self, theta, X, y):
        k = theta[-1]
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.log(np.where(y > 0, y, np.nan)) - X @ theta[:-1]
        with np.errstate(over="ignore"):
            t = np.exp(k * w)
        return k, w, t

    def _log_density(self, theta, X, y):
        k, w, t = self._split(theta, X, y)
        with np.errstate(invalid="ignore"):
            out = math.log(k) - np.log(np.where(y > 0, y, 1.0)) + k * w - t
        return np.where(y > 0, out, -np.inf)

    def _log_survival(self, theta, X, y):
        return _atoms_to_neginf(self._log_survival_raw(theta, X, y))

    def _log_survival_raw(self, theta, X, y):
        _, _, t = self._split(theta, X, y)
        return np.where(y > 0, -t, 0.0)

    def _grad_log_density(self, theta, X, y):
        k, w, t = self._split(theta, X, y)
        g = np.empty((X.shape[0], self.q))
        g[:, :-1] = (k * (t - 1.0))[:, None] * X
        g[:, -1] = 1.0 / k + w * (1.0 - t)
        return g

    def _hess_log_density(self, theta, X, y):
        k, w, t = self._split(theta, X, y)
        h = np.empty((X.shape[0], self.q, self.q))
        h[:, :-1, :-1] = -(k * k * t)[:, None, None] * _outer(X, X)
        cross = ((t - 1.0) + k * w * t)[:, None] * X
        h[:, :-1, -1] = cross
        h[:, -1, :-1] = cross
        h[:, -1, -1] = -1.0 / k**2 - w * w * t
        return h

    def _grad_log_survival(self, theta, X, y):
        k, w, t = self._split(theta, X, y)
        pos = y > 0
        g = np.zeros((X.shape[0], self.q))
        g[pos, :-1] = (k * t[pos])[:, None] * X[pos]
        g[pos, -1] = -w[pos] * t[pos]
        return g

    def _hess_log_survival(self, theta, X, y):
        k, w, t = self._split(theta, X, y)
        pos = y > 0
        h = np.zeros((X.shape[0], self.q, self.q))
        Xp, wp, tp = X[pos], w[pos], t[pos]
        h[pos, :-1, :-1] = -(k * k * tp)[:, None, None] * _outer(Xp, Xp)
        cross = (tp * (1.0 + k * wp))[:, None] * Xp
        h[pos, :-1, -1] = cross
        h[pos, -1, :-1] = cross
        h[pos, -1, -1] = -wp * wp * tp
        return h

    def _sample(self, theta, X, rng):
        scale = np.exp(X @ theta[:-1])
        return scale * rng.standard_exponential(X.shape[0]) ** (1.0 / theta[-1])

    def integration_window(self, theta, X, tail_cut):
        theta = self.check_theta(theta)
        eta = np.atleast_2d(X) @ theta[:-1]
        log_tail = float(stats.norm.logsf(tail_cut))
        k = theta[-1]
        # t = exp(k (v - eta)) runs from the lower tail mass to -log(tail mass)
        return eta + log_tail / k, eta + math.log(-log_tail) / k, True

    def initial_guess(self, X, z, delta):
        unc = (delta == 1) & (z > 0)
        Xu, zu = X[unc], z[unc]
        if Xu.shape[0] < self.p or np.linalg.matrix_rank(Xu) < self.p:
            Xu, zu = X[z > 0], z[z > 0]
        coef, *_ = np.linalg.lstsq(Xu, np.log(zu), rcond=None)
        return np.append(coef, 1.0)


FAMILIES = {cls.name: cls for cls in (NormalLinear, WeibullAFT)}


def get_family(name, p):
    """Look up a family by its string identifier."""
    try:
        cls = FAMILIES[name]
    except KeyError:
        known = ", ".join(sorted(FAMILIES))
        raise ValueError(f"unknown family {name!r}; expected one of: {known}") from None
    return cls(p)
