"""Censoring and covariate laws with known distributions.

These are only needed where the truth is known: population information
matrices, Kullback-Leibler diagnostics and the simulation study.  Fitting
never uses them.
"""

from dataclasses import dataclass

import numpy as np
from scipy import special, stats


@dataclass(frozen=True)
class QuadConfig:
    """Numerical integration settings.

    Attributes:
        abs_tolerance: absolute error target for every inner integral.
        max_subdivisions: cap on adaptive subintervals.
        tail_cut: half-width of integration windows in standard deviations
            of a normal law; other laws drop the same tail mass.
        covariate_nodes: Gauss-Legendre order for continuous covariates.
    """

    abs_tolerance: float = 1e-8
    max_subdivisions: int = 200
    tail_cut: float = 12.0
    covariate_nodes: int = 64

    def __post_init__(self):
        if not (self.abs_tolerance > 0 and self.max_subdivisions > 0
                and self.tail_cut > 0 and self.covariate_nodes > 0):
            raise ValueError("quadrature settings must all be positive")


@dataclass(frozen=True)
class CensoringLaw:
    """Law of the censoring time ``C``.

    ``kind`` is ``"normal"`` (with ``mean`` and ``sd``) or ``"none"``, a
    point mass at +infinity meaning no censoring at all.
    """

    kind: str = "normal"
    mean: float = 0.0
    sd: float = 1.0

    def __post_init__(self):
        if self.kind not in ("normal", "none"):
            raise ValueError(f"unknown censoring law {self.kind!r}")
        if self.kind == "normal" and not self.sd > 0:
            raise ValueError("censoring sd must be positive")

    @classmethod
    def normal(cls, mean, sd=1.0):
        return cls("normal", float(mean), float(sd))

    @classmethod
    def none(cls):
        return cls("none", np.inf, 0.0)

    @property
    def censors(self):
        return self.kind != "none"

    def survival(self, y):
        """``P(C >= y)``, i.e. ``1 - G(y-)``."""
        y = np.asarray(y, dtype=float)
        if not self.censors:
            return np.ones_like(y)
        return special.ndtr((self.mean - y) / self.sd)

    def pdf(self, c):
        return stats.norm.pdf(c, self.mean, self.sd)

    def window(self, tail_cut):
        return self.mean - tail_cut * self.sd, self.mean + tail_cut * self.sd

    def sample(self, rng, n):
        if not self.censors:
            return np.full(n, np.inf)
        return self.mean + self.sd * rng.standard_normal(n)


@dataclass(frozen=True)
class CovariateLaw:
    """Law of the covariate vector ``X``.

    ``"intercept-uniform"`` gives ``X = (1, U)`` with ``U ~ Uniform(low, high)``;
    ``"finite"`` puts probability ``weights[j]`` on ``points[j]``.
    """

    kind: str = "intercept-uniform"
    low: float = -5.0
    high: float = 5.0
    points: tuple = ()
    weights: tuple = ()

    def __post_init__(self):
        if self.kind == "intercept-uniform":
            if not self.low < self.high:
                raise ValueError("uniform covariate law needs low < high")
        elif self.kind == "finite":
            pts = np.atleast_2d(np.asarray(self.points, dtype=float))
            w = np.asarray(self.weights, dtype=float)
            if pts.shape[0] != w.shape[0] or w.size == 0:
                raise ValueError("points and weights must have the same nonzero length")
            if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
                raise ValueError("weights must be nonnegative and sum to 1")
        else:
            raise ValueError(f"unknown covariate law {self.kind!r}")

    @classmethod
    def intercept_uniform(cls, low=-5.0, high=5.0):
        return cls("intercept-uniform", float(low), float(high))

    @classmethod
    def finite(cls, points, weights=None):
        points = tuple(tuple(float(v) for v in np.atleast_1d(pt)) for pt in points)
        if weights is None:
            weights = (1.0 / len(points),) * len(points)
        return cls("finite", points=points, weights=tuple(float(w) for w in weights))

    @property
    def p(self):
        if self.kind == "intercept-uniform":
            return 2
        return len(self.points[0])

    def nodes(self, order):
        """Quadrature nodes ``(X, weights)`` with weights summing to one."""
        if self.kind == "finite":
            return np.array(self.points, dtype=float), np.array(self.weights, dtype=float)
        t, w = np.polynomial.legendre.leggauss(order)
        half = 0.5 * (self.high - self.low)
        u = self.low + half * (t + 1.0)
        return np.column_stack([np.ones(order), u]), 0.5 * w

    def sample(self, rng, n):
        if self.kind == "intercept-uniform":
            return np.column_stack([np.ones(n), rng.uniform(self.low, self.high, n)])
        idx = rng.choice(len(self.points), size=n, p=np.array(self.weights))
        return np.array(self.points, dtype=float)[idx]
