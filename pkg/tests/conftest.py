import numpy as np
import pytest

from censfit.families import NormalLinear, WeibullAFT
from censfit.likelihood import Dataset

ACCEPTANCE_LINES = []


def fd_gradient(fn, theta):
    """Central differences with step eps^(1/3) scaled by |theta|."""
    theta = np.asarray(theta, dtype=float)
    eps = np.finfo(float).eps ** (1.0 / 3.0)
    cols = []
    for j in range(theta.size):
        h = eps * max(1.0, abs(theta[j]))
        up, down = theta.copy(), theta.copy()
        up[j] += h
        down[j] -= h
        cols.append((np.asarray(fn(up)) - np.asarray(fn(down))) / (up[j] - down[j]))
    return np.stack(cols, axis=-1)


def rel_err(a, b):
    """Componentwise relative error with an absolute floor of one."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))


def random_point(fam, rng):
    """Random (theta, x, y) with y drawn from the model itself."""
    x = np.concatenate([[1.0], rng.uniform(-1.5, 1.5, fam.p - 1)])
    if isinstance(fam, NormalLinear):
        theta = np.concatenate([rng.normal(0, 2, fam.p), [rng.uniform(0.3, 3.0)]])
    else:
        theta = np.concatenate([rng.normal(0, 0.7, fam.p), [rng.uniform(0.5, 3.0)]])
    y = float(fam.sample(theta, x[None, :], rng)[0])
    return theta, x, y


def censored_sample(fam, theta, n, rng, censor_shift=0.0):
    X = np.column_stack([np.ones(n), rng.uniform(-1.5, 1.5, (n, fam.p - 1))])
    y = fam.sample(theta, X, rng)
    c = fam.sample(theta, X, rng)
    if isinstance(fam, NormalLinear):
        c = c + censor_shift
    else:
        c = c * np.exp(censor_shift)
    return Dataset(X, np.minimum(y, c), (y <= c).astype(int))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=["normal", "weibull"])
def family(request):
    return NormalLinear(2) if request.param == "normal" else WeibullAFT(2)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
