"""
Weibull accelerated failure times
=================================

Lifetimes whose log scale is linear in a covariate, with administrative
censoring at a random follow-up time.
"""

import numpy as np

from censfit import Dataset, WeibullAFT, fit, infer

rng = np.random.default_rng(3)
fam = WeibullAFT(p=2)
theta0 = np.array([1.0, 0.4, 1.8])  # log-scale intercept, slope, shape k

n = 600
X = np.column_stack([np.ones(n), rng.normal(size=n)])
t = fam.sample(theta0, X, rng)
follow_up = rng.uniform(1.0, 6.0, n)
data = Dataset(X, np.minimum(t, follow_up), (t <= follow_up).astype(int))
print(f"censored: {100 * data.censoring_rate:.1f}%")

result = fit(fam, data)
report = infer(fam, result.theta_hat, data)
for name, true, est, se in zip(fam.param_names, theta0, result.theta_hat, report.std_errors):
    print(f"{name:>6}: true {true:.3f}  estimate {est:.3f} +/- {1.96 * se:.3f}")

# A unit change in the covariate multiplies every quantile of the lifetime by
# exp(slope).
print(f"time ratio per unit covariate: {np.exp(result.theta_hat[1]):.3f}")
