"""
Information under censoring
===========================

Three routes to the information matrix of one observation: the observed
information, the mean outer product of scores, and the exact value for known
censoring and covariate laws.
"""

import numpy as np

from censfit import CensoringLaw, NormalLinear, sigma_observed, sigma_outer, sigma_population
from censfit.simulation import COVARIATE_LAW, Scenario, generate

fam = NormalLinear(p=2)
np.set_printoptions(precision=4, suppress=True)

for mu_c in (9.0, 2.0):
    scen = Scenario(beta0=(1.0, 2.0), sigma0=1.0, mu_c=mu_c, n=20000, seed=1)
    data = generate(scen, 0)
    pop = sigma_population(fam, scen.theta0, scen.censoring, COVARIATE_LAW)
    print(f"--- mu_c = {mu_c}: {100 * data.censoring_rate:.1f}% censored")
    print("observed information / n\n", sigma_observed(fam, scen.theta0, data))
    print("outer product of scores / n\n", sigma_outer(fam, scen.theta0, data))
    print("population value (uncensored part + censored part)\n", pop.sigma)
    print("censored part alone\n", pop.sigma2)

# Without censoring the population value is the usual normal information,
# E[x x'] / sigma^2 for the coefficients and 2 / sigma^2 for the scale.
none = sigma_population(fam, [1.0, 2.0, 1.0], CensoringLaw.none(), COVARIATE_LAW)
print("no censoring\n", none.sigma)

# Asymptotic standard errors at n = 500 follow from the inverse.
print("asymptotic se at n=500:", np.sqrt(np.diag(np.linalg.inv(pop.sigma)) / 500))
