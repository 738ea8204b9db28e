"""
A Monte Carlo accuracy study
============================

Repeat the fit on many simulated samples and summarize the mean estimate,
bias, spread and mean squared error for growing sample sizes.  The same study
is available from the command line as ``censfit simulate --scenario FILE``.
"""

import os

from censfit.simulation import coverage, format_table, load_scenarios, run_study

here = os.path.dirname(os.path.abspath(__file__))
path = os.path.join(here, "..", "scenarios", "table3.txt")

# Scenario files list each setting once; comma-separated values of n expand
# into one study per sample size.
scenarios = load_scenarios(path)
reports = [run_study(s) for s in scenarios]
print(format_table(reports))

# Wald interval coverage from the same replications.
for r in reports:
    print(f"n={r.scenario.n}: 95% coverage {coverage(r).round(2)}")
