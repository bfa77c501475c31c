"""
The Yule law and its product form
=================================

The limiting size law can be written as a product of ratios
(j - 1) / (j + rho) or through Gamma functions. Both are computed here
and compared, along with the tail slope on log-log axes.
"""

import numpy as np

import trendlab as tl

for p in (1.0, 0.8, 0.4):
    rho = (1 / 3 + 1) / p
    g = tl.fi_product_bound(1 / 3, p, 10_000)
    f = tl.yule_pdf(np.arange(1, 10_001), rho)
    slope = tl.loglog_slope(g, 100, 10_000)
    print(f"p={p}: rho={rho:.4f}  max|g-f|={np.max(np.abs(g - f)):.1e}  "
          f"slope={slope:.4f}  predicted={-float(tl.predicted_exponent(1 / 3, p)):.4f}")

# how much mass lies beyond a cutoff, in closed form
rho = 4 / 3
for n in (10, 100, 1000, 10**6):
    print(f"P(size > {n}) = {tl.yule_tail(n, rho):.3e}")

# a sample drawn from the law gives back its exponent
from scipy import stats

sample = stats.yulesimon.rvs(rho, size=100_000, random_state=np.random.default_rng(0))
print("fit on a Yule(4/3) sample:", round(tl.fit_exponent(sample).alpha_hat, 4))
