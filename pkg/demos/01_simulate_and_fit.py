"""
Growing a retweet graph and fitting its component sizes
=======================================================

Grow one graph with only new users retweeting (p = 1), then compare the
component-size histogram with the Yule law it should follow.
"""

import numpy as np

import trendlab as tl

params = tl.ModelParams(lam=1 / 3, p=1.0, q=0.9, steps=100_000, seed=42)
graph, _ = tl.run(params, record_events=False)
print(graph)

# components by size, and the largest one's share of all users
hist = tl.SizeHistogram.from_sizes(tl.component_sizes(graph))
print(f"{hist.n} components, largest holds {tl.lcc_fraction(graph):.4f} of the nodes")

# the maximum-likelihood Yule fit against the predicted exponent lam + 2
fit = tl.fit_exponent(hist)
print(f"alpha_hat = {fit.alpha_hat:.4f}   predicted = {float(tl.predicted_exponent(1 / 3, 1)):.4f}")

# observed fractions next to the model pdf for the first few sizes
frac = hist.fractions()
model = tl.YuleModel.from_params(1 / 3, 1)
print("size  observed  yule")
for i in range(1, 11):
    print(f"{i:4d}  {frac.get(i, 0.0):.5f}  {tl.yule_pdf(i, model):.5f}")

# the old closed-form estimator, for comparison: it undershoots on Yule data
print(f"closed form: {tl.fit_exponent(hist, method='continuous').alpha_hat:.4f}")
print("mean size", np.mean(hist.to_sizes()))
