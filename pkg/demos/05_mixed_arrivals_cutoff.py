"""
Component sizes when existing users also retweet
================================================

For p < 1 some retweets join two existing components. A small component is
swallowed at a rate that grows with its size, so its size law falls off
faster than the power law i^-(1 + (lam + 1) / p). This script puts the
observed fractions next to that law.
"""

from collections import Counter

import trendlab as tl

lam = 1 / 3
for p in (1.0, 0.8, 0.4):
    pooled = Counter()
    for r in range(3):
        graph, _ = tl.run(tl.ModelParams(lam, p, 0.9, 100_000, tl.replication_seed(5, r)),
                          record_events=False)
        sizes = tl.component_sizes(graph)
        pooled.update(sizes[1:] if p < 1 else sizes)  # largest dropped when p < 1
    hist = tl.SizeHistogram(pooled)
    rho = (lam + 1) / p
    print(f"\np={p}: alpha_hat {tl.fit_exponent(hist).alpha_hat:.3f}, "
          f"power law predicts {rho + 1:.3f}")

    # mean-field limit of f(k)/f(k-1) for large k; 1 means no cutoff
    g = p / (lam + 1)
    d = (1 - p) / (lam + 1) * (1 + (lam + 1) / (lam + p))
    print(f"  mean-field tail ratio {g / (g + d):.3f}")
    frac = hist.fractions()
    print("  size  observed   yule      count")
    for k in (1, 2, 3, 5, 8, 12, 20):
        print(f"  {k:4d}  {frac.get(k, 0.0):.2e}  {tl.yule_pdf(k, rho):.2e}  {pooled[k]}")
