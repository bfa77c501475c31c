"""
The p = 1 graph is a Polya urn
==============================

With p = 1 every retweet brings a new user, so components behave like
bins: a new topic opens a bin, a retweet adds a ball to a bin chosen in
proportion to its size. We check this exactly on small horizons and then
by simulation.
"""

from fractions import Fraction

import trendlab as tl

lam = Fraction(1, 3)
p_bar = lam / (lam + 1)

# exact laws after two steps, side by side
rg = tl.enumerate_rg(tl.ModelParams(lam=lam, p=1, q=0), 2)
urn = tl.enumerate_urn(p_bar, 2)
for sizes in sorted(rg.support):
    print(sizes, rg[sizes], urn[sizes])

# total variation distance for every horizon the enumerator allows
for t in range(1, 7):
    print(f"t={t}  TV={tl.check_equivalence(lam, t)}")

# once some retweets come from existing users the laws differ
half = Fraction(1, 2)
mixed = tl.enumerate_rg(tl.ModelParams(lam=half, p=half, q=0), 3)
print("p=1/2, t=3: TV =", tl.distribution_distance(mixed, tl.enumerate_urn(half / (half + 1), 3)))

# a long urn run next to a long graph run: KS distance between the histograms
state = tl.simulate_urn(tl.UrnParams(p_bar=float(p_bar), steps=50_000, seed=1))
graph, _ = tl.run(tl.ModelParams(lam=1 / 3, p=1.0, q=0.9, steps=50_000, seed=2), record_events=False)
a, b = tl.bin_fractions(state), tl.SizeHistogram(tl.map_graph_to_urn(graph).counts())
print("KS distance urn vs graph:", round(tl.distribution_distance(a, b), 4))
print("KS p-value:", round(tl.ks_test(a, b).pvalue, 3))
