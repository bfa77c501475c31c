"""
The superstar probability does not move component sizes
========================================================

q decides who inside a message tree gets retweeted. Every member of a tree
sits in the same component, so component sizes cannot depend on q. Two
groups of runs with different q should give the same size law.
"""

import numpy as np
from scipy import stats

import trendlab as tl


def pooled(q, seed, reps=5, steps=50_000):
    sizes = []
    for r in range(reps):
        params = tl.ModelParams(1 / 3, 0.8, q, steps, tl.replication_seed(seed, r))
        graph, _ = tl.run(params, record_events=False)
        sizes.extend(tl.component_sizes(graph)[1:])  # largest component dropped
    return np.array(sizes)


a, b = pooled(0.5, 1), pooled(0.9, 2)
res = stats.ks_2samp(a, b)
print(f"q=0.5: {len(a)} components   q=0.9: {len(b)} components")
print(f"KS statistic {res.statistic:.4f}, p-value {res.pvalue:.3f}")

# the trees themselves do care about q: the root's share of retweets
for q in (0.0, 0.5, 0.9):
    graph, _ = tl.run(tl.ModelParams(1 / 3, 0.8, q, 50_000, 3), record_events=False)
    big = max(graph.trees, key=lambda t: t.size)
    share = big.member_degree[big.root] / max(1, sum(big.member_degree.values()))
    print(f"q={q}: largest tree has {big.size} members, root got {share:.2f} of its retweets")
