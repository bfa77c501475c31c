import copy
from collections import Counter
from fractions import Fraction

import pytest
from scipy import stats

from trendlab import (
    ConfigurationError,
    ModelParams,
    RandomStream,
    UrnParams,
    UrnState,
    bin_fractions,
    component_sizes,
    fit_exponent,
    map_graph_to_urn,
    new_graph,
    run,
    simulate_urn,
    step,
    urn_init,
    urn_step,
)


def test_init():
    s = urn_init()
    assert s.bins == [1] and s.total_balls == 1
    assert urn_init() == urn_init()


@pytest.mark.parametrize("kwargs", [dict(p_bar=-0.1), dict(p_bar=1.1), dict(p_bar=0.5, gamma=float("inf")),
                                    dict(p_bar=0.5, steps=-2), dict(p_bar=0.5, seed=-1)])
def test_invalid_params(kwargs):
    with pytest.raises(ConfigurationError):
        UrnParams(**kwargs)


def test_state_equality_is_multiset():
    assert UrnState([1, 3, 2]) == UrnState([3, 2, 1])
    assert UrnState([1, 3]) != UrnState([2, 2])


def test_p_bar_one_always_opens_bins():
    s = simulate_urn(UrnParams(1.0, steps=1000, seed=3))
    assert s.bins == [1] * 1001


def test_p_bar_zero_never_opens_bins():
    s = simulate_urn(UrnParams(0.0, steps=1000, seed=3))
    assert s.bins == [1001]


def _branch_frequencies(bins, params, n, seed):
    rng = RandomStream(seed)
    c = Counter()
    for _ in range(n):
        s = urn_step(UrnState(list(bins)), params, rng)
        if len(s.bins) > len(bins):
            c["new"] += 1
        else:
            c[next(j for j, (a, b) in enumerate(zip(s.bins, bins)) if a != b)] += 1
    return c


def test_increment_law_gamma_one():
    n = 60_000
    c = _branch_frequencies([3, 1], UrnParams(0.2), n, 1)
    expected = [0.2 * n, 0.8 * 0.75 * n, 0.8 * 0.25 * n]
    assert stats.chisquare([c["new"], c[0], c[1]], expected).pvalue > 1e-3


def test_increment_law_gamma_two():
    n = 50_000
    c = _branch_frequencies([3, 1], UrnParams(0.0, gamma=2.0), n, 2)
    assert c["new"] == 0
    assert stats.chisquare([c[0], c[1]], [0.9 * n, 0.1 * n]).pvalue > 1e-3


def test_two_step_law():
    params = UrnParams(0.25)
    rng = RandomStream(10)
    n = 64_000
    c = Counter()
    for _ in range(n):
        s = urn_init()
        urn_step(s, params, rng)
        urn_step(s, params, rng)
        c[tuple(s.sorted_bins())] += 1
    assert set(c) == {(1, 1, 1), (2, 1), (3,)}
    assert stats.chisquare([c[(1, 1, 1)], c[(2, 1)], c[(3,)]], [n / 16, 3 * n / 8, 9 * n / 16]).pvalue > 1e-3


@pytest.mark.parametrize("gamma", [1.0, 0.5, 1.5])
def test_ball_and_bin_counts(gamma):
    params = UrnParams(0.3, gamma=gamma)
    rng = RandomStream(4)
    s = urn_init()
    new_bins = 0
    for t in range(1, 3001):
        before = s.bin_count
        urn_step(s, params, rng)
        new_bins += s.bin_count - before
        assert s.total_balls == t + 1
        assert s.bin_count == 1 + new_bins
        assert sum(bin_fractions(s).fractions(exact=True).values()) == 1


def test_gamma_change_rebuilds_index():
    s = UrnState([4, 1])
    rng = RandomStream(0)
    urn_step(s, UrnParams(0.0, gamma=1.0), rng)
    c = _branch_frequencies(s.bins, UrnParams(0.0, gamma=0.0), 20_000, 3)
    assert stats.chisquare([c[0], c[1]], [10_000, 10_000]).pvalue > 1e-3


def test_simulation_reproducible():
    a = simulate_urn(UrnParams(0.25, steps=20_000, seed=7))
    b = simulate_urn(UrnParams(0.25, steps=20_000, seed=7))
    assert a.bins == b.bins


def test_map_initial_and_fig1(fig1_graph):
    assert map_graph_to_urn(new_graph(ModelParams(1, 1, 1))).bins == [1]
    state = map_graph_to_urn(fig1_graph)
    assert state == UrnState([5, 2, 4, 2]) and state.total_balls == 13


def test_map_tracks_components_every_step():
    params = ModelParams(1 / 3, 0.7, 0.9)
    g = new_graph(params)
    rng = RandomStream(17)
    for _ in range(10_000):
        step(g, params, rng)
        state = map_graph_to_urn(g)
        assert state.counts() == g.size_counts()
        assert state.total_balls == g.node_count


def test_bin_fractions():
    assert bin_fractions(urn_init()).fractions(exact=True) == {1: 1}
    h = bin_fractions(UrnState([5, 4, 2, 2]))
    assert h.fractions(exact=True) == {2: Fraction(1, 2), 4: Fraction(1, 4), 5: Fraction(1, 4)}
    with pytest.raises(ValueError):
        bin_fractions(UrnState([]))


def test_weighted_mean_identity():
    s = simulate_urn(UrnParams(0.3, steps=5000, seed=1))
    f = bin_fractions(s).fractions(exact=True)
    assert sum(k * v for k, v in f.items()) == Fraction(s.total_balls, s.bin_count)


def test_urn_tail_exponent():
    # limit law f_i ∝ i^-(1 + 1/(1 - p_bar)) = i^-(7/3) at p_bar = 1/4
    s = simulate_urn(UrnParams(0.25, steps=100_000, seed=7))
    assert fit_exponent(s.bins).alpha_hat == pytest.approx(7 / 3, abs=0.1)
