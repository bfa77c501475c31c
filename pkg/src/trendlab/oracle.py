"""Exact enumeration of the retweet-graph and urn processes at small horizons.

Every sample path is followed with exact rational probabilities and paths
that reach the same state are merged. The graph process needs more state
than the component sizes: a tree's size drives its selection probability and
the component it lives in decides what a T3 edge merges. A graph state is
therefore the multiset of components, each given as ``(size, tree sizes)``.
Which member of a tree is the source never changes this state (given the
source, the target's component and tree membership only depend on sizes),
so the superstar rule is marginalised out.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

from .model import ModelParams

ENUMERATION_LIMIT = 6


class OracleLimitError(ValueError):
    """Raised when the requested horizon is beyond the enumeration limit."""


@dataclass(frozen=True)
class ExactDistribution:
    """Exact law of the size multiset (sorted descending) at time ``horizon``."""

    support: dict
    horizon: int

    def total(self) -> Fraction:
        return sum(self.support.values(), Fraction(0))

    def __getitem__(self, key) -> Fraction:
        return self.support.get(tuple(sorted(key, reverse=True)), Fraction(0))


def _check_horizon(t: int, limit: int) -> None:
    if t < 0:
        raise ValueError("horizon must be nonnegative")
    if t > limit:
        raise OracleLimitError(f"horizon {t} exceeds the enumeration limit {limit}")


def _exact(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _canon(components) -> tuple:
    return tuple(sorted(((size, tuple(sorted(trees, reverse=True))) for size, trees in components), reverse=True))


def _rg_transitions(state, lam: Fraction, p: Fraction):
    """Yield ``(probability, next_state)`` for one arrival."""
    nodes = sum(size for size, _ in state)
    if nodes < 2:
        # T3 impossible: renormalise over T1 and T2
        a1, a2, a3 = lam / (lam + p), p / (lam + p), Fraction(0)
    else:
        a1, a2, a3 = lam / (lam + 1), p / (lam + 1), (1 - p) / (lam + 1)

    if a1:
        yield a1, _canon(state + ((1, (1,)),))

    weight = sum(sum(trees) for _, trees in state)
    for ci, (csize, trees) in enumerate(state):
        others = state[:ci] + state[ci + 1:]
        for ti, h in enumerate(trees):
            pick = Fraction(h, weight)
            grown = trees[:ti] + (h + 1,) + trees[ti + 1:]
            if a2:
                yield a2 * pick, _canon(others + ((csize + 1, grown),))
            if not a3:
                continue
            base = a3 * pick / (nodes - 1)
            # target already in the tree: only a parallel edge appears
            if h > 1:
                yield base * (h - 1), state
            # target in the same component but outside the tree
            if csize > h:
                yield base * (csize - h), _canon(others + ((csize, grown),))
            # target in another component: the two components merge
            for oi, (osize, otrees) in enumerate(others):
                rest = others[:oi] + others[oi + 1:]
                yield base * osize, _canon(rest + ((csize + osize, grown + otrees),))


def enumerate_rg(params: ModelParams, t: int, limit: int = ENUMERATION_LIMIT) -> ExactDistribution:
    """Exact distribution of the component-size multiset after ``t`` steps.

    ``params.steps`` and ``params.seed`` are ignored; so is ``params.q``,
    which cannot affect component sizes.
    """
    _check_horizon(t, limit)
    lam, p = _exact(params.lam), _exact(params.p)
    dist = {((1, (1,)),): Fraction(1)}
    for _ in range(t):
        nxt: dict = defaultdict(Fraction)
        for state, prob in dist.items():
            for w, new in _rg_transitions(state, lam, p):
                nxt[new] += prob * w
        dist = nxt
    sizes: dict = defaultdict(Fraction)
    for state, prob in dist.items():
        sizes[tuple(size for size, _ in state)] += prob
    return ExactDistribution(dict(sizes), t)


def enumerate_urn(p_bar, t: int, limit: int = ENUMERATION_LIMIT) -> ExactDistribution:
    """Exact distribution of the bin-size multiset after ``t`` balls (gamma = 1)."""
    _check_horizon(t, limit)
    p_bar = _exact(p_bar)
    dist = {(1,): Fraction(1)}
    for _ in range(t):
        nxt: dict = defaultdict(Fraction)
        for bins, prob in dist.items():
            if p_bar:
                nxt[tuple(sorted(bins + (1,), reverse=True))] += prob * p_bar
            if p_bar != 1:
                total = sum(bins)
                for j, m in enumerate(bins):
                    grown = tuple(sorted(bins[:j] + (m + 1,) + bins[j + 1:], reverse=True))
                    nxt[grown] += prob * (1 - p_bar) * Fraction(m, total)
        dist = nxt
    return ExactDistribution(dict(dist), t)


def check_equivalence(lam, t: int, limit: int = ENUMERATION_LIMIT) -> Fraction:
    """Total-variation distance between the ``p = 1`` graph law and the urn
    with ``p_bar = lam / (lam + 1)`` after ``t`` steps."""
    from .analysis import distribution_distance

    lam = _exact(lam)
    rg = enumerate_rg(ModelParams(lam=lam, p=1, q=0), t, limit)
    urn = enumerate_urn(lam / (lam + 1), t, limit)
    return distribution_distance(rg, urn)
