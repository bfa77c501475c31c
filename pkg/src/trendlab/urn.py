"""Generalised Polya urn and the graph-to-urn mapping.

The urn starts with one bin holding one ball. Each new ball opens a new bin
with probability ``p_bar``; otherwise it joins an existing bin of size ``m``
with probability proportional to ``m ** gamma``.
"""

from __future__ import annotations

import gc
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .histogram import SizeHistogram
from .model import ConfigurationError, RetweetGraph, component_sizes
from .sampling import FenwickTree, RandomStream


@dataclass(frozen=True)
class UrnParams:
    p_bar: float
    gamma: float = 1.0
    steps: int = 0
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.p_bar <= 1:
            raise ConfigurationError(f"p_bar must lie in [0, 1], got {self.p_bar!r}")
        if not math.isfinite(self.gamma):
            raise ConfigurationError(f"gamma must be finite, got {self.gamma!r}")
        if int(self.steps) != self.steps or self.steps < 0:
            raise ConfigurationError(f"steps must be a nonnegative integer, got {self.steps!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ConfigurationError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")


@dataclass(eq=False)
class UrnState:
    """Bin sizes of the urn.

    Only the multiset of sizes is meaningful; two states compare equal when
    their sorted sizes agree. The sampling index is attached lazily by
    :func:`urn_step` and rebuilt if ``gamma`` changes.
    """

    bins: list[int]
    _index: Optional[FenwickTree] = field(default=None, repr=False)
    _gamma: Optional[float] = field(default=None, repr=False)

    @property
    def total_balls(self) -> int:
        return sum(self.bins)

    @property
    def bin_count(self) -> int:
        return len(self.bins)

    def sorted_bins(self) -> list[int]:
        return sorted(self.bins, reverse=True)

    def counts(self) -> Counter:
        return Counter(self.bins)

    def __eq__(self, other):
        if not isinstance(other, UrnState):
            return NotImplemented
        return self.sorted_bins() == other.sorted_bins()


def urn_init() -> UrnState:
    return UrnState([1])


def _weight(m: int, gamma):
    if gamma == 1:
        return m
    return float(m) ** gamma


def urn_step(state: UrnState, params: UrnParams, rng: RandomStream) -> UrnState:
    """Add one ball to ``state`` (in place) and return it."""
    gamma = params.gamma
    if state._index is None or state._gamma != gamma:
        state._index = FenwickTree(_weight(m, gamma) for m in state.bins)
        state._gamma = gamma
    if rng.random() < params.p_bar:
        state.bins.append(1)
        state._index.append(_weight(1, gamma))
        return state
    j = state._index.sample(rng)
    m = state.bins[j]
    state.bins[j] = m + 1
    state._index.add(j, _weight(m + 1, gamma) - _weight(m, gamma))
    return state


def simulate_urn(params: UrnParams) -> UrnState:
    """Run ``params.steps`` balls from :func:`urn_init`."""
    state = urn_init()
    rng = RandomStream(params.seed)
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(params.steps):
            urn_step(state, params, rng)
    finally:
        if gc_was_enabled:
            gc.enable()
    return state


def map_graph_to_urn(graph: RetweetGraph) -> UrnState:
    """One bin per connected component, holding one ball per node."""
    return UrnState(component_sizes(graph))


def bin_fractions(state: UrnState) -> SizeHistogram:
    if not state.bins:
        raise ValueError("urn state has no bins")
    return SizeHistogram.from_sizes(state.bins)
