"""Random streams and weighted sampling primitives used by the simulators."""

from __future__ import annotations

import numpy as np

_BUFFER = 8192


def replication_seed(master_seed: int, replication: int) -> int:
    """Derive the 64-bit seed of replication ``replication`` from a master seed.

    The derivation is a fixed hash (numpy's SeedSequence mixing), so it is
    stable across platforms and independent of how many replications run.
    """
    ss = np.random.SeedSequence([int(master_seed), int(replication)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


class RandomStream:
    """Buffered uniform draws from a seeded PCG64 generator.

    Scalar draws from a numpy Generator are slow, so uniforms are pulled in
    blocks and handed out one at a time. The sequence of values depends only
    on the seed.
    """

    __slots__ = ("seed", "_gen", "_buf", "_pos")

    def __init__(self, seed: int = 0):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))
        self._buf: list[float] = []
        self._pos = 0

    def random(self) -> float:
        pos = self._pos
        if pos == len(self._buf):
            self._buf = self._gen.random(_BUFFER).tolist()
            pos = 0
        self._pos = pos + 1
        return self._buf[pos]

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)``."""
        return int(self.random() * n)


class FenwickTree:
    """Binary indexed tree over nonnegative weights with weighted sampling.

    Supports appending new slots, adding to a slot and locating the slot that
    owns a given point of the cumulative weight, all in O(log n). Slots are
    0-based for callers.
    """

    __slots__ = ("_tree", "_values", "_total", "_mask")

    def __init__(self, weights=()):
        self._tree = [0]
        self._values = []
        self._total = 0
        self._mask = 0
        for w in weights:
            self.append(w)

    def __len__(self) -> int:
        return len(self._values)

    @property
    def total(self):
        return self._total

    def weight(self, i: int):
        return self._values[i]

    def append(self, w) -> int:
        """Add a new slot with weight ``w`` and return its index."""
        tree = self._tree
        n = len(tree)  # 1-based position of the new slot
        s = w
        # node n covers (n - lowbit(n), n]; fold in the already stored part
        j = n - 1
        stop = n - (n & -n)
        while j > stop:
            s += tree[j]
            j -= j & -j
        tree.append(s)
        self._values.append(w)
        self._total += w
        if n > self._mask:
            self._mask = 1 << (n.bit_length() - 1)
        return n - 1

    def add(self, i: int, delta) -> None:
        tree = self._tree
        n = len(tree)
        self._values[i] += delta
        self._total += delta
        i += 1
        while i < n:
            tree[i] += delta
            i += i & -i

    def prefix(self, i: int):
        """Sum of the weights of slots ``0 .. i-1``."""
        tree = self._tree
        s = 0
        while i > 0:
            s += tree[i]
            i -= i & -i
        return s

    def find(self, u) -> int:
        """Index of the slot whose cumulative interval contains ``u``.

        ``u`` must lie in ``[0, total)``; slot ``k`` owns
        ``[prefix(k), prefix(k + 1))``.
        """
        tree = self._tree
        n = len(tree)
        pos = 0
        step = self._mask
        while step:
            nxt = pos + step
            if nxt < n and tree[nxt] <= u:
                pos = nxt
                u -= tree[nxt]
            step >>= 1
        return pos

    def sample(self, rng: RandomStream) -> int:
        """Draw a slot with probability proportional to its weight."""
        total = self._total
        if isinstance(total, int):
            return self.find(int(rng.random() * total))
        idx = self.find(rng.random() * total)
        # float round-off can push the draw past the last positive slot
        while idx >= len(self._values) or self._values[idx] <= 0:
            idx -= 1
        return idx
