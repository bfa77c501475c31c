"""Retweet-graph growth model.

At every time step one of three arrivals happens:

* ``T1`` a new user posts a new message: a new node that roots a new
  message tree (and forms a new component);
* ``T2`` a new user retweets an existing user: a new node plus an edge
  ``(u, v_new)``;
* ``T3`` an existing user retweets another existing user: an edge ``(u, v)``
  between two existing nodes, possibly merging two components.

The retweeted user ``u`` is found by picking a message tree with probability
proportional to its size and then applying the superstar rule inside it. The
``T3`` retweeter is uniform over all nodes except ``u``.
"""

from __future__ import annotations

import enum
import gc
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .sampling import RandomStream


class ConfigurationError(ValueError):
    """Raised for out-of-range model or urn parameters."""


class InfeasibleArrivalError(RuntimeError):
    """Raised when a T3 arrival is requested on a single-node graph."""


class Arrival(enum.Enum):
    T1 = "T1"
    T2 = "T2"
    T3 = "T3"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ModelParams:
    """Parameters of one simulation run.

    ``lam`` is the new-topic intensity (``lambda`` is reserved in Python),
    ``p`` the probability that a retweet comes from a new user and ``q`` the
    superstar probability.
    """

    lam: float
    p: float
    q: float
    steps: int = 0
    seed: int = 0
    # cumulative thresholds of the arrival law, derived in __post_init__
    _t1_cut: float = field(init=False, repr=False, compare=False)
    _t2_cut: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.lam > 0:
            raise ConfigurationError(f"lambda must be > 0, got {self.lam!r}")
        if not 0 <= self.p <= 1:
            raise ConfigurationError(f"p must lie in [0, 1], got {self.p!r}")
        if not 0 <= self.q <= 1:
            raise ConfigurationError(f"q must lie in [0, 1], got {self.q!r}")
        if int(self.steps) != self.steps or self.steps < 0:
            raise ConfigurationError(f"steps must be a nonnegative integer, got {self.steps!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ConfigurationError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        # (lam + p) / (lam + 1) is exactly 1.0 when p == 1, so T3 cannot leak in
        object.__setattr__(self, "_t1_cut", self.lam / (self.lam + 1))
        object.__setattr__(self, "_t2_cut", (self.lam + self.p) / (self.lam + 1))

    @property
    def arrival_probabilities(self) -> tuple:
        """``(P(T1), P(T2), P(T3))``."""
        lam, p = self.lam, self.p
        return lam / (lam + 1), p / (lam + 1), (1 - p) / (lam + 1)


class ArrivalEvent(NamedTuple):
    time: int
    kind: Arrival
    new_node: Optional[int] = None
    source: Optional[int] = None
    target: Optional[int] = None
    tree: Optional[int] = None

    def to_record(self) -> dict:
        rec = {"t": self.time, "kind": self.kind.value}
        for name in ("new_node", "source", "target", "tree"):
            value = getattr(self, name)
            if value is not None:
                rec[name] = value
        return rec


class MessageTree:
    """A message tree: its root (the superstar) and everyone who retweeted it.

    ``member_degree`` counts how often each member has been retweeted inside
    this tree. ``_picks`` lists every non-root member ``degree + 1`` times so
    that a uniform index into it realises the preferential rule in O(1).
    """

    __slots__ = ("root", "member_degree", "_picks")

    def __init__(self, root: int):
        self.root = root
        self.member_degree = {root: 0}
        self._picks: list[int] = []

    @property
    def members(self):
        return self.member_degree.keys()

    @property
    def size(self) -> int:
        return len(self.member_degree)

    def __repr__(self) -> str:
        return f"MessageTree(root={self.root}, size={self.size})"



class RetweetGraph:
    """Evolving directed multigraph with component and message-tree bookkeeping.

    Nodes are the integers ``0 .. node_count - 1`` in order of arrival.
    Components are tracked with a union-find (union by size, path halving);
    ``_size_counts`` keeps the multiset of component sizes up to date so that
    histogram queries do not need a scan over all nodes.

    ``tree_slots`` is the tree weight index: tree ``i`` appears once per
    member, so a uniform slot is a size-proportional tree. Tree sizes only
    ever grow by one, which keeps both update and draw O(1).
    """

    def __init__(self):
        self.node_count = 1
        self.edges: list[tuple[int, int]] = []
        self.trees: list[MessageTree] = [MessageTree(0)]
        self.tree_slots: list[int] = [0]
        self.time = 0
        self.component_count = 1
        self._parent = [0]
        self._csize = [1]
        self._size_counts = {1: 1}

    def __repr__(self) -> str:
        return (f"RetweetGraph(t={self.time}, nodes={self.node_count}, "
                f"edges={len(self.edges)}, components={self.component_count}, "
                f"trees={len(self.trees)})")

    def find(self, x: int) -> int:
        parent = self._parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def component_size_of(self, x: int) -> int:
        return self._csize[self.find(x)]

    def size_counts(self) -> Counter:
        """Component-size multiset as ``{size: number of components}``."""
        return Counter(self._size_counts)

    def tree_sizes(self) -> list[int]:
        return [t.size for t in self.trees]

    def _union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        csize = self._csize
        sa, sb = csize[ra], csize[rb]
        if sa < sb:
            ra, rb = rb, ra
        self._parent[rb] = ra
        csize[ra] = sa + sb
        counts = self._size_counts
        for k in (sa, sb):
            c = counts[k]
            if c == 1:
                del counts[k]
            else:
                counts[k] = c - 1
        counts[sa + sb] = counts.get(sa + sb, 0) + 1
        self.component_count -= 1
        return True


def new_graph(params: ModelParams) -> RetweetGraph:
    """The initial graph: a single node that roots the first message tree."""
    if not isinstance(params, ModelParams):
        raise ConfigurationError("params must be a ModelParams instance")
    return RetweetGraph()


def sample_arrival_type(params: ModelParams, rng: RandomStream) -> Arrival:
    u = rng.random()
    if u < params._t1_cut:
        return Arrival.T1
    if u < params._t2_cut:
        return Arrival.T2
    return Arrival.T3


def select_message_tree(graph: RetweetGraph, rng: RandomStream) -> int:
    """Tree index drawn with probability proportional to tree size."""
    slots = graph.tree_slots
    return slots[int(rng.random() * len(slots))]


def select_source_in_tree(tree: MessageTree, q: float, rng: RandomStream) -> int:
    """Superstar rule: the root w.p. ``q``, else a non-root member by degree + 1."""
    picks = tree._picks
    if not picks or rng.random() < q:
        return tree.root
    return picks[int(rng.random() * len(picks))]


def select_t3_target(graph: RetweetGraph, source: int, rng: RandomStream) -> int:
    """Uniform node other than ``source``."""
    n = graph.node_count
    if n < 2:
        raise InfeasibleArrivalError("a T3 arrival needs at least two nodes")
    v = int(rng.random() * (n - 1))
    return v if v < source else v + 1


def step(graph: RetweetGraph, params: ModelParams, rng: RandomStream) -> ArrivalEvent:
    """Draw one arrival, apply it to ``graph`` in place and return it."""
    kind = sample_arrival_type(params, rng)
    if kind is _T3 and graph.node_count < 2:
        # no valid T3 target yet: redraw among the feasible arrival types
        lam = params.lam
        kind = _T1 if rng.random() * (lam + params.p) < lam else _T2
    t = graph.time + 1
    if kind is _T1:
        event = ArrivalEvent(t, kind, graph.node_count)
    else:
        i = select_message_tree(graph, rng)
        u = select_source_in_tree(graph.trees[i], params.q, rng)
        if kind is _T2:
            event = ArrivalEvent(t, kind, graph.node_count, u, graph.node_count, i)
        else:
            event = ArrivalEvent(t, kind, None, u, select_t3_target(graph, u, rng), i)
    apply_event(graph, event)
    return event


def apply_event(graph: RetweetGraph, event: ArrivalEvent) -> None:
    """Apply a given arrival to ``graph``; replays an event log exactly.

    Raises ``ValueError`` if the event is inconsistent with the graph.
    """
    kind = event.kind
    if event.time != graph.time + 1:
        raise ValueError(f"event time {event.time} does not follow graph time {graph.time}")
    counts = graph._size_counts

    if kind is _T1:
        v = graph.node_count
        if event.new_node != v:
            raise ValueError(f"T1 must create node {v}, got {event.new_node}")
        graph.node_count = v + 1
        graph._parent.append(v)
        graph._csize.append(1)
        graph.tree_slots.append(len(graph.trees))
        graph.trees.append(MessageTree(v))
        graph.component_count += 1
        counts[1] = counts.get(1, 0) + 1
        graph.time = event.time
        return

    i, u, v = event.tree, event.source, event.target
    if i is None or not 0 <= i < len(graph.trees):
        raise ValueError(f"unknown tree {i!r}")
    tree = graph.trees[i]
    if u not in tree.member_degree:
        raise ValueError(f"source {u!r} is not a member of tree {i}")

    if kind is _T2:
        if v != graph.node_count or event.new_node != v:
            raise ValueError(f"T2 must create node {graph.node_count}")
        graph.node_count = v + 1
        root = graph.find(u)
        graph._parent.append(root)
        csize = graph._csize
        csize.append(1)
        k = csize[root]
        csize[root] = k + 1
        c = counts[k]
        if c == 1:
            del counts[k]
        else:
            counts[k] = c - 1
        counts[k + 1] = counts.get(k + 1, 0) + 1
    elif kind is _T3:
        if v is None or not 0 <= v < graph.node_count or v == u:
            raise ValueError(f"invalid T3 target {v!r}")
        graph._union(u, v)
    else:
        raise ValueError(f"unknown arrival kind {kind!r}")

    tree.member_degree[u] += 1
    if u != tree.root:
        tree._picks.append(u)
    graph.edges.append((u, v))
    if v not in tree.member_degree:
        tree.member_degree[v] = 0
        tree._picks.append(v)
        graph.tree_slots.append(i)
    graph.time = event.time


_T1, _T2, _T3 = Arrival.T1, Arrival.T2, Arrival.T3


def run(params: ModelParams, record_events: bool = True):
    """Run ``params.steps`` arrivals from the single-node graph.

    Returns ``(graph, events)``; ``events`` is ``None`` when
    ``record_events`` is false.
    """
    graph = new_graph(params)
    rng = RandomStream(params.seed)
    events = [] if record_events else None
    # the run allocates millions of acyclic containers; generational GC
    # passes over them are pure overhead
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        advance(graph, params, rng, params.steps, events)
    finally:
        if gc_was_enabled:
            gc.enable()
    return graph, events


def advance(graph: RetweetGraph, params: ModelParams, rng: RandomStream,
            n: int, events: Optional[list] = None) -> None:
    """Apply ``n`` steps in place.

    Same transitions and the same consumption of ``rng`` as calling
    :func:`step` ``n`` times, with the per-step calls inlined.
    """
    rand = rng.random
    t1_cut, t2_cut = params._t1_cut, params._t2_cut
    lam, p, q = params.lam, params.p, params.q
    parent, csize, counts = graph._parent, graph._csize, graph._size_counts
    trees, slots, edges = graph.trees, graph.tree_slots, graph.edges
    log = events.append if events is not None else None
    nodes = graph.node_count
    t = graph.time
    comps = graph.component_count

    for _ in range(n):
        t += 1
        x = rand()
        if x < t1_cut:
            kind = _T1
        elif x < t2_cut:
            kind = _T2
        elif nodes < 2:
            kind = _T1 if rand() * (lam + p) < lam else _T2
        else:
            kind = _T3

        if kind is _T1:
            v = nodes
            nodes += 1
            parent.append(v)
            csize.append(1)
            slots.append(len(trees))
            trees.append(MessageTree(v))
            comps += 1
            counts[1] = counts.get(1, 0) + 1
            if log:
                log(ArrivalEvent(t, kind, v))
            continue

        i = slots[int(rand() * len(slots))]
        tree = trees[i]
        picks = tree._picks
        if not picks or rand() < q:
            u = tree.root
        else:
            u = picks[int(rand() * len(picks))]
            picks.append(u)
        degree = tree.member_degree
        degree[u] += 1

        # root of u with path halving
        r = u
        while parent[r] != r:
            parent[r] = parent[parent[r]]
            r = parent[r]

        if kind is _T2:
            v = nodes
            nodes += 1
            parent.append(r)
            csize.append(1)
            k = csize[r]
            csize[r] = k + 1
            c = counts[k]
            if c == 1:
                del counts[k]
            else:
                counts[k] = c - 1
            counts[k + 1] = counts.get(k + 1, 0) + 1
            edges.append((u, v))
            degree[v] = 0
            picks.append(v)
            slots.append(i)
            if log:
                log(ArrivalEvent(t, kind, v, u, v, i))
            continue

        v = int(rand() * (nodes - 1))
        if v >= u:
            v += 1
        edges.append((u, v))
        rv = v
        while parent[rv] != rv:
            parent[rv] = parent[parent[rv]]
            rv = parent[rv]
        if rv != r:
            sa, sb = csize[r], csize[rv]
            if sa < sb:
                r, rv = rv, r
            parent[rv] = r
            csize[r] = sa + sb
            for k in (sa, sb):
                c = counts[k]
                if c == 1:
                    del counts[k]
                else:
                    counts[k] = c - 1
            counts[sa + sb] = counts.get(sa + sb, 0) + 1
            comps -= 1
        if v not in degree:
            degree[v] = 0
            picks.append(v)
            slots.append(i)
        if log:
            log(ArrivalEvent(t, kind, None, u, v, i))

    graph.node_count = nodes
    graph.time = t
    graph.component_count = comps


def replay(events) -> RetweetGraph:
    """Rebuild the graph produced by an event log."""
    graph = RetweetGraph()
    for event in events:
        apply_event(graph, event)
    return graph


def component_sizes(graph: RetweetGraph) -> list[int]:
    """Component sizes, largest first, read from the union-find roots."""
    parent, csize = graph._parent, graph._csize
    return sorted((csize[r] for r in range(graph.node_count) if parent[r] == r), reverse=True)


def lcc_fraction(graph: RetweetGraph) -> float:
    return max(graph._size_counts) / graph.node_count


def traversal_component_sizes(graph: RetweetGraph) -> list[int]:
    """Component sizes by breadth-first search over the edge list.

    Independent of the union-find; used to cross-check it.
    """
    n = graph.node_count
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in graph.edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = bytearray(n)
    sizes = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = 1
        queue = deque([s])
        size = 0
        while queue:
            x = queue.popleft()
            size += 1
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = 1
                    queue.append(y)
        sizes.append(size)
    return sorted(sizes, reverse=True)
