"""Core decomposition, k-core views and follower cascades."""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .graph import Edge, Graph, MissingEdgeError, normalize_edge, remove_edges


@dataclass(frozen=True)
class CoreInfo:
    core: tuple[int, ...]
    k_max: int

    def __getitem__(self, u: int) -> int:
        return self.core[u]

    def nodes_at_least(self, k: int) -> frozenset[int]:
        return frozenset(u for u, c in enumerate(self.core) if c >= k)

    def k_nodes(self, k: int) -> frozenset[int]:
        return frozenset(u for u, c in enumerate(self.core) if c == k)


def core_numbers(g: Graph) -> CoreInfo:
    """Exact core numbers by bucket peeling.

    Each bucket is a min-heap of node ids, so among nodes of equal current
    degree the lowest id is peeled first. Stale heap entries are skipped.
    """
    n = g.n
    if n == 0:
        return CoreInfo((), 0)
    deg = [len(a) for a in g.adj]
    buckets: list[list[int]] = [[] for _ in range(max(deg) + 1)]
    for u in range(n):
        buckets[deg[u]].append(u)  # ascending ids: already a valid heap
    done = [False] * n
    core = [0] * n
    d = 0
    for _ in range(n):
        while True:
            while not buckets[d]:
                d += 1
            u = heapq.heappop(buckets[d])
            if not done[u] and deg[u] == d:
                break
        done[u] = True
        core[u] = d
        for v in g.adj[u]:
            if not done[v] and deg[v] > d:
                deg[v] -= 1
                heapq.heappush(buckets[deg[v]], v)
    return CoreInfo(tuple(core), max(core))


@dataclass(frozen=True)
class KCoreView:
    """The k-core of a graph, expressed over the parent graph's ids.

    ``adj`` maps each core node to its neighbors inside the core and
    ``inner`` is the (k+1)-core, so ``nodes - inner`` are the k-nodes.
    """

    k: int
    nodes: frozenset[int]
    edges: frozenset[Edge]
    adj: Mapping[int, frozenset[int]] = field(repr=False, compare=False)
    inner: frozenset[int] = field(repr=False, compare=False)

    @property
    def k_nodes(self) -> frozenset[int]:
        return self.nodes - self.inner

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def is_empty(self) -> bool:
        return not self.nodes


def _view(k: int, nodes: Iterable[int], full_adj, inner: frozenset[int]) -> KCoreView:
    nodes = frozenset(nodes)
    adj = {u: frozenset(v for v in full_adj[u] if v in nodes) for u in nodes}
    edges = frozenset((u, v) for u in nodes for v in adj[u] if u < v)
    return KCoreView(k, nodes, edges, adj, inner & nodes)


def k_core(g: Graph, k: int, info: CoreInfo | None = None) -> KCoreView:
    if k < 0:
        raise ValueError("k must be non-negative")
    info = info or core_numbers(g)
    return _view(k, info.nodes_at_least(k), g.adj, info.nodes_at_least(k + 1))


def peel(view: KCoreView, removed: Iterable[Edge] = ()) -> set[int]:
    """Nodes of ``view`` that leave the k-core once ``removed`` is deleted.

    Removed edges that are not k-core edges contribute nothing.
    """
    k = view.k
    adj = view.adj
    deg: dict[int, int] = {}
    cut: set[Edge] = set()
    for u, v in removed:
        if u in adj and v in adj[u]:
            e = (u, v) if u < v else (v, u)
            if e in cut:
                continue
            cut.add(e)
            deg[u] = deg.get(u, len(adj[u])) - 1
            deg[v] = deg.get(v, len(adj[v])) - 1
    queue = deque(u for u, d in deg.items() if d < k)
    gone = set(queue)
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w in gone or (cut and ((u, w) if u < w else (w, u)) in cut):
                continue
            d = deg.get(w, len(adj[w])) - 1
            deg[w] = d
            if d < k:
                gone.add(w)
                queue.append(w)
    return gone


def residual_view(view: KCoreView, removed: Iterable[Edge]) -> KCoreView:
    """k-core of the graph after deleting ``removed``, derived from ``view``.

    Valid whenever every removed edge has an endpoint outside the (k+1)-core,
    since then the (k+1)-core is untouched.
    """
    removed = [normalize_edge(*e) for e in removed]
    gone = peel(view, removed)
    cut = {e for e in removed if e in view.edges}
    nodes = view.nodes - gone
    adj = {}
    for u in nodes:
        nb = view.adj[u]
        adj[u] = frozenset(v for v in nb if v not in gone and normalize_edge(u, v) not in cut)
    edges = frozenset((u, v) for u in nodes for v in adj[u] if u < v)
    return KCoreView(view.k, frozenset(nodes), edges, adj, view.inner)


@dataclass(frozen=True)
class FollowerSet:
    k: int
    members: frozenset[int]

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, u: object) -> bool:
        return u in self.members

    def __iter__(self):
        return iter(sorted(self.members))


def _check_removed(g: Graph, removed: Iterable[Edge]) -> list[Edge]:
    out = []
    for u, v in removed:
        if not g.has_edge(u, v):
            raise MissingEdgeError((u, v))
        out.append(normalize_edge(u, v))
    return out


def followers(g: Graph, removed: Iterable[Edge], k: int,
              info: CoreInfo | None = None) -> FollowerSet:
    """``V_k(g) \\ V_k(g - removed)`` by cascading deletions inside the k-core."""
    removed = _check_removed(g, removed)
    view = k_core(g, k, info)
    return FollowerSet(k, frozenset(peel(view, removed)))


def followers_recompute(g: Graph, removed: Iterable[Edge], k: int) -> FollowerSet:
    """Same as :func:`followers` but via two full core decompositions."""
    removed = _check_removed(g, removed)
    before = core_numbers(g).nodes_at_least(k)
    after = core_numbers(remove_edges(g, removed)).nodes_at_least(k)
    return FollowerSet(k, before - after)


def candidate_p(g: Graph, k: int, info: CoreInfo | None = None) -> frozenset[Edge]:
    """Edges whose lower-core endpoint has core number exactly ``k``."""
    info = info or core_numbers(g)
    core = info.core
    return frozenset(e for e in g.edges() if min(core[e[0]], core[e[1]]) == k)


def view_candidate_p(view: KCoreView) -> frozenset[Edge]:
    """P restricted to a k-core view: core edges touching a k-node."""
    inner = view.inner
    return frozenset(e for e in view.edges if e[0] not in inner or e[1] not in inner)
