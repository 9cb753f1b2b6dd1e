"""Modified onion layers, backtrack trees and the reduced candidate set H."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .cores import CoreInfo, KCoreView, core_numbers, k_core
from .graph import Edge, Graph, normalize_edge


class EmptyLayeringError(ValueError):
    pass


class TargetError(ValueError):
    """Targets are empty, out of the k-core, or do not share a core number."""


@dataclass(frozen=True)
class OnionLayers:
    """Layer index (from 1) of every k-node.

    ``layer`` preserves assignment order. ``residual`` is the node set left
    in the working graph at termination, which is the (k+1)-core.
    """

    k: int
    layer: Mapping[int, int]
    residual: frozenset[int] = field(repr=False)

    @property
    def depth(self) -> int:
        return max(self.layer.values(), default=0)

    def __getitem__(self, u: int) -> int:
        return self.layer[u]


def layers_from_view(view: KCoreView) -> OnionLayers:
    if view.is_empty():
        raise EmptyLayeringError(f"the {view.k}-core is empty")
    k = view.k
    deg = {u: len(nb) for u, nb in view.adj.items()}
    alive = set(view.nodes)
    pending = set(view.k_nodes)
    lower = {u for u, d in deg.items() if d < k}
    equal = {u for u, d in deg.items() if d == k}
    layer: dict[int, int] = {}
    level = 0
    while pending:
        level += 1
        batch = lower if lower else equal
        if not batch:
            raise AssertionError(f"{len(pending)} k-nodes left but no node of degree <= {k}")
        if not batch <= pending:
            raise AssertionError(f"nodes above core {k} reached layer {level}")
        for u in sorted(batch):
            layer[u] = level
        alive -= batch
        pending -= batch
        if batch is lower:
            lower = set()
        else:
            equal = set()
        for u in batch:
            for w in view.adj[u]:
                if w not in alive:
                    continue
                d = deg[w] - 1
                deg[w] = d
                if d == k:
                    equal.add(w)
                elif d == k - 1:
                    equal.discard(w)
                    lower.add(w)
        lower &= alive
        equal &= alive
    return OnionLayers(k, layer, frozenset(alive))


def mod_layers(g: Graph, k: int, info: CoreInfo | None = None) -> OnionLayers:
    return layers_from_view(k_core(g, k, info))


@dataclass(frozen=True)
class BacktrackTree:
    """Directed graph from targets towards strictly lower-layer k-neighbors."""

    k: int
    roots: frozenset[int]
    nodes: frozenset[int]
    edges: frozenset[Edge]  # directed (u, v): u -> v
    out: Mapping[int, tuple[int, ...]] = field(repr=False, compare=False)
    indegree: Mapping[int, int] = field(repr=False, compare=False)
    order: tuple[int, ...] = field(repr=False, compare=False, default=())


def tree_from_view(view: KCoreView, layers: OnionLayers,
                   targets: Iterable[int]) -> BacktrackTree:
    roots = sorted(set(targets))
    kn = view.k_nodes
    for t in roots:
        if t not in kn:
            raise TargetError(f"target {t} is not a {view.k}-node")
    layer = layers.layer
    visited = set(roots)
    queue = deque(roots)
    out: dict[int, tuple[int, ...]] = {}
    indeg = {t: 0 for t in roots}
    edges: set[Edge] = set()
    order = []
    while queue:
        u = queue.popleft()
        order.append(u)
        lu = layer[u]
        expand = sorted(v for v in view.adj[u] if v in kn and layer[v] < lu)
        out[u] = tuple(expand)
        for v in expand:
            assert (u, v) not in edges, "node expanded twice"
            edges.add((u, v))
            indeg[v] = indeg.get(v, 0) + 1
            if v not in visited:
                visited.add(v)
                queue.append(v)
    return BacktrackTree(view.k, frozenset(roots), frozenset(visited), frozenset(edges),
                         out, indeg, tuple(order))


def backtrack_tree(g: Graph, targets: Iterable[int], info: CoreInfo | None = None) -> BacktrackTree:
    """Breadth-first backtrack tree rooted at ``targets`` (all k-nodes for one k)."""
    info = info or core_numbers(g)
    k = target_core(g, targets, info)
    view = k_core(g, k, info)
    return tree_from_view(view, layers_from_view(view), targets)


def target_core(g: Graph, targets: Iterable[int], info: CoreInfo) -> int:
    """Shared core number of ``targets``; raises :class:`TargetError` otherwise."""
    targets = list(targets)
    if not targets:
        raise TargetError("target set is empty")
    for t in targets:
        if not 0 <= t < g.n:
            raise TargetError(f"target {t} out of range")
    ks = {info.core[t] for t in targets}
    if len(ks) != 1:
        raise TargetError(f"targets have mixed core numbers {sorted(ks)}")
    k = ks.pop()
    if k == 0:
        raise TargetError("targets with core number 0 cannot collapse")
    return k


@dataclass(frozen=True)
class CandidateH:
    edges: frozenset[Edge]

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(sorted(self.edges))

    def __contains__(self, e: object) -> bool:
        return e in self.edges


def candidate_h(bt: BacktrackTree, targets: Iterable[int], kcore: KCoreView) -> CandidateH:
    """Undirected tree edges plus every k-core edge incident to a target.

    Target edges into the tree are kept too: without them, targets that are
    adjacent to each other but share a layer (e.g. all nodes of a clique)
    would leave no candidate at all.
    """
    hs = {normalize_edge(u, v) for u, v in bt.edges}
    for t in targets:
        for v in kcore.adj[t]:
            hs.add(normalize_edge(t, v))
    return CandidateH(frozenset(hs))
