"""Targeted k-node collapse attacks.

Every attack works on the k-core of the input graph. All edges any attack
removes have an endpoint of core number k, so the (k+1)-core never changes
and the adversarial k-core can be maintained by cascading deletions alone.
"""
from __future__ import annotations

import itertools
import os
import random
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .cores import (CoreInfo, FollowerSet, KCoreView, core_numbers, k_core, peel,
                    residual_view, view_candidate_p)
from .graph import Edge, Graph, normalize_edge
from .onion import (BacktrackTree, CandidateH, TargetError, candidate_h, layers_from_view,
                    target_core, tree_from_view)

METHODS = ("mona", "optimal", "random", "degree", "greedy")


class AttackError(ValueError):
    pass


@dataclass(frozen=True)
class PrunedFollowers:
    edge: Edge
    members: frozenset[int]

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class IterationRecord:
    edge: Edge
    score: Optional[float]  # |F_p| for mona, |F| for greedy, degree sum for degree
    candidates: int  # |H| for mona, |P| otherwise
    cum_followers: int  # followers of all removals so far, w.r.t. the input graph


@dataclass(frozen=True)
class AttackResult:
    method: str
    k: int
    targets: frozenset[int]
    removed: tuple[Edge, ...]
    followers: FollowerSet
    iterations: tuple[IterationRecord, ...]
    success: bool
    wall_time: float = field(default=0.0, compare=False)
    seed: Optional[int] = None
    bound: Optional[int] = None  # max_size for optimal, budget otherwise

    @property
    def size(self) -> int:
        return len(self.removed)


def scoring_workers() -> int:
    """Worker count for candidate scoring from ``KCOLLAPSE_THREADS`` (0 = auto)."""
    raw = os.environ.get("KCOLLAPSE_THREADS", "1").strip() or "1"
    n = int(raw)
    if n < 0:
        raise ValueError("KCOLLAPSE_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def _score_all(fn: Callable[[Edge], float], edges: Sequence[Edge],
               workers: Optional[int]) -> list[float]:
    workers = scoring_workers() if workers is None else workers
    if workers <= 1 or len(edges) < 64:
        return [fn(e) for e in edges]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, edges, chunksize=max(1, len(edges) // (4 * workers))))


def _argmax(edges: Sequence[Edge], scores: Sequence[float]) -> tuple[Edge, float]:
    # edges are sorted, so the first maximum is the lexicographically smallest
    best = 0
    for i in range(1, len(edges)):
        if scores[i] > scores[best]:
            best = i
    return edges[best], scores[best]


def _argmin(edges: Sequence[Edge], scores: Sequence[float]) -> tuple[Edge, float]:
    best = 0
    for i in range(1, len(edges)):
        if scores[i] < scores[best]:
            best = i
    return edges[best], scores[best]


def _prune(view: KCoreView, bt: BacktrackTree, e: Edge, targets: frozenset[int]) -> set[int]:
    members = peel(view, [e]) & bt.nodes
    u, v = e
    if (u, v) in bt.edges:
        child = v
    elif (v, u) in bt.edges:
        child = u
    else:
        return members
    indeg = dict(bt.indegree)
    indeg[child] -= 1
    queue = deque([child] if indeg[child] == 0 and child not in targets else [])
    while queue:
        x = queue.popleft()
        members.add(x)
        for y in bt.out.get(x, ()):
            indeg[y] -= 1
            if indeg[y] == 0 and y not in targets:
                queue.append(y)
    return members


def prune_edge(g_adv: Graph, bt: BacktrackTree, e: Edge, targets: Iterable[int],
               info: CoreInfo | None = None) -> PrunedFollowers:
    """Followers of ``e`` inside the tree plus tree nodes cut off by removing ``e``."""
    e = normalize_edge(*e)
    view = k_core(g_adv, bt.k, info)
    if e not in view.edges:
        raise AttackError(f"edge {e} is not in the {bt.k}-core")
    return PrunedFollowers(e, frozenset(_prune(view, bt, e, frozenset(targets))))


class _Episode:
    """Bookkeeping shared by the iterative attacks."""

    def __init__(self, method: str, g: Graph, k: int, targets: frozenset[int],
                 info: CoreInfo, budget: Optional[int]):
        if budget is not None and budget < 1:
            raise AttackError("budget must be >= 1")
        self.method = method
        self.g = g
        self.k = k
        self.targets = targets
        self.budget = budget
        self.base = k_core(g, k, info)
        self.view = self.base
        self.removed: list[Edge] = []
        self.records: list[IterationRecord] = []
        self.t0 = time.perf_counter()

    @property
    def out_of_budget(self) -> bool:
        return self.budget is not None and len(self.removed) >= self.budget

    def remaining(self) -> frozenset[int]:
        return self.targets & self.view.nodes

    def remove(self, e: Edge, score: Optional[float], candidates: int) -> None:
        self.removed.append(e)
        self.view = residual_view(self.view, [e])
        self.records.append(IterationRecord(e, score, candidates,
                                            len(self.base.nodes) - len(self.view.nodes)))

    def result(self, success: bool, seed: Optional[int] = None) -> AttackResult:
        return AttackResult(
            method=self.method, k=self.k, targets=self.targets, removed=tuple(self.removed),
            followers=FollowerSet(self.k, self.base.nodes - self.view.nodes),
            iterations=tuple(self.records), success=success,
            wall_time=time.perf_counter() - self.t0, seed=seed, bound=self.budget)


def _setup(g: Graph, targets: Iterable[int], info: CoreInfo | None):
    info = info or core_numbers(g)
    targets = frozenset(targets)
    k = target_core(g, targets, info)
    return info, targets, k


def mona(g: Graph, targets: Iterable[int], budget: Optional[int] = None,
         info: CoreInfo | None = None, workers: Optional[int] = None,
         observer: Callable[[KCoreView, BacktrackTree, CandidateH, Edge], None] | None = None,
         ) -> AttackResult:
    """Greedy removal of the candidate edge with the most pruned followers.

    The tree and candidates are rebuilt on the adversarial k-core after every
    removal, rooted at the targets that have not collapsed yet.
    """
    info, targets, k = _setup(g, targets, info)
    ep = _Episode("mona", g, k, targets, info, budget)
    while True:
        remaining = ep.remaining()
        if not remaining or ep.out_of_budget:
            break
        view = ep.view
        bt = tree_from_view(view, layers_from_view(view), remaining)
        hs = candidate_h(bt, remaining, view)
        if not hs.edges:
            raise AssertionError("candidate set is empty while targets remain")
        edges = sorted(hs.edges)
        scores = _score_all(lambda e: len(_prune(view, bt, e, remaining)), edges, workers)
        best, score = _argmax(edges, scores)
        if observer is not None:
            observer(view, bt, hs, best)
        ep.remove(best, score, len(edges))
    return ep.result(not ep.remaining())


def optimal(g: Graph, targets: Iterable[int], max_size: int,
            info: CoreInfo | None = None) -> AttackResult:
    """Smallest subset of P (lexicographically first) that collapses all targets.

    Subsets are enumerated up to ``max_size`` edges; when none works the
    result has ``success=False`` and ``bound=max_size``.
    """
    if max_size < 1:
        raise AttackError("max_size must be >= 1")
    info, targets, k = _setup(g, targets, info)
    t0 = time.perf_counter()
    base = k_core(g, k, info)
    pool = sorted(view_candidate_p(base))
    found: tuple[Edge, ...] = ()
    for size in range(1, min(max_size, len(pool)) + 1):
        for combo in itertools.combinations(pool, size):
            if targets <= peel(base, combo):
                found = combo
                break
        if found:
            break
    records = tuple(
        IterationRecord(found[i], None, len(pool), len(peel(base, found[:i + 1])))
        for i in range(len(found)))
    gone = frozenset(peel(base, found))
    return AttackResult("optimal", k, targets, found, FollowerSet(k, gone), records,
                        success=bool(found), wall_time=time.perf_counter() - t0,
                        bound=max_size)


def random_attack(g: Graph, targets: Iterable[int], seed: int, freeze: bool = False,
                  budget: Optional[int] = None, info: CoreInfo | None = None) -> AttackResult:
    """Remove uniformly random P-edges until every target collapses.

    P is recomputed on the adversarial graph each step unless ``freeze`` is
    set, in which case the input graph's P (minus removed edges) is used.
    """
    info, targets, k = _setup(g, targets, info)
    rng = random.Random(seed)
    ep = _Episode("random", g, k, targets, info, budget)
    frozen = sorted(view_candidate_p(ep.base))
    while ep.remaining() and not ep.out_of_budget:
        if freeze:
            taken = set(ep.removed)
            cands = [e for e in frozen if e not in taken]
        else:
            cands = sorted(view_candidate_p(ep.view))
        if not cands:
            raise AssertionError("no candidate edges left while targets remain")
        ep.remove(cands[rng.randrange(len(cands))], None, len(cands))
    return ep.result(not ep.remaining(), seed=seed)


def degree_attack(g: Graph, targets: Iterable[int], budget: Optional[int] = None,
                  info: CoreInfo | None = None) -> AttackResult:
    """Remove the P-edge with the smallest endpoint degree sum in the k-core."""
    info, targets, k = _setup(g, targets, info)
    ep = _Episode("degree", g, k, targets, info, budget)
    while ep.remaining() and not ep.out_of_budget:
        adj = ep.view.adj
        cands = sorted(view_candidate_p(ep.view))
        scores = [len(adj[u]) + len(adj[v]) for u, v in cands]
        best, score = _argmin(cands, scores)
        ep.remove(best, score, len(cands))
    return ep.result(not ep.remaining())


def greedy_followers_attack(g: Graph, k: int, budget: Optional[int] = None,
                            info: CoreInfo | None = None, workers: Optional[int] = None,
                            ) -> AttackResult:
    """Global attack: repeatedly remove the P-edge with the most followers.

    Stops once no k-node is left in the k-core or after ``budget`` removals.
    """
    info = info or core_numbers(g)
    if k < 1 or k > info.k_max:
        raise AttackError(f"k={k} outside 1..{info.k_max}")
    ep = _Episode("greedy", g, k, frozenset(), info, budget)
    while ep.view.k_nodes and not ep.out_of_budget:
        view = ep.view
        cands = sorted(view_candidate_p(view))
        scores = _score_all(lambda e: len(peel(view, [e])), cands, workers)
        best, score = _argmax(cands, scores)
        ep.remove(best, score, len(cands))
    return ep.result(True)


__all__ = [
    "AttackError", "AttackResult", "IterationRecord", "PrunedFollowers", "TargetError",
    "degree_attack", "greedy_followers_attack", "mona", "optimal", "prune_edge",
    "random_attack", "scoring_workers",
]
