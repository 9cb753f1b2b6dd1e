import itertools
import random
import statistics
from fractions import Fraction
from functools import lru_cache

import networkx as nx
import pytest

from kcollapse.attack import (AttackError, degree_attack, greedy_followers_attack, mona,
                              optimal, prune_edge, random_attack)
from kcollapse.cores import candidate_p, core_numbers, k_core, view_candidate_p
from kcollapse.graph import Graph, remove_edges
from kcollapse.onion import TargetError, backtrack_tree

from conftest import complete, nx_followers, random_instances, to_nx


def test_prune_edge_examples(fix_a, fix_b):
    bt = backtrack_tree(fix_a, [2])
    assert prune_edge(fix_a, bt, (0, 2), {2}).members == {0, 1, 2}
    assert prune_edge(fix_a, bt, (2, 3), {2}).members == set()
    bt = backtrack_tree(fix_b, [4])
    assert prune_edge(fix_b, bt, (5, 4), {4}).members == {5}


def test_prune_edge_tree_cut_adds_orphaned_branch():
    # K4 on 0..3 plus the chain 5 - 6 - 4 hanging off it. Layers are
    # 5:1, 6:2, 4:3, so the tree from target 4 is 4 -> 6 -> 5.
    g = Graph.from_edges([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3),
                          (5, 0), (6, 5), (6, 1), (4, 6), (4, 2), (4, 3)])
    info = core_numbers(g)
    bt = backtrack_tree(g, [4], info)
    assert bt.edges == {(4, 6), (6, 5)}
    # no follower, but cutting 4 -> 6 orphans 6 and then 5
    assert prune_edge(g, bt, (4, 6), {4}, info).members == {5, 6}
    # 5 drops out of the core, 6 keeps neighbors 1 and 4
    assert prune_edge(g, bt, (5, 6), {4}, info).members == {5}


def test_prune_edge_rejects_non_core_edge():
    g = Graph.from_edges([(0, 1), (0, 2), (1, 2), (2, 3)])
    bt = backtrack_tree(g, [0])
    with pytest.raises(AttackError):
        prune_edge(g, bt, (2, 3), {0})


def test_mona_examples(fix_a, fix_b):
    r = mona(fix_a, {2})
    assert r.removed == ((0, 2),) and r.followers.members == {0, 1, 2}
    assert [it.score for it in r.iterations] == [3]
    r = mona(fix_b, {4})
    assert r.removed == ((4, 5), (0, 4))
    assert [it.score for it in r.iterations] == [1, 1]
    for n in (3, 4, 6):
        kn = complete(n)
        for t in ({0}, set(range(n))):
            assert mona(kn, t).size == 1


def test_mona_validates_targets(fix_b):
    with pytest.raises(TargetError):
        mona(fix_b, {0, 4})
    with pytest.raises(TargetError):
        mona(fix_b, set())


def test_optimal_examples(fix_a, fix_b):
    assert optimal(complete(3), {0}, 3).size == 1
    r = optimal(fix_b, {4}, 3)
    assert r.size == 2 and r.success
    r = optimal(fix_a, {2}, 3)
    assert r.removed == ((0, 1),)


def test_optimal_not_found_is_a_value(fix_b):
    r = optimal(fix_b, {4}, 1)
    assert not r.success and r.removed == () and r.bound == 1


def test_optimal_matches_brute_force_over_all_edges():
    """Restricting the search to P never loses the optimum."""
    rng = random.Random(17)
    checked = 0
    for _, g in random_instances(120, seed=41, n_max=8, n_min=4, p_lo=0.3, p_hi=0.7):
        info = core_numbers(g)
        if info.k_max < 1:
            continue
        k = rng.randint(1, info.k_max)
        kn = sorted(info.k_nodes(k))
        if not kn:
            continue
        targets = set(rng.sample(kn, rng.randint(1, min(3, len(kn)))))
        res = optimal(g, targets, 2, info)
        edges = list(g.edges())
        best = None
        for size in (1, 2):
            for combo in itertools.combinations(edges, size):
                if targets <= nx_followers(g, combo, k):
                    best = size
                    break
            if best:
                break
        assert (res.size if res.success else None) == best
        checked += 1
    assert checked > 50


def test_degree_examples(fix_a, fix_b):
    assert degree_attack(fix_a, {2}).removed == ((0, 1),)
    r = degree_attack(fix_b, {4})
    assert r.removed == ((4, 5), (0, 4))
    assert [it.score for it in r.iterations] == [5, 6]
    assert degree_attack(complete(5), {0}).size == 1


def test_greedy_followers_examples(fix_a):
    r = greedy_followers_attack(complete(5), 4)
    assert r.size == 1 and r.followers.members == set(range(5))
    r = greedy_followers_attack(fix_a, 2)
    assert r.removed == ((0, 1), (3, 4)) and len(r.followers) == 6
    assert [it.cum_followers for it in r.iterations] == [3, 6]
    r = greedy_followers_attack(fix_a, 2, budget=1)
    assert r.size == 1 and len(r.followers) == 3
    with pytest.raises(AttackError):
        greedy_followers_attack(fix_a, 3)


def _random_process_expectation(g, targets, k):
    """Exact expected removal count of the random baseline, by enumeration."""

    @lru_cache(maxsize=None)
    def expect(removed):
        h = to_nx(g)
        h.remove_edges_from(removed)
        if not targets & set(nx.k_core(h, k).nodes):
            return Fraction(0)
        core = nx.core_number(h)
        pool = [e for e in h.edges() if min(core[e[0]], core[e[1]]) == k]
        return 1 + sum(expect(removed | {tuple(sorted(e))}) for e in pool) / len(pool)

    return expect(frozenset())


def test_random_attack_matches_exact_expectation(fix_a):
    exact = _random_process_expectation(fix_a, {2}, 2)
    counts = [random_attack(fix_a, {2}, seed=s).size for s in range(1000)]
    mean = statistics.fmean(counts)
    assert 1 <= mean <= 7
    assert all(1 <= c <= 7 for c in counts)
    stderr = statistics.stdev(counts) / len(counts) ** 0.5
    assert abs(mean - float(exact)) < 4 * stderr


def test_random_attack_is_seeded(fix_a):
    assert random_attack(complete(3), {0}, seed=5).size == 1
    a = random_attack(fix_a, {2}, seed=123)
    b = random_attack(fix_a, {2}, seed=123)
    assert a.removed == b.removed


def test_random_freeze_mode(fix_b):
    r = random_attack(fix_b, {4}, seed=3, freeze=True)
    assert r.success and set(r.removed) <= candidate_p(fix_b, 2)


def _check_sound(g, res):
    k = res.k
    assert res.followers.members == nx_followers(g, res.removed, k)
    assert len(set(res.removed)) == len(res.removed) == len(res.iterations)
    assert all(g.has_edge(*e) for e in res.removed)
    assert res.size <= len(k_core(g, k).edges)


def _instances(count, seed, n_max=20):
    rng = random.Random(seed)
    for _, g in random_instances(count, seed=seed, n_max=n_max):
        info = core_numbers(g)
        for k in range(1, info.k_max + 1):
            kn = sorted(info.k_nodes(k))
            if kn:
                yield g, info, k, set(rng.sample(kn, rng.randint(1, len(kn))))


def test_attacks_sound_and_bounded():
    for g, info, k, targets in _instances(120, seed=6):
        for res in (mona(g, targets, info=info), degree_attack(g, targets, info=info),
                    random_attack(g, targets, seed=1, info=info),
                    greedy_followers_attack(g, k, info=info)):
            _check_sound(g, res)
            if res.method != "greedy":
                assert res.success and targets <= res.followers.members
            else:
                assert not k_core(remove_edges(g, res.removed), k).k_nodes


def test_mona_candidates_contained_in_h_and_p():
    for g, info, k, targets in _instances(80, seed=13):
        seen = []

        def observe(view, bt, hs, chosen):
            fresh = k_core(remove_edges(g, [e for e, *_ in seen]), k)
            assert hs.edges <= view_candidate_p(fresh)
            assert chosen in hs.edges
            assert bt.roots == targets & fresh.nodes
            seen.append((chosen,))

        res = mona(g, targets, info=info, observer=observe)
        assert [e for e, in seen] == list(res.removed)


def test_mona_never_beats_optimal():
    for g, info, k, targets in _instances(60, seed=19, n_max=10):
        opt = optimal(g, targets, 3, info)
        if opt.success:
            assert mona(g, targets, info=info).size >= opt.size


def test_global_mode_empties_top_core():
    for _, g in random_instances(60, seed=23, n_max=25, p_lo=0.3, p_hi=0.5):
        info = core_numbers(g)
        if info.k_max == 0:
            continue
        top = k_core(g, info.k_max, info).nodes
        res = mona(g, top, info=info)
        assert res.followers.members == top


def test_budget_stops_attacks(fix_b):
    r = mona(fix_b, {4}, budget=1)
    assert r.size == 1 and not r.success and r.bound == 1
    with pytest.raises(AttackError):
        degree_attack(fix_b, {4}, budget=0)


def test_parallel_scoring_matches_serial(monkeypatch):
    g = Graph.from_edges(itertools.combinations(range(14), 2))
    g = remove_edges(g, [(0, 1), (2, 3), (4, 5)])
    top = k_core(g, core_numbers(g).k_max).nodes
    serial = mona(g, top, workers=1)
    parallel = mona(g, top, workers=4)
    assert serial.removed == parallel.removed
    monkeypatch.setenv("KCOLLAPSE_THREADS", "0")
    assert greedy_followers_attack(g, 12, budget=3).removed == \
        greedy_followers_attack(g, 12, budget=3, workers=1).removed
