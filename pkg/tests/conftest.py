import itertools
import os
import random
from pathlib import Path

import networkx as nx
import pytest
from hypothesis import strategies as st

from kcollapse.graph import Graph, ParseOptions, load_edge_list

FIX_A_EDGES = [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)]
FIX_B_EDGES = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 4), (1, 4), (4, 5), (2, 5)]

ROOT = Path(__file__).resolve().parent.parent


def complete(n):
    return Graph.from_edges(itertools.combinations(range(n), 2), n=n)


@pytest.fixture
def fix_a():
    return Graph.from_edges(FIX_A_EDGES)


@pytest.fixture
def fix_b():
    return Graph.from_edges(FIX_B_EDGES)


def gnp(rng, n, p):
    return Graph.from_edges(
        [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p], n=n)


def random_instances(count, seed, n_max=30, n_min=2, p_lo=0.1, p_hi=0.5):
    rng = random.Random(seed)
    for _ in range(count):
        n = rng.randint(n_min, n_max)
        yield rng, gnp(rng, n, rng.uniform(p_lo, p_hi))


# --- independent oracles ----------------------------------------------------

def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def nx_core(g):
    h = to_nx(g)
    return [nx.core_number(h)[u] for u in range(g.n)] if g.n else []


def nx_followers(g, removed, k):
    h = to_nx(g)
    before = set(nx.k_core(h, k).nodes)
    h.remove_edges_from(removed)
    return before - set(nx.k_core(h, k).nodes)


def brute_k_core(g, k):
    """Union of every node subset whose induced min degree is >= k."""
    best = set()
    for r in range(g.n + 1):
        for sub in itertools.combinations(range(g.n), r):
            s = set(sub)
            if all(len(g.adj[u] & s) >= k for u in s):
                best |= s
    return best


@st.composite
def small_graphs(draw, max_n=12):
    n = draw(st.integers(min_value=1, max_value=max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    return Graph.from_edges(chosen, n=n)


# --- benchmark datasets (user supplied) ---------------------------------------

DATASET_ENV = {"USAir": "KCOLLAPSE_USAIR", "DeezerEU": "KCOLLAPSE_DEEZER"}
DATASET_GLOBS = {"USAir": ("*usair*", "*USAir*"), "DeezerEU": ("*deezer*", "*Deezer*")}


def find_dataset(name):
    env = os.environ.get(DATASET_ENV[name])
    if env and Path(env).is_file():
        return Path(env)
    data_dir = Path(os.environ.get("KCOLLAPSE_DATA_DIR", ROOT / "data"))
    if data_dir.is_dir():
        for pattern in DATASET_GLOBS[name]:
            hits = sorted(p for p in data_dir.glob(pattern) if p.is_file())
            if hits:
                return hits[0]
    return None


def parse_options_for(path):
    path = Path(path)
    if path.suffix == ".csv":
        with open(path, "rb") as fh:
            first = fh.readline().decode().split(",")[0].strip()
        return ParseOptions(delimiter=",", skip_header=not first.isdigit())
    return ParseOptions()


def load_dataset(name):
    path = find_dataset(name)
    if path is None:
        pytest.skip(f"{name} edge list not found; set {DATASET_ENV[name]} or put it in data/")
    return path, load_edge_list(path, parse_options_for(path))


# --- acceptance summary -------------------------------------------------------

_acceptance = {}
_notes = []


@pytest.fixture
def note():
    """Attach an informational line to the acceptance summary."""
    return _notes.append


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        outcome = report.outcome
        if report.skipped and isinstance(report.longrepr, tuple):
            outcome = f"skipped ({report.longrepr[2]})"
        _acceptance[report.nodeid.split("::")[-1]] = outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance.items():
        status = "PASS" if outcome == "passed" else ("FAIL" if outcome == "failed" else "SKIP")
        terminalreporter.write_line(f"{status:<5} {name}  {'' if status != 'SKIP' else outcome}")
    for line in _notes:
        terminalreporter.write_line(f"note: {line}")
