"""Experiment orchestration and report emission."""
from __future__ import annotations

import csv
import io
import json
import os
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

from .attack import (METHODS, AttackResult, degree_attack, greedy_followers_attack, mona,
                     optimal, random_attack)
from .cores import CoreInfo, core_numbers, k_core
from .graph import Graph, ParseOptions, induced_subgraph, load_edge_list, remove_edges
from .onion import OnionLayers

CSV_HEADER = ("dataset", "k", "method", "iteration", "edge_a", "edge_b", "score",
              "cum_followers", "wall_ms")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DatasetStats:
    nodes: int
    edges: int
    avg_degree: float
    k_max: int
    kmax_nodes: int
    kmax_edges: int


# Reference statistics of the benchmark graphs, keyed by dataset name.
REFERENCE_STATS = {
    "USAir": DatasetStats(332, 2126, 12.81, 26, 35, 539),
    "DeezerEU": DatasetStats(28281, 92752, 6.56, 12, 71, 564),
    "Crawl": DatasetStats(1112702, 2278852, 4.10, 18, 725, 11522),
    "YouTube": DatasetStats(1134890, 2987624, 5.27, 51, 845, 36363),
    "Lastfm": DatasetStats(1191805, 4519330, 7.58, 70, 597, 35153),
    "Wikipedia": DatasetStats(1864433, 4507315, 4.84, 66, 324, 16054),
    "Roadnet": DatasetStats(1957027, 2760388, 2.82, 3, 4454, 7393),
    "Talk": DatasetStats(2394385, 4659565, 3.89, 131, 700, 73503),
    "Patent": DatasetStats(3774768, 16518947, 8.75, 64, 106, 4043),
    "Livejournal": DatasetStats(4033137, 27933062, 13.85, 213, 214, 22791),
}


def dataset_stats(g: Graph, info: CoreInfo | None = None) -> DatasetStats:
    info = info or core_numbers(g)
    top = k_core(g, info.k_max, info)
    avg = 2 * g.m / g.n if g.n else 0.0
    return DatasetStats(g.n, g.m, avg, info.k_max, len(top.nodes), len(top.edges))


def match_reference(stats: DatasetStats) -> Optional[str]:
    """Name of the reference dataset with the same node and edge counts."""
    for name, ref in REFERENCE_STATS.items():
        if (ref.nodes, ref.edges) == (stats.nodes, stats.edges):
            return name
    return None


def select_targets(g: Graph, b: int, k: int | None = None,
                   info: CoreInfo | None = None) -> frozenset[int]:
    """The ``b`` k-nodes of highest degree inside the k-core (k defaults to k_max).

    Ties go to the smaller id.
    """
    info = info or core_numbers(g)
    k = info.k_max if k is None else k
    view = k_core(g, k, info)
    pool = view.k_nodes
    if not 1 <= b <= len(pool):
        raise ConfigError(f"b={b} outside 1..{len(pool)} ({k}-nodes available)")
    ranked = sorted(pool, key=lambda u: (-len(view.adj[u]), u))
    return frozenset(ranked[:b])


@dataclass(frozen=True)
class TargetSpec:
    kind: str  # "top" | "ids" | "all"
    b: int = 0
    labels: tuple[str, ...] = ()

    @classmethod
    def parse(cls, text: str) -> "TargetSpec":
        text = text.strip()
        if text == "all":
            return cls("all")
        kind, _, rest = text.partition(":")
        if kind == "top":
            try:
                return cls("top", b=int(rest))
            except ValueError:
                raise ConfigError(f"bad target count in {text!r}") from None
        if kind == "ids":
            labels = tuple(s.strip() for s in rest.split(",") if s.strip())
            if not labels:
                raise ConfigError("ids: needs at least one label")
            return cls("ids", labels=labels)
        raise ConfigError(f"unknown target spec {text!r}; use top:<b>, ids:<l1,...> or all")

    def __str__(self) -> str:
        if self.kind == "top":
            return f"top:{self.b}"
        if self.kind == "ids":
            return "ids:" + ",".join(self.labels)
        return "all"


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: Union[str, os.PathLike]
    k: Union[int, str] = "kmax"
    targets: TargetSpec = TargetSpec("top", b=1)
    methods: tuple[str, ...] = ("mona",)
    budget: Optional[int] = None
    trials: int = 1
    seed: int = 0
    max_size: int = 3
    freeze_p: bool = False
    parse: ParseOptions = ParseOptions()

    def __post_init__(self):
        if isinstance(self.targets, str):
            object.__setattr__(self, "targets", TargetSpec.parse(self.targets))
        if isinstance(self.methods, str):
            object.__setattr__(self, "methods", tuple(self.methods.split(",")))
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
        if not self.methods:
            raise ConfigError("no method given")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.trials > 1 and "random" not in self.methods:
            raise ConfigError("trials > 1 is only valid for the random method")
        if self.budget is not None and self.budget < 1:
            raise ConfigError("budget must be >= 1")
        if self.max_size < 1:
            raise ConfigError("max_size must be >= 1")
        if self.k != "kmax" and (not isinstance(self.k, int) or self.k < 1):
            raise ConfigError(f"k must be 'kmax' or a positive integer, got {self.k!r}")


@dataclass
class MethodReport:
    method: str
    runs: list[AttackResult]

    @property
    def counts(self) -> list[int]:
        return [r.size for r in self.runs]

    @property
    def mean(self) -> float:
        return statistics.fmean(self.counts)

    @property
    def std(self) -> float:
        c = self.counts
        return statistics.stdev(c) if len(c) > 1 else 0.0


@dataclass
class Report:
    dataset: str
    stats: DatasetStats
    reference: Optional[str]
    k: int
    targets: tuple[int, ...]
    labels: tuple[str, ...] = field(repr=False)
    results: list[MethodReport] = field(default_factory=list)

    def label(self, u: int) -> str:
        return self.labels[u]


def resolve_targets(g: Graph, spec: TargetSpec, k: int, info: CoreInfo) -> frozenset[int]:
    if spec.kind == "top":
        return select_targets(g, spec.b, k, info)
    if spec.kind == "all":
        pool = k_core(g, k, info).k_nodes
        if not pool:
            raise ConfigError(f"there are no {k}-nodes")
        return pool
    ids = []
    for lab in spec.labels:
        try:
            ids.append(g.id_of(lab))
        except KeyError as exc:
            raise ConfigError(str(exc.args[0])) from None
    bad = [g.labels[u] for u in ids if info.core[u] != k]
    if bad:
        raise ConfigError(f"targets {bad} do not have core number {k}")
    return frozenset(ids)


def verify_result(g: Graph, info: CoreInfo, result: AttackResult) -> None:
    """Re-derive the follower set from scratch and check it against ``result``.

    The recomputation runs a fresh core decomposition on the input k-core with
    the removed edges deleted; the k-core of the attacked graph always lies
    inside the original one.
    """
    k = result.k
    keep = sorted(info.nodes_at_least(k))
    local = {u: i for i, u in enumerate(keep)}
    sub = induced_subgraph(g, keep)
    cut = [(local[u], local[v]) for u, v in result.removed if u in local and v in local]
    after = core_numbers(remove_edges(sub, cut))
    gone = frozenset(keep[i] for i in range(sub.n) if after.core[i] < k)
    if gone != result.followers.members:
        raise RuntimeError(f"{result.method}: follower set disagrees with recomputation")
    if result.success and not result.targets <= gone:
        raise RuntimeError(f"{result.method}: reported success but targets survive")
    if len(set(result.removed)) != len(result.removed):
        raise RuntimeError(f"{result.method}: an edge was removed twice")


def run_experiment(config: ExperimentConfig, g: Graph | None = None) -> Report:
    """Load the dataset (unless ``g`` is given), resolve targets and run each method."""
    if g is None:
        g = load_edge_list(config.dataset, config.parse)
    info = core_numbers(g)
    if config.k == "kmax":
        k = info.k_max
    else:
        k = int(config.k)
        if k > info.k_max:
            raise ConfigError(f"k={k} exceeds k_max={info.k_max}")
    targets = resolve_targets(g, config.targets, k, info)
    stats = dataset_stats(g, info)
    report = Report(Path(config.dataset).name, stats, match_reference(stats), k,
                    tuple(sorted(targets)), g.labels)
    for method in config.methods:
        if method == "mona":
            runs = [mona(g, targets, budget=config.budget, info=info)]
        elif method == "optimal":
            runs = [optimal(g, targets, config.max_size, info=info)]
        elif method == "degree":
            runs = [degree_attack(g, targets, budget=config.budget, info=info)]
        elif method == "greedy":
            runs = [greedy_followers_attack(g, k, budget=config.budget, info=info)]
        else:
            runs = [random_attack(g, targets, seed=config.seed + i, freeze=config.freeze_p,
                                  budget=config.budget, info=info)
                    for i in range(config.trials)]
        for r in runs:
            verify_result(g, info, r)
        report.results.append(MethodReport(method, runs))
    return report


# --- serialization ----------------------------------------------------------

def _f6(x: float) -> float:
    return float(f"{x:.6f}")


def _run_dict(report: Report, r: AttackResult, timing: bool) -> dict:
    lab = report.label
    return {
        "success": r.success,
        "seed": r.seed,
        "bound": r.bound,
        "removed_count": r.size,
        "removed_edges": [[lab(u), lab(v)] for u, v in r.removed],
        "follower_count": len(r.followers),
        "iterations": [
            {
                "iteration": i + 1,
                "edge": [lab(it.edge[0]), lab(it.edge[1])],
                "score": None if it.score is None else _f6(it.score),
                "candidates": it.candidates,
                "cum_followers": it.cum_followers,
            }
            for i, it in enumerate(r.iterations)
        ],
        "wall_ms": _f6(r.wall_time * 1000) if timing else None,
    }


def report_dict(report: Report, timing: bool = False) -> dict:
    """Report as a plain dict with a fixed key order. Labels replace ids."""
    s = report.stats
    results = []
    for mr in report.results:
        entry = {"method": mr.method}
        if mr.method == "random":
            entry["trials"] = len(mr.runs)
            entry["counts"] = mr.counts
            entry["mean"] = _f6(mr.mean)
            entry["std"] = _f6(mr.std)
            entry["runs"] = [_run_dict(report, r, timing) for r in mr.runs]
        else:
            entry.update(_run_dict(report, mr.runs[0], timing))
        results.append(entry)
    return {
        "dataset": report.dataset,
        "stats": {
            "nodes": s.nodes,
            "edges": s.edges,
            "avg_degree": _f6(s.avg_degree),
            "k_max": s.k_max,
            "kmax_nodes": s.kmax_nodes,
            "kmax_edges": s.kmax_edges,
            "reference": report.reference,
        },
        "k": report.k,
        "targets": [report.label(u) for u in report.targets],
        "results": results,
    }


def _csv_rows(report: Report, timing: bool):
    lab = report.label
    for mr in report.results:
        multi = len(mr.runs) > 1
        for t, r in enumerate(mr.runs):
            name = f"{mr.method}#{t}" if multi else mr.method
            wall = f"{r.wall_time * 1000:.6f}" if timing else ""
            for i, it in enumerate(r.iterations):
                yield (report.dataset, report.k, name, i + 1, lab(it.edge[0]), lab(it.edge[1]),
                       "" if it.score is None else f"{it.score:.6f}", it.cum_followers, wall)


def emit_report(report: Report, fmt: str = "json", timing: bool = False) -> bytes:
    """Serialize a report. Output is byte-stable unless ``timing`` is set."""
    if fmt == "json":
        return (json.dumps(report_dict(report, timing), indent=2) + "\n").encode("ascii")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        w.writerows(_csv_rows(report, timing))
        return buf.getvalue().encode("utf-8")
    raise ConfigError(f"unknown format {fmt!r}")


def cores_csv(g: Graph, info: CoreInfo) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("node_label", "core_number"))
    w.writerows((g.labels[u], c) for u, c in enumerate(info.core))
    return buf.getvalue().encode("utf-8")


def layers_csv(g: Graph, layers: OnionLayers) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("node_label", "layer"))
    w.writerows((g.labels[u], layers.layer[u]) for u in sorted(layers.layer))
    return buf.getvalue().encode("utf-8")


def stats_dict(g: Graph, info: CoreInfo | None = None) -> dict:
    s = dataset_stats(g, info)
    return {"nodes": s.nodes, "edges": s.edges, "avg_degree": _f6(s.avg_degree),
            "k_max": s.k_max, "kmax_nodes": s.kmax_nodes, "kmax_edges": s.kmax_edges,
            "reference": match_reference(s)}


def summarize(report: Report) -> Sequence[str]:
    """One human-readable line per method."""
    lines = []
    for mr in report.results:
        if mr.method == "random":
            lines.append(f"random  trials={len(mr.runs)} mean={mr.mean:.6f} std={mr.std:.6f}")
        else:
            r = mr.runs[0]
            lines.append(f"{mr.method:<8}success={r.success} removed={r.size} "
                         f"followers={len(r.followers)}")
    return lines
