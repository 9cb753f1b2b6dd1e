"""Simple undirected graphs with dense integer ids, plus edge-list I/O."""
from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Union

Edge = tuple[int, int]


class GraphError(Exception):
    """Base class for graph construction and parsing errors."""


class ParseError(GraphError, ValueError):
    def __init__(self, lineno: int, line: str, reason: str = "expected at least two tokens"):
        self.lineno = lineno
        self.line = line
        super().__init__(f"line {lineno}: {reason}: {line!r}")


class MissingEdgeError(GraphError, KeyError):
    def __init__(self, edge: Edge):
        self.edge = edge
        super().__init__(f"edge {edge} is not in the graph")

    def __str__(self) -> str:
        return self.args[0]


def normalize_edge(u: int, v: int) -> Edge:
    if u == v:
        raise ValueError(f"self-loop ({u}, {v}) is not a valid edge")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph.

    Nodes are ``0..n-1``. ``labels[i]`` is the original label of node ``i``
    as read from the input (or ``str(i)`` for programmatically built graphs).
    """

    n: int
    adj: tuple[frozenset[int], ...]
    labels: tuple[str, ...] = field(default=(), compare=False, repr=False)
    m: int = field(init=False, compare=False)

    def __post_init__(self):
        if len(self.adj) != self.n:
            raise GraphError(f"adjacency has {len(self.adj)} rows for n={self.n}")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(self.n)))
        elif len(self.labels) != self.n:
            raise GraphError("label count does not match node count")
        object.__setattr__(self, "m", sum(len(a) for a in self.adj) // 2)

    @classmethod
    def from_edges(cls, edges: Iterable[Edge], n: int | None = None,
                   labels: Iterable[str] | None = None) -> "Graph":
        """Build a graph from integer edges. Self-loops and duplicates are dropped."""
        edges = list(edges)
        if n is None:
            n = 1 + max((max(e) for e in edges), default=-1)
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise IndexError(f"edge ({u}, {v}) out of range for n={n}")
            if u != v:
                adj[u].add(v)
                adj[v].add(u)
        return cls(n, tuple(frozenset(a) for a in adj), tuple(labels) if labels is not None else ())

    def _check(self, u: int) -> None:
        if not 0 <= u < self.n:
            raise IndexError(f"node {u} out of range for n={self.n}")

    def degree(self, u: int) -> int:
        self._check(u)
        return len(self.adj[u])

    def neighbors(self, u: int) -> frozenset[int]:
        self._check(u)
        return self.adj[u]

    def has_edge(self, u: int, v: int) -> bool:
        return 0 <= u < self.n and v in self.adj[u]

    def edges(self) -> Iterator[Edge]:
        """Normalized edges in ascending lexicographic order."""
        for u in range(self.n):
            for v in sorted(self.adj[u]):
                if u < v:
                    yield (u, v)

    def label_of(self, u: int) -> str:
        return self.labels[u]

    def id_of(self, label: str) -> int:
        try:
            return self._label_index()[str(label)]
        except KeyError:
            raise KeyError(f"unknown node label {label!r}") from None

    def _label_index(self) -> dict[str, int]:
        idx = self.__dict__.get("_label_idx")
        if idx is None:
            idx = {lab: i for i, lab in enumerate(self.labels)}
            object.__setattr__(self, "_label_idx", idx)
        return idx


def adjacency_queries(g: Graph, u: int) -> tuple[int, frozenset[int]]:
    """Return ``(degree, neighbors)`` of ``u``."""
    nbrs = g.neighbors(u)
    return len(nbrs), nbrs


def remove_edges(g: Graph, removed: Iterable[Edge]) -> Graph:
    """Return a copy of ``g`` without ``removed``; ``g`` is left untouched."""
    touched: dict[int, set[int]] = {}
    for u, v in removed:
        if not g.has_edge(u, v):
            raise MissingEdgeError(normalize_edge(u, v) if u != v else (u, v))
        touched.setdefault(u, set(g.adj[u])).discard(v)
        touched.setdefault(v, set(g.adj[v])).discard(u)
    if not touched:
        return g
    adj = list(g.adj)
    for u, nbrs in touched.items():
        adj[u] = frozenset(nbrs)
    return Graph(g.n, tuple(adj), g.labels)


def add_edges(g: Graph, added: Iterable[Edge]) -> Graph:
    """Inverse of :func:`remove_edges`. Existing edges are left as is."""
    touched: dict[int, set[int]] = {}
    for u, v in added:
        normalize_edge(u, v)
        g._check(u)
        g._check(v)
        touched.setdefault(u, set(g.adj[u])).add(v)
        touched.setdefault(v, set(g.adj[v])).add(u)
    adj = list(g.adj)
    for u, nbrs in touched.items():
        adj[u] = frozenset(nbrs)
    return Graph(g.n, tuple(adj), g.labels)


def induced_subgraph(g: Graph, keep: Iterable[int]) -> Graph:
    """Subgraph induced on ``keep``.

    Kept nodes are renumbered densely in ascending id order and keep their
    original labels.
    """
    kept = sorted(set(keep))
    for u in kept:
        g._check(u)
    new_id = {u: i for i, u in enumerate(kept)}
    adj = tuple(frozenset(new_id[v] for v in g.adj[u] if v in new_id) for u in kept)
    return Graph(len(kept), adj, tuple(g.labels[u] for u in kept))


# --- edge-list text ---------------------------------------------------------

COMMENT_MARKERS = ("#", "%")


@dataclass(frozen=True)
class ParseOptions:
    """``delimiter=None`` splits on any whitespace.

    ``skip_header`` drops the first data line (e.g. ``node_1,node_2``).
    Matrix Market files (``%%MatrixMarket`` banner) have their size line
    skipped automatically.
    """

    delimiter: str | None = None
    skip_header: bool = False
    encoding: str = "utf-8"


Source = Union[str, bytes, "os.PathLike[str]", IO[bytes], IO[str], Iterable[str]]


def _iter_lines(source: Source, encoding: str) -> Iterator[str]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            for raw in fh:
                yield raw.decode(encoding)
        return
    if isinstance(source, bytes):
        source = io.BytesIO(source)
    for raw in source:
        yield raw.decode(encoding) if isinstance(raw, bytes) else raw


def load_edge_list(source: Source, options: ParseOptions | None = None) -> Graph:
    """Parse an edge list into a :class:`Graph`.

    Labels are mapped to ids in order of first appearance. Directed duplicates
    are merged, self-loops dropped, and columns past the second ignored.
    Labels of self-loop-only nodes still get an id.
    """
    opts = options or ParseOptions()
    ids: dict[str, int] = {}
    edges: list[Edge] = []
    skip_next = opts.skip_header
    for lineno, line in enumerate(_iter_lines(source, opts.encoding), start=1):
        stripped = line.strip()
        if lineno == 1 and stripped.startswith("%%MatrixMarket"):
            skip_next = True
            continue
        if not stripped or stripped.startswith(COMMENT_MARKERS):
            continue
        if skip_next:
            skip_next = False
            continue
        tokens = stripped.split(opts.delimiter)
        tokens = [t.strip() for t in tokens if t.strip()]
        if len(tokens) < 2:
            raise ParseError(lineno, line.rstrip("\r\n"))
        a, b = tokens[0], tokens[1]
        u = ids.setdefault(a, len(ids))
        v = ids.setdefault(b, len(ids))
        edges.append((u, v))
    return Graph.from_edges(edges, n=len(ids), labels=list(ids))


def to_edge_list_text(g: Graph) -> str:
    """Canonical serialization: one ``a b`` line per edge, ascending, by id."""
    return "".join(f"{u} {v}\n" for u, v in g.edges())
