"""Undirected weighted graphs: representation, degree/Eulerian analysis,
exact shortest paths, random non-Eulerian ensembles, and edge-list I/O.

Nodes are 0..n-1. Graphs are simple (no self-loops, one edge per pair) with
strictly positive exact weights; parallel edges live only in MultiGraph,
which is produced by route augmentation.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DisconnectedGraphError, InfeasibleSpecError, ParseError
from .numbers import Number, as_exact, format_number, parse_number, to_jsonable

Edge = tuple[int, int, Number]


def _canonical_edges(n: int, edges: Iterable[Sequence]) -> tuple[Edge, ...]:
    seen = set()
    out = []
    for e in edges:
        u, v, w = int(e[0]), int(e[1]), as_exact(e[2])
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u},{v}) out of range for n={n}")
        if u == v:
            raise ValueError(f"self-loop at node {u}")
        if w <= 0:
            raise ValueError(f"edge ({u},{v}) has non-positive weight {w}")
        a, b = (u, v) if u < v else (v, u)
        if (a, b) in seen:
            raise ValueError(f"duplicate edge ({a},{b})")
        seen.add((a, b))
        out.append((a, b, w))
    out.sort(key=lambda e: (e[0], e[1]))
    return tuple(out)


@dataclass(frozen=True)
class Graph:
    """Simple undirected weighted graph; immutable and hashable."""

    n: int
    edges: tuple[Edge, ...]

    def __init__(self, n: int, edges: Iterable[Sequence]):
        if n < 1:
            raise ValueError("graph needs at least one node")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "edges", _canonical_edges(n, edges))

    def degree(self, v: int) -> int:
        return degrees(self)[v]

    def weight(self, u: int, v: int) -> Number:
        a, b = (u, v) if u < v else (v, u)
        for x, y, w in self.edges:
            if (x, y) == (a, b):
                return w
        raise KeyError(f"no edge ({u},{v})")

    def has_edge(self, u: int, v: int) -> bool:
        a, b = (u, v) if u < v else (v, u)
        return any((x, y) == (a, b) for x, y, _ in self.edges)

    def with_weight(self, u: int, v: int, w: Number) -> "Graph":
        """Copy with one edge's weight replaced."""
        a, b = (u, v) if u < v else (v, u)
        if not self.has_edge(a, b):
            raise KeyError(f"no edge ({u},{v})")
        return Graph(self.n, [(x, y, w if (x, y) == (a, b) else wo)
                              for x, y, wo in self.edges])

    def features(self) -> "GraphFeatures":
        return graph_features(self)


@lru_cache(maxsize=4096)
def degrees(g: Graph) -> tuple[int, ...]:
    deg = [0] * g.n
    for u, v, _ in g.edges:
        deg[u] += 1
        deg[v] += 1
    return tuple(deg)


@lru_cache(maxsize=4096)
def adjacency(g: Graph) -> tuple[tuple[tuple[int, Number], ...], ...]:
    """Per-node (neighbor, weight) lists sorted by neighbor index."""
    adj: list[list[tuple[int, Number]]] = [[] for _ in range(g.n)]
    for u, v, w in g.edges:
        adj[u].append((v, w))
        adj[v].append((u, w))
    return tuple(tuple(sorted(a)) for a in adj)


def odd_nodes(g: Graph) -> list[int]:
    """Nodes of odd degree, ascending; always an even count."""
    return [v for v, d in enumerate(degrees(g)) if d % 2 == 1]


def is_connected(g: Graph) -> bool:
    adj = adjacency(g)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v, _ in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == g.n


def is_eulerian(g: Graph) -> bool:
    """Connected with every degree even."""
    return is_connected(g) and not odd_nodes(g)


def total_weight(g: Graph) -> Number:
    return sum((w for _, _, w in g.edges), start=0)


def shortest_paths(g: Graph, sources: Iterable[int]):
    """Exact single-source shortest paths from each source.

    Returns (dist, pred): dist[s][v] is the exact distance, pred[s][v] the
    predecessor of v on one shortest path from s. Predecessor ties are broken
    toward the smaller node index so reconstructed routes are reproducible.
    """
    if not is_connected(g):
        raise DisconnectedGraphError("shortest paths require a connected graph")
    adj = adjacency(g)
    dist_all: dict[int, dict[int, Number]] = {}
    pred_all: dict[int, dict[int, int | None]] = {}
    for s in sources:
        dist: dict[int, Number] = {s: 0}
        pred: dict[int, int | None] = {s: None}
        done: set[int] = set()
        heap: list[tuple[Number, int]] = [(0, s)]
        while heap:
            d, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            for v, w in adj[u]:
                nd = d + w
                if v not in dist or nd < dist[v]:
                    dist[v] = nd
                    pred[v] = u
                    heapq.heappush(heap, (nd, v))
                elif nd == dist[v] and v not in done and pred[v] is not None and u < pred[v]:
                    pred[v] = u
        dist_all[s] = dist
        pred_all[s] = pred
    return dist_all, pred_all


def reconstruct_path(pred: dict[int, int | None], source: int, target: int) -> list[int]:
    """Node sequence from source to target following predecessors."""
    path = [target]
    while path[-1] != source:
        prev = pred[path[-1]]
        if prev is None:
            raise DisconnectedGraphError(f"no path from {source} to {target}")
        path.append(prev)
    path.reverse()
    return path


class MultiGraph:
    """Undirected multigraph used as the augmented route graph."""

    def __init__(self, n: int):
        self.n = n
        self.edges: list[Edge] = []

    def add_edge(self, u: int, v: int, w: Number) -> int:
        if u == v or not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"bad multigraph edge ({u},{v})")
        a, b = (u, v) if u < v else (v, u)
        self.edges.append((a, b, as_exact(w)))
        return len(self.edges) - 1

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def total_weight(self) -> Number:
        return sum((w for _, _, w in self.edges), start=0)

    def is_connected_on_edges(self) -> bool:
        """Connectivity over nodes that carry at least one edge."""
        active = [v for v, d in enumerate(self.degrees()) if d > 0]
        if not active:
            return True
        adj: dict[int, set[int]] = {v: set() for v in active}
        for u, v, _ in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        seen = {active[0]}
        stack = [active[0]]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == len(active)


@dataclass(frozen=True)
class GraphFeatures:
    """Degree fingerprint: odd count d, max/min degree, degree-1 count."""

    d: int
    c_max: int
    c_min: int
    c_1: int


def graph_features(g: Graph) -> GraphFeatures:
    deg = degrees(g)
    return GraphFeatures(
        d=sum(1 for x in deg if x % 2 == 1),
        c_max=max(deg),
        c_min=min(deg),
        c_1=sum(1 for x in deg if x == 1),
    )


@dataclass(frozen=True)
class EnsembleSpec:
    """Random non-Eulerian ensemble: G(n, p) with rejection sampling.

    Each graph index derives its own RNG stream from the master seed, so
    generation is deterministic and order-independent. Graphs that come out
    disconnected or Eulerian are rejected; after max_attempts rejections the
    spec is declared infeasible.
    """

    n: int
    edge_prob: float
    count: int
    seed: int
    w_lo: int = 1
    w_hi: int = 1
    max_attempts: int = 10_000

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("ensemble graphs need n >= 3")
        if not (0.0 < self.edge_prob < 1.0):
            raise ValueError("edge probability must be in (0,1)")
        if not (1 <= self.w_lo <= self.w_hi):
            raise ValueError("need 1 <= w_lo <= w_hi")
        if self.count < 0:
            raise ValueError("count must be nonnegative")


def _sample_graph(spec: EnsembleSpec, rng: np.random.Generator) -> Graph:
    pairs = [(u, v) for u in range(spec.n) for v in range(u + 1, spec.n)]
    coins = rng.random(len(pairs))
    chosen = [p for p, c in zip(pairs, coins) if c < spec.edge_prob]
    if spec.w_lo == spec.w_hi:
        weights = [spec.w_lo] * len(chosen)
    else:
        weights = [int(x) for x in rng.integers(spec.w_lo, spec.w_hi + 1, len(chosen))]
    return Graph(spec.n, [(u, v, w) for (u, v), w in zip(chosen, weights)])


def random_graph(spec: EnsembleSpec, index: int) -> Graph:
    """The index-th graph of the ensemble: connected and non-Eulerian."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=(spec.seed, index)))
    for _ in range(spec.max_attempts):
        g = _sample_graph(spec, rng)
        if g.edges and is_connected(g) and odd_nodes(g):
            return g
    raise InfeasibleSpecError(
        f"no connected non-Eulerian graph in {spec.max_attempts} attempts "
        f"(n={spec.n}, p={spec.edge_prob})"
    )


def random_non_eulerian(spec: EnsembleSpec) -> list[Graph]:
    return [random_graph(spec, i) for i in range(spec.count)]


# --- edge-list and JSON formats --------------------------------------------
#
# Text: first non-comment line "n m", then m lines "u v w"; '#' starts a
# comment. JSON: {"n": ..., "edges": [[u, v, w], ...]}.

def write_edge_list(g: Graph, comments: Sequence[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(f"{g.n} {len(g.edges)}")
    lines.extend(f"{u} {v} {format_number(w)}" for u, v, w in g.edges)
    return "\n".join(lines) + "\n"


def read_edge_list(text: str) -> Graph:
    header: tuple[int, int] | None = None
    edges: list[tuple[int, int, Number]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 2:
                raise ParseError("expected header 'n m'", lineno)
            try:
                header = (int(parts[0]), int(parts[1]))
            except ValueError:
                raise ParseError("expected integer header 'n m'", lineno) from None
            continue
        if len(parts) != 3:
            raise ParseError("expected edge line 'u v w'", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError("edge endpoints must be integers", lineno) from None
        edges.append((u, v, parse_number(parts[2], lineno)))
    if header is None:
        raise ParseError("empty edge-list file")
    n, m = header
    if len(edges) != m:
        raise ParseError(f"header promised {m} edges, found {len(edges)}")
    return Graph(n, edges)


def graph_to_json(g: Graph) -> dict:
    return {"n": g.n, "edges": [[u, v, to_jsonable(w)] for u, v, w in g.edges]}


def graph_from_json(obj) -> Graph:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        return Graph(int(obj["n"]), [(e[0], e[1], as_exact(e[2])) for e in obj["edges"]])
    except (KeyError, TypeError, IndexError) as exc:
        raise ParseError(f"bad graph JSON: {exc}") from None
