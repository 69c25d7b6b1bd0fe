"""Graphs and their generalized Laplacians.

A graph is an immutable triple (vertex count, weighted edge list, Laplacian).
Vertex indices are 1-based in all public interfaces, matching the JSON file
format; matrix/vector positions are the usual 0-based numpy positions, so
vertex i lives at row/column i-1.

A generalized Laplacian is any symmetric matrix whose off-diagonal entries
are strictly negative exactly at the edges and zero elsewhere; the diagonal
is unrestricted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    DegenerateVertex,
    InvalidEdge,
    IoError,
    ParseError,
    SizeOverflow,
    ConfigError,
)

SYMMETRY_RTOL = 1e-12

# Largest admissible entry count for a product Laplacian (dimension squared).
MAX_PRODUCT_ENTRIES = 10**6


class LaplacianKind(str, Enum):
    ADJACENCY = "adjacency"
    STANDARD = "standard"
    NORMALIZED = "normalized"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Graph:
    """Immutable graph with a generalized Laplacian.

    edges are (i, j, w) with 1 <= i < j <= n and w > 0.
    """

    n: int
    edges: tuple
    laplacian: np.ndarray
    kind: LaplacianKind

    def __post_init__(self):
        self.laplacian.setflags(write=False)

    @property
    def edge_count(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple = ()

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class ProductGraph:
    """Cartesian product of two graphs; Laplacian is the Kronecker sum."""

    factors: tuple
    graph: Graph
    factor_dims: tuple


def _check_edges(n: int, edges) -> list:
    seen = set()
    normalized = []
    for e in edges:
        if len(e) == 2:
            i, j = e
            w = 1.0
        else:
            i, j, w = e
        i, j = int(i), int(j)
        if not (1 <= i <= n and 1 <= j <= n):
            raise InvalidEdge(f"edge ({i},{j}) out of range 1..{n}")
        if i == j:
            raise InvalidEdge(f"self-loop at vertex {i}")
        if i > j:
            i, j = j, i
        if (i, j) in seen:
            raise InvalidEdge(f"duplicate edge ({i},{j})")
        w = float(w)
        if not (w > 0) or not np.isfinite(w):
            raise InvalidEdge(f"edge ({i},{j}) has nonpositive weight {w}")
        seen.add((i, j))
        normalized.append((i, j, w))
    return normalized


def adjacency_matrix(n: int, edges) -> np.ndarray:
    """Weighted symmetric adjacency matrix from a 1-based edge list."""
    a = np.zeros((n, n))
    for i, j, w in edges:
        a[i - 1, j - 1] = w
        a[j - 1, i - 1] = w
    return a


def degree_vector(n: int, edges) -> np.ndarray:
    d = np.zeros(n)
    for i, j, w in edges:
        d[i - 1] += w
        d[j - 1] += w
    return d


def build_graph(n: int, edges, kind: LaplacianKind | str) -> Graph:
    """Build a graph and its Laplacian from a weighted edge list.

    Kinds: adjacency is minus the (weighted) adjacency matrix, standard is
    degree-minus-adjacency, normalized is the symmetric degree-normalized
    standard Laplacian (needs every degree positive).
    """
    kind = LaplacianKind(kind)
    if kind is LaplacianKind.CUSTOM:
        raise ConfigError("custom graphs are built with graph_from_laplacian")
    if n < 1:
        raise InvalidEdge(f"vertex count must be positive, got {n}")
    edges = _check_edges(n, edges)
    a = adjacency_matrix(n, edges)
    if kind is LaplacianKind.ADJACENCY:
        lap = -a
    elif kind is LaplacianKind.STANDARD:
        lap = np.diag(a.sum(axis=1)) - a
    else:
        d = a.sum(axis=1)
        if np.any(d <= 0):
            isolated = int(np.argmin(d)) + 1
            raise DegenerateVertex(
                f"vertex {isolated} is isolated; normalized Laplacian undefined"
            )
        dinv = 1.0 / np.sqrt(d)
        lap = np.eye(n) - dinv[:, None] * a * dinv[None, :]
    return Graph(n=n, edges=tuple(edges), laplacian=lap, kind=kind)


def graph_from_laplacian(matrix, edge_weights: str = "offdiag") -> Graph:
    """Wrap an explicit generalized Laplacian as a custom-kind graph.

    The edge set is read off the strictly negative off-diagonal entries;
    edge weights are their magnitudes.
    """
    lap = np.array(matrix, dtype=float)
    report = validate_generalized_laplacian(lap)
    if not report.ok:
        raise InvalidEdge(
            f"matrix is not a generalized Laplacian: {report.violations[:3]}"
        )
    n = lap.shape[0]
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if lap[i, j] < 0:
                edges.append((i + 1, j + 1, -float(lap[i, j])))
    return Graph(n=n, edges=tuple(edges), laplacian=lap, kind=LaplacianKind.CUSTOM)


def validate_generalized_laplacian(matrix) -> ValidationReport:
    """Check the generalized-Laplacian sign pattern.

    A square symmetric matrix qualifies when every off-diagonal entry is
    <= 0; the strictly negative ones define the edge set and the diagonal
    is unrestricted. Returns a report listing violating (i, j) pairs,
    1-based.
    """
    m = np.asarray(matrix, dtype=float)
    violations = []
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return ValidationReport(False, (("shape", str(m.shape)),))
    scale = max(np.max(np.abs(m)), 1.0) if m.size else 1.0
    asym = np.abs(m - m.T) > SYMMETRY_RTOL * scale
    for i, j in zip(*np.nonzero(np.triu(asym, 1))):
        violations.append((int(i) + 1, int(j) + 1, "asymmetric"))
    off = m.copy()
    np.fill_diagonal(off, 0.0)
    for i, j in zip(*np.nonzero(np.triu(off > 0, 1))):
        violations.append((int(i) + 1, int(j) + 1, "positive off-diagonal"))
    return ValidationReport(not violations, tuple(violations))


def is_connected(graph: Graph) -> bool:
    """Reachability check over the edge list (ignores weights)."""
    if graph.n == 1:
        return True
    neighbors = [[] for _ in range(graph.n)]
    for i, j, _ in graph.edges:
        neighbors[i - 1].append(j - 1)
        neighbors[j - 1].append(i - 1)
    seen = np.zeros(graph.n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        v = stack.pop()
        for u in neighbors[v]:
            if not seen[u]:
                seen[u] = True
                stack.append(u)
    return bool(seen.all())


def _product_kind(kg: LaplacianKind, kf: LaplacianKind) -> LaplacianKind:
    # The Kronecker sum reproduces the same construction only for the
    # adjacency and standard kinds; anything else yields a custom Laplacian.
    if kg == kf and kg in (LaplacianKind.ADJACENCY, LaplacianKind.STANDARD):
        return kg
    return LaplacianKind.CUSTOM


def cartesian_product(
    g: Graph, f: Graph, max_entries: int = MAX_PRODUCT_ENTRIES
) -> ProductGraph:
    """Cartesian product graph with the Kronecker-sum Laplacian.

    Vertex (i, i') of the product gets the 1-based flat index
    (i-1) * n' + i', i.e. row-major over (first factor, second factor),
    consistent with Kronecker-product column ordering. Product edges join
    pairs differing in exactly one coordinate, inheriting the connection
    strength from the factor Laplacian's off-diagonal entry.
    """
    n, np_ = g.n, f.n
    dim = n * np_
    if dim * dim > max_entries:
        raise SizeOverflow(
            f"product Laplacian would hold {dim * dim} entries "
            f"(limit {max_entries})"
        )
    lap = np.kron(g.laplacian, np.eye(np_)) + np.kron(np.eye(n), f.laplacian)
    edges = []
    # Same G-vertex, F-edge: weight from L^F off-diagonal.
    for i in range(1, n + 1):
        base = (i - 1) * np_
        for (ip, jp, _) in f.edges:
            w = -float(f.laplacian[ip - 1, jp - 1])
            edges.append((base + ip, base + jp, w))
    # Same F-vertex, G-edge: weight from L^G off-diagonal.
    for (i, j, _) in g.edges:
        for ip in range(1, np_ + 1):
            w = -float(g.laplacian[i - 1, j - 1])
            edges.append(((i - 1) * np_ + ip, (j - 1) * np_ + ip, w))
    edges.sort()
    product = Graph(
        n=dim, edges=tuple(edges), laplacian=lap, kind=_product_kind(g.kind, f.kind)
    )
    return ProductGraph(factors=(g, f), graph=product, factor_dims=(n, np_))


# -- file format --------------------------------------------------------------

def graph_to_json(graph: Graph) -> dict:
    if graph.kind is LaplacianKind.CUSTOM:
        raise ConfigError("custom-kind graphs have no JSON file representation")
    return {
        "n": graph.n,
        "kind": graph.kind.value,
        "edges": [[i, j, w] for i, j, w in graph.edges],
    }


def graph_from_json(obj: dict) -> Graph:
    try:
        return build_graph(int(obj["n"]), obj["edges"], obj["kind"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed graph object: {exc}") from exc


def save_graph(graph: Graph, path) -> None:
    try:
        with open(path, "w") as fh:
            json.dump(graph_to_json(graph), fh)
            fh.write("\n")
    except OSError as exc:
        raise IoError(str(exc)) from exc


def load_graph(path) -> Graph:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return graph_from_json(obj)
