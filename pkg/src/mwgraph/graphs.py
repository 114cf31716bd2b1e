"""Data model for matrix-weighted graphs and the MWG-JSON on-disk format.

A matrix-weighted graph is an undirected simple graph plus a k x k PSD
weight matrix per edge.  Multi-edges are representable because weights add;
load() merges duplicate pairs by matrix summation, so one stored matrix per
pair keeps W_uv well-defined.  A zero weight means "no edge" and is dropped
on save.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from . import jsonio
from .errors import (
    IndexOutOfRangeError,
    NotPsdError,
    ParseError,
)
from .linalg import DEFAULT_TOL, Tolerances, as_symmetric, is_psd

Edge = tuple[int, int]


def _norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class BaseGraph:
    """Undirected simple graph on vertices 0..n-1."""

    n: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"vertex count must be >= 0, got {self.n}")
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise IndexOutOfRangeError(
                    f"edge ({u}, {v}) outside vertex range [0, {self.n})")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if u > v:
                raise ValueError(f"edge ({u}, {v}) not normalized as (min, max)")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "BaseGraph":
        normalized = sorted({_norm_edge(int(u), int(v)) for u, v in edges})
        return cls(n, tuple(normalized))

    def neighbors(self, v: int) -> list[int]:
        out = []
        for a, b in self.edges:
            if a == v:
                out.append(b)
            elif b == v:
                out.append(a)
        return out

    def geometric_degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return tuple(deg)


def connected_components(base: BaseGraph) -> list[frozenset[int]]:
    adj: list[list[int]] = [[] for _ in range(base.n)]
    for u, v in base.edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = [False] * base.n
    comps = []
    for start in range(base.n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        comp = {start}
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    comp.add(y)
                    stack.append(y)
        comps.append(frozenset(comp))
    return comps


@dataclass(frozen=True)
class MatrixWeightedGraph:
    """Base graph plus one k x k PSD weight matrix per edge.

    Immutable after construction (weight arrays are marked read-only);
    freely shareable across threads.  An absent pair means the zero matrix.
    """

    base: BaseGraph
    k: int
    weights: Mapping[Edge, np.ndarray]

    @classmethod
    def from_weights(cls, n: int, k: int,
                     items: Iterable[tuple[int, int, np.ndarray]],
                     tol: Tolerances = DEFAULT_TOL) -> "MatrixWeightedGraph":
        """Build from (u, v, matrix) triples; duplicate pairs merge by summation."""
        if k < 1:
            raise ValueError(f"block size k must be >= 1, got {k}")
        merged: dict[Edge, np.ndarray] = {}
        for u, v, w in items:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise IndexOutOfRangeError(
                    f"edge ({u}, {v}) outside vertex range [0, {n})")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            arr = np.asarray(w, dtype=float)
            if arr.shape != (k, k):
                raise ValueError(
                    f"weight for edge ({u}, {v}) has shape {arr.shape}, expected ({k}, {k})")
            key = _norm_edge(u, v)
            merged[key] = merged.get(key, np.zeros((k, k))) + arr
        weights: dict[Edge, np.ndarray] = {}
        for key in sorted(merged):
            sym = as_symmetric(merged[key], tol)
            if not is_psd(sym, tol):
                raise NotPsdError(f"weight on edge {key} is not PSD")
            sym.setflags(write=False)
            weights[key] = sym
        base = BaseGraph(n, tuple(sorted(weights)))
        return cls(base, k, weights)

    def weight(self, u: int, v: int) -> np.ndarray:
        """W_uv; the zero matrix when u and v are not adjacent."""
        w = self.weights.get(_norm_edge(u, v))
        if w is None:
            return np.zeros((self.k, self.k))
        return w


@dataclass(frozen=True)
class ScalarWeightedGraph:
    """Base graph with a nonnegative real weight per edge."""

    base: BaseGraph
    weights: Mapping[Edge, float]

    @classmethod
    def from_weights(cls, n: int, items: Iterable[tuple[int, int, float]],
                     tol: Tolerances = DEFAULT_TOL) -> "ScalarWeightedGraph":
        merged: dict[Edge, float] = {}
        for u, v, w in items:
            key = _norm_edge(int(u), int(v))
            merged[key] = merged.get(key, 0.0) + float(w)
        weights = {}
        for key in sorted(merged):
            w = merged[key]
            if w < -tol.psd_tol * max(1.0, abs(w)):
                raise NotPsdError(f"negative weight {w} on edge {key}")
            weights[key] = max(w, 0.0)
        base = BaseGraph(n, tuple(sorted(weights)))
        return cls(base, weights)


@dataclass(frozen=True)
class Regularity:
    """Result of the regularity test.

    kind is "irregular", "regular" (common degree matrix D), or "scalar"
    (additionally D = dI).  Geometric degrees are reported separately from
    the algebraic degree.
    """

    kind: str
    degree_matrix: np.ndarray | None
    scalar_degree: float | None
    geometric_degrees: tuple[int, ...] = field(default=())

    @property
    def is_regular(self) -> bool:
        return self.kind in ("regular", "scalar")

    @property
    def is_scalar_regular(self) -> bool:
        return self.kind == "scalar"


def degree(G: MatrixWeightedGraph, v: int) -> np.ndarray:
    """Algebraic degree D_v = sum of weights on edges at v (PSD)."""
    if not (0 <= v < G.base.n):
        raise IndexOutOfRangeError(f"vertex {v} outside [0, {G.base.n})")
    D = np.zeros((G.k, G.k))
    for (a, b), w in G.weights.items():
        if a == v or b == v:
            D = D + w
    return D


def all_degrees(G: MatrixWeightedGraph) -> list[np.ndarray]:
    out = [np.zeros((G.k, G.k)) for _ in range(G.base.n)]
    for (a, b), w in G.weights.items():
        out[a] = out[a] + w
        out[b] = out[b] + w
    return out


def regularity(G: MatrixWeightedGraph, tol: Tolerances = DEFAULT_TOL) -> Regularity:
    geo = G.base.geometric_degrees()
    degs = all_degrees(G)
    if not degs:
        return Regularity("scalar", np.zeros((G.k, G.k)), 0.0, geo)
    scale = max(1.0, max(float(np.max(np.abs(d))) for d in degs))
    D0 = degs[0]
    for d in degs[1:]:
        if float(np.max(np.abs(d - D0))) > tol.resid_tol * scale:
            return Regularity("irregular", None, None, geo)
    d_scalar = float(np.trace(D0)) / G.k
    if float(np.max(np.abs(D0 - d_scalar * np.eye(G.k)))) <= tol.resid_tol * max(1.0, abs(d_scalar)):
        return Regularity("scalar", D0, d_scalar, geo)
    return Regularity("regular", D0, None, geo)


def scalarize_trace(G: MatrixWeightedGraph) -> ScalarWeightedGraph:
    """The scalar-weighted graph with w_e = tr(W_e)."""
    weights = {e: max(float(np.trace(w)), 0.0) for e, w in G.weights.items()}
    return ScalarWeightedGraph(G.base, weights)


def lift_identity(g: ScalarWeightedGraph, k: int) -> MatrixWeightedGraph:
    """Matrix weighting W_e = w_e * I_k; its Laplacian is L_g tensor I_k."""
    if k < 1:
        raise ValueError(f"block size k must be >= 1, got {k}")
    items = [(u, v, w * np.eye(k)) for (u, v), w in g.weights.items()]
    return MatrixWeightedGraph.from_weights(g.base.n, k, items)


def volume(G: MatrixWeightedGraph, S: Iterable[int]) -> np.ndarray:
    """vol(S) = sum of degree matrices over S; vol(V) is vol(G)."""
    vol = np.zeros((G.k, G.k))
    seen = set()
    for v in S:
        v = int(v)
        if not (0 <= v < G.base.n):
            raise IndexOutOfRangeError(f"vertex {v} outside [0, {G.base.n})")
        if v in seen:
            continue
        seen.add(v)
        vol = vol + degree(G, v)
    return vol


def total_volume(G: MatrixWeightedGraph) -> np.ndarray:
    return volume(G, range(G.base.n))


# --- MWG-JSON format -------------------------------------------------------
#
# { "k": int, "n": int, "edges": [ { "u": int, "v": int,
#                                    "w": [k*k floats, row-major] }, ... ] }
# Writers emit edges sorted by (min(u, v), max(u, v)) and floats with 17
# significant digits.  Scalar graphs use k = 1.


def load(data: bytes | str, tol: Tolerances = DEFAULT_TOL) -> MatrixWeightedGraph:
    """Parse MWG-JSON; duplicate pair entries are merged by matrix summation."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top-level MWG-JSON value must be an object")
    try:
        k = int(doc["k"])
        n = int(doc["n"])
        edge_docs = doc["edges"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"missing or malformed k/n/edges: {exc}") from exc
    if k < 1 or n < 0 or not isinstance(edge_docs, list):
        raise ParseError(f"invalid header: k={doc.get('k')}, n={doc.get('n')}")
    items = []
    for i, ed in enumerate(edge_docs):
        try:
            u = int(ed["u"])
            v = int(ed["v"])
            w = [float(x) for x in ed["w"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed edge entry #{i}: {exc}") from exc
        if len(w) != k * k:
            raise ParseError(
                f"edge ({u}, {v}) has {len(w)} weight entries, expected {k * k}")
        if u == v:
            raise ParseError(f"self-loop at vertex {u}")
        items.append((u, v, np.array(w).reshape(k, k)))
    return MatrixWeightedGraph.from_weights(n, k, items, tol)


def save(G: MatrixWeightedGraph) -> bytes:
    """Serialize to canonical MWG-JSON (sorted edges, zero weights dropped)."""
    edges = []
    for (u, v), w in sorted(G.weights.items()):
        if not np.any(w):
            continue
        edges.append({"u": u, "v": v, "w": [float(x) for x in w.ravel()]})
    doc = {"k": G.k, "n": G.base.n, "edges": edges}
    return jsonio.dumps(doc).encode("utf-8")


def save_scalar(g: ScalarWeightedGraph) -> bytes:
    return save(lift_identity(g, 1))


def as_scalar(G: MatrixWeightedGraph) -> ScalarWeightedGraph:
    """View a k = 1 graph as scalar-weighted."""
    if G.k != 1:
        raise ValueError(f"as_scalar requires k = 1, got k = {G.k}")
    return ScalarWeightedGraph(G.base, {e: float(w[0, 0]) for e, w in G.weights.items()})
