"""Cellular-sheaf view of a matrix-weighted graph.

Edge stalks carry orthonormal coordinates on im(W_e) scaled by the square
roots of the weight eigenvalues, so the coboundary is an ordinary real
matrix with delta^T delta equal to the Laplacian.  Also provides the
bar-and-joint (truss) construction whose Laplacian is the stiffness matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import DegenerateEdgeError, ParseError
from .graphs import Edge, MatrixWeightedGraph
from .linalg import DEFAULT_TOL, Tolerances, as_symmetric, kernel_dim, spectral_norm
from .operators import BoundReport, assemble


@dataclass(frozen=True)
class Coboundary:
    """The map delta: C^0 -> C^1 whose Gram matrix is the Laplacian.

    Each edge contributes rank(W_e) rows; factors[e] is the matrix B_e with
    B_e^T B_e = W_e, placed with +B_e at the head block and -B_e at the tail.
    """

    matrix: np.ndarray
    k: int
    n: int
    edge_rows: Mapping[Edge, tuple[int, int]]
    orientation: Mapping[Edge, tuple[int, int]]
    factors: Mapping[Edge, np.ndarray]


def sqrt_factor(w, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """B with B^T B = W for PSD W; rows are sqrt(sigma_i) u_i^T over eigenpairs
    with sigma above the rank cutoff, in eigh's ascending order."""
    sym = as_symmetric(w, tol)
    values, vectors = np.linalg.eigh(sym)
    cutoff = tol.rank_rel_tol * max(float(values[-1]), 0.0) if values.size else 0.0
    keep = [i for i in range(values.size) if values[i] > cutoff]
    if not keep:
        return np.zeros((0, sym.shape[0]))
    return np.sqrt(values[keep])[:, None] * vectors[:, keep].T


def build_coboundary(G: MatrixWeightedGraph,
                     orientation: Mapping[Edge, tuple[int, int]] | None = None,
                     tol: Tolerances = DEFAULT_TOL) -> Coboundary:
    """Assemble delta for a given orientation (default: tail = min, head = max)."""
    k, n = G.k, G.base.n
    orient: dict[Edge, tuple[int, int]] = {}
    for e in G.base.edges:
        if orientation is not None and e in orientation:
            tail, head = orientation[e]
            if {tail, head} != {e[0], e[1]}:
                raise ValueError(f"orientation {orientation[e]} does not match edge {e}")
        else:
            tail, head = e
        orient[e] = (tail, head)
    factors = {e: sqrt_factor(G.weights[e], tol) for e in G.base.edges}
    total = sum(f.shape[0] for f in factors.values())
    delta = np.zeros((total, k * n))
    edge_rows: dict[Edge, tuple[int, int]] = {}
    row = 0
    for e in G.base.edges:
        B = factors[e]
        r = B.shape[0]
        tail, head = orient[e]
        delta[row:row + r, head * k:(head + 1) * k] = B
        delta[row:row + r, tail * k:(tail + 1) * k] = -B
        edge_rows[e] = (row, row + r)
        row += r
    return Coboundary(delta, k, n, edge_rows, orient, factors)


def verify_factorization(G: MatrixWeightedGraph,
                         tol: Tolerances = DEFAULT_TOL) -> BoundReport:
    """Check ||delta^T delta - L|| <= resid_tol * max(1, ||L||)."""
    L = assemble(G, tol).laplacian
    delta = build_coboundary(G, tol=tol).matrix
    err = spectral_norm(delta.T @ delta - L)
    bound = tol.resid_tol * max(1.0, spectral_norm(L))
    return BoundReport.simple("sheaf_factorization", err, bound, check_tol=0.0,
                              laplacian_norm=spectral_norm(L))


def global_sections(G: MatrixWeightedGraph, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of H^0 = ker(delta) = ker(L), as columns."""
    L = assemble(G, tol).laplacian
    dim = kernel_dim(L, tol)
    _, vectors = np.linalg.eigh(L)
    return vectors[:, :dim]


# --- trusses ---------------------------------------------------------------


@dataclass(frozen=True)
class Truss:
    """Bar-and-joint structure in R^3: joint positions, struts, stiffnesses."""

    points: np.ndarray
    edges: tuple[Edge, ...]
    stiffness: Mapping[Edge, float]

    @classmethod
    def make(cls, points, members: Iterable[tuple[int, int, float]]) -> "Truss":
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"points must have shape (n, 3), got {pts.shape}")
        pts.setflags(write=False)
        stiffness: dict[Edge, float] = {}
        for u, v, s in members:
            u, v = int(u), int(v)
            key = (u, v) if u < v else (v, u)
            s = float(s)
            if s <= 0:
                raise ValueError(f"stiffness on edge {key} must be positive, got {s}")
            stiffness[key] = stiffness.get(key, 0.0) + s
        return cls(pts, tuple(sorted(stiffness)), stiffness)


def load_truss(data: bytes | str) -> Truss:
    """Parse truss JSON: { "points": [[x,y,z],...], "edges": [{"u","v","s"}] }."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
        points = [[float(c) for c in p] for p in doc["points"]]
        members = [(int(e["u"]), int(e["v"]), float(e["s"])) for e in doc["edges"]]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed truss JSON: {exc}") from exc
    if any(len(p) != 3 for p in points):
        raise ParseError("each point must have exactly 3 coordinates")
    try:
        return Truss.make(points, members)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def truss_to_mwg(t: Truss, tol: Tolerances = DEFAULT_TOL) -> MatrixWeightedGraph:
    """k = 3 weighting W_e = s_e * u u^T along each strut direction.

    The Laplacian of the result is the stiffness matrix of the truss.
    """
    items = []
    for (u, v) in t.edges:
        d = t.points[v] - t.points[u]
        length = float(np.linalg.norm(d))
        if length == 0.0:
            raise DegenerateEdgeError(f"edge ({u}, {v}) has zero length")
        unit = d / length
        items.append((u, v, t.stiffness[(u, v)] * np.outer(unit, unit)))
    return MatrixWeightedGraph.from_weights(len(t.points), 3, items, tol)


def rigid_motions(points, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis for the rigid-motion fields of a point set in R^3.

    Columns are the independent vectors among 3 translations and 3
    infinitesimal rotations (taken about the centroid for conditioning).
    Degenerate configurations (collinear, coincident) yield fewer than 6.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    n = pts.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    center = pts.mean(axis=0)
    gens = []
    for i in range(3):
        t = np.zeros((n, 3))
        t[:, i] = 1.0
        gens.append(t.ravel())
    for i in range(3):
        omega = np.zeros(3)
        omega[i] = 1.0
        gens.append(np.cross(np.broadcast_to(omega, (n, 3)), pts - center).ravel())
    K = np.array(gens).T
    U, s, _ = np.linalg.svd(K, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((3 * n, 0))
    rank = int(np.sum(s > tol.rank_rel_tol * s[0]))
    return U[:, :rank]
