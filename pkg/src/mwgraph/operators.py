"""Blockwise operators A, L, D and their normalized forms, plus bound checks.

The Laplacian acts vertexwise by (Lx)_v = sum_u W_uv (x_v - x_u); the
adjacency by (Ax)_v = sum_u W_uv x_u.  The normalized adjacency is computed
directly as D^(+/2) A D^(+/2) rather than via I - Lnorm so singular-degree
vertices are handled uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .graphs import (
    MatrixWeightedGraph,
    ScalarWeightedGraph,
    all_degrees,
    scalarize_trace,
)
from .linalg import DEFAULT_TOL, Spectrum, Tolerances, pseudo_sqrt_inv

CHECK_TOL = 1e-8
ATTAIN_TOL = 1e-7  # detection threshold for "bound attained", looser than resid_tol


@dataclass(frozen=True)
class BoundReport:
    """Structured record of an inequality check.

    For chains, lhs/rhs are aligned tuples and slack is the worst pairwise
    rhs - lhs.  holds iff slack >= -check_tol.
    """

    name: str
    lhs: float | tuple[float, ...]
    rhs: float | tuple[float, ...]
    slack: float
    holds: bool
    context: Mapping[str, Any] = field(default_factory=dict)

    @classmethod
    def simple(cls, name, lhs, rhs, check_tol=CHECK_TOL, **context) -> "BoundReport":
        slack = float(rhs) - float(lhs)
        return cls(name, float(lhs), float(rhs), slack, slack >= -check_tol, context)

    @classmethod
    def chain(cls, name, pairs, check_tol=CHECK_TOL, **context) -> "BoundReport":
        """pairs: sequence of (lhs_i, rhs_i) asserting lhs_i <= rhs_i."""
        pairs = [(float(a), float(b)) for a, b in pairs]
        if pairs:
            slack = min(b - a for a, b in pairs)
        else:
            slack = 0.0
        return cls(name,
                   tuple(a for a, _ in pairs),
                   tuple(b for _, b in pairs),
                   slack, slack >= -check_tol, context)

    def to_jsonable(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs if isinstance(self.lhs, float) else list(self.lhs),
            "rhs": self.rhs if isinstance(self.rhs, float) else list(self.rhs),
            "slack": self.slack,
            "holds": self.holds,
            "context": dict(self.context),
        }


@dataclass(frozen=True)
class OperatorBundle:
    """The five kn x kn operators of a matrix-weighted graph."""

    adjacency: np.ndarray
    laplacian: np.ndarray
    degree: np.ndarray
    lap_normalized: np.ndarray
    adj_normalized: np.ndarray
    k: int
    n: int


def assemble(G: MatrixWeightedGraph, tol: Tolerances = DEFAULT_TOL) -> OperatorBundle:
    k, n = G.k, G.base.n
    A = np.zeros((k * n, k * n))
    for (u, v), w in G.weights.items():
        A[u * k:(u + 1) * k, v * k:(v + 1) * k] = w
        A[v * k:(v + 1) * k, u * k:(u + 1) * k] = w
    D = np.zeros((k * n, k * n))
    half = np.zeros((k * n, k * n))
    for v, Dv in enumerate(all_degrees(G)):
        D[v * k:(v + 1) * k, v * k:(v + 1) * k] = Dv
        half[v * k:(v + 1) * k, v * k:(v + 1) * k] = pseudo_sqrt_inv(Dv, tol)
    L = D - A
    Lnorm = half @ L @ half
    Anorm = half @ A @ half
    return OperatorBundle(A, L, D,
                          (Lnorm + Lnorm.T) / 2.0,
                          (Anorm + Anorm.T) / 2.0,
                          k, n)


def scalar_adjacency(g: ScalarWeightedGraph) -> np.ndarray:
    n = g.base.n
    A = np.zeros((n, n))
    for (u, v), w in g.weights.items():
        A[u, v] = w
        A[v, u] = w
    return A


def scalar_laplacian(g: ScalarWeightedGraph) -> np.ndarray:
    A = scalar_adjacency(g)
    return np.diag(A.sum(axis=1)) - A


def laplacian_spectrum(G: MatrixWeightedGraph, tol: Tolerances = DEFAULT_TOL) -> Spectrum:
    """Laplacian eigenvalues lambda_i in increasing order."""
    L = assemble(G, tol).laplacian
    values, vectors = np.linalg.eigh(L)
    return Spectrum(values, vectors)


def adjacency_spectrum(G: MatrixWeightedGraph, tol: Tolerances = DEFAULT_TOL) -> Spectrum:
    """Adjacency eigenvalues mu_i in decreasing order."""
    A = assemble(G, tol).adjacency
    values, vectors = np.linalg.eigh(A)
    return Spectrum(values, vectors).reversed()


def check_normalized_bound(G: MatrixWeightedGraph, tol: Tolerances = DEFAULT_TOL,
                           attain_tol: float = ATTAIN_TOL,
                           check_tol: float = CHECK_TOL) -> BoundReport:
    """lambda_max of the normalized Laplacian is bounded above by 2."""
    bundle = assemble(G, tol)
    values = np.linalg.eigvalsh(bundle.lap_normalized)
    lam_max = float(values[-1]) if values.size else 0.0
    return BoundReport.simple(
        "normalized_laplacian_upper_bound", lam_max, 2.0, check_tol,
        attained=bool(abs(lam_max - 2.0) <= attain_tol),
        lambda_max=lam_max)


def check_laplacian_trace_bounds(G: MatrixWeightedGraph,
                                 tol: Tolerances = DEFAULT_TOL,
                                 check_tol: float = CHECK_TOL) -> BoundReport:
    """Trace-weighting control of the Laplacian spectrum.

    sum_{i=1..k} lambda_{k+i}(L_W) <= lambda_2(L_trW) <= lambda_n(L_trW)
    <= sum_{i=1..k} lambda_{(n-1)k+i}(L_W), plus the corollary
    lambda_{k+1}(L_W) <= lambda_2(L_trW)/k and lambda_{nk}(L_W) >= lambda_n(L_trW)/k.
    """
    k, n = G.k, G.base.n
    if n < 2:
        return BoundReport.chain("laplacian_trace_bounds", [], check_tol,
                                 note="vacuous for n < 2")
    lam = np.linalg.eigvalsh(assemble(G, tol).laplacian)
    slam = np.linalg.eigvalsh(scalar_laplacian(scalarize_trace(G)))
    low = float(np.sum(lam[k:2 * k]))
    high = float(np.sum(lam[(n - 1) * k:]))
    lam2_tr, lamn_tr = float(slam[1]), float(slam[-1])
    pairs = [
        (low, lam2_tr),
        (lam2_tr, lamn_tr),
        (lamn_tr, high),
        (float(lam[k]), lam2_tr / k),
        (lamn_tr / k, float(lam[-1])),
    ]
    return BoundReport.chain("laplacian_trace_bounds", pairs, check_tol,
                             sum_low=low, sum_high=high,
                             lambda2_trace=lam2_tr, lambdan_trace=lamn_tr)


def check_adjacency_trace_bounds(G: MatrixWeightedGraph,
                                 tol: Tolerances = DEFAULT_TOL,
                                 check_tol: float = CHECK_TOL) -> BoundReport:
    """sum of top-k mu(A_W) >= mu_1(A_trW) >= mu_n(A_trW) >= sum of bottom-k mu(A_W)."""
    k, n = G.k, G.base.n
    if n < 1:
        return BoundReport.chain("adjacency_trace_bounds", [], check_tol,
                                 note="vacuous for n < 1")
    mu = np.linalg.eigvalsh(assemble(G, tol).adjacency)[::-1]
    smu = np.linalg.eigvalsh(scalar_adjacency(scalarize_trace(G)))[::-1]
    top = float(np.sum(mu[:k]))
    bottom = float(np.sum(mu[(n - 1) * k:]))
    mu1_tr, mun_tr = float(smu[0]), float(smu[-1])
    pairs = [
        (mu1_tr, top),
        (mun_tr, mu1_tr),
        (bottom, mun_tr),
    ]
    return BoundReport.chain("adjacency_trace_bounds", pairs, check_tol,
                             sum_top=top, sum_bottom=bottom,
                             mu1_trace=mu1_tr, mun_trace=mun_tr)


def normalized_bound_attained(G: MatrixWeightedGraph, tol: Tolerances = DEFAULT_TOL,
                              attain_tol: float = ATTAIN_TOL) -> bool:
    return bool(check_normalized_bound(G, tol, attain_tol).context["attained"])


__all__ = [
    "ATTAIN_TOL",
    "CHECK_TOL",
    "BoundReport",
    "OperatorBundle",
    "assemble",
    "adjacency_spectrum",
    "check_adjacency_trace_bounds",
    "check_laplacian_trace_bounds",
    "check_normalized_bound",
    "laplacian_spectrum",
    "normalized_bound_attained",
    "scalar_adjacency",
    "scalar_laplacian",
]
