"""Matrix-valued edge counts, expander mixing lemmas, and Cheeger machinery.

Two conventions pinned here:

* The spectral mixing bound centers the edge count at (d|S||T|/n) I, the
  centering the proof actually derives.
* The Loewner Cheeger constant is never materialized as a matrix (the
  infimum may not be attained); per-subset matrices are reported together
  with the scalar summary alpha = min over S of lambda_min(h(S)).

Exhaustive subset scans iterate Gray-code order over subsets containing
vertex 0 (complement symmetry) with incremental boundary updates, and break
argmin ties by smallest bitmask.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import (
    EmptyOrFullSubsetError,
    IndexOutOfRangeError,
    NotScalarRegularError,
    SingularVolumeError,
    TooLargeError,
)
from .graphs import MatrixWeightedGraph, all_degrees, regularity
from .linalg import DEFAULT_TOL, Tolerances, kernel_dim
from .operators import CHECK_TOL, BoundReport, assemble

EML_EXHAUSTIVE_MAX_N = 8
CHEEGER_EXHAUSTIVE_MAX_N = 20


# --- vertex subsets ---------------------------------------------------------


def subset_mask(S: Iterable[int], n: int) -> int:
    mask = 0
    for v in S:
        v = int(v)
        if not (0 <= v < n):
            raise IndexOutOfRangeError(f"vertex {v} outside [0, {n})")
        mask |= 1 << v
    return mask


def mask_vertices(mask: int, n: int) -> tuple[int, ...]:
    return tuple(v for v in range(n) if (mask >> v) & 1)


def proper_subsets_mod_complement(n: int) -> Iterator[int]:
    """Nonempty proper subsets containing vertex 0, in Gray-code order.

    Covers each {S, complement} pair exactly once.  Consecutive masks differ
    by one vertex among 1..n-1, except for a single two-vertex step where
    the full set is skipped.
    """
    full = (1 << n) - 1
    for m in range(1 << (n - 1)):
        mask = ((m ^ (m >> 1)) << 1) | 1
        if mask != full:
            yield mask


def _indicators(masks, n: int) -> np.ndarray:
    out = np.zeros((len(masks), n))
    for i, mask in enumerate(masks):
        for v in range(n):
            if (mask >> v) & 1:
                out[i, v] = 1.0
    return out


# --- edge counts ------------------------------------------------------------


def _weight_tensor(G: MatrixWeightedGraph) -> np.ndarray:
    """Block tensor T with T[u, v] = W_uv (zero when not adjacent)."""
    n, k = G.base.n, G.k
    T = np.zeros((n, n, k, k))
    for (u, v), w in G.weights.items():
        T[u, v] = w
        T[v, u] = w
    return T


def edge_count(G: MatrixWeightedGraph, S: Iterable[int], T: Iterable[int]) -> np.ndarray:
    """E(S, T) = sum over s in S, t in T of W_st (equals I_S^T A I_T)."""
    n = G.base.n
    smask = subset_mask(S, n)
    tmask = subset_mask(T, n)
    E = np.zeros((G.k, G.k))
    for (u, v), w in G.weights.items():
        if (smask >> u) & 1 and (tmask >> v) & 1:
            E = E + w
        if (smask >> v) & 1 and (tmask >> u) & 1:
            E = E + w
    return E


def require_scalar_regular(G: MatrixWeightedGraph, tol: Tolerances = DEFAULT_TOL,
                           positive: bool = False) -> float:
    reg = regularity(G, tol)
    if not reg.is_scalar_regular:
        raise NotScalarRegularError(f"graph is {reg.kind}, need algebraic degree dI")
    d = float(reg.scalar_degree)
    if positive and d <= 0:
        raise NotScalarRegularError(f"need positive algebraic degree, got d = {d}")
    return d


# --- regular expander mixing lemma -----------------------------------------


@dataclass(frozen=True)
class EmlReport:
    """Both inequalities of the regular mixing lemma for one subset pair."""

    trace_check: BoundReport
    spectral_check: BoundReport
    abs_mu: float


def _regular_mu_constants(G: MatrixWeightedGraph, tol: Tolerances) -> tuple[float, float, np.ndarray]:
    """(|mu| for the trace bound, max(|mu_{k+1}|, |mu_{kn}|), descending mu)."""
    k, n = G.k, G.base.n
    mu = np.linalg.eigvalsh(assemble(G, tol).adjacency)[::-1]
    abs_mu = max(float(np.sum(mu[k:2 * k])),
                 float(np.sum(np.abs(mu[(n - 1) * k:]))))
    if mu.size > k:
        spec_const = max(abs(float(mu[k])), abs(float(mu[-1])))
    else:
        spec_const = 0.0
    return abs_mu, spec_const, mu


def eml_regular(G: MatrixWeightedGraph, S: Iterable[int], T: Iterable[int],
                tol: Tolerances = DEFAULT_TOL, check_tol: float = CHECK_TOL) -> EmlReport:
    """Expander mixing lemma for dI-regular matrix-weighted graphs.

    Trace form: |tr E(S,T) - kd|S||T|/n| <= |mu| sqrt(|S||T|(1-|S|/n)(1-|T|/n)).
    Spectral form: eigenvalues of E(S,T) - (d|S||T|/n) I bounded in magnitude
    by max(|mu_{k+1}|, |mu_{kn}|) times the same square root.
    """
    d = require_scalar_regular(G, tol)
    n, k = G.base.n, G.k
    abs_mu, spec_const, _ = _regular_mu_constants(G, tol)
    E = edge_count(G, S, T)
    s = len(set(int(v) for v in S))
    t = len(set(int(v) for v in T))
    root = float(np.sqrt(max(s * t * (1 - s / n) * (1 - t / n), 0.0)))
    center = d * s * t / n
    trace_lhs = abs(float(np.trace(E)) - k * center)
    trace = BoundReport.simple("eml_regular_trace", trace_lhs, abs_mu * root, check_tol,
                               S=list(mask_vertices(subset_mask(S, n), n)),
                               T=list(mask_vertices(subset_mask(T, n), n)))
    dev = np.linalg.eigvalsh(E - center * np.eye(k))
    spec_lhs = max(abs(float(dev[0])), abs(float(dev[-1])))
    spectral = BoundReport.simple("eml_regular_spectral", spec_lhs, spec_const * root,
                                  check_tol)
    return EmlReport(trace, spectral, abs_mu)


def eml_regular_exhaustive(G: MatrixWeightedGraph, tol: Tolerances = DEFAULT_TOL,
                           check_tol: float = CHECK_TOL) -> BoundReport:
    """Both mixing inequalities over every subset pair (vectorized, n <= 8)."""
    d = require_scalar_regular(G, tol)
    n, k = G.base.n, G.k
    if n > EML_EXHAUSTIVE_MAX_N:
        raise TooLargeError(f"exhaustive pair scan limited to n <= {EML_EXHAUSTIVE_MAX_N}")
    abs_mu, spec_const, _ = _regular_mu_constants(G, tol)
    masks = list(range(1 << n))
    ind = _indicators(masks, n)
    sizes = ind.sum(axis=1)
    wt = _weight_tensor(G)
    tr_adj = np.trace(wt, axis1=2, axis2=3)
    # all-pairs quantities; axis a indexes S, axis b indexes T
    tr_E = ind @ tr_adj @ ind.T
    E_all = np.einsum("as,stij,bt->abij", ind, wt, ind, optimize=True)
    frac = sizes / n
    root = np.sqrt(np.maximum(np.outer(sizes, sizes) * np.outer(1 - frac, 1 - frac), 0.0))
    center = d * np.outer(sizes, sizes) / n
    trace_slack = abs_mu * root - np.abs(tr_E - k * center)
    dev = E_all - center[:, :, None, None] * np.eye(k)
    ev = np.linalg.eigvalsh(dev.reshape(-1, k, k))
    spec_lhs = np.abs(ev).max(axis=1).reshape(len(masks), len(masks))
    spec_slack = spec_const * root - spec_lhs
    worst_trace = np.unravel_index(int(np.argmin(trace_slack)), trace_slack.shape)
    worst_spec = np.unravel_index(int(np.argmin(spec_slack)), spec_slack.shape)
    slack = float(min(trace_slack.min(), spec_slack.min()))
    return BoundReport(
        "eml_regular_exhaustive", 0.0, slack, slack, slack >= -check_tol,
        {
            "pairs": len(masks) ** 2,
            "min_trace_slack": float(trace_slack.min()),
            "min_spectral_slack": float(spec_slack.min()),
            "worst_trace_pair": [list(mask_vertices(masks[worst_trace[0]], n)),
                                 list(mask_vertices(masks[worst_trace[1]], n))],
            "worst_spectral_pair": [list(mask_vertices(masks[worst_spec[0]], n)),
                                    list(mask_vertices(masks[worst_spec[1]], n))],
            "abs_mu": abs_mu,
        })


# --- irregular expander mixing lemma ----------------------------------------


@dataclass(frozen=True)
class IrregularContext:
    """Precomputed per-graph data for repeated irregular-EML evaluations."""

    k: int
    n: int
    deg_stack: np.ndarray    # (n, k, k)
    vol_inv: np.ndarray
    abs_mu_tilde: float      # |mu~_{k+1}|, mu~ ordered by decreasing |.|
    trace_adj: np.ndarray    # (n, n) matrix of tr(W_uv)


def irregular_context(G: MatrixWeightedGraph, tol: Tolerances = DEFAULT_TOL) -> IrregularContext:
    k, n = G.k, G.base.n
    degs = np.array(all_degrees(G)) if n else np.zeros((0, k, k))
    vol_total = degs.sum(axis=0) if n else np.zeros((k, k))
    values = np.linalg.eigvalsh(vol_total)
    if values.size == 0 or float(values[0]) <= DEFAULT_TOL.rank_rel_tol * max(1.0, float(values[-1])):
        raise SingularVolumeError("vol(G) has an eigenvalue below the rank cutoff")
    vol_inv = np.linalg.inv(vol_total)
    adj_norm = assemble(G, tol).adj_normalized
    mu = np.linalg.eigvalsh(adj_norm)
    order = np.lexsort((-mu, -np.abs(mu)))
    mu_by_abs = mu[order]
    abs_mu_tilde = abs(float(mu_by_abs[k])) if mu_by_abs.size > k else 0.0
    wt = _weight_tensor(G)
    return IrregularContext(k, n, degs, vol_inv, abs_mu_tilde,
                            np.trace(wt, axis1=2, axis2=3))


def eml_irregular_pairs(ctx: IrregularContext, ind_S: np.ndarray,
                        ind_T: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(lhs, rhs) arrays of the irregular bound for paired indicator rows."""
    vol_S = np.tensordot(ind_S, ctx.deg_stack, axes=(1, 0))
    vol_T = np.tensordot(ind_T, ctx.deg_stack, axes=(1, 0))
    tr_E = np.einsum("ms,st,mt->m", ind_S, ctx.trace_adj, ind_T)
    tr_V = np.einsum("mij,jl,mli->m", vol_S, ctx.vol_inv, vol_T)
    lhs = np.abs(tr_E - tr_V)
    self_S = np.einsum("mii->m", vol_S) - np.einsum("mij,jl,mli->m", vol_S, ctx.vol_inv, vol_S)
    self_T = np.einsum("mii->m", vol_T) - np.einsum("mij,jl,mli->m", vol_T, ctx.vol_inv, vol_T)
    rhs = ctx.abs_mu_tilde * np.sqrt(np.maximum(self_S, 0.0) * np.maximum(self_T, 0.0))
    return lhs, rhs


def eml_irregular_exhaustive(G: MatrixWeightedGraph, tol: Tolerances = DEFAULT_TOL,
                             check_tol: float = CHECK_TOL) -> BoundReport:
    """Irregular mixing bound over every subset pair (vectorized, n <= 8)."""
    ctx = irregular_context(G, tol)
    n = ctx.n
    if n > EML_EXHAUSTIVE_MAX_N:
        raise TooLargeError(f"exhaustive pair scan limited to n <= {EML_EXHAUSTIVE_MAX_N}")
    masks = list(range(1 << n))
    ind = _indicators(masks, n)
    m = len(masks)
    ind_S = np.repeat(ind, m, axis=0)
    ind_T = np.tile(ind, (m, 1))
    lhs, rhs = eml_irregular_pairs(ctx, ind_S, ind_T)
    slack = rhs - lhs
    worst = int(np.argmin(slack))
    return BoundReport(
        "eml_irregular_exhaustive", 0.0, float(slack[worst]), float(slack[worst]),
        bool(slack[worst] >= -check_tol),
        {
            "pairs": m * m,
            "worst_pair": [list(mask_vertices(masks[worst // m], n)),
                           list(mask_vertices(masks[worst % m], n))],
            "abs_mu_tilde": ctx.abs_mu_tilde,
        })


def eml_irregular(G: MatrixWeightedGraph, S: Iterable[int], T: Iterable[int],
                  tol: Tolerances = DEFAULT_TOL, check_tol: float = CHECK_TOL,
                  ctx: IrregularContext | None = None) -> BoundReport:
    """Mixing bound for irregular graphs, in volume form.

    |tr(E(S,T) - V(S,T))| <= |mu~_{k+1}| sqrt(tr(vol S - V(S,S)) tr(vol T - V(T,T)))
    with V(A,B) = vol(A) vol(G)^{-1} vol(B).  Requires invertible vol(G).
    """
    if ctx is None:
        ctx = irregular_context(G, tol)
    n = ctx.n
    smask = subset_mask(S, n)
    tmask = subset_mask(T, n)
    lhs, rhs = eml_irregular_pairs(ctx, _indicators([smask], n), _indicators([tmask], n))
    return BoundReport.simple("eml_irregular", float(lhs[0]), float(rhs[0]), check_tol,
                              S=list(mask_vertices(smask, n)),
                              T=list(mask_vertices(tmask, n)),
                              abs_mu_tilde=ctx.abs_mu_tilde)


# --- Cheeger ratios and constants -------------------------------------------


@dataclass(frozen=True)
class CheegerReport:
    """Exhaustive Cheeger scan: trace constant, argmin, and Loewner summary.

    h_loewner_alpha = min over subsets of lambda_min(h(S)); the Loewner
    infimum itself is certified per subset, never materialized as a matrix.
    """

    h_trace: float
    argmin: tuple[int, ...]
    h_loewner_alpha: float
    per_subset: Mapping[tuple[int, ...], np.ndarray] | None = None


def cheeger_ratios(G: MatrixWeightedGraph, S: Iterable[int],
                   tol: Tolerances = DEFAULT_TOL) -> tuple[float, np.ndarray]:
    """(h_trace(S), h_loewner(S)) = tr/matrix of E(S, V-S) / (d min(|S|, |V-S|))."""
    d = require_scalar_regular(G, tol, positive=True)
    n = G.base.n
    mask = subset_mask(S, n)
    if mask == 0 or mask == (1 << n) - 1:
        raise EmptyOrFullSubsetError("S must be a nonempty proper subset")
    size = bin(mask).count("1")
    comp = [v for v in range(n) if not (mask >> v) & 1]
    E = edge_count(G, mask_vertices(mask, n), comp)
    denom = d * min(size, n - size)
    return float(np.trace(E)) / denom, E / denom


@dataclass(frozen=True)
class _BoundaryScan:
    h_trace: float
    argmin_mask: int
    alpha: float
    min_rank: int
    per_subset: dict[tuple[int, ...], np.ndarray] | None


def _scan_boundaries(G: MatrixWeightedGraph, d: float, tol: Tolerances,
                     keep_per_subset: bool) -> _BoundaryScan:
    """Gray-code scan of all subsets mod complementation, incremental E updates."""
    n, k = G.base.n, G.k
    nbrs: list[list[tuple[int, np.ndarray]]] = [[] for _ in range(n)]
    for (u, v), w in G.weights.items():
        nbrs[u].append((v, w))
        nbrs[v].append((u, w))
    member = [False] * n
    member[0] = True
    E = np.zeros((k, k))
    for _, w in nbrs[0]:
        E = E + w
    best_tr, best_mask = np.inf, None
    alpha = np.inf
    min_rank = k
    per: dict[tuple[int, ...], np.ndarray] | None = {} if keep_per_subset else None
    mask = 1
    m = 0
    total = 1 << (n - 1)
    full = (1 << n) - 1
    while True:
        if mask != full:
            size = bin(mask).count("1")
            denom = d * min(size, n - size)
            h = E / denom
            tr = float(np.trace(h))
            values = np.linalg.eigvalsh(h)
            lam_min = float(values[0])
            rank_cut = tol.rank_rel_tol * max(1.0, float(values[-1]) * denom)
            rank = int(np.sum(values * denom > rank_cut))
            if tr < best_tr or (tr == best_tr and mask < best_mask):
                best_tr, best_mask = tr, mask
            alpha = min(alpha, lam_min)
            min_rank = min(min_rank, rank)
            if per is not None:
                per[mask_vertices(mask, n)] = h
        m += 1
        if m >= total:
            break
        j = (m & -m).bit_length() - 1  # flipped Gray-code bit -> vertex j+1
        v = j + 1
        member[v] = not member[v]
        mask ^= 1 << v
        for w_vertex, w in nbrs[v]:
            if member[w_vertex] != member[v]:
                E = E + w
            else:
                E = E - w
    # recompute the argmin boundary exactly (guards against drift in the
    # incremental updates)
    assert best_mask is not None
    comp = [v for v in range(n) if not (best_mask >> v) & 1]
    size = bin(best_mask).count("1")
    E_best = edge_count(G, mask_vertices(best_mask, n), comp)
    best_tr = float(np.trace(E_best)) / (d * min(size, n - size))
    return _BoundaryScan(best_tr, best_mask, float(alpha), min_rank, per)


def cheeger_constants(G: MatrixWeightedGraph, tol: Tolerances = DEFAULT_TOL,
                      n_exhaustive: int = CHEEGER_EXHAUSTIVE_MAX_N,
                      include_per_subset: bool = False) -> CheegerReport:
    """Exhaustive minimization over nonempty proper subsets mod complementation."""
    d = require_scalar_regular(G, tol, positive=True)
    n = G.base.n
    if n > n_exhaustive:
        raise TooLargeError(
            f"n = {n} exceeds exhaustive limit {n_exhaustive}; use sampling instead")
    if n < 2:
        raise EmptyOrFullSubsetError("no nonempty proper subsets for n < 2")
    scan = _scan_boundaries(G, d, tol, include_per_subset)
    return CheegerReport(scan.h_trace, mask_vertices(scan.argmin_mask, n),
                         scan.alpha, scan.per_subset)


def check_cheeger_lower_bounds(G: MatrixWeightedGraph, tol: Tolerances = DEFAULT_TOL,
                               check_tol: float = CHECK_TOL) -> tuple[BoundReport, BoundReport]:
    """Spectral lower bounds on both Cheeger constants.

    h_trace >= sum_{i=1..k} lambda_{k+i} / (2d), and per subset
    (lambda_{k+1} / 2d) I precedes h(S) in the Loewner order.
    """
    d = require_scalar_regular(G, tol, positive=True)
    k = G.k
    lam = np.linalg.eigvalsh(assemble(G, tol).laplacian)
    report = cheeger_constants(G, tol)
    trace_bound = BoundReport.simple(
        "cheeger_trace_lower_bound",
        float(np.sum(lam[k:2 * k])) / (2 * d), report.h_trace, check_tol,
        argmin=list(report.argmin))
    loewner_bound = BoundReport.simple(
        "cheeger_loewner_lower_bound",
        float(lam[k]) / (2 * d), report.h_loewner_alpha, check_tol)
    return trace_bound, loewner_bound


# --- counterexample certificate ---------------------------------------------


@dataclass(frozen=True)
class CounterexampleCertificate:
    """Witness that spectral upper bounds on the Cheeger constants fail.

    A certifying instance has a Laplacian kernel of dimension >= 2k (so
    lambda_{2k} = 0) while every boundary E(S, V-S) is full rank, alpha > 0,
    and h_trace > 0.
    """

    k: int
    kernel_dim: int
    min_boundary_rank: int
    alpha: float
    h_trace: float

    @property
    def holds(self) -> bool:
        return (self.kernel_dim >= 2 * self.k
                and self.min_boundary_rank == self.k
                and self.alpha > 0.0
                and self.h_trace > 0.0)

    def to_jsonable(self) -> dict:
        return {
            "k": self.k,
            "kernel_dim": self.kernel_dim,
            "min_boundary_rank": self.min_boundary_rank,
            "alpha": self.alpha,
            "h_trace": self.h_trace,
            "holds": self.holds,
        }


def verify_counterexample(G: MatrixWeightedGraph, tol: Tolerances = DEFAULT_TOL,
                          n_exhaustive: int = CHEEGER_EXHAUSTIVE_MAX_N) -> CounterexampleCertificate:
    d = require_scalar_regular(G, tol, positive=True)
    n = G.base.n
    if n > n_exhaustive:
        raise TooLargeError(
            f"n = {n} exceeds exhaustive limit {n_exhaustive}")
    if n < 2:
        raise EmptyOrFullSubsetError("no nonempty proper subsets for n < 2")
    kdim = kernel_dim(assemble(G, tol).laplacian, tol)
    scan = _scan_boundaries(G, d, tol, keep_per_subset=False)
    return CounterexampleCertificate(G.k, kdim, scan.min_rank, scan.alpha, scan.h_trace)
