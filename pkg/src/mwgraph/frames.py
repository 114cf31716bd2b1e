"""Tight fusion frames, edge colorings, and the frame-plus-coloring
expander construction, including the exhaustive small-graph search.

A tight fusion frame (orthogonal projections summing to c I) assigned to the
color classes of a properly r-edge-colored r-regular graph yields a
dI-regular matrix-weighted graph with d = c; when all ranks equal l the
degree is r l / k, which need not be an integer.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .errors import (
    DomainError,
    NotColorableError,
    NotProjectionError,
    NotProjectionWeightsError,
    NotProperlyColoredError,
    NotScalarRegularError,
    NotTightError,
    ParseError,
    TooLargeError,
)
from .graphgen import (
    canonical_code,
    edges_code,
    enumerate_regular_graphs,
    graph6_like,
    is_connected_edges,
    proper_colorings,
)
from .graphs import BaseGraph, Edge, MatrixWeightedGraph, regularity
from .linalg import DEFAULT_TOL, Tolerances, as_symmetric, rank_psd, spectral_norm
from .operators import assemble

SEARCH_MAX_N = 12


@dataclass(frozen=True)
class FusionFrame:
    """A list of k x k orthogonal projections (possibly tight)."""

    k: int
    projections: tuple[np.ndarray, ...]
    ranks: tuple[int, ...]

    @classmethod
    def from_projections(cls, mats: Iterable, tol: Tolerances = DEFAULT_TOL,
                         k: int | None = None) -> "FusionFrame":
        projections = []
        ranks = []
        for i, mat in enumerate(mats):
            P = as_symmetric(mat, tol)
            if k is None:
                k = P.shape[0]
            elif P.shape[0] != k:
                raise NotProjectionError(
                    f"projection #{i} has dimension {P.shape[0]}, expected {k}")
            if spectral_norm(P @ P - P) > tol.resid_tol * max(1.0, spectral_norm(P)):
                raise NotProjectionError(f"element #{i} is not an orthogonal projection")
            P.setflags(write=False)
            projections.append(P)
            ranks.append(rank_psd(P, tol))
        if k is None:
            raise ValueError("empty frame needs an explicit ambient dimension k")
        return cls(k, tuple(projections), tuple(ranks))

    def __len__(self) -> int:
        return len(self.projections)


def verify_tight(f: FusionFrame, tol: Tolerances = DEFAULT_TOL) -> float:
    """Frame constant c with sum(P_i) = c I; raises NotTight otherwise."""
    total = np.zeros((f.k, f.k))
    for P in f.projections:
        total = total + P
    c = float(np.trace(total)) / f.k
    resid = spectral_norm(total - c * np.eye(f.k))
    if resid > tol.resid_tol * max(1.0, abs(c)):
        raise NotTightError(f"residual {resid:.3e} from {c:.6g} * I")
    return c


def equiangular_frame_2d(r: int) -> FusionFrame:
    """r rank-1 projections onto lines at angles i*pi/r; tight with c = r/2."""
    if r < 2:
        raise ValueError(f"need r >= 2, got {r}")
    mats = []
    for i in range(r):
        theta = i * math.pi / r
        u = np.array([math.cos(theta), math.sin(theta)])
        mats.append(np.outer(u, u))
    return FusionFrame.from_projections(mats)


def augment_with_identity(f: FusionFrame) -> FusionFrame:
    """Append I_k; a tight frame with constant c becomes tight with c + 1."""
    return FusionFrame.from_projections(list(f.projections) + [np.eye(f.k)])


class FrameExistence:
    EXISTS = "exists"
    NONE = "none"
    UNKNOWN_BY_BOUNDS = "unknown_by_bounds"


def frame_existence(k: int, l: int, r: int) -> str:
    """Known existence window for tight fusion frames of r rank-l subspaces in R^k."""
    if not (1 <= l <= k) or r < 1:
        raise ValueError(f"need 1 <= l <= k and r >= 1, got k={k}, l={l}, r={r}")
    threshold = math.ceil(k / l)
    if r >= threshold + 2:
        return FrameExistence.EXISTS
    if r <= threshold:
        return FrameExistence.NONE
    return FrameExistence.UNKNOWN_BY_BOUNDS


# --- edge colorings ----------------------------------------------------------


@dataclass(frozen=True)
class EdgeColoring:
    """Proper edge coloring: edges sharing a vertex have distinct colors."""

    colors: Mapping[Edge, int]
    num_colors: int

    @classmethod
    def from_sequence(cls, base: BaseGraph, seq: Iterable[int], r: int) -> "EdgeColoring":
        seq = tuple(int(c) for c in seq)
        if len(seq) != len(base.edges):
            raise NotProperlyColoredError(
                f"{len(seq)} colors for {len(base.edges)} edges")
        colors = dict(zip(base.edges, seq))
        coloring = cls(colors, r)
        coloring.validate(base)
        return coloring

    def validate(self, base: BaseGraph) -> None:
        at_vertex: dict[int, set[int]] = {v: set() for v in range(base.n)}
        for (u, v), c in self.colors.items():
            if not (0 <= c < self.num_colors):
                raise NotProperlyColoredError(f"color {c} outside [0, {self.num_colors})")
            if c in at_vertex[u] or c in at_vertex[v]:
                raise NotProperlyColoredError(
                    f"color {c} repeats at an endpoint of edge ({u}, {v})")
            at_vertex[u].add(c)
            at_vertex[v].add(c)


def proper_edge_coloring(g: BaseGraph, r: int) -> EdgeColoring:
    """First proper r-edge-coloring by deterministic backtracking.

    Raises NotColorable when the exhaustive search finds none.
    """
    if max(g.geometric_degrees(), default=0) > r:
        raise NotColorableError(f"maximum degree exceeds {r} colors")
    m = len(g.edges)
    used = [0] * g.n
    colors = [0] * m

    def rec(i: int) -> bool:
        if i == m:
            return True
        u, v = g.edges[i]
        free = ~(used[u] | used[v])
        for c in range(r):
            if (free >> c) & 1:
                bit = 1 << c
                used[u] |= bit
                used[v] |= bit
                colors[i] = c
                if rec(i + 1):
                    return True
                used[u] &= ~bit
                used[v] &= ~bit
        return False

    if not rec(0):
        raise NotColorableError(f"no proper {r}-edge-coloring exists (exhaustive search)")
    return EdgeColoring.from_sequence(g, colors, r)


# --- expander construction and search ---------------------------------------


def build_expander(g: BaseGraph, coloring: EdgeColoring, f: FusionFrame,
                   tol: Tolerances = DEFAULT_TOL) -> MatrixWeightedGraph:
    """Assign frame element P_{color(e)} to each edge of an r-regular graph.

    Requires a proper coloring with exactly r = len(f) colors, all used at
    every vertex, and a tight frame; the result is then c I-regular with
    c the frame constant.
    """
    r = len(f)
    degrees = g.geometric_degrees()
    if any(d != r for d in degrees):
        raise NotProperlyColoredError(
            f"graph is not {r}-regular (degrees {sorted(set(degrees))})")
    if coloring.num_colors != r or set(coloring.colors) != set(g.edges):
        raise NotProperlyColoredError("coloring does not cover the graph's edges")
    coloring.validate(g)
    verify_tight(f, tol)
    items = [(u, v, f.projections[coloring.colors[(u, v)]]) for u, v in g.edges]
    return MatrixWeightedGraph.from_weights(g.n, f.k, items, tol)


@dataclass(frozen=True)
class ExpanderReport:
    """Two-sided expansion constant of a projection-weighted regular graph.

    eta = d - max |mu| over nontrivial adjacency eigenvalues; the k trivial
    eigenvalues equal d.  Alon-Boppana comparison fields are populated only
    for uniform projection rank and regular geometric degree.
    """

    d: float
    eta: float
    mu_nontrivial_max: float
    mu_nontrivial_min: float
    alon_boppana_matrix: float | None
    alon_boppana_classical: float | None
    multiplicity_warning: bool

    def to_jsonable(self) -> dict:
        return {
            "d": self.d,
            "eta": self.eta,
            "mu_nontrivial_max": self.mu_nontrivial_max,
            "mu_nontrivial_min": self.mu_nontrivial_min,
            "alon_boppana_matrix": self.alon_boppana_matrix,
            "alon_boppana_classical": self.alon_boppana_classical,
            "multiplicity_warning": self.multiplicity_warning,
        }


def eta(G: MatrixWeightedGraph, tol: Tolerances = DEFAULT_TOL) -> ExpanderReport:
    """Expansion constant: all nontrivial |mu| are at most d - eta."""
    reg = regularity(G, tol)
    if not reg.is_scalar_regular or reg.scalar_degree <= 0:
        raise NotScalarRegularError("eta requires dI-regularity with d > 0")
    d = float(reg.scalar_degree)
    k = G.k
    for e, w in G.weights.items():
        if spectral_norm(w @ w - w) > tol.resid_tol * max(1.0, spectral_norm(w)):
            raise NotProjectionWeightsError(f"weight on edge {e} is not a projection")
    mu = np.linalg.eigvalsh(assemble(G, tol).adjacency)[::-1]
    cluster = int(np.sum(np.abs(mu - d) <= tol.rank_rel_tol * d))
    nontrivial = mu[k:]
    hi = float(nontrivial[0])
    lo = float(nontrivial[-1])
    eta_value = d - max(abs(hi), abs(lo))
    geo = set(reg.geometric_degrees)
    ranks = {rank_psd(w, tol) for w in G.weights.values()}
    ab_matrix = ab_classical = None
    if len(ranks) == 1 and len(geo) == 1:
        l = next(iter(ranks))
        r = next(iter(geo))
        if r >= 2:
            ab_matrix = 2.0 * (l / k) * math.sqrt(r - 1)
        if d > 1:
            ab_classical = 2.0 * math.sqrt(d - 1)
    return ExpanderReport(d, float(eta_value), hi, lo, ab_matrix, ab_classical,
                          cluster != k)


class AlonBoppana(NamedTuple):
    matrix_bound: float
    classical_bound: float


def alon_boppana_compare(r: int, l: int, k: int) -> AlonBoppana:
    """(2 (l/k) sqrt(r-1), 2 sqrt(d-1)) with d = r l / k."""
    if r < 2:
        raise DomainError(f"need r >= 2, got {r}")
    if not (1 <= l <= k):
        raise DomainError(f"need 1 <= l <= k, got l={l}, k={k}")
    d = r * l / k
    if d <= 1:
        raise DomainError(f"classical bound needs d > 1, got d = {d}")
    return AlonBoppana(2.0 * (l / k) * math.sqrt(r - 1), 2.0 * math.sqrt(d - 1))


def ratio_inequality_holds(d: float, r: float) -> bool | None:
    """sqrt(r-1)/r <= sqrt(d-1)/d; defined for 2 < d < r, else None."""
    if not (2 < d < r):
        return None
    return math.sqrt(r - 1) / r <= math.sqrt(d - 1) / d


# --- search ------------------------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    n: int
    code: str
    graph: BaseGraph
    coloring: tuple[int, ...]
    report: ExpanderReport

    def to_jsonable(self) -> dict:
        rep = self.report
        return {
            "n": self.n,
            "code": self.code,
            "coloring": list(self.coloring),
            "eta": rep.eta,
            "mu_min": rep.mu_nontrivial_min,
            "mu_max": rep.mu_nontrivial_max,
            "d": rep.d,
        }


def _projection_groups(f: FusionFrame, tol: Tolerances) -> list[int]:
    """group id per frame element; equal projections share an id."""
    groups: list[int] = []
    reps: list[np.ndarray] = []
    for P in f.projections:
        for gid, rep in enumerate(reps):
            if np.allclose(P, rep, atol=1e-12, rtol=0.0):
                groups.append(gid)
                break
        else:
            groups.append(len(reps))
            reps.append(P)
    return groups


def _graph_results(args) -> list:
    graph, n, code_str, f, groups, tol = args
    results = []
    seen_weightings: set[tuple[int, ...]] = set()
    dedupe = len(set(groups)) < len(groups)
    for coloring in proper_colorings(graph, len(f)):
        if dedupe:
            key = tuple(groups[c] for c in coloring)
            if key in seen_weightings:
                continue
            seen_weightings.add(key)
        ec = EdgeColoring.from_sequence(graph, coloring, len(f))
        G = build_expander(graph, ec, f, tol)
        results.append(SearchResult(n, code_str, graph, coloring, eta(G, tol)))
    return results


def search_expanders(n_max: int, r: int, f: FusionFrame,
                     tol: Tolerances = DEFAULT_TOL,
                     workers: int = 1) -> list[SearchResult]:
    """Every (connected r-regular graph, proper r-edge-coloring) pair up to n_max.

    Graphs are enumerated with isomorph rejection on canonical adjacency
    codes; colorings yielding identical weightings (possible only when the
    frame has repeated elements) are deduplicated.  Results are sorted by
    eta descending, then canonical code, then coloring.

    Exhaustive enumeration is practical for r <= 3 up to the n_max = 12 cap
    and for r = 4 up to about 10 vertices; use sample_expanders beyond that.
    """
    if n_max > SEARCH_MAX_N:
        raise TooLargeError(f"search capped at n_max <= {SEARCH_MAX_N}")
    if r != len(f):
        raise ValueError(f"frame has {len(f)} elements but r = {r}")
    verify_tight(f, tol)
    groups = _projection_groups(f, tol)
    tasks = []
    for n in range(r + 1, n_max + 1):
        for graph in enumerate_regular_graphs(n, r, connected=True):
            code_str = graph6_like(n, canonical_code(n, graph.edges))
            tasks.append((graph, n, code_str, f, groups, tol))
    if workers > 1 and len(tasks) > 1:
        import multiprocessing

        with multiprocessing.Pool(workers) as pool:
            chunks = pool.map(_graph_results, tasks)
    else:
        chunks = [_graph_results(task) for task in tasks]
    results = [res for chunk in chunks for res in chunk]
    results.sort(key=lambda res: (-res.report.eta, res.code, res.coloring))
    return results


def _random_regular_edges(rng, n: int, r: int):
    """One pairing-model draw; None when it produces loops or multi-edges."""
    stubs = np.repeat(np.arange(n), r)
    rng.shuffle(stubs)
    edges = set()
    for i in range(0, len(stubs), 2):
        u, v = int(stubs[i]), int(stubs[i + 1])
        if u == v:
            return None
        key = (u, v) if u < v else (v, u)
        if key in edges:
            return None
        edges.add(key)
    return sorted(edges)


def sample_expanders(n: int, r: int, f: FusionFrame, samples: int = 10,
                     seed: int = 0, tol: Tolerances = DEFAULT_TOL,
                     max_attempts_per_sample: int = 200) -> list[SearchResult]:
    """Seeded random-sampling mode for sizes beyond the exhaustive cap.

    Draws connected r-regular graphs on exactly n vertices by the pairing
    model, colors each with the first proper r-edge-coloring, and reports
    the same records as search_expanders.  Graphs are not canonicalized, so
    repeats can occur; the result is deterministic for a fixed seed.
    """
    if r != len(f):
        raise ValueError(f"frame has {len(f)} elements but r = {r}")
    if n <= r or (n * r) % 2 != 0:
        raise ValueError(f"no {r}-regular graphs on {n} vertices")
    verify_tight(f, tol)
    rng = np.random.default_rng(seed)
    results: list[SearchResult] = []
    attempts = 0
    while len(results) < samples and attempts < max_attempts_per_sample * samples:
        attempts += 1
        edges = _random_regular_edges(rng, n, r)
        if edges is None or not is_connected_edges(n, edges):
            continue
        base = BaseGraph.from_edges(n, edges)
        try:
            coloring = proper_edge_coloring(base, r)
        except NotColorableError:
            continue
        G = build_expander(base, coloring, f, tol)
        raw = edges_code(n, base.edges)
        code_str = graph6_like(n, raw) if n <= 62 else str(raw)
        colors = tuple(coloring.colors[e] for e in base.edges)
        results.append(SearchResult(n, code_str, base, colors, eta(G, tol)))
    results.sort(key=lambda res: (-res.report.eta, res.code, res.coloring))
    return results


# --- named frames and frame files -------------------------------------------

_NAMED_FRAME = re.compile(r"^(equiangular(\d+)(\+I)?|identity(\d+))$")


def named_frame(name: str, r_context: int | None = None) -> FusionFrame:
    """Built-in frames: "equiangular{r}", "equiangular{r}+I", "identity{k}".

    identity{k} yields r_context copies of I_k (the trivial lift weighting),
    so it needs the regular degree from context.
    """
    m = _NAMED_FRAME.match(name)
    if not m:
        raise ValueError(f"unknown frame name {name!r}")
    if m.group(4):
        k = int(m.group(4))
        if r_context is None:
            raise ValueError("identity{k} frame needs the number of colors (r)")
        return FusionFrame.from_projections([np.eye(k)] * r_context)
    frame = equiangular_frame_2d(int(m.group(2)))
    if m.group(3):
        frame = augment_with_identity(frame)
    return frame


def load_frame(data: bytes | str, tol: Tolerances = DEFAULT_TOL) -> FusionFrame:
    """Parse frame JSON: { "k": int, "projections": [[k*k floats], ...] }."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
        k = int(doc["k"])
        rows = [[float(x) for x in p] for p in doc["projections"]]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed frame JSON: {exc}") from exc
    mats = []
    for i, flat in enumerate(rows):
        if len(flat) != k * k:
            raise ParseError(f"projection #{i} has {len(flat)} entries, expected {k * k}")
        mats.append(np.array(flat).reshape(k, k))
    return FusionFrame.from_projections(mats, tol)
