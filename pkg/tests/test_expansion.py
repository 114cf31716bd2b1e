import itertools

import numpy as np
import pytest

from mwgraph.errors import (
    EmptyOrFullSubsetError,
    NotScalarRegularError,
    SingularVolumeError,
    TooLargeError,
)
from mwgraph.expansion import (
    cheeger_constants,
    cheeger_ratios,
    check_cheeger_lower_bounds,
    edge_count,
    eml_irregular,
    eml_irregular_exhaustive,
    eml_regular,
    eml_regular_exhaustive,
    proper_subsets_mod_complement,
    verify_counterexample,
)
from mwgraph.graphs import (
    MatrixWeightedGraph,
    lift_identity,
    scalarize_trace,
    total_volume,
)
from mwgraph.operators import assemble, scalar_adjacency

from conftest import (
    FRAME_A,
    complete_graph,
    cycle_graph,
    k33_latin_mwg,
    k4_abc_mwg,
    random_mwg,
    unit_graph,
)


def indicator_block(mask_vertices, n, k):
    out = np.zeros((n * k, k))
    for v in mask_vertices:
        out[v * k:(v + 1) * k] = np.eye(k)
    return out


# --- edge counts -------------------------------------------------------------


def test_edge_count_single_pair():
    G = k4_abc_mwg()
    assert np.allclose(edge_count(G, [0], [1]), FRAME_A)


def test_edge_count_full_is_volume():
    G = k4_abc_mwg()
    allv = range(4)
    assert np.allclose(edge_count(G, allv, allv), total_volume(G))


def test_edge_count_disjoint_nonadjacent():
    G = MatrixWeightedGraph.from_weights(4, 2, [(0, 1, np.eye(2))])
    assert not np.any(edge_count(G, [2], [3]))


def test_edge_count_matches_indicator_product(rng):
    # E(S, T) = I_S^T A I_T, the identity behind the mixing-lemma proof
    for _ in range(40):
        G = random_mwg(rng)
        n, k = G.base.n, G.k
        A = assemble(G).adjacency
        S = [v for v in range(n) if rng.random() < 0.5]
        T = [v for v in range(n) if rng.random() < 0.5]
        direct = edge_count(G, S, T)
        oracle = indicator_block(S, n, k).T @ A @ indicator_block(T, n, k)
        assert np.allclose(direct, oracle, atol=1e-10)


def test_edge_count_transpose_symmetry(rng):
    G = random_mwg(rng)
    n = G.base.n
    S = [v for v in range(n) if rng.random() < 0.5]
    T = [v for v in range(n) if rng.random() < 0.5]
    assert np.allclose(edge_count(G, S, T), edge_count(G, T, S).T)
    E_SS = edge_count(G, S, S)
    assert np.linalg.eigvalsh(E_SS)[0] >= -1e-10 if len(S) else True


def test_trace_of_edge_count_matches_scalarized(rng):
    for _ in range(20):
        G = random_mwg(rng)
        n = G.base.n
        S = [v for v in range(n) if rng.random() < 0.5]
        T = [v for v in range(n) if rng.random() < 0.5]
        scalar = scalarize_trace(G)
        A_tr = scalar_adjacency(scalar)
        ind_S = np.zeros(n)
        ind_S[list(S)] = 1.0
        ind_T = np.zeros(n)
        ind_T[list(T)] = 1.0
        assert float(np.trace(edge_count(G, S, T))) == pytest.approx(
            float(ind_S @ A_tr @ ind_T), abs=1e-10)


# --- regular EML -------------------------------------------------------------


def test_eml_regular_empty_subset_equality():
    G = k4_abc_mwg()
    rep = eml_regular(G, [], [0, 1])
    assert rep.trace_check.lhs == 0.0 and rep.trace_check.rhs == 0.0
    assert rep.trace_check.holds and rep.spectral_check.holds


def test_eml_regular_full_sets_equality():
    G = k4_abc_mwg()
    rep = eml_regular(G, range(4), range(4))
    assert rep.trace_check.lhs == pytest.approx(0.0, abs=1e-10)
    assert rep.trace_check.rhs == pytest.approx(0.0, abs=1e-12)
    assert rep.trace_check.holds


def test_eml_regular_complete_lift_closed_form():
    # K_n identity lift: tr E(S,T) = k |S||T| for disjoint..., |mu| = k
    n, k = 5, 2
    G = lift_identity(complete_graph(n), k)
    S, T = [0, 1], [2, 3]
    rep = eml_regular(G, S, T)
    # E(S,T) = |S||T| I_k for disjoint S, T in K_n
    E = edge_count(G, S, T)
    assert np.allclose(E, 4 * np.eye(2))
    assert rep.abs_mu == pytest.approx(k, abs=1e-9)
    assert rep.trace_check.holds and rep.spectral_check.holds


def test_eml_regular_requires_regularity(rng):
    g = unit_graph(3, [(0, 1), (1, 2)])
    with pytest.raises(NotScalarRegularError):
        eml_regular(lift_identity(g, 2), [0], [1])


def test_eml_regular_exhaustive_matches_pairwise():
    # cross-validate the vectorized all-pairs scan against single calls
    G = k4_abc_mwg()
    summary = eml_regular_exhaustive(G)
    assert summary.holds
    worst = np.inf
    n = 4
    for smask in range(1 << n):
        for tmask in range(1 << n):
            S = [v for v in range(n) if (smask >> v) & 1]
            T = [v for v in range(n) if (tmask >> v) & 1]
            rep = eml_regular(G, S, T)
            worst = min(worst, rep.trace_check.slack, rep.spectral_check.slack)
    assert summary.slack == pytest.approx(worst, abs=1e-12)


def test_eml_regular_exhaustive_on_lifts():
    for scalar in (complete_graph(4), cycle_graph(5), cycle_graph(6)):
        for k in (1, 2):
            assert eml_regular_exhaustive(lift_identity(scalar, k)).holds


def test_eml_exhaustive_size_guard():
    G = lift_identity(cycle_graph(9), 1)
    with pytest.raises(TooLargeError):
        eml_regular_exhaustive(G)


def test_middle_terms_vanish(rng):
    # (I_S_perp)^T A I_G = 0 for dI-regular graphs, the key proof step
    G = k4_abc_mwg()
    n, k = 4, 2
    A = assemble(G).adjacency
    I_G = indicator_block(range(n), n, k)
    for smask in range(1, 1 << n):
        S = [v for v in range(n) if (smask >> v) & 1]
        I_S = indicator_block(S, n, k)
        I_S_perp = I_S - (len(S) / n) * I_G
        assert np.abs(I_S_perp.T @ A @ I_G).max() <= 1e-10


# --- irregular EML -----------------------------------------------------------


def test_eml_irregular_k2_equality():
    G = MatrixWeightedGraph.from_weights(2, 1, [(0, 1, [[1.0]])])
    rep = eml_irregular(G, [0], [1])
    assert float(rep.lhs) == pytest.approx(0.5, abs=1e-12)
    assert float(rep.rhs) == pytest.approx(0.5, abs=1e-12)
    assert rep.holds


def test_eml_irregular_full_set_zero():
    G = lift_identity(unit_graph(4, [(0, 1), (1, 2), (2, 3)]), 2)
    rep = eml_irregular(G, range(4), [1, 2])
    assert float(rep.lhs) == pytest.approx(0.0, abs=1e-9)
    assert float(rep.rhs) == pytest.approx(0.0, abs=1e-9)


def test_eml_irregular_random_suite(rng):
    checked = 0
    while checked < 100:
        G = random_mwg(rng)
        try:
            rep = eml_irregular(G, *_random_pair(rng, G.base.n))
        except SingularVolumeError:
            continue
        assert rep.holds
        checked += 1


def _random_pair(rng, n):
    S = [v for v in range(n) if rng.random() < 0.5]
    T = [v for v in range(n) if rng.random() < 0.5]
    return S, T


def test_eml_irregular_singular_volume():
    G = MatrixWeightedGraph.from_weights(2, 2, [(0, 1, FRAME_A)])
    with pytest.raises(SingularVolumeError):
        eml_irregular(G, [0], [1])


def test_eml_irregular_looser_than_regular_trace():
    # on dI-regular inputs the volume form holds but is weaker
    for n in (4, 5, 6):
        G = lift_identity(complete_graph(n), 2)
        for S, T in [([0], [1]), ([0, 1], [2, 3]), ([0, 1, 2], [1, 2, 3])]:
            regular = eml_regular(G, S, T)
            irregular = eml_irregular(G, S, T)
            assert irregular.holds
            # same centered trace on both sides; compare the bound values
            assert float(irregular.rhs) >= float(regular.trace_check.rhs) - 1e-9
            assert float(irregular.lhs) == pytest.approx(
                float(regular.trace_check.lhs), abs=1e-9)


def test_eml_irregular_exhaustive_small(rng):
    G = lift_identity(unit_graph(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]), 2)
    rep = eml_irregular_exhaustive(G)
    assert rep.holds and rep.context["pairs"] == 256


# --- Cheeger -----------------------------------------------------------------


def test_subsets_mod_complement_cover():
    n = 5
    masks = list(proper_subsets_mod_complement(n))
    full = (1 << n) - 1
    assert len(masks) == 2 ** (n - 1) - 1
    assert all(m & 1 for m in masks)
    seen = set(masks) | {full ^ m for m in masks}
    assert seen == set(range(1, full))
    # Gray order: single-vertex steps except the one jump where the full
    # set was skipped
    jumps = [bin(a ^ b).count("1") for a, b in zip(masks, masks[1:])]
    assert all(j in (1, 2) for j in jumps)
    assert jumps.count(2) <= 1


def test_cheeger_ratios_k2_identity():
    for k in (1, 2, 3):
        G = lift_identity(unit_graph(2, [(0, 1)]), k)
        h_tr, h_loew = cheeger_ratios(G, [0])
        assert h_tr == pytest.approx(k)
        assert np.allclose(h_loew, np.eye(k))


def test_cheeger_ratios_disconnected_component():
    G = lift_identity(unit_graph(4, [(0, 1), (2, 3)]), 2)
    h_tr, h_loew = cheeger_ratios(G, [0, 1])
    assert h_tr == 0.0
    assert not np.any(h_loew)


def test_cheeger_ratios_counterexample_full_rank():
    G = k33_latin_mwg()
    n = 6
    for smask in range(1, (1 << n) - 1):
        S = [v for v in range(n) if (smask >> v) & 1]
        _, h_loew = cheeger_ratios(G, S)
        assert np.linalg.eigvalsh(h_loew)[0] > 1e-6


def test_cheeger_ratios_errors():
    G = lift_identity(unit_graph(2, [(0, 1)]), 1)
    with pytest.raises(EmptyOrFullSubsetError):
        cheeger_ratios(G, [])
    with pytest.raises(EmptyOrFullSubsetError):
        cheeger_ratios(G, [0, 1])
    irregular = lift_identity(unit_graph(3, [(0, 1)]), 1)
    with pytest.raises(NotScalarRegularError):
        cheeger_ratios(irregular, [0])
    empty = MatrixWeightedGraph.from_weights(3, 1, [])
    with pytest.raises(NotScalarRegularError):
        cheeger_ratios(empty, [0])


def brute_force_cheeger(G, d):
    """Independent subset loop, no Gray code, no incremental updates."""
    n = G.base.n
    best_tr = np.inf
    best_S = None
    alpha = np.inf
    for size in range(1, n):
        for S in itertools.combinations(range(n), size):
            comp = [v for v in range(n) if v not in S]
            E = edge_count(G, S, comp)
            h = E / (d * min(size, n - size))
            tr = float(np.trace(h))
            if tr < best_tr:
                best_tr, best_S = tr, S
            alpha = min(alpha, float(np.linalg.eigvalsh(h)[0]))
    return best_tr, best_S, alpha


def test_cheeger_constants_c4():
    G = lift_identity(cycle_graph(4), 1)
    report = cheeger_constants(G)
    assert report.h_trace == pytest.approx(0.5)
    # ties broken by smallest bitmask: {0, 1} beats {0, 3}
    assert report.argmin == (0, 1)


def test_cheeger_constants_k2_lift():
    for k in (1, 2):
        G = lift_identity(unit_graph(2, [(0, 1)]), k)
        report = cheeger_constants(G)
        assert report.h_trace == pytest.approx(k)
        assert report.argmin == (0,)


def test_cheeger_constants_disconnected_zero():
    G = lift_identity(unit_graph(4, [(0, 1), (2, 3)]), 2)
    assert cheeger_constants(G).h_trace == pytest.approx(0.0)


def _k44_frame_expander():
    from mwgraph.frames import (
        augment_with_identity,
        build_expander,
        equiangular_frame_2d,
        proper_edge_coloring,
    )
    from mwgraph.graphs import BaseGraph
    base = BaseGraph.from_edges(8, [(i, 4 + j) for i in range(4) for j in range(4)])
    frame = augment_with_identity(equiangular_frame_2d(3))
    return build_expander(base, proper_edge_coloring(base, 4), frame)


def test_cheeger_constants_match_brute_force(rng):
    cases = [
        k4_abc_mwg(),
        k33_latin_mwg(),
        lift_identity(cycle_graph(5), 2),
        lift_identity(complete_graph(5), 1),
        lift_identity(cycle_graph(6), 3),
        _k44_frame_expander(),
    ]
    from mwgraph.graphs import regularity
    for G in cases:
        d = regularity(G).scalar_degree
        report = cheeger_constants(G)
        tr, S, alpha = brute_force_cheeger(G, d)
        assert report.h_trace == pytest.approx(tr, abs=1e-10)
        assert report.h_loewner_alpha == pytest.approx(alpha, abs=1e-10)


def test_cheeger_constants_per_subset_table():
    G = lift_identity(cycle_graph(4), 1)
    report = cheeger_constants(G, include_per_subset=True)
    assert len(report.per_subset) == 2 ** 3 - 1
    for S, h in report.per_subset.items():
        comp = [v for v in range(4) if v not in S]
        E = edge_count(G, S, comp)
        denom = 2 * min(len(S), 4 - len(S))  # C4 has d = 2
        assert np.allclose(h, E / denom, atol=1e-12)


def test_cheeger_constants_too_large():
    G = lift_identity(cycle_graph(6), 1)
    with pytest.raises(TooLargeError):
        cheeger_constants(G, n_exhaustive=5)


def test_cheeger_lower_bounds_k2_equality():
    G = lift_identity(unit_graph(2, [(0, 1)]), 2)
    trace_rep, loewner_rep = check_cheeger_lower_bounds(G)
    # h_tr = 2 and (1/2d) sum lambda_{k+i} = (1/2)(2+2) = 2
    assert float(trace_rep.lhs) == pytest.approx(2.0, abs=1e-12)
    assert float(trace_rep.rhs) == pytest.approx(2.0, abs=1e-12)
    assert trace_rep.holds and loewner_rep.holds


def test_cheeger_lower_bounds_complete_lift_strict():
    G = lift_identity(complete_graph(5), 2)
    trace_rep, loewner_rep = check_cheeger_lower_bounds(G)
    assert trace_rep.holds and loewner_rep.holds
    assert trace_rep.slack > 0.1


def test_cheeger_lower_bounds_counterexample_trivial():
    # kernel dimension 4 = 2k makes lambda_{k+1} = 0: bounds trivially hold
    G = k33_latin_mwg()
    trace_rep, loewner_rep = check_cheeger_lower_bounds(G)
    assert trace_rep.holds and loewner_rep.holds
    assert float(trace_rep.lhs) == pytest.approx(0.0, abs=1e-10)
    assert float(loewner_rep.lhs) == pytest.approx(0.0, abs=1e-10)


def test_cheeger_lower_bounds_exhaustive_lifts():
    for scalar in (complete_graph(4), cycle_graph(6), complete_graph(6)):
        for k in (1, 2):
            G = lift_identity(scalar, k)
            trace_rep, loewner_rep = check_cheeger_lower_bounds(G)
            assert trace_rep.holds and loewner_rep.holds


# --- counterexample certificate ----------------------------------------------


def test_counterexample_k33_latin_certifies():
    cert = verify_counterexample(k33_latin_mwg())
    assert cert.kernel_dim == 4
    assert cert.min_boundary_rank == 2
    assert cert.alpha > 0.0
    assert cert.h_trace > 0.0
    assert cert.holds


def test_counterexample_k4_abc_fails():
    # K4 with the three line projections has kernel dimension 2, not 4
    cert = verify_counterexample(k4_abc_mwg())
    assert cert.kernel_dim == 2
    assert not cert.holds


def test_counterexample_identity_weighted_fails():
    G = lift_identity(complete_graph(4), 2)
    cert = verify_counterexample(G)
    assert cert.kernel_dim == 2  # = k < 2k
    assert not cert.holds


def test_counterexample_disconnected_fails():
    G = lift_identity(unit_graph(4, [(0, 1), (2, 3)]), 2)
    cert = verify_counterexample(G)
    assert cert.min_boundary_rank == 0
    assert not cert.holds
