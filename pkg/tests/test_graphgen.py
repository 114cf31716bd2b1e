import itertools

from mwgraph.graphgen import (
    canonical_code,
    code_to_edges,
    enumerate_regular_graphs,
    graph6_like,
    is_connected_edges,
    proper_colorings,
)
from mwgraph.graphs import BaseGraph

from conftest import petersen_graph


def relabel(edges, perm):
    return [(perm[u], perm[v]) for u, v in edges]


def test_canonical_code_invariant_under_relabeling(rng):
    for _ in range(40):
        n = int(rng.integers(2, 8))
        edges = [(u, v) for u, v in itertools.combinations(range(n), 2)
                 if rng.random() < 0.5]
        code = canonical_code(n, edges)
        perm = list(rng.permutation(n))
        assert canonical_code(n, relabel(edges, perm)) == code


def test_canonical_code_separates_nonisomorphic():
    path = [(0, 1), (1, 2), (2, 3)]
    star = [(0, 1), (0, 2), (0, 3)]
    assert canonical_code(4, path) != canonical_code(4, star)


def test_code_to_edges_roundtrip(rng):
    for _ in range(30):
        n = int(rng.integers(2, 8))
        edges = [(u, v) for u, v in itertools.combinations(range(n), 2)
                 if rng.random() < 0.4]
        code = canonical_code(n, edges)
        rebuilt = code_to_edges(n, code)
        assert canonical_code(n, rebuilt) == code
        assert len(rebuilt) == len(edges)


def test_graph6_known_strings():
    # K1, K2, the triangle, and K4 have well-known graph6 encodings
    assert graph6_like(1, canonical_code(1, [])) == "@"
    assert graph6_like(2, canonical_code(2, [(0, 1)])) == "A_"
    assert graph6_like(3, canonical_code(3, [(0, 1), (1, 2), (0, 2)])) == "Bw"
    assert graph6_like(4, canonical_code(4, list(itertools.combinations(range(4), 2)))) == "C~"


def test_enumerate_cubic_counts():
    assert len(enumerate_regular_graphs(4, 3)) == 1
    assert len(enumerate_regular_graphs(5, 3)) == 0  # odd n * odd r
    assert len(enumerate_regular_graphs(6, 3)) == 2
    assert len(enumerate_regular_graphs(8, 3)) == 5


def test_enumerate_quartic_counts():
    assert len(enumerate_regular_graphs(5, 4)) == 1
    assert len(enumerate_regular_graphs(6, 4)) == 1
    assert len(enumerate_regular_graphs(7, 4)) == 2
    assert len(enumerate_regular_graphs(8, 4)) == 6


def test_enumerate_cycles():
    for n in (3, 4, 5, 6):
        graphs = enumerate_regular_graphs(n, 2)
        assert len(graphs) == 1
        assert len(graphs[0].edges) == n


def test_enumerate_counts_match_atlas():
    # independent oracle: the networkx atlas of all graphs on <= 7 vertices
    import networkx as nx

    atlas = nx.graph_atlas_g()
    for n, r in [(4, 3), (6, 3), (5, 4), (6, 4), (7, 4), (5, 2), (6, 2), (7, 2)]:
        count = 0
        for g in atlas:
            if g.number_of_nodes() != n or g.number_of_nodes() == 0:
                continue
            degs = [d for _, d in g.degree()]
            if degs and all(d == r for d in degs) and nx.is_connected(g):
                count += 1
        assert len(enumerate_regular_graphs(n, r)) == count


def test_enumerated_graphs_are_regular_connected_distinct():
    graphs = enumerate_regular_graphs(8, 3)
    codes = set()
    for g in graphs:
        assert all(d == 3 for d in g.geometric_degrees())
        assert is_connected_edges(8, g.edges)
        codes.add(canonical_code(8, g.edges))
    assert len(codes) == len(graphs)


def test_enumeration_deterministic_order():
    first = enumerate_regular_graphs(8, 4)
    second = enumerate_regular_graphs(8, 4)
    assert [g.edges for g in first] == [g.edges for g in second]


def count_latin_squares(order):
    """Independent oracle: rows are permutations, columns all-distinct."""
    perms = list(itertools.permutations(range(order)))
    count = 0
    for rows in itertools.product(perms, repeat=order):
        if all(len({rows[i][j] for i in range(order)}) == order
               for j in range(order)):
            count += 1
    return count


def test_colorings_of_complete_bipartite_are_latin_squares():
    k33 = BaseGraph.from_edges(6, [(i, 3 + j) for i in range(3) for j in range(3)])
    assert len(proper_colorings(k33, 3)) == count_latin_squares(3) == 12
    k44 = BaseGraph.from_edges(8, [(i, 4 + j) for i in range(4) for j in range(4)])
    assert len(proper_colorings(k44, 4)) == count_latin_squares(4) == 576


def test_colorings_k4():
    k4 = BaseGraph.from_edges(4, itertools.combinations(range(4), 2))
    colorings = proper_colorings(k4, 3)
    assert len(colorings) == 6  # 3! assignments of colors to perfect matchings
    for colors in colorings:
        at_vertex = {}
        for (u, v), c in zip(k4.edges, colors):
            assert c not in at_vertex.setdefault(u, set())
            assert c not in at_vertex.setdefault(v, set())
            at_vertex[u].add(c)
            at_vertex[v].add(c)


def test_colorings_odd_cycle_empty():
    c5 = BaseGraph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])
    assert proper_colorings(c5, 2) == []


def test_colorings_petersen_not_three_colorable():
    assert proper_colorings(petersen_graph(), 3) == []
