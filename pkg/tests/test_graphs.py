import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from virialkit.graphs import (
    ColouredGraph,
    Graph,
    articulation_points,
    block_cut_tree,
    block_decomposition,
    canonical_colouring,
    canonical_coloured_key,
    dissymmetry_check,
    enumerate_graphs,
    graph_from_json,
    graph_to_json,
    coloured_graph_from_json,
    is_connected,
    is_two_connected,
)
from virialkit.series import MultiIndex

TRIANGLE = Graph.from_edges(3, [(1, 2), (2, 3), (1, 3)])
PATH3 = Graph.from_edges(3, [(1, 2), (2, 3)])
EDGE = Graph.from_edges(2, [(1, 2)])
TRIANGLE_PENDANT = Graph.from_edges(4, [(1, 2), (2, 3), (1, 3), (3, 4)])


def test_graph_validation():
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(1, 1)])
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(1, 4)])
    g = Graph.from_edges(3, [(3, 1), (1, 3)])  # normalized, deduplicated
    assert g.edges == frozenset({(1, 3)})


def test_is_connected_examples():
    assert is_connected(Graph.from_edges(1, []))  # single vertex counts as connected
    assert not is_connected(Graph.from_edges(2, []))
    assert is_connected(PATH3)
    assert not is_connected(Graph.from_edges(0, []))


def test_is_two_connected_examples():
    assert is_two_connected(EDGE)  # deleting either endpoint leaves one connected vertex
    assert not is_two_connected(PATH3)
    assert is_two_connected(TRIANGLE)
    assert not is_two_connected(Graph.from_edges(1, []))
    assert not is_two_connected(Graph.from_edges(2, []))


def test_articulation_points_examples():
    assert articulation_points(TRIANGLE) == frozenset()
    assert articulation_points(PATH3) == frozenset({2})
    assert articulation_points(TRIANGLE_PENDANT) == frozenset({3})
    with pytest.raises(ValueError):
        articulation_points(Graph.from_edges(2, []))


def test_block_decomposition_triangle():
    d = block_decomposition(TRIANGLE)
    assert len(d.blocks) == 1
    assert d.blocks[0].vertices == (1, 2, 3)
    assert d.blocks[0].edges == TRIANGLE.edges
    assert d.articulation_points == frozenset()


def test_block_decomposition_path():
    d = block_decomposition(PATH3)
    assert sorted(b.edges for b in d.blocks) == [frozenset({(1, 2)}), frozenset({(2, 3)})]
    assert d.articulation_points == frozenset({2})


def test_block_decomposition_triangle_pendant():
    d = block_decomposition(TRIANGLE_PENDANT)
    assert len(d.blocks) == 2
    edge_sets = sorted(sorted(b.edges) for b in d.blocks)
    assert edge_sets == [[(1, 2), (1, 3), (2, 3)], [(3, 4)]]


def test_block_decomposition_errors():
    with pytest.raises(ValueError):
        block_decomposition(Graph.from_edges(1, []))
    with pytest.raises(ValueError):
        block_decomposition(Graph.from_edges(3, [(1, 2)]))


def test_block_cut_tree_examples():
    t = block_cut_tree(block_decomposition(TRIANGLE))
    assert t.block_count == 1 and t.cut_vertices == () and t.edges == ()
    t = block_cut_tree(block_decomposition(PATH3))
    assert t.block_count == 2 and t.cut_vertices == (2,) and len(t.edges) == 2
    bowtie = Graph.from_edges(5, [(1, 2), (2, 3), (1, 3), (3, 4), (4, 5), (3, 5)])
    t = block_cut_tree(block_decomposition(bowtie))
    assert t.block_count == 2 and t.cut_vertices == (3,) and len(t.edges) == 2


def test_dissymmetry_examples():
    assert dissymmetry_check(TRIANGLE) == (4, 4)
    assert dissymmetry_check(PATH3) == (5, 5)
    assert dissymmetry_check(TRIANGLE_PENDANT) == (6, 6)


def test_enumerate_counts_small():
    assert sum(1 for _ in enumerate_graphs(3, "connected")) == 4
    assert sum(1 for _ in enumerate_graphs(4, "connected")) == 38
    assert sum(1 for _ in enumerate_graphs(4, "two_connected")) == 10
    assert sum(1 for _ in enumerate_graphs(2, "two_connected")) == 1
    for n in range(1, 6):
        assert sum(1 for _ in enumerate_graphs(n, "all")) == 2 ** (n * (n - 1) // 2)


def test_enumerate_cap_and_class():
    with pytest.raises(ValueError):
        list(enumerate_graphs(9, "all"))
    with pytest.raises(ValueError):
        list(enumerate_graphs(3, "planar"))


def test_canonical_colouring_examples():
    assert canonical_colouring(MultiIndex({1: 2})) == (1, 1)
    assert canonical_colouring(MultiIndex({1: 1, 2: 2})) == (1, 2, 2)
    assert canonical_colouring(MultiIndex({3: 3})) == (3, 3, 3)
    with pytest.raises(ValueError):
        canonical_colouring(MultiIndex())


def test_exhaustive_block_identities_up_to_5():
    # block-size identity, edge partition, vertex cover, and the articulation
    # characterisation of two-connectivity, over every connected graph
    for n in range(2, 6):
        for g in enumerate_graphs(n, "connected"):
            d = block_decomposition(g)
            assert sum(b.size - 1 for b in d.blocks) == n - 1
            lhs, rhs = dissymmetry_check(g)
            assert lhs == rhs
            all_edges = [e for b in d.blocks for e in b.edges]
            assert len(all_edges) == len(set(all_edges)) == len(g.edges)
            assert set(e for b in d.blocks for e in b.edges) == set(g.edges)
            assert set(v for b in d.blocks for v in b.vertices) == set(range(1, n + 1))
            # each articulation point in >= 2 blocks, others in exactly 1
            for v in range(1, n + 1):
                holding = sum(1 for b in d.blocks if v in b.vertices)
                if v in d.articulation_points:
                    assert holding >= 2
                else:
                    assert holding == 1
            assert is_two_connected(g) == (not articulation_points(g))
            block_cut_tree(d)  # asserts the tree property internally


def test_canonical_key_invariant_under_colour_preserving_relabelling():
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randint(2, 6)
        pairs = list(itertools.combinations(range(1, n + 1), 2))
        edges = [p for p in pairs if rng.random() < 0.5]
        colours = tuple(rng.randint(1, 3) for _ in range(n))
        g = Graph.from_edges(n, edges)
        key = canonical_coloured_key(n, g.to_mask(), colours)
        # colour-preserving relabelling: permute within colour classes
        perm = list(range(1, n + 1))
        by_colour = {}
        for v in range(1, n + 1):
            by_colour.setdefault(colours[v - 1], []).append(v)
        for group in by_colour.values():
            shuffled = group[:]
            rng.shuffle(shuffled)
            for a, b in zip(group, shuffled):
                perm[a - 1] = b
        g2 = Graph.from_edges(n, [(perm[i - 1], perm[j - 1]) for i, j in edges])
        colours2 = tuple(colours[perm.index(v + 1)] for v in range(n))
        assert colours2 == colours  # the relabelling preserved colours
        assert canonical_coloured_key(n, g2.to_mask(), colours2) == key


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 10 - 1))
def test_connectivity_matches_independent_bfs_n5(mask):
    # independent reachability oracle on plain adjacency sets
    g = Graph.from_mask(5, mask)
    adj = {v: set() for v in range(1, 6)}
    for i, j in g.edges:
        adj[i].add(j)
        adj[j].add(i)
    seen = {1}
    frontier = [1]
    while frontier:
        v = frontier.pop()
        for w in adj[v] - seen:
            seen.add(w)
            frontier.append(w)
    assert is_connected(g) == (len(seen) == 5)


def test_graph_json_round_trip():
    doc = graph_to_json(TRIANGLE_PENDANT)
    assert doc == {"n": 4, "edges": [[1, 2], [1, 3], [2, 3], [3, 4]]}
    assert graph_from_json(json.loads(json.dumps(doc))) == TRIANGLE_PENDANT
    cg = coloured_graph_from_json({"n": 2, "edges": [[1, 2]], "colours": [1, 2]})
    assert cg == ColouredGraph(EDGE, (1, 2))
    assert coloured_graph_from_json({"n": 2, "edges": [[1, 2]]}).colours == (1, 1)
