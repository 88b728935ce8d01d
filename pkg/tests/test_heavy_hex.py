# tests/test_heavy_hex.py

import networkx as nx
import pytest

from core.heavy_hex import HeavyHexError, heavy_hex_counts, heavy_hex_graph


def test_single_hexagon_is_a_twelve_cycle():
    graph = heavy_hex_graph(1, 1)

    assert graph.graph.number_of_nodes() == 12
    assert all(degree == 2 for _, degree in graph.graph.degree)
    assert nx.is_connected(graph.graph)


def test_counts_match_closed_form():
    for rows, cols in [(1, 1), (1, 2), (2, 2), (2, 3), (3, 4)]:
        graph = heavy_hex_graph(rows, cols)

        assert (graph.graph.number_of_nodes(), graph.graph.number_of_edges()) == heavy_hex_counts(rows, cols)


def test_degree_bounds_and_connectivity():
    graph = heavy_hex_graph(2, 3).graph
    degrees = dict(graph.degree)

    assert max(degrees.values()) == 3
    assert nx.is_connected(graph)
    # subdivision leaves the graph bipartite: vertices on one side, edge qubits on the other
    assert nx.is_bipartite(graph)


def test_edge_qubits_have_degree_two():
    rows, cols = 2, 2
    graph = heavy_hex_graph(rows, cols).graph
    vertices = (cols + 1) * (2 * rows + 2) - 2

    assert all(graph.degree[n] == 2 for n in range(vertices, graph.number_of_nodes()))
    assert all(graph.degree[n] in (2, 3) for n in range(vertices))


def test_node_ids_are_stable():
    first = heavy_hex_graph(2, 2)
    second = heavy_hex_graph(2, 2)

    assert first.edges == second.edges
    assert first.nodes == tuple(range(first.graph.number_of_nodes()))


def test_distance_table_is_symmetric_hop_count():
    graph = heavy_hex_graph(1, 2)
    table = graph.distances()

    assert (table == table.T).all()
    assert table[0, 0] == 0
    assert table.max() == nx.diameter(graph.graph)
    for u, v in graph.edges:
        assert table[u, v] == 1


def test_zero_dimension_rejected():
    with pytest.raises(HeavyHexError):
        heavy_hex_graph(0, 2)
