"""
heavy_hex.py

Purpose:
--------
Heavy-hex qubit connectivity: a honeycomb tiling with one extra qubit on
every honeycomb edge. Honeycomb vertices keep degree <= 3 and every edge
qubit has degree 2.

Nodes are relabelled to integers: honeycomb vertices first (sorted by
lattice coordinate), then edge qubits (sorted by their endpoints), so ids
are stable across runs and networkx versions.
"""

from dataclasses import dataclass
from typing import Tuple

import networkx as nx
import numpy as np

from core.errors import UsageError


class HeavyHexError(UsageError):
    """Raised when a tiling is requested with a zero dimension."""
    pass


@dataclass(frozen=True)
class HeavyHexGraph:
    graph: nx.Graph
    dimensions: Tuple[int, int]

    @property
    def nodes(self) -> Tuple[int, ...]:
        return tuple(sorted(self.graph.nodes))

    @property
    def edges(self) -> Tuple[Tuple[int, int], ...]:
        return tuple(sorted(tuple(sorted(e)) for e in self.graph.edges))

    def distances(self) -> np.ndarray:
        """All-pairs hop distances as a dense (V, V) array."""
        size = self.graph.number_of_nodes()
        table = np.zeros((size, size), dtype=np.int64)
        for source, lengths in nx.all_pairs_shortest_path_length(self.graph):
            for target, length in lengths.items():
                table[source, target] = length
        return table


def heavy_hex_graph(rows: int, cols: int) -> HeavyHexGraph:
    """
    Heavy-hex tiling of rows x cols hexagons.

    A 1 x 1 tiling is a single 12-cycle; from 1 x 2 on, shared hexagon
    edges create degree-3 nodes.
    """
    if rows < 1 or cols < 1:
        raise HeavyHexError(f"rows and cols must be >= 1, got ({rows}, {cols})")

    honeycomb = nx.hexagonal_lattice_graph(rows, cols, with_positions=False)
    vertices = sorted(honeycomb.nodes)
    links = sorted(tuple(sorted(e)) for e in honeycomb.edges)

    index = {vertex: i for i, vertex in enumerate(vertices)}
    graph = nx.Graph()
    graph.add_nodes_from(range(len(vertices) + len(links)))
    for offset, (u, v) in enumerate(links):
        middle = len(vertices) + offset
        graph.add_edge(index[u], middle)
        graph.add_edge(middle, index[v])
    return HeavyHexGraph(graph=graph, dimensions=(rows, cols))


def heavy_hex_counts(rows: int, cols: int) -> Tuple[int, int]:
    """
    Closed-form (nodes, edges) of heavy_hex_graph(rows, cols).

    The honeycomb has (cols + 1)(2 rows + 2) - 2 vertices and
    (cols + 1)(2 rows + 1) + cols (rows + 1) - 2 edges; subdividing adds
    one node per edge and doubles the edge count.
    """
    vertices = (cols + 1) * (2 * rows + 2) - 2
    links = (cols + 1) * (2 * rows + 1) + cols * (rows + 1) - 2
    return vertices + links, 2 * links
