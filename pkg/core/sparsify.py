"""
sparsify.py

Purpose:
--------
Reduce the term count of a spin Hamiltonian for depth-limited circuits.

This module:
- truncate_by_weight: keep the largest-|c| terms
- preservation_rate: how often truncation keeps the brute-force ground state
- randomized_tail: keep the head verbatim, replace the small-|c| tail by a
  few surrogate rotations sampled proportionally to |c|
- map_heavy_hex: place variables on a heavy-hex graph, keep the terms whose
  routing cost fits a SWAP budget, estimate the resulting depth

It does NOT:
- Transpile circuits or model gate calibration
- Change the offset

Invariants:
-----------
1. No dropped term outweighs a kept term under truncation
2. Placement is injective and independent of the SWAP budget, so retained
   terms and depth are non-decreasing in the budget
3. First-order terms are never dropped by the heavy-hex mapping

Routing cost of a term placed on nodes P is the edge count of a minimum
Steiner tree spanning P minus (|P| - 1): zero iff P is already connected.
"""

import logging
from dataclasses import dataclass, field
from math import ceil
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from networkx.algorithms.approximation import steiner_tree

from core.classical import brute_force
from core.errors import UsageError
from core.heavy_hex import HeavyHexGraph
from core.pcbo import SpinHamiltonian, Term

logger = logging.getLogger(__name__)


# =============================================================================
# Domain Exceptions
# =============================================================================

class SparsifyError(UsageError):
    """Base exception for sparsification contract violations."""
    pass


class InsufficientNodes(SparsifyError):
    """Raised when a graph has fewer physical nodes than program variables."""
    pass


# =============================================================================
# Domain Types
# =============================================================================

@dataclass
class SparsifyReport:
    kept_by_order: Dict[int, int] = field(default_factory=dict)
    dropped_by_order: Dict[int, int] = field(default_factory=dict)
    retained_weight_fraction: float = 1.0
    surrogate_insertions: int = 0

    def ratio_by_order(self) -> Dict[int, float]:
        """Kept / original term count per order (1.0 for absent orders)."""
        orders = sorted(set(self.kept_by_order) | set(self.dropped_by_order))
        ratios = {}
        for order in orders:
            kept = self.kept_by_order.get(order, 0)
            total = kept + self.dropped_by_order.get(order, 0)
            ratios[order] = kept / total if total else 1.0
        return ratios


@dataclass(frozen=True)
class MappedTerm:
    term: Term
    nodes: Tuple[int, ...]
    routing_cost: int
    retained: bool


@dataclass
class Layout:
    graph: HeavyHexGraph
    placement: Dict[int, int]
    mapped_terms: List[MappedTerm] = field(default_factory=list)
    max_swap_cost: int = 0
    depth_estimate: int = 0


def _report(
    original: SpinHamiltonian,
    kept: Sequence[Term],
    surrogates: int = 0,
) -> SparsifyReport:
    kept_set = set(kept)
    report = SparsifyReport(surrogate_insertions=surrogates)
    total = original.coefficient_mass()
    retained = 0.0
    for term, coefficient in original.terms.items():
        bucket = report.kept_by_order if term in kept_set else report.dropped_by_order
        bucket[len(term)] = bucket.get(len(term), 0) + 1
        if term in kept_set:
            retained += abs(coefficient)
    report.retained_weight_fraction = retained / total if total > 0 else 1.0
    return report


def _by_weight(hamiltonian: SpinHamiltonian) -> List[Term]:
    return sorted(hamiltonian.terms, key=lambda t: (-abs(hamiltonian.terms[t]), t))


# =============================================================================
# Weight-based sparsification
# =============================================================================

def truncate_by_weight(
    hamiltonian: SpinHamiltonian,
    keep: Union[int, float],
) -> Tuple[SpinHamiltonian, SparsifyReport]:
    """
    Keep the top terms by |coefficient| (ties: lexicographic tuple order).

    An int `keep` is a term count; a float is a fraction in (0, 1], rounded
    up to a count.
    """
    total = len(hamiltonian.terms)
    if isinstance(keep, float):
        if not 0.0 < keep <= 1.0:
            raise SparsifyError(f"keep fraction must lie in (0, 1], got {keep}")
        count = ceil(keep * total)
    else:
        if not 1 <= keep <= max(total, 1):
            raise SparsifyError(f"keep count must lie in [1, {total}], got {keep}")
        count = int(keep)

    kept = _by_weight(hamiltonian)[:count]
    sparse = SpinHamiltonian(
        num_vars=hamiltonian.num_vars,
        terms={term: hamiltonian.terms[term] for term in kept},
        offset=hamiltonian.offset,
    )
    return sparse, _report(hamiltonian, kept)


def randomized_tail(
    hamiltonian: SpinHamiltonian,
    threshold: float,
    budget: int,
    seed: int,
    surrogate_angle: Optional[float] = None,
) -> Tuple[SpinHamiltonian, SparsifyReport]:
    """
    Terms with |c| >= threshold stay verbatim. From the tail, `budget`
    terms are drawn without replacement with probability proportional to
    |c| and re-weighted to sign(c) * surrogate_angle; the rest is dropped.

    The surrogate angle defaults to tail mass / budget, so the sampled
    rotations carry the tail's total weight.
    """
    if threshold <= 0:
        raise SparsifyError(f"threshold must be > 0, got {threshold}")
    if budget < 0:
        raise SparsifyError(f"budget must be >= 0, got {budget}")

    head = {t: c for t, c in hamiltonian.terms.items() if abs(c) >= threshold}
    tail = [t for t in hamiltonian.terms if abs(hamiltonian.terms[t]) < threshold]
    weights = np.array([abs(hamiltonian.terms[t]) for t in tail], dtype=float)
    mass = float(weights.sum())

    terms = dict(head)
    sampled: List[Term] = []
    if budget > 0 and tail:
        angle = surrogate_angle if surrogate_angle is not None else mass / budget
        if budget >= len(tail):
            sampled = list(tail)
        else:
            rng = np.random.default_rng(seed)
            picks = rng.choice(len(tail), size=budget, replace=False, p=weights / mass)
            sampled = [tail[i] for i in sorted(picks)]
        for term in sampled:
            terms[term] = float(np.sign(hamiltonian.terms[term])) * angle

    sparse = SpinHamiltonian(num_vars=hamiltonian.num_vars, terms=terms, offset=hamiltonian.offset)
    return sparse, _report(hamiltonian, list(head) + sampled, surrogates=len(sampled))


def ground_state_preserved(original: SpinHamiltonian, sparsified: SpinHamiltonian) -> bool:
    """True when both Hamiltonians share the canonical brute-force ground state."""
    return bool(np.array_equal(brute_force(original)[0], brute_force(sparsified)[0]))


def preservation_rate(hamiltonians: Sequence[SpinHamiltonian], keep: Union[int, float] = 0.5) -> float:
    """Fraction of instances whose ground state survives truncate_by_weight(h, keep)."""
    if not hamiltonians:
        raise SparsifyError("no instances to measure")
    preserved = sum(
        ground_state_preserved(hamiltonian, truncate_by_weight(hamiltonian, keep)[0])
        for hamiltonian in hamiltonians
    )
    logger.info("Ground state preserved in %d of %d instances (keep=%s)", preserved, len(hamiltonians), keep)
    return preserved / len(hamiltonians)


# =============================================================================
# Heavy-hex mapping
# =============================================================================

class _Router:
    """Steiner costs and supports on one graph, backed by a distance table."""

    def __init__(self, graph: HeavyHexGraph):
        self.graph = graph
        self.distances = graph.distances()

    def cost(self, nodes: Sequence[int]) -> int:
        return len(self.support(nodes)) - len(nodes)

    def candidate_costs(self, placed: Sequence[int], candidates: np.ndarray) -> np.ndarray:
        """Routing cost of placed + [c] for every candidate node c (placed has <= 2 nodes)."""
        base = self.distances[list(placed)].sum(axis=0) if placed else np.zeros(self.distances.shape[0])
        # Steiner tree edges for <= 3 terminals = min over a hub of summed distances.
        edges = (base[np.newaxis, :] + self.distances[candidates]).min(axis=1)
        return edges - len(placed)

    def support(self, nodes: Sequence[int]) -> FrozenSet[int]:
        """Nodes of a minimum connecting tree (exact for <= 3 terminals)."""
        nodes = list(nodes)
        if len(nodes) == 1:
            return frozenset(nodes)
        if len(nodes) == 2:
            return frozenset(nx.shortest_path(self.graph.graph, nodes[0], nodes[1]))
        if len(nodes) == 3:
            hub = int(np.argmin(self.distances[nodes].sum(axis=0)))
            path_nodes = set()
            for node in nodes:
                path_nodes.update(nx.shortest_path(self.graph.graph, node, hub))
            return frozenset(path_nodes)
        return frozenset(steiner_tree(self.graph.graph, nodes).nodes)


def _place(hamiltonian: SpinHamiltonian, router: _Router) -> Dict[int, int]:
    """
    Greedy placement in descending third-order weight: each unplaced
    member of a cubic term goes to the free node that minimizes the term's
    routing cost (lowest node id on ties). Variables outside cubic terms
    follow in index order, next to their heaviest placed quadratic
    partner.
    """
    num_nodes = router.distances.shape[0]
    free = np.ones(num_nodes, dtype=bool)
    placement: Dict[int, int] = {}

    def put(variable: int, anchors: List[int]) -> None:
        candidates = np.flatnonzero(free)
        if anchors:
            costs = router.candidate_costs(anchors[:2], candidates)
        elif placement:
            # Stay compact: closest free node to anything already placed.
            costs = router.distances[np.ix_(candidates, list(placement.values()))].min(axis=1)
        else:
            costs = np.zeros(candidates.shape[0])
        node = int(candidates[int(np.argmin(costs))])
        placement[variable] = node
        free[node] = False

    cubic = sorted(
        (t for t in hamiltonian.terms if len(t) == 3),
        key=lambda t: (-abs(hamiltonian.terms[t]), t),
    )
    for term in cubic:
        for variable in term:
            if variable not in placement:
                put(variable, [placement[v] for v in term if v in placement])

    for variable in range(hamiltonian.num_vars):
        if variable in placement:
            continue
        partners = sorted(
            (t for t in hamiltonian.terms if len(t) == 2 and variable in t),
            key=lambda t: (-abs(hamiltonian.terms[t]), t),
        )
        anchors = [placement[v] for t in partners for v in t if v != variable and v in placement]
        put(variable, anchors[:1])
    return placement


def estimate_depth(layout: Layout, retained: SpinHamiltonian) -> int:
    """
    As-soon-as-possible schedule of the retained multi-qubit terms.

    A weight-w term placed with routing cost r occupies every node of its
    connecting tree for 2(w - 1) + 1 + 2r layers (CNOT ladder down, phase,
    ladder up, SWAPs in and out). Terms are scheduled in canonical term
    order; terms on disjoint nodes share layers. Single-qubit terms are
    absorbed.
    """
    router = _Router(layout.graph)
    available: Dict[int, int] = {}
    depth = 0
    for term in retained.terms:
        if len(term) < 2:
            continue
        nodes = [layout.placement[v] for v in term]
        support = router.support(nodes)
        duration = 2 * (len(term) - 1) + 1 + 2 * (len(support) - len(nodes))
        start = max((available.get(n, 0) for n in support), default=0)
        for node in support:
            available[node] = start + duration
        depth = max(depth, start + duration)
    return depth


def map_heavy_hex(
    hamiltonian: SpinHamiltonian,
    graph: HeavyHexGraph,
    max_swap_cost: int,
) -> Tuple[Layout, SpinHamiltonian, SparsifyReport]:
    """
    Place, route and sparsify for a heavy-hex device.

    A multi-qubit term is retained iff its routing cost <= max_swap_cost;
    first-order terms are always retained.

    Raises:
    -------
    InsufficientNodes
        If the graph has fewer nodes than the Hamiltonian has variables.
    """
    if max_swap_cost < 0:
        raise SparsifyError(f"max_swap_cost must be >= 0, got {max_swap_cost}")
    num_nodes = graph.graph.number_of_nodes()
    if num_nodes < hamiltonian.num_vars:
        raise InsufficientNodes(
            f"{hamiltonian.num_vars} variables do not fit on {num_nodes} physical nodes"
        )

    router = _Router(graph)
    placement = _place(hamiltonian, router)

    mapped: List[MappedTerm] = []
    kept: Dict[Term, float] = {}
    for term, coefficient in hamiltonian.terms.items():
        nodes = tuple(placement[v] for v in term)
        cost = router.cost(nodes)
        retained = len(term) == 1 or cost <= max_swap_cost
        mapped.append(MappedTerm(term=term, nodes=nodes, routing_cost=cost, retained=retained))
        if retained:
            kept[term] = coefficient

    sparse = SpinHamiltonian(num_vars=hamiltonian.num_vars, terms=kept, offset=hamiltonian.offset)
    layout = Layout(graph=graph, placement=placement, mapped_terms=mapped, max_swap_cost=max_swap_cost)
    layout.depth_estimate = estimate_depth(layout, sparse)
    logger.info(
        "Heavy-hex mapping at budget %d kept %d of %d terms, depth %d",
        max_swap_cost, len(kept), len(hamiltonian.terms), layout.depth_estimate,
    )
    return layout, sparse, _report(hamiltonian, list(kept))
