"""
selection.py

Purpose:
--------
Feature selection workflows on top of the PCBO builders and solvers.

grouped_selection repeatedly splits the surviving features into groups,
solves one PCBO per group and passes the selected features on to the
next round, until the target size is reached. Large feature sets thus
never produce a single large problem.

This module:
- Splits features into groups ("random" shuffle or "relevance" ranking)
- Allocates a per-group selection size that shrinks the pool every round
- Repairs solver outputs that miss their cardinality target

It does NOT:
- Build formulations (a builder callable is passed in)
- Choose the solver (a SubsetSolver is passed in)
"""

import logging
from dataclasses import dataclass, field
from math import ceil
from typing import Callable, List, Sequence, Tuple

import numpy as np

from core.classical import TabuConfig, brute_force_subset, tabu_search
from core.dataset import FeatureMatrix, subsample_features
from core.errors import UsageError
from core.infotheory import EntropyCache
from core.pcbo import (
    DEFAULT_LAMBDA_C,
    PolyBinaryProblem,
    apply_cardinality_penalty,
    evaluate_binary,
    selected_features,
    spins_to_bits,
    to_spin,
)
from repositories.protocols import SubsetSolver

logger = logging.getLogger(__name__)

GROUPINGS = ("random", "relevance")

# (sub-matrix, k) -> problem with cardinality k
ProblemBuilder = Callable[[FeatureMatrix, int], PolyBinaryProblem]


class SelectionError(UsageError):
    """Raised when a selection request is outside its contract."""
    pass


@dataclass
class SelectionRound:
    round: int
    pool_size: int
    group_sizes: List[int]
    selected: List[int]


@dataclass
class SelectionResult:
    features: Tuple[int, ...]
    names: Tuple[str, ...]
    rounds: List[SelectionRound] = field(default_factory=list)


# =============================================================================
# Subset solvers
# =============================================================================

def repair_cardinality(problem: PolyBinaryProblem, bits: Sequence[int]) -> np.ndarray:
    """
    Greedily move `bits` onto |x|_1 = n: drop the feature whose removal
    lowers Q most, or add the one that raises Q least, until feasible.
    """
    if problem.cardinality is None:
        raise SelectionError("repair needs a cardinality target")
    bits = np.array(bits, dtype=np.int64)

    def moved(i: int) -> float:
        trial = bits.copy()
        trial[i] ^= 1
        return evaluate_binary(problem, trial)

    while bits.sum() != problem.cardinality:
        on = bits.sum() > problem.cardinality
        candidates = np.flatnonzero(bits == (1 if on else 0))
        best = min(candidates, key=lambda i: (moved(int(i)), int(i)))
        bits[best] ^= 1
    return bits


def exact_subset_solver(problem: PolyBinaryProblem) -> np.ndarray:
    return brute_force_subset(problem)[0]


def penalized_tabu_solver(lambda_c: float = DEFAULT_LAMBDA_C, seed: int = 0) -> SubsetSolver:
    """Soft-penalty spin form, tabu search, then cardinality repair."""

    def solve(problem: PolyBinaryProblem) -> np.ndarray:
        hamiltonian = to_spin(apply_cardinality_penalty(problem, lambda_c))
        result = tabu_search(hamiltonian, TabuConfig(seed=seed))
        return repair_cardinality(problem, spins_to_bits(result.spins))

    return solve


# =============================================================================
# Grouping
# =============================================================================

def _groups(
    matrix: FeatureMatrix,
    pool: List[int],
    group_size: int,
    grouping: str,
    rng: np.random.Generator,
) -> List[List[int]]:
    if grouping == "random":
        ordered = [pool[i] for i in rng.permutation(len(pool))]
    else:
        cache = EntropyCache(matrix)
        ordered = sorted(pool, key=lambda j: (-cache.relevance([j]), j))
    return [sorted(ordered[start:start + group_size]) for start in range(0, len(ordered), group_size)]


def _allocate(groups: List[List[int]], total: int) -> List[int]:
    """Per-group selection sizes summing to `total`, proportional to size."""
    pool = sum(len(g) for g in groups)
    sizes = [len(g) * total // pool for g in groups]
    index = 0
    while sum(sizes) < total:
        if sizes[index] < len(groups[index]):
            sizes[index] += 1
        index = (index + 1) % len(groups)
    return sizes


def grouped_selection(
    matrix: FeatureMatrix,
    builder: ProblemBuilder,
    *,
    group_size: int,
    target: int,
    solver: SubsetSolver = exact_subset_solver,
    grouping: str = "random",
    seed: int = 0,
) -> SelectionResult:
    """
    Shrink the feature pool group by group until `target` features remain.

    Every round keeps max(target, ceil(pool / 2)) features, so the pool
    shrinks strictly; once it fits in one group the last problem selects
    exactly `target`.
    """
    if grouping not in GROUPINGS:
        raise SelectionError(f"Unknown grouping: '{grouping}'. Allowed: {list(GROUPINGS)}")
    if group_size < 2:
        raise SelectionError(f"group_size must be >= 2, got {group_size}")
    if not 1 <= target <= matrix.num_features:
        raise SelectionError(f"target must lie in [1, {matrix.num_features}], got {target}")

    rng = np.random.default_rng(seed)
    pool = list(range(matrix.num_features))
    rounds: List[SelectionRound] = []

    while len(pool) > target:
        if len(pool) <= group_size:
            groups, sizes = [pool], [target]
        else:
            groups = _groups(matrix, pool, group_size, grouping, rng)
            sizes = _allocate(groups, max(target, ceil(len(pool) / 2)))

        survivors: List[int] = []
        for group, k in zip(groups, sizes):
            if k == 0:
                continue
            if k >= len(group):
                survivors.extend(group)
                continue
            problem = builder(subsample_features(matrix, group), k)
            bits = solver(problem)
            survivors.extend(group[i] for i in selected_features(bits))

        rounds.append(SelectionRound(
            round=len(rounds), pool_size=len(pool), group_sizes=[len(g) for g in groups], selected=sorted(survivors)
        ))
        logger.info("Selection round %d: %d -> %d features", len(rounds) - 1, len(pool), len(survivors))
        pool = sorted(survivors)

    return SelectionResult(
        features=tuple(pool),
        names=tuple(matrix.feature_names[j] for j in pool),
        rounds=rounds,
    )
