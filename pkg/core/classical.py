"""
classical.py

Purpose:
--------
Classical baselines and oracles for spin Hamiltonians and PCBO problems.

This module:
- brute_force: exact minimum over all 2^N spin assignments (the oracle)
- brute_force_subset: exact minimum over the C(F, n) feasible subsets of a
  cardinality-constrained problem
- tabu_search: single-flip tabu heuristic with aspiration, restarts and an
  improvement timeout
- random_edge_fix: the random-fixing baseline for the recursive reducers
- reduce_order: cubic -> quadratic rewrite through ancilla variables

It does NOT:
- Simulate circuits
- Decide which solver a workflow uses (see core/pipeline.py)

Invariants:
-----------
1. brute_force energy <= every other solver's energy on the same problem
2. Ties in brute_force go to the lexicographically smallest spin vector
   (+1 before -1, variable 0 first)
3. tabu_search is deterministic per seed unless its timeout fires
"""

import logging
import time
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from math import ceil, comb
from typing import Dict, List, Optional, Tuple

import numpy as np

from core.edge_fixing import ReductionTrace, RoundRecord, apply_edge_fix
from core.errors import ResourceCapError, UsageError
from core.pcbo import (
    PolyBinaryProblem,
    ProblemError,
    SpinHamiltonian,
    Term,
    energy_table,
    index_to_spins,
)
from core.seeds import make_rng

logger = logging.getLogger(__name__)

BRUTE_FORCE_CAP = 24
SUBSET_CAP = 50_000_000
TIE_TOLERANCE = 1e-12


# =============================================================================
# Domain Exceptions
# =============================================================================

class SolverError(UsageError):
    """Base exception for classical solver contract violations."""
    pass


class BruteForceCapExceeded(ResourceCapError):
    """Raised when exhaustive enumeration would exceed its cap."""
    pass


# =============================================================================
# Exhaustive search
# =============================================================================

def _bit_reversed(indices: np.ndarray, num_vars: int) -> np.ndarray:
    reversed_ = np.zeros_like(indices)
    for bit in range(num_vars):
        reversed_ |= ((indices >> bit) & 1) << (num_vars - 1 - bit)
    return reversed_


def brute_force(hamiltonian: SpinHamiltonian, cap: int = BRUTE_FORCE_CAP) -> Tuple[np.ndarray, float]:
    """
    Global minimum of H over all 2^N spin vectors.

    Raises:
    -------
    BruteForceCapExceeded
        If N > cap.
    """
    num_vars = hamiltonian.num_vars
    if num_vars > cap:
        raise BruteForceCapExceeded(f"brute force over {num_vars} variables exceeds the cap of {cap}")
    if num_vars == 0:
        return np.zeros(0, dtype=np.int64), hamiltonian.offset

    energies = energy_table(hamiltonian)
    ground = float(energies.min())
    tied = np.flatnonzero(energies <= ground + TIE_TOLERANCE * max(1.0, abs(ground)))
    index = int(tied[np.argmin(_bit_reversed(tied, num_vars))])
    return index_to_spins(index, num_vars), float(energies[index])


def brute_force_subset(problem: PolyBinaryProblem, cap: int = SUBSET_CAP) -> Tuple[np.ndarray, float]:
    """
    Exact minimum of Q(x) subject to |x|_1 = n, enumerating only the
    C(F, n) feasible subsets. Ties go to the first subset in lexicographic
    order.

    Raises:
    -------
    SolverError
        If the problem has no cardinality target or order > 3.
    BruteForceCapExceeded
        If C(F, n) > cap.
    """
    if problem.cardinality is None:
        raise SolverError("brute_force_subset needs a cardinality target")
    if problem.order > 3:
        raise SolverError(f"brute_force_subset supports order <= 3, got {problem.order}")
    f, n = problem.num_vars, problem.cardinality
    if comb(f, n) > cap:
        raise BruteForceCapExceeded(f"C({f}, {n}) = {comb(f, n)} subsets exceeds the cap of {cap}")
    if n == 0:
        return np.zeros(f, dtype=np.int64), problem.constant

    linear = np.zeros(f)
    quadratic = np.zeros((f, f))
    cubic = np.zeros((f, f, f)) if problem.order == 3 else None
    for term, coefficient in problem.terms.items():
        if len(term) == 1:
            linear[term] += coefficient
        elif len(term) == 2:
            quadratic[term] += coefficient
        else:
            cubic[term] += coefficient

    pairs = list(combinations(range(n), 2))
    triples = list(combinations(range(n), 3)) if cubic is not None else []
    best_value, best_subset = np.inf, ()
    subsets = combinations(range(f), n)
    while True:
        chunk = np.array([s for _, s in zip(range(200_000), subsets)], dtype=np.int64).reshape(-1, n)
        if chunk.shape[0] == 0:
            break
        values = linear[chunk].sum(axis=1)
        for a, b in pairs:
            values += quadratic[chunk[:, a], chunk[:, b]]
        for a, b, c in triples:
            values += cubic[chunk[:, a], chunk[:, b], chunk[:, c]]
        index = int(np.argmin(values))
        if values[index] < best_value:
            best_value, best_subset = float(values[index]), tuple(chunk[index])

    bits = np.zeros(f, dtype=np.int64)
    bits[list(best_subset)] = 1
    return bits, best_value + problem.constant


# =============================================================================
# Tabu search
# =============================================================================

@dataclass(frozen=True)
class TabuConfig:
    """
    Defaults (None) resolve per problem: tenure = ceil(N / 4),
    iterations = 500 * N. improvement_timeout is in seconds; the search
    stops once the global incumbent has not improved for that long.
    """

    iterations: Optional[int] = None
    tenure: Optional[int] = None
    restarts: int = 20
    seed: int = 0
    improvement_timeout: Optional[float] = None
    record_history: bool = False

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise SolverError(f"restarts must be >= 1, got {self.restarts}")
        if self.iterations is not None and self.iterations < 1:
            raise SolverError(f"iterations must be >= 1, got {self.iterations}")
        if self.tenure is not None and self.tenure < 0:
            raise SolverError(f"tenure must be >= 0, got {self.tenure}")
        if self.improvement_timeout is not None and self.improvement_timeout <= 0:
            raise SolverError("improvement_timeout must be positive")


@dataclass
class TabuResult:
    spins: np.ndarray
    energy: float
    iterations: int = 0
    timeout_hit: bool = False
    history: List[float] = field(default_factory=list)


class _FlipState:
    """
    Current assignment with incrementally maintained term values and
    single-flip energy deltas.

    delta[i] = -2 * sum_{T containing i} c_T prod_{j in T} s_j
    """

    def __init__(self, hamiltonian: SpinHamiltonian, spins: np.ndarray):
        self.spins = spins.astype(np.int64)
        terms = list(hamiltonian.terms)
        self.coefficients = np.array([hamiltonian.terms[t] for t in terms], dtype=float)
        self.term_values = np.array(
            [c * np.prod(self.spins[list(t)]) for t, c in zip(terms, self.coefficients)], dtype=float
        )
        self.energy = hamiltonian.offset + float(self.term_values.sum())

        # For each variable: the terms it sits in, and every (member, term)
        # pair those terms contribute to the delta update.
        num_vars = hamiltonian.num_vars
        incident: List[List[int]] = [[] for _ in range(num_vars)]
        for index, term in enumerate(terms):
            for i in term:
                incident[i].append(index)
        self.incident = [np.array(ids, dtype=np.int64) for ids in incident]
        self.touched_vars = []
        self.touched_terms = []
        for ids in incident:
            members = [(i, t) for t in ids for i in terms[t]]
            self.touched_vars.append(np.array([m for m, _ in members], dtype=np.int64))
            self.touched_terms.append(np.array([t for _, t in members], dtype=np.int64))

        self.delta = np.zeros(num_vars)
        for i in range(num_vars):
            self.delta[i] = -2.0 * self.term_values[self.incident[i]].sum()

    def flip(self, i: int) -> None:
        self.energy += float(self.delta[i])
        old = self.term_values[self.touched_terms[i]]
        np.add.at(self.delta, self.touched_vars[i], 4.0 * old)
        self.term_values[self.incident[i]] *= -1.0
        self.spins[i] *= -1


def tabu_search(hamiltonian: SpinHamiltonian, config: TabuConfig = TabuConfig()) -> TabuResult:
    """
    Best-found solution of a single-flip tabu search.

    Each iteration flips the non-tabu variable with the lowest resulting
    energy (lowest index on ties). A tabu move is still allowed when it
    beats the incumbent (aspiration). A flipped variable stays tabu for
    `tenure` iterations.
    """
    num_vars = hamiltonian.num_vars
    if num_vars == 0:
        return TabuResult(np.zeros(0, dtype=np.int64), hamiltonian.offset)

    iterations = config.iterations if config.iterations is not None else 500 * num_vars
    tenure = config.tenure if config.tenure is not None else ceil(num_vars / 4)

    best_spins: Optional[np.ndarray] = None
    best_energy = np.inf
    history: List[float] = []
    last_improvement = time.monotonic()
    timeout_hit = False
    done = 0

    for restart in range(config.restarts):
        rng = make_rng(config.seed, "tabu", restart)
        state = _FlipState(hamiltonian, rng.choice(np.array([-1, 1]), size=num_vars))
        if state.energy < best_energy - TIE_TOLERANCE:
            best_energy, best_spins = state.energy, state.spins.copy()
            last_improvement = time.monotonic()
        tabu_until = np.zeros(num_vars, dtype=np.int64)

        for step in range(iterations):
            candidates = state.energy + state.delta
            allowed = (tabu_until <= step) | (candidates < best_energy - TIE_TOLERANCE)
            if not allowed.any():
                allowed[:] = True
            i = int(np.argmin(np.where(allowed, candidates, np.inf)))
            state.flip(i)
            tabu_until[i] = step + 1 + tenure
            done += 1

            if state.energy < best_energy - TIE_TOLERANCE:
                best_energy, best_spins = state.energy, state.spins.copy()
                last_improvement = time.monotonic()
            if config.record_history:
                history.append(best_energy)
            if config.improvement_timeout is not None and time.monotonic() - last_improvement > config.improvement_timeout:
                timeout_hit = True
                break
        if timeout_hit:
            logger.info("Tabu search stopped: no improvement for %.3fs", config.improvement_timeout)
            break

    return TabuResult(
        spins=best_spins,
        energy=float(best_energy),
        iterations=done,
        timeout_hit=timeout_hit,
        history=history,
    )


# =============================================================================
# Random edge fixing
# =============================================================================

def random_edge_fix(hamiltonian: SpinHamiltonian, cutoff: int, seed: int) -> ReductionTrace:
    """
    Reduce to `cutoff` variables by fixing uniformly random terms with
    uniformly random signs and eliminated members.
    """
    num_vars = hamiltonian.num_vars
    if not 1 <= cutoff < num_vars:
        raise SolverError(f"cutoff must lie in [1, {num_vars}), got {cutoff}")

    trace = ReductionTrace(method="random-fix", original_num_vars=num_vars, final_problem=hamiltonian)
    trace.metadata["seed"] = seed
    current = hamiltonian
    for round_index in range(num_vars - cutoff):
        if not current.terms:
            trace.stop_reason = "no terms left"
            break
        rng = make_rng(seed, "random-fix", round_index)
        terms = list(current.terms)
        term = terms[int(rng.integers(len(terms)))]
        sign = int(rng.choice(np.array([-1, 1])))
        eliminated = term[int(rng.integers(len(term)))]
        reduced, fix = apply_edge_fix(
            current, term=term, eliminated=eliminated, sign=sign, round_index=round_index
        )
        trace.record(reduced, RoundRecord(round=round_index, num_vars=current.num_vars, fix=fix))
        current = reduced
    return trace


# =============================================================================
# Order reduction
# =============================================================================

def reduction_pairs(problem: PolyBinaryProblem) -> List[Tuple[int, int]]:
    """
    Greedy most-frequent-pair cover of the cubic terms.

    Repeatedly picks the pair occurring in the most uncovered cubic terms
    (smallest pair on ties) until every cubic term contains a chosen pair.
    """
    uncovered = [term for term in problem.terms if len(term) == 3]
    chosen: List[Tuple[int, int]] = []
    while uncovered:
        counts = Counter(pair for term in uncovered for pair in combinations(term, 2))
        pair = min(counts, key=lambda p: (-counts[p], p))
        chosen.append(pair)
        uncovered = [term for term in uncovered if not set(pair) <= set(term)]
    return chosen


def reduce_order(problem: PolyBinaryProblem, penalty: float) -> PolyBinaryProblem:
    """
    Rewrite a cubic problem as a quadratic one.

    Every chosen pair (i, j) gets an ancilla a (index >= F) standing for
    x_i x_j, enforced by penalty * (x_i x_j - 2 a x_i - 2 a x_j + 3 a),
    which is zero iff a = x_i x_j. Each cubic term c x_i x_j x_k is
    rewritten as c a x_k through the first chosen pair it contains.
    The minima correspond once penalty exceeds the total cubic weight.

    Raises:
    -------
    ProblemError
        If order > 3, penalty <= 0, or a cardinality target is set.
    """
    if problem.order > 3:
        raise ProblemError(f"reduce_order supports order <= 3, got {problem.order}")
    if penalty <= 0:
        raise ProblemError(f"penalty must be > 0, got {penalty}")
    if problem.cardinality is not None:
        raise ProblemError("apply the cardinality penalty before reducing order")
    if problem.order < 3:
        return problem

    pairs = reduction_pairs(problem)
    ancilla = {pair: problem.num_vars + index for index, pair in enumerate(pairs)}
    terms: Dict[Term, float] = {}

    def add(term: Term, coefficient: float) -> None:
        key = tuple(sorted(term))
        terms[key] = terms.get(key, 0.0) + coefficient

    for term, coefficient in problem.terms.items():
        if len(term) < 3:
            add(term, coefficient)
            continue
        pair = next(p for p in pairs if set(p) <= set(term))
        (rest,) = set(term) - set(pair)
        add((ancilla[pair], rest), coefficient)

    for (i, j), a in ancilla.items():
        add((i, j), penalty)
        add((a, i), -2.0 * penalty)
        add((a, j), -2.0 * penalty)
        add((a,), 3.0 * penalty)

    logger.debug("Order reduction introduced %d ancillas", len(pairs))
    return PolyBinaryProblem(
        num_vars=problem.num_vars + len(pairs), terms=terms, constant=problem.constant
    )
