# =============================================================================
# File: pipeline.py
# Purpose: Orchestrates reduction, classical finish and reconstruction
# =============================================================================

"""
Hybrid Pipeline

Purpose:
--------
Coordinates a reducer, a finisher and the reconstruction step.

This module:
- Runs the selected reducer (hrqaoa / rqaoa / random-fix / none)
- Hands the reduced problem to the finisher
- Reconstructs the full solution from the trace
- Evaluates the full solution on the ORIGINAL Hamiltonian
- Returns the complete trace

It does NOT:
- Pick edges or substitute variables
- Train anything
- Interpret energies

Invariants:
-----------
1. No if/else on intermediate results
2. The final energy is always recomputed on the input Hamiltonian
3. The trace is passed through unchanged
4. Must remain mechanically boring
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict

import numpy as np

from core.classical import TabuConfig, brute_force, random_edge_fix, tabu_search
from core.edge_fixing import ReductionTrace, reconstruct_solution
from core.errors import UsageError
from core.hrqaoa import HrqaoaConfig, run_hrqaoa, run_rqaoa
from core.pcbo import SpinHamiltonian, evaluate_spin
from core.seeds import derive_seed
from repositories.protocols import Finisher, Reducer

logger = logging.getLogger(__name__)


class PipelineConfigError(UsageError):
    """Raised when a method or finisher name is not registered."""
    pass


# =============================================================================
# Finishers
# =============================================================================

class BruteForceFinisher:
    name = "brute"

    def solve(self, hamiltonian: SpinHamiltonian):
        return brute_force(hamiltonian)


class TabuFinisher:
    name = "tabu"

    def __init__(self, config: TabuConfig = TabuConfig()):
        self.config = config

    def solve(self, hamiltonian: SpinHamiltonian):
        if not hamiltonian.terms:
            return np.ones(hamiltonian.num_vars, dtype=np.int64), hamiltonian.offset
        result = tabu_search(hamiltonian, self.config)
        return result.spins, result.energy


FINISHERS: Dict[str, Callable[..., Finisher]] = {
    "brute": lambda seed=0: BruteForceFinisher(),
    "tabu": lambda seed=0: TabuFinisher(TabuConfig(seed=seed)),
}


def make_finisher(name: str, seed: int = 0) -> Finisher:
    if name not in FINISHERS:
        raise PipelineConfigError(f"Unknown finisher: '{name}'. Allowed: {list(FINISHERS)}")
    return FINISHERS[name](seed=seed)


# =============================================================================
# Reducers
# =============================================================================

def _no_reduction(hamiltonian: SpinHamiltonian, config: HrqaoaConfig) -> ReductionTrace:
    return ReductionTrace(method="none", original_num_vars=hamiltonian.num_vars, final_problem=hamiltonian)


def _random_reduction(hamiltonian: SpinHamiltonian, config: HrqaoaConfig) -> ReductionTrace:
    cutoff = hamiltonian.num_vars - config.planned_rounds(hamiltonian.num_vars)
    return random_edge_fix(hamiltonian, cutoff, derive_seed(config.seed, "random-fix"))


# Registry (whitelist) of reduction methods.
REDUCERS: Dict[str, Reducer] = {
    "none": _no_reduction,
    "hrqaoa": run_hrqaoa,
    "rqaoa": run_rqaoa,
    "random-fix": _random_reduction,
}


@dataclass(frozen=True)
class HybridResult:
    spins: np.ndarray
    energy: float
    reduced_energy: float
    finisher: str
    trace: ReductionTrace


def run_hybrid(
    *,
    hamiltonian: SpinHamiltonian,
    method: str,
    finisher: Finisher,
    config: HrqaoaConfig,
) -> HybridResult:
    """
    Reduce, finish, reconstruct, evaluate.

    This function is MECHANICAL. It performs these steps in order:
    1. Reduce the problem (via the registered reducer)
    2. Solve the reduced problem (via the finisher)
    3. Reconstruct the full solution (via the trace)
    4. Evaluate the full solution on the input Hamiltonian

    Raises:
    -------
    PipelineConfigError
        If the method is not registered.
    """
    if method not in REDUCERS:
        raise PipelineConfigError(f"Unknown method: '{method}'. Allowed: {list(REDUCERS)}")

    # -------------------------------------------------------------------------
    # Step 1: Reduce
    # -------------------------------------------------------------------------
    trace = REDUCERS[method](hamiltonian, config)

    # -------------------------------------------------------------------------
    # Step 2: Finish
    # -------------------------------------------------------------------------
    # Finishers assign a term-free reduced problem all +1.
    reduced_spins, reduced_energy = finisher.solve(trace.final_problem)

    # -------------------------------------------------------------------------
    # Step 3: Reconstruct
    # -------------------------------------------------------------------------
    spins = reconstruct_solution(trace, reduced_spins)

    # -------------------------------------------------------------------------
    # Step 4: Evaluate on the original problem
    # -------------------------------------------------------------------------
    energy = evaluate_spin(hamiltonian, spins)
    logger.info(
        "%s + %s: %d -> %d variables, final energy %.6f",
        method, finisher.name, hamiltonian.num_vars, trace.final_problem.num_vars, energy,
    )
    return HybridResult(
        spins=spins,
        energy=energy,
        reduced_energy=float(reduced_energy),
        finisher=finisher.name,
        trace=trace,
    )
