# =============================================================================
# File: repositories/protocols.py
# Purpose: Solver interface definitions (no implementations)
# =============================================================================

"""
Solver Protocols

Shapes of the three pluggable pieces `core.pipeline` composes: a reducer,
a finisher for what the reducer leaves, and a cardinality-constrained
subset solver for grouped selection. Tests pass stubs through the same
shapes.
"""

from typing import Protocol, Tuple

import numpy as np

from core.edge_fixing import ReductionTrace
from core.pcbo import PolyBinaryProblem, SpinHamiltonian


class Finisher(Protocol):
    """
    Solves the reduced problem left by a reduction loop.

    Implementations must be deterministic for a fixed configuration.
    """

    name: str

    def solve(self, hamiltonian: SpinHamiltonian) -> Tuple[np.ndarray, float]:
        """
        Parameters:
        -----------
        hamiltonian : SpinHamiltonian
            Reduced problem; may have no terms at all.

        Returns:
        --------
        (spins, energy)
            A +1/-1 vector of length hamiltonian.num_vars and its energy
            (offset included).
        """
        ...


class Reducer(Protocol):
    """
    Shrinks a Hamiltonian by edge fixing and records how to undo it.
    """

    def __call__(self, hamiltonian: SpinHamiltonian, config) -> ReductionTrace:
        ...


class SubsetSolver(Protocol):
    """
    Solves one cardinality-constrained PCBO problem.

    Returns:
    --------
    np.ndarray
        0/1 selection vector of length problem.num_vars.
    """

    def __call__(self, problem: PolyBinaryProblem) -> np.ndarray:
        ...
