"""
edge_fixing.py

Purpose:
--------
The SINGLE authority responsible for eliminating a variable from a spin
Hamiltonian.

An edge fix picks a term W, a sign and one member e of W, and imposes

    Z_e = sign * prod_{o in W, o != e} Z_o

on every term containing e. With Z^2 = I a term T containing e becomes the
symmetric difference (T - {e}) ^ (W - {e}), its coefficient multiplied by
sign. Terms that collapse to the empty product fold into the offset. The
surviving variables are reindexed densely.

This module enforces the critical invariants:
---------------------------------------------
1. For every assignment of the surviving variables, the reduced energy
   equals the original energy under the fix rule, exactly.
2. Every elimination is recorded (EdgeFix) with the variable map needed to
   undo it.
3. Reconstruction walks the fixes in reverse and never guesses.

This file must NEVER:
---------------------
- Run circuits or compute correlations
- Decide which edge to fix beyond the max-|correlation| rule
- Solve the reduced problem
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import DataError, UsageError
from core.pcbo import SpinHamiltonian, Term
from core.simulator import CorrelationDictionary, EvaluationCounter


# -----------------------------------------------------------------------------
# Exceptions (explicit failure modes)
# -----------------------------------------------------------------------------

class EdgeFixError(UsageError):
    """Base exception for edge-fix contract violations."""
    pass


class InvalidEdgeFix(EdgeFixError):
    """
    Raised when a fix is structurally impossible.

    Example:
    --------
    eliminating index 4 through the term (0, 2)
    """
    pass


class TooFewVariables(EdgeFixError):
    """Raised when a Hamiltonian has fewer than two variables left to fix."""
    pass


class EmptyCorrelations(EdgeFixError):
    """Raised when there is no correlation to pick an edge from."""
    pass


class InconsistentTrace(DataError):
    """Raised when a trace cannot reconstruct a full solution."""
    pass


ELIMINATION_MODES = ("random", "smallest")


# -----------------------------------------------------------------------------
# Records
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class EdgeFix:
    """
    One elimination.

    term and eliminated are in the indexing of the Hamiltonian the fix was
    applied to. variable_map[new_index] = index before the fix.
    """

    term: Term
    eliminated: int
    sign: int
    round: int
    variable_map: Tuple[int, ...]

    def __post_init__(self) -> None:
        if self.eliminated not in self.term:
            raise InvalidEdgeFix(f"eliminated {self.eliminated} is not in term {self.term}")
        if self.sign not in (-1, 1):
            raise InvalidEdgeFix(f"sign must be +1 or -1, got {self.sign}")


@dataclass
class RoundRecord:
    """Everything one reduction round saw and decided."""

    round: int
    num_vars: int
    fix: EdgeFix
    correlation: Optional[float] = None
    donor_subsets: List[Tuple[int, ...]] = field(default_factory=list)
    donor_energies: List[float] = field(default_factory=list)
    transferred_energies: List[float] = field(default_factory=list)
    selected_donor: Optional[int] = None
    target_energy: Optional[float] = None
    counters: Dict[str, int] = field(default_factory=dict)


@dataclass
class ReductionTrace:
    """
    Ordered edge fixes plus everything needed to undo them.

    Built by a single owner (a reduction loop); read-only afterwards.
    """

    method: str
    original_num_vars: int
    final_problem: SpinHamiltonian
    fixes: List[EdgeFix] = field(default_factory=list)
    rounds: List[RoundRecord] = field(default_factory=list)
    counters: EvaluationCounter = field(default_factory=EvaluationCounter)
    stop_reason: str = "rounds exhausted"
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def variable_maps(self) -> List[Tuple[int, ...]]:
        return [fix.variable_map for fix in self.fixes]

    def record(self, reduced: SpinHamiltonian, record: RoundRecord) -> None:
        if self.fixes and record.fix.round <= self.fixes[-1].round:
            raise InconsistentTrace(
                f"round {record.fix.round} recorded after round {self.fixes[-1].round}"
            )
        self.fixes.append(record.fix)
        self.rounds.append(record)
        self.final_problem = reduced


# -----------------------------------------------------------------------------
# Edge choice
# -----------------------------------------------------------------------------

def choose_edge(correlations: CorrelationDictionary) -> Tuple[Term, float]:
    """
    Term with the largest |<Z_T>|; ties go to the lexicographically
    smallest tuple.
    """
    if not correlations.entries:
        raise EmptyCorrelations("correlation dictionary is empty")
    term = min(correlations.entries, key=lambda t: (-abs(correlations.entries[t]), t))
    return term, correlations.entries[term]


def choose_eliminated(term: Term, mode: str, rng: Optional[np.random.Generator]) -> int:
    if mode not in ELIMINATION_MODES:
        raise EdgeFixError(f"Unknown elimination mode: '{mode}'. Allowed: {list(ELIMINATION_MODES)}")
    if mode == "smallest":
        return term[0]
    if rng is None:
        raise EdgeFixError("random elimination needs a generator")
    return term[int(rng.integers(len(term)))]


# -----------------------------------------------------------------------------
# Substitution Authority
# -----------------------------------------------------------------------------

def apply_edge_fix(
    hamiltonian: SpinHamiltonian,
    *,
    term: Sequence[int],
    eliminated: int,
    sign: int,
    round_index: int,
) -> Tuple[SpinHamiltonian, EdgeFix]:
    """
    Eliminate `eliminated` via Z_e = sign * prod_{o in term - e} Z_o.

    Raises:
    -------
    TooFewVariables
        If the Hamiltonian has fewer than two variables.
    InvalidEdgeFix
        If the term is out of range or does not contain `eliminated`.

    Guarantees:
    -----------
    - The returned Hamiltonian has exactly num_vars - 1 variables
    - Energies agree with the original under the fix rule for every
      assignment of the survivors
    """
    num_vars = hamiltonian.num_vars
    if num_vars < 2:
        raise TooFewVariables(f"cannot fix an edge with {num_vars} variable(s)")
    term = tuple(sorted(int(i) for i in term))
    if not term or term[0] < 0 or term[-1] >= num_vars or len(set(term)) != len(term):
        raise InvalidEdgeFix(f"term {term} invalid for {num_vars} variables")
    if eliminated not in term:
        raise InvalidEdgeFix(f"eliminated {eliminated} is not in term {term}")
    if sign not in (-1, 1):
        raise InvalidEdgeFix(f"sign must be +1 or -1, got {sign}")

    partners = frozenset(term) - {eliminated}

    # 1. Substitute into every term containing the eliminated variable
    offset = hamiltonian.offset
    substituted: Dict[Term, float] = {}
    for source, coefficient in hamiltonian.terms.items():
        if eliminated in source:
            merged = tuple(sorted((frozenset(source) - {eliminated}) ^ partners))
            coefficient = coefficient * sign
        else:
            merged = source
        if merged:
            substituted[merged] = substituted.get(merged, 0.0) + coefficient
        else:
            offset += coefficient

    # 2. Dense reindexing of the survivors
    variable_map = tuple(i for i in range(num_vars) if i != eliminated)
    new_index = {old: new for new, old in enumerate(variable_map)}
    reindexed = {
        tuple(new_index[i] for i in key): coefficient
        for key, coefficient in substituted.items()
    }

    reduced = SpinHamiltonian(num_vars=num_vars - 1, terms=reindexed, offset=offset)
    fix = EdgeFix(
        term=term,
        eliminated=int(eliminated),
        sign=int(sign),
        round=round_index,
        variable_map=variable_map,
    )
    return reduced, fix


def fix_edge(
    hamiltonian: SpinHamiltonian,
    correlations: CorrelationDictionary,
    *,
    round_index: int = 0,
    rng: Optional[np.random.Generator] = None,
    elimination: str = "random",
) -> Tuple[SpinHamiltonian, EdgeFix]:
    """
    Fix the max-|correlation| term: sign = +1 when the correlation is >= 0,
    eliminated member uniform under `rng` (or the smallest index when
    elimination == "smallest").
    """
    if hamiltonian.num_vars < 2:
        raise TooFewVariables(f"cannot fix an edge with {hamiltonian.num_vars} variable(s)")
    term, value = choose_edge(correlations)
    sign = 1 if value >= 0 else -1
    eliminated = choose_eliminated(term, elimination, rng)
    return apply_edge_fix(
        hamiltonian, term=term, eliminated=eliminated, sign=sign, round_index=round_index
    )


# -----------------------------------------------------------------------------
# Reconstruction
# -----------------------------------------------------------------------------

def reconstruct_solution(trace: ReductionTrace, reduced_solution: Sequence[int]) -> np.ndarray:
    """
    Extend a solution of trace.final_problem to the original variables by
    replaying the fixes in reverse.

    Raises:
    -------
    InconsistentTrace
        If the solution length or any variable map does not line up.
    """
    current = np.asarray(reduced_solution, dtype=np.int64)
    if current.shape != (trace.final_problem.num_vars,):
        raise InconsistentTrace(
            f"reduced solution has shape {current.shape}, final problem has "
            f"{trace.final_problem.num_vars} variables"
        )
    if np.any(np.abs(current) != 1):
        raise InconsistentTrace("reduced solution must be a +1/-1 vector")

    for fix in reversed(trace.fixes):
        if len(fix.variable_map) != current.shape[0]:
            raise InconsistentTrace(
                f"round {fix.round}: variable map of length {len(fix.variable_map)} "
                f"for a {current.shape[0]}-variable solution"
            )
        previous = np.zeros(current.shape[0] + 1, dtype=np.int64)
        previous[list(fix.variable_map)] = current
        if previous[fix.eliminated] != 0:
            raise InconsistentTrace(f"round {fix.round}: eliminated variable is also mapped")
        partners = [i for i in fix.term if i != fix.eliminated]
        previous[fix.eliminated] = fix.sign * int(np.prod(previous[partners])) if partners else fix.sign
        current = previous

    if current.shape[0] != trace.original_num_vars:
        raise InconsistentTrace(
            f"reconstructed {current.shape[0]} variables, expected {trace.original_num_vars}"
        )
    return current
