"""
pcbo.py

Purpose:
--------
Polynomial binary problems and their spin-Hamiltonian form.

A PolyBinaryProblem is Q(x) = sum_T c_T prod_{i in T} x_i + constant over
x in {0,1}^F, optionally with a cardinality target |x|_1 = n. A
SpinHamiltonian is H(s) = sum_T c_T prod_{i in T} s_i + offset over
s in {-1,+1}^N, i.e. a diagonal Pauli-Z polynomial.

This module:
- Canonicalizes term maps (sorted tuples, merged duplicates, no zeros)
- Absorbs the cardinality constraint as a soft quadratic penalty
- Converts binary -> spin (x = (1 - s)/2) and back
- Evaluates energies for single assignments and for all 2^N at once

It does NOT:
- Score features (see builders/formulation_builder.py)
- Simulate circuits (see core/simulator.py)

Invariants:
-----------
1. Term keys are strictly increasing index tuples within [0, num_vars)
2. No stored coefficient has magnitude below ZERO_TOLERANCE
3. For every x: evaluate_binary(Q, x) == evaluate_spin(to_spin(Q), 1 - 2x)
4. Variable i is bit i of a basis-state label (little-endian), everywhere
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from core.errors import UsageError

Term = Tuple[int, ...]

ZERO_TOLERANCE = 1e-12
DEFAULT_LAMBDA_C = 5.0


# =============================================================================
# Domain Exceptions
# =============================================================================

class ProblemError(UsageError):
    """Base exception for polynomial-problem contract violations."""
    pass


class InvalidTerm(ProblemError):
    """Raised when a term key is out of range, unsorted or repeats an index."""
    pass


class CardinalityError(ProblemError):
    """
    Raised when an operation needs the cardinality target set (penalty)
    or cleared (spin conversion) and finds the opposite.
    """
    pass


class AssignmentError(ProblemError):
    """Raised when an assignment has the wrong length or illegal entries."""
    pass


# =============================================================================
# Canonical term maps
# =============================================================================

def canonicalize_terms(raw: Mapping[Term, float], num_vars: int) -> Dict[Term, float]:
    """
    Return the canonical form of a term map.

    Keys must be index tuples without repeats; they are sorted, like terms
    are merged and near-zero coefficients dropped. The result is ordered by
    (term order, term) so that iteration order is deterministic.
    """
    merged: Dict[Term, float] = {}
    for key, coefficient in raw.items():
        term = tuple(sorted(int(i) for i in key))
        if not term:
            raise InvalidTerm("empty term; constants belong in the constant/offset field")
        if len(set(term)) != len(term):
            raise InvalidTerm(f"term {key} repeats an index")
        if term[0] < 0 or term[-1] >= num_vars:
            raise InvalidTerm(f"term {key} out of range for {num_vars} variables")
        merged[term] = merged.get(term, 0.0) + float(coefficient)
    return {
        term: merged[term]
        for term in sorted(merged, key=lambda t: (len(t), t))
        if abs(merged[term]) >= ZERO_TOLERANCE
    }


def max_order(terms: Mapping[Term, float]) -> int:
    return max((len(term) for term in terms), default=0)


# =============================================================================
# Domain Types
# =============================================================================

@dataclass(frozen=True)
class PolyBinaryProblem:
    """
    Q(x) over binary variables, with an optional cardinality target.

    Attributes:
    -----------
    num_vars : int
    terms : dict[tuple[int, ...], float]
    constant : float
    cardinality : int | None
        Target |x|_1 = n, or None once the constraint has been absorbed.
    """

    num_vars: int
    terms: Dict[Term, float] = field(default_factory=dict)
    constant: float = 0.0
    cardinality: Optional[int] = None

    def __post_init__(self) -> None:
        if self.num_vars < 1:
            raise ProblemError(f"num_vars must be >= 1, got {self.num_vars}")
        if self.cardinality is not None and not 0 <= self.cardinality <= self.num_vars:
            raise CardinalityError(
                f"cardinality {self.cardinality} outside [0, {self.num_vars}]"
            )
        object.__setattr__(self, "terms", canonicalize_terms(self.terms, self.num_vars))
        object.__setattr__(self, "constant", float(self.constant))

    @property
    def order(self) -> int:
        return max_order(self.terms)


@dataclass(frozen=True)
class SpinHamiltonian:
    """
    H(s) = sum_T c_T prod s_i + offset over s in {-1, +1}^N.

    Term order is unrestricted: edge-fix substitution can raise it.
    """

    num_vars: int
    terms: Dict[Term, float] = field(default_factory=dict)
    offset: float = 0.0

    def __post_init__(self) -> None:
        if self.num_vars < 0:
            raise ProblemError(f"num_vars must be >= 0, got {self.num_vars}")
        object.__setattr__(self, "terms", canonicalize_terms(self.terms, self.num_vars))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def order(self) -> int:
        return max_order(self.terms)

    def coefficient_mass(self) -> float:
        return float(sum(abs(c) for c in self.terms.values()))


@dataclass(frozen=True)
class AlphaWeights:
    """Block weights of the entropy-cubo formulation; must sum to 1."""

    alpha1: float
    alpha2: float
    alpha3: float

    def __post_init__(self) -> None:
        total = self.alpha1 + self.alpha2 + self.alpha3
        if abs(total - 1.0) > 1e-12:
            raise ProblemError(f"alpha weights must sum to 1, got {total}")

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.alpha1, self.alpha2, self.alpha3)


# =============================================================================
# Evaluation
# =============================================================================

def evaluate_binary(problem: PolyBinaryProblem, bits: Sequence[int]) -> float:
    """Q(x) including the constant. The cardinality target is not applied."""
    bits = np.asarray(bits)
    if bits.shape != (problem.num_vars,):
        raise AssignmentError(f"expected {problem.num_vars} bits, got shape {bits.shape}")
    if np.any((bits != 0) & (bits != 1)):
        raise AssignmentError("bits must be 0 or 1")
    total = problem.constant
    for term, coefficient in problem.terms.items():
        if all(bits[i] for i in term):
            total += coefficient
    return float(total)


def evaluate_spin(hamiltonian: SpinHamiltonian, spins: Sequence[int]) -> float:
    """H(s) including the offset."""
    spins = np.asarray(spins)
    if spins.shape != (hamiltonian.num_vars,):
        raise AssignmentError(f"expected {hamiltonian.num_vars} spins, got shape {spins.shape}")
    if np.any(np.abs(spins) != 1):
        raise AssignmentError("spins must be +1 or -1")
    total = hamiltonian.offset
    for term, coefficient in hamiltonian.terms.items():
        total += coefficient * float(np.prod(spins[list(term)]))
    return float(total)


def term_mask(term: Iterable[int]) -> int:
    mask = 0
    for i in term:
        mask |= 1 << i
    return mask


def walsh_hadamard(values: np.ndarray) -> np.ndarray:
    """
    Unnormalized fast Walsh-Hadamard transform of a length-2^N vector.

    out[x] = sum_m values[m] * (-1)^popcount(x & m). Applied to the
    coefficient vector of a spin Hamiltonian (indexed by term mask) it
    yields every basis-state energy; applied to a probability vector it
    yields every parity expectation.
    """
    out = np.array(values, dtype=float, copy=True)
    size = out.shape[0]
    if size & (size - 1):
        raise ProblemError(f"length {size} is not a power of two")
    half = 1
    while half < size:
        view = out.reshape(-1, 2, half)
        upper = view[:, 0, :].copy()
        lower = view[:, 1, :]
        view[:, 0, :] = upper + lower
        view[:, 1, :] = upper - lower
        half *= 2
    return out


def energy_table(hamiltonian: SpinHamiltonian) -> np.ndarray:
    """
    Energies of all 2^N basis states, offset included.

    Entry x is H(s) with s_i = 1 - 2 * bit_i(x).
    """
    coefficients = np.zeros(1 << hamiltonian.num_vars, dtype=float)
    for term, coefficient in hamiltonian.terms.items():
        coefficients[term_mask(term)] += coefficient
    return walsh_hadamard(coefficients) + hamiltonian.offset


def index_to_spins(index: int, num_vars: int) -> np.ndarray:
    bits = (int(index) >> np.arange(num_vars)) & 1
    return (1 - 2 * bits).astype(np.int64)


def bits_to_spins(bits: Sequence[int]) -> np.ndarray:
    return (1 - 2 * np.asarray(bits, dtype=np.int64)).astype(np.int64)


def spins_to_bits(spins: Sequence[int]) -> np.ndarray:
    return ((1 - np.asarray(spins, dtype=np.int64)) // 2).astype(np.int64)


def selected_features(bits: Sequence[int]) -> Tuple[int, ...]:
    """Indices switched on in a binary selection vector."""
    return tuple(int(i) for i in np.flatnonzero(np.asarray(bits)))


# =============================================================================
# Constraint absorption and form conversion
# =============================================================================

def apply_cardinality_penalty(problem: PolyBinaryProblem, lambda_c: float = DEFAULT_LAMBDA_C) -> PolyBinaryProblem:
    """
    Absorb |x|_1 = n as lambda_c * (sum_i x_i - n)^2.

    Expanded with x_i^2 = x_i this adds lambda_c * n^2 to the constant,
    lambda_c * (1 - 2n) to every linear term and 2 * lambda_c to every pair.
    Energies of constraint-abiding assignments are unchanged.

    Raises:
    -------
    CardinalityError
        If the problem carries no cardinality target.
    ProblemError
        If lambda_c <= 0.
    """
    if problem.cardinality is None:
        raise CardinalityError("problem has no cardinality target to penalize")
    if lambda_c <= 0:
        raise ProblemError(f"lambda_c must be > 0, got {lambda_c}")

    n = problem.cardinality
    terms = dict(problem.terms)
    for i in range(problem.num_vars):
        terms[(i,)] = terms.get((i,), 0.0) + lambda_c * (1 - 2 * n)
    for pair in combinations(range(problem.num_vars), 2):
        terms[pair] = terms.get(pair, 0.0) + 2.0 * lambda_c

    return PolyBinaryProblem(
        num_vars=problem.num_vars,
        terms=terms,
        constant=problem.constant + lambda_c * n * n,
        cardinality=None,
    )


def to_spin(problem: PolyBinaryProblem) -> SpinHamiltonian:
    """
    Substitute x_i = (1 - Z_i)/2 into every monomial.

    A monomial c * prod_{i in T} x_i expands to
    c / 2^|T| * sum_{S subset of T} (-1)^|S| prod_{i in S} Z_i;
    the S = {} branch accumulates into the offset.

    Raises:
    -------
    CardinalityError
        If the cardinality target is still set (penalize first).
    """
    if problem.cardinality is not None:
        raise CardinalityError(
            "spin conversion needs an unconstrained problem; apply the cardinality penalty first"
        )

    offset = problem.constant
    terms: Dict[Term, float] = {}
    for term, coefficient in problem.terms.items():
        scale = coefficient / (1 << len(term))
        for size in range(len(term) + 1):
            weight = scale * (-1) ** size
            for subset in combinations(term, size):
                if subset:
                    terms[subset] = terms.get(subset, 0.0) + weight
                else:
                    offset += weight
    return SpinHamiltonian(num_vars=problem.num_vars, terms=terms, offset=offset)


def to_binary(hamiltonian: SpinHamiltonian) -> PolyBinaryProblem:
    """
    Substitute Z_i = 1 - 2 x_i into every monomial (inverse of to_spin).

    c * prod_{i in T} Z_i = c * sum_{S subset of T} (-2)^|S| prod_{i in S} x_i.
    """
    if hamiltonian.num_vars < 1:
        raise ProblemError("cannot convert an empty Hamiltonian to a binary problem")
    constant = hamiltonian.offset
    terms: Dict[Term, float] = {}
    for term, coefficient in hamiltonian.terms.items():
        for size in range(len(term) + 1):
            weight = coefficient * (-2.0) ** size
            for subset in combinations(term, size):
                if subset:
                    terms[subset] = terms.get(subset, 0.0) + weight
                else:
                    constant += weight
    return PolyBinaryProblem(num_vars=hamiltonian.num_vars, terms=terms, constant=constant)
