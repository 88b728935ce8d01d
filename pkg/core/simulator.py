"""
simulator.py

Purpose:
--------
Exact statevector simulation of the QAOA ansatz for diagonal Z-polynomial
cost Hamiltonians.

    |psi(gamma, beta)> = prod_l exp(-i beta_l M) exp(-i gamma_l H) |+>^N

with the transverse-field mixer M = sum_i X_i.

This module:
- Prepares |+>^N and applies cost / mixer layers
- Evaluates <H>, single Pauli-Z string expectations and the correlation
  dictionary (one expectation per Hamiltonian term)
- Samples computational-basis bitstrings with a seeded PCG64 generator
- Counts every <H> evaluation and circuit execution (EvaluationCounter)

It does NOT:
- Optimize parameters (see core/hrqaoa.py)
- Model noise, density matrices or hardware backends

Invariants:
-----------
1. Every StateVector has unit norm within NORM_TOLERANCE
2. Cost layers never change any |amplitude|^2
3. Variable i is bit i of the basis-state label (little-endian)
4. The offset is a global phase in layers but IS part of <H>
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from core.errors import ResourceCapError, UsageError
from core.pcbo import (
    SpinHamiltonian,
    Term,
    bits_to_spins,
    energy_table,
    term_mask,
    walsh_hadamard,
)

logger = logging.getLogger(__name__)

# 2^24 complex128 amplitudes = 256 MiB.
SIMULATION_CAP = 24
NORM_TOLERANCE = 1e-10


# =============================================================================
# Domain Exceptions
# =============================================================================

class SimulatorError(UsageError):
    """Base exception for simulator contract violations."""
    pass


class DimensionMismatch(SimulatorError):
    """Raised when a Hamiltonian and a state disagree on qubit count."""
    pass


class SimulationCapExceeded(ResourceCapError):
    """Raised when a statevector would exceed the configured qubit cap."""
    pass


# =============================================================================
# Domain Types
# =============================================================================

@dataclass(frozen=True)
class StateVector:
    """2^N complex amplitudes of unit norm."""

    amplitudes: np.ndarray
    num_qubits: int

    def __post_init__(self) -> None:
        amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if amplitudes.shape != (1 << self.num_qubits,):
            raise SimulatorError(
                f"expected {1 << self.num_qubits} amplitudes for {self.num_qubits} qubits, "
                f"got shape {amplitudes.shape}"
            )
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise SimulatorError(f"state norm {norm} differs from 1")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class QaoaParams:
    """Depth-p angles; gammas drive cost layers, betas drive mixer layers."""

    gammas: Tuple[float, ...]
    betas: Tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        if len(self.gammas) != len(self.betas):
            raise SimulatorError(
                f"{len(self.gammas)} gammas but {len(self.betas)} betas"
            )
        if not self.gammas:
            raise SimulatorError("depth p must be >= 1")

    @property
    def depth(self) -> int:
        return len(self.gammas)

    def as_vector(self) -> np.ndarray:
        """Flat (gamma_1..gamma_p, beta_1..beta_p) vector for optimizers."""
        return np.array(self.gammas + self.betas, dtype=float)

    @classmethod
    def from_vector(cls, theta: Sequence[float]) -> "QaoaParams":
        theta = np.asarray(theta, dtype=float)
        if theta.ndim != 1 or theta.size % 2 or theta.size == 0:
            raise SimulatorError(f"parameter vector must have even nonzero length, got {theta.shape}")
        p = theta.size // 2
        return cls(gammas=tuple(theta[:p]), betas=tuple(theta[p:]))


@dataclass(frozen=True)
class CorrelationDictionary:
    """Expectation <prod_{i in T} Z_i> for each term T of a Hamiltonian."""

    entries: Dict[Term, float]

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class EvaluationCounter:
    """
    Running totals of quantum work.

    energy_evaluations counts target-sized <H> evaluations, circuit_executions
    counts state preparations, optimizer_iterations counts objective calls
    made by variational loops.
    """

    energy_evaluations: int = 0
    circuit_executions: int = 0
    optimizer_iterations: int = 0

    def add(self, other: "EvaluationCounter") -> None:
        self.energy_evaluations += other.energy_evaluations
        self.circuit_executions += other.circuit_executions
        self.optimizer_iterations += other.optimizer_iterations

    def as_dict(self) -> Dict[str, int]:
        return {
            "energy_evaluations": self.energy_evaluations,
            "circuit_executions": self.circuit_executions,
            "optimizer_iterations": self.optimizer_iterations,
        }


# =============================================================================
# Validation helpers
# =============================================================================

def _check_cap(num_qubits: int, cap: int) -> None:
    if num_qubits < 1:
        raise SimulatorError(f"need at least one qubit, got {num_qubits}")
    if num_qubits > cap:
        raise SimulationCapExceeded(f"{num_qubits} qubits exceeds the simulation cap of {cap}")


def _check_dimensions(state: StateVector, hamiltonian: SpinHamiltonian) -> None:
    if hamiltonian.num_vars != state.num_qubits:
        raise DimensionMismatch(
            f"Hamiltonian on {hamiltonian.num_vars} variables, state on {state.num_qubits} qubits"
        )


def cost_energies(hamiltonian: SpinHamiltonian, cap: int = SIMULATION_CAP) -> np.ndarray:
    """Diagonal of H over the computational basis; built once per Hamiltonian."""
    _check_cap(hamiltonian.num_vars, cap)
    return energy_table(hamiltonian)


# =============================================================================
# Layers
# =============================================================================

def prepare_plus_state(num_qubits: int, cap: int = SIMULATION_CAP) -> StateVector:
    _check_cap(num_qubits, cap)
    size = 1 << num_qubits
    return StateVector(np.full(size, 1.0 / np.sqrt(size), dtype=complex), num_qubits)


def apply_cost_layer(
    state: StateVector,
    hamiltonian: SpinHamiltonian,
    gamma: float,
    energies: Optional[np.ndarray] = None,
) -> StateVector:
    """Multiply amplitude x by exp(-i gamma E(x)); `energies` may be precomputed."""
    _check_dimensions(state, hamiltonian)
    if energies is None:
        energies = energy_table(hamiltonian)
    return StateVector(state.amplitudes * np.exp(-1j * gamma * energies), state.num_qubits)


def apply_mixer_layer(state: StateVector, beta: float) -> StateVector:
    """
    exp(-i beta X) on every qubit.

    For qubit i the pair (a, b) of amplitudes differing only in bit i maps to
    (cos b * a - i sin b * b, -i sin b * a + cos b * b).
    """
    cos_b, sin_b = np.cos(beta), np.sin(beta)
    amplitudes = np.array(state.amplitudes, copy=True)
    n = state.num_qubits
    for qubit in range(n):
        view = amplitudes.reshape(1 << (n - qubit - 1), 2, 1 << qubit)
        low = view[:, 0, :].copy()
        high = view[:, 1, :].copy()
        view[:, 0, :] = cos_b * low - 1j * sin_b * high
        view[:, 1, :] = -1j * sin_b * low + cos_b * high
    return StateVector(amplitudes, n)


def run_qaoa(
    hamiltonian: SpinHamiltonian,
    params: QaoaParams,
    *,
    energies: Optional[np.ndarray] = None,
    counter: Optional[EvaluationCounter] = None,
    cap: int = SIMULATION_CAP,
) -> StateVector:
    """Prepare |+>^N and apply p cost-then-mixer alternations."""
    if energies is None:
        energies = cost_energies(hamiltonian, cap)
    state = prepare_plus_state(hamiltonian.num_vars, cap)
    for gamma, beta in zip(params.gammas, params.betas):
        state = apply_cost_layer(state, hamiltonian, gamma, energies)
        state = apply_mixer_layer(state, beta)
    if counter is not None:
        counter.circuit_executions += 1
    return state


# =============================================================================
# Measurements
# =============================================================================

def _parity_signs(num_qubits: int, term: Iterable[int]) -> np.ndarray:
    indices = np.arange(1 << num_qubits)
    signs = np.ones(indices.shape[0], dtype=float)
    for qubit in term:
        signs *= 1 - 2 * ((indices >> qubit) & 1)
    return signs


def expectation(state: StateVector, term: Sequence[int]) -> float:
    """<prod_{i in term} Z_i>, in [-1, 1]."""
    term = tuple(term)
    for qubit in term:
        if not 0 <= qubit < state.num_qubits:
            raise SimulatorError(f"qubit index {qubit} out of range [0, {state.num_qubits})")
    return float(state.probabilities() @ _parity_signs(state.num_qubits, term))


def energy_expectation(
    state: StateVector,
    hamiltonian: SpinHamiltonian,
    *,
    energies: Optional[np.ndarray] = None,
    counter: Optional[EvaluationCounter] = None,
) -> float:
    """<psi|H|psi>, offset included; counted as one <H> evaluation."""
    _check_dimensions(state, hamiltonian)
    if energies is None:
        energies = energy_table(hamiltonian)
    if counter is not None:
        counter.energy_evaluations += 1
    return float(state.probabilities() @ energies)


def correlation_dictionary(state: StateVector, hamiltonian: SpinHamiltonian) -> CorrelationDictionary:
    """
    Every term expectation at once: the Walsh-Hadamard transform of the
    probability vector holds <Z_S> at index mask(S).
    """
    _check_dimensions(state, hamiltonian)
    parities = walsh_hadamard(state.probabilities())
    return CorrelationDictionary(
        entries={term: float(parities[term_mask(term)]) for term in hamiltonian.terms}
    )


def sample_bitstrings(state: StateVector, shots: int, seed: int) -> np.ndarray:
    """
    i.i.d. computational-basis samples from |amplitude|^2.

    Returns an integer array of shape (shots, N); column i is bit i.
    Sampling uses numpy's PCG64 generator seeded with `seed`.
    """
    if shots < 1:
        raise SimulatorError(f"shots must be >= 1, got {shots}")
    probabilities = state.probabilities()
    probabilities = probabilities / probabilities.sum()
    rng = np.random.default_rng(seed)
    outcomes = rng.choice(probabilities.shape[0], size=shots, p=probabilities)
    return ((outcomes[:, np.newaxis] >> np.arange(state.num_qubits)) & 1).astype(np.int64)


def sampled_correlation_dictionary(
    state: StateVector,
    hamiltonian: SpinHamiltonian,
    shots: int,
    seed: int,
) -> CorrelationDictionary:
    """Correlation dictionary estimated from `shots` basis samples."""
    _check_dimensions(state, hamiltonian)
    spins = bits_to_spins(sample_bitstrings(state, shots, seed))
    entries = {
        term: float(np.prod(spins[:, list(term)], axis=1).mean())
        for term in hamiltonian.terms
    }
    logger.debug("Estimated %d correlations from %d shots", len(entries), shots)
    return CorrelationDictionary(entries=entries)


# =============================================================================
# Cached simulator
# =============================================================================

@dataclass
class QaoaSimulator:
    """
    One Hamiltonian, its precomputed energy table and an evaluation counter.

    Variational loops call `energy(params)` many times; the energy table is
    built once at construction.
    """

    hamiltonian: SpinHamiltonian
    cap: int = SIMULATION_CAP
    counter: EvaluationCounter = field(default_factory=EvaluationCounter)

    def __post_init__(self) -> None:
        self.energies = cost_energies(self.hamiltonian, self.cap)

    def state(self, params: QaoaParams) -> StateVector:
        return run_qaoa(
            self.hamiltonian, params, energies=self.energies, counter=self.counter, cap=self.cap
        )

    def energy(self, params: QaoaParams) -> float:
        return energy_expectation(
            self.state(params), self.hamiltonian, energies=self.energies, counter=self.counter
        )

    def correlations(self, params: QaoaParams) -> CorrelationDictionary:
        return correlation_dictionary(self.state(params), self.hamiltonian)
