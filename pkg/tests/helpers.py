"""
helpers.py

Independent re-implementations used as cross-checks.

These helpers:
---------------
- Recompute results the slow, obvious way (loops, Counters, dense matrices)
- Share NO code with the modules they check
- Do NOT contain assertions
"""

import itertools
import math
from collections import Counter

import numpy as np


def spin_energy(terms, offset, spins):
    """H(s) by explicit products."""
    total = offset
    for term, coefficient in terms.items():
        product = 1
        for i in term:
            product *= spins[i]
        total += coefficient * product
    return total


def binary_energy(terms, constant, bits):
    total = constant
    for term, coefficient in terms.items():
        if all(bits[i] == 1 for i in term):
            total += coefficient
    return total


def all_spin_vectors(num_vars):
    """Every spin vector, s_0 varying fastest (little-endian)."""
    for index in range(1 << num_vars):
        yield [1 - 2 * ((index >> i) & 1) for i in range(num_vars)]


def exhaustive_minimum(hamiltonian):
    """(energy, spins) minimum by looping over all 2^N assignments."""
    best = None
    for spins in all_spin_vectors(hamiltonian.num_vars):
        energy = spin_energy(hamiltonian.terms, hamiltonian.offset, spins)
        if best is None or energy < best[0] - 1e-12:
            best = (energy, spins)
    return best


def counted_entropy(rows):
    """Entropy in bits of a list of hashable outcomes."""
    counts = Counter(rows)
    total = len(rows)
    return -sum(c / total * math.log2(c / total) for c in counts.values())


def column_tuples(matrix, columns):
    """Per-row tuples of the given columns; -1 addresses the label."""
    table = []
    for r in range(matrix.num_samples):
        table.append(tuple(
            int(matrix.labels[r]) if c == -1 else int(matrix.values[r, c]) for c in columns
        ))
    return table


def dense_qaoa_state(energies, gammas, betas):
    """
    QAOA state by dense matrices: diag(exp(-i gamma E)) then the Kronecker
    product of single-qubit exp(-i beta X) per layer. Qubit 0 is the least
    significant bit of the basis index.
    """
    size = len(energies)
    num_qubits = size.bit_length() - 1
    state = np.full(size, 1 / math.sqrt(size), dtype=complex)
    for gamma, beta in zip(gammas, betas):
        state = np.exp(-1j * gamma * np.asarray(energies)) * state
        rx = np.array([[math.cos(beta), -1j * math.sin(beta)], [-1j * math.sin(beta), math.cos(beta)]])
        mixer = np.array([[1.0]])
        for _ in range(num_qubits):
            mixer = np.kron(rx, mixer)
        state = mixer @ state
    return state


def combinations_minimum(problem):
    """Cardinality-constrained minimum by itertools.combinations."""
    best = None
    for subset in itertools.combinations(range(problem.num_vars), problem.cardinality):
        bits = [0] * problem.num_vars
        for i in subset:
            bits[i] = 1
        energy = binary_energy(problem.terms, problem.constant, bits)
        if best is None or energy < best[0] - 1e-12:
            best = (energy, bits)
    return best


def lifted_indices(variable_map, term, eliminated, sign):
    """
    Original basis index for every survivor basis index, with the
    eliminated bit set so that Z_e = sign * prod of the other term members.
    """
    reduced = np.arange(1 << len(variable_map))
    full = np.zeros_like(reduced)
    for new, old in enumerate(variable_map):
        full |= ((reduced >> new) & 1) << old
    parity = np.full_like(reduced, 0 if sign == 1 else 1)
    for i in term:
        if i != eliminated:
            parity ^= (full >> i) & 1
    return full | (parity << eliminated)
