# tests/test_pcbo.py

import itertools

import numpy as np
import pytest

from builders.instance_builder import random_binary_problem, random_spin_hamiltonian
from core.pcbo import (
    AlphaWeights,
    AssignmentError,
    CardinalityError,
    InvalidTerm,
    PolyBinaryProblem,
    ProblemError,
    SpinHamiltonian,
    apply_cardinality_penalty,
    bits_to_spins,
    energy_table,
    evaluate_binary,
    evaluate_spin,
    index_to_spins,
    selected_features,
    spins_to_bits,
    to_binary,
    to_spin,
    walsh_hadamard,
)
from tests.helpers import all_spin_vectors, binary_energy, spin_energy


#3.1 Canonical form
def test_terms_are_sorted_merged_and_pruned():
    problem = PolyBinaryProblem(num_vars=3, terms={(1, 0): 1.0, (0, 1): 0.5, (2,): 1e-15})

    assert problem.terms == {(0, 1): 1.5}


def test_repeated_index_rejected():
    with pytest.raises(InvalidTerm):
        SpinHamiltonian(num_vars=3, terms={(1, 1): 1.0})


def test_out_of_range_index_rejected():
    with pytest.raises(InvalidTerm):
        PolyBinaryProblem(num_vars=2, terms={(0, 2): 1.0})


def test_empty_term_rejected():
    with pytest.raises(InvalidTerm):
        SpinHamiltonian(num_vars=2, terms={(): 1.0})


def test_cardinality_outside_range_rejected():
    with pytest.raises(CardinalityError):
        PolyBinaryProblem(num_vars=2, cardinality=3)


def test_alpha_weights_must_sum_to_one():
    with pytest.raises(ProblemError):
        AlphaWeights(0.5, 0.2, 0.2)


#3.2 Evaluation
def test_evaluate_binary_corner_cases():
    problem = PolyBinaryProblem(num_vars=3, terms={(0,): 2.0, (1, 2): -1.0, (0, 1, 2): 4.0}, constant=0.5)

    assert evaluate_binary(problem, [0, 0, 0]) == 0.5
    assert evaluate_binary(problem, [1, 1, 1]) == 0.5 + 2.0 - 1.0 + 4.0


def test_evaluate_binary_length_mismatch():
    with pytest.raises(AssignmentError):
        evaluate_binary(PolyBinaryProblem(num_vars=2), [1])


def test_evaluate_spin_rejects_non_spin_entries():
    with pytest.raises(AssignmentError):
        evaluate_spin(SpinHamiltonian(num_vars=2, terms={(0,): 1.0}), [1, 0])


def test_weight_one_term_flips_with_its_spin():
    hamiltonian = SpinHamiltonian(num_vars=2, terms={(0,): 3.0}, offset=1.0)

    assert evaluate_spin(hamiltonian, [1, 1]) == 4.0
    assert evaluate_spin(hamiltonian, [-1, 1]) == -2.0


def test_random_problem_matches_term_by_term_oracle():
    problem = random_binary_problem(8, seed=3)
    rng = np.random.default_rng(0)
    for _ in range(20):
        bits = rng.integers(0, 2, size=8)
        assert evaluate_binary(problem, bits) == pytest.approx(
            binary_energy(problem.terms, problem.constant, bits), abs=1e-12
        )


#3.3 Penalty
def test_penalty_expansion_two_variables():
    problem = PolyBinaryProblem(num_vars=2, cardinality=1)

    penalized = apply_cardinality_penalty(problem, 1.0)

    assert penalized.cardinality is None
    assert penalized.constant == 1.0
    assert penalized.terms == {(0,): -1.0, (1,): -1.0, (0, 1): 2.0}
    values = {bits: evaluate_binary(penalized, bits) for bits in itertools.product((0, 1), repeat=2)}
    assert values == {(0, 0): 1.0, (0, 1): 0.0, (1, 0): 0.0, (1, 1): 1.0}


def test_penalty_with_zero_target():
    penalized = apply_cardinality_penalty(PolyBinaryProblem(num_vars=3, cardinality=0), 2.0)

    assert evaluate_binary(penalized, [0, 0, 0]) == 0.0
    assert penalized.terms[(1,)] == 2.0
    assert penalized.terms[(0, 2)] == 4.0


def test_penalty_preserves_feasible_energies():
    base = random_binary_problem(7, seed=5)
    problem = PolyBinaryProblem(num_vars=7, terms=base.terms, constant=base.constant, cardinality=3)

    penalized = apply_cardinality_penalty(problem, 5.0)

    for subset in itertools.combinations(range(7), 3):
        bits = np.zeros(7, dtype=np.int64)
        bits[list(subset)] = 1
        assert evaluate_binary(penalized, bits) == pytest.approx(evaluate_binary(problem, bits), abs=1e-9)


def test_large_penalty_makes_global_minimum_feasible():
    # |coefficient| <= 0.1: one flip moves Q by at most 2.9 < lambda_c
    rng = np.random.default_rng(2)
    for seed in range(5):
        terms = {
            term: float(rng.uniform(-0.1, 0.1))
            for order in (1, 2, 3)
            for term in itertools.combinations(range(8), order)
        }
        problem = PolyBinaryProblem(num_vars=8, terms=terms, cardinality=4)
        hamiltonian = to_spin(apply_cardinality_penalty(problem, 5.0))

        ground = int(np.argmin(energy_table(hamiltonian)))

        assert spins_to_bits(index_to_spins(ground, 8)).sum() == 4


def test_penalty_requires_cardinality():
    with pytest.raises(CardinalityError):
        apply_cardinality_penalty(PolyBinaryProblem(num_vars=2), 5.0)


def test_penalty_requires_positive_lambda():
    with pytest.raises(ProblemError):
        apply_cardinality_penalty(PolyBinaryProblem(num_vars=2, cardinality=1), 0.0)


#3.4 Spin transform
def test_to_spin_linear():
    hamiltonian = to_spin(PolyBinaryProblem(num_vars=1, terms={(0,): 3.0}))

    assert hamiltonian.offset == 1.5
    assert hamiltonian.terms == {(0,): -1.5}


def test_to_spin_quadratic():
    hamiltonian = to_spin(PolyBinaryProblem(num_vars=2, terms={(0, 1): 1.0}))

    assert hamiltonian.offset == 0.25
    assert hamiltonian.terms == {(0,): -0.25, (1,): -0.25, (0, 1): 0.25}


def test_to_spin_cubic():
    hamiltonian = to_spin(PolyBinaryProblem(num_vars=3, terms={(0, 1, 2): 1.0}))

    assert hamiltonian.offset == 0.125
    assert hamiltonian.terms == {
        (0,): -0.125, (1,): -0.125, (2,): -0.125,
        (0, 1): 0.125, (0, 2): 0.125, (1, 2): 0.125,
        (0, 1, 2): -0.125,
    }


def test_to_spin_requires_unconstrained_problem():
    with pytest.raises(CardinalityError):
        to_spin(PolyBinaryProblem(num_vars=2, cardinality=1))


def test_binary_and_spin_energies_agree_exhaustively():
    for seed in range(50):
        num_vars = 2 + seed % 9
        problem = random_binary_problem(num_vars, seed=seed, density=0.6)
        if seed % 2:
            constrained = PolyBinaryProblem(
                num_vars=num_vars, terms=problem.terms, constant=problem.constant, cardinality=num_vars // 2
            )
            problem = apply_cardinality_penalty(constrained, 5.0)
        hamiltonian = to_spin(problem)
        for spins in all_spin_vectors(num_vars):
            bits = [(1 - s) // 2 for s in spins]
            assert evaluate_spin(hamiltonian, spins) == pytest.approx(evaluate_binary(problem, bits), abs=1e-9)


def test_to_binary_inverts_to_spin():
    hamiltonian = random_spin_hamiltonian(6, seed=4)

    back = to_spin(to_binary(hamiltonian))

    assert back.terms.keys() == hamiltonian.terms.keys()
    for term, coefficient in hamiltonian.terms.items():
        assert back.terms[term] == pytest.approx(coefficient, abs=1e-12)
    assert back.offset == pytest.approx(hamiltonian.offset, abs=1e-12)


#3.5 Energy tables and conversions
def test_energy_table_matches_per_state_evaluation():
    hamiltonian = random_spin_hamiltonian(7, seed=1)

    table = energy_table(hamiltonian)

    for index, spins in enumerate(all_spin_vectors(7)):
        assert table[index] == pytest.approx(spin_energy(hamiltonian.terms, hamiltonian.offset, spins), abs=1e-9)


def test_walsh_hadamard_rejects_non_power_of_two():
    with pytest.raises(ProblemError):
        walsh_hadamard(np.ones(3))


def test_spin_bit_conversions():
    assert bits_to_spins([0, 1, 1]).tolist() == [1, -1, -1]
    assert spins_to_bits([-1, 1]).tolist() == [1, 0]
    assert selected_features([0, 1, 0, 1]) == (1, 3)
    assert index_to_spins(5, 3).tolist() == [-1, 1, -1]
