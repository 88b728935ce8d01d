# tests/test_formulation_builder.py

import numpy as np
import pytest

from builders.formulation_builder import (
    FORMULATIONS,
    FormulationError,
    build_entropy_cubo,
    build_formulation,
    build_full_qubo,
    build_miqubo,
    build_mrmr,
)
from core.dataset import LABEL, make_matrix
from core.infotheory import conditional_entropy, entropy, mutual_information
from core.pcbo import AlphaWeights


def _label_copy_and_distractor():
    rng = np.random.default_rng(0)
    labels = rng.integers(0, 2, size=64)
    distractor = rng.integers(0, 2, size=64)
    return make_matrix(np.stack([labels, distractor], axis=1), labels)


#4.1 mRMR
def test_mrmr_linear_term_is_minus_label_entropy():
    matrix = _label_copy_and_distractor()

    problem = build_mrmr(matrix, lam=1.0)

    assert problem.terms[(0,)] == pytest.approx(-entropy(matrix, [LABEL]), abs=1e-12)
    assert problem.cardinality is None


def test_mrmr_two_features_give_three_terms():
    problem = build_mrmr(_label_copy_and_distractor(), lam=1.0)

    assert len(problem.terms) == 3


def test_mrmr_duplicates_are_penalized_twice_their_entropy():
    # Both orderings (0, 1) and (1, 0) accumulate onto one term.
    rng = np.random.default_rng(1)
    column = rng.integers(0, 3, size=50)
    matrix = make_matrix(np.stack([column, column], axis=1), rng.integers(0, 2, size=50))

    problem = build_mrmr(matrix, lam=1.0)

    assert problem.terms[(0, 1)] == pytest.approx(2 * entropy(matrix, [0]), abs=1e-12)


#4.2 miqubo / full-qubo
def test_miqubo_single_feature_has_no_pairs():
    matrix = make_matrix(np.array([[0], [1], [1], [0]]), np.array([0, 1, 1, 1]))

    problem = build_miqubo(matrix, lam=2.0)

    assert set(problem.terms) == {(0,)}
    assert problem.terms[(0,)] == pytest.approx(-2.0 * mutual_information(matrix, [0], [LABEL]), abs=1e-12)


def test_miqubo_rewards_xor_synergy(xor_matrix):
    pair = make_matrix(xor_matrix.values[:, :2], xor_matrix.labels)

    problem = build_miqubo(pair, lam=1.0)

    assert problem.terms[(0, 1)] == pytest.approx(-2.0, abs=1e-9)


def test_full_qubo_penalizes_duplicated_informative_feature():
    rng = np.random.default_rng(2)
    labels = rng.integers(0, 2, size=80)
    matrix = make_matrix(np.stack([labels, labels], axis=1), labels)

    problem = build_full_qubo(matrix)

    # I(f0; f1) = H(y) twice, I(f_i; y | f_j) = 0
    assert problem.terms[(0, 1)] == pytest.approx(2 * entropy(matrix, [LABEL]), abs=1e-9)
    assert problem.terms[(0,)] == pytest.approx(-10.0 * entropy(matrix, [LABEL]), abs=1e-9)


#4.3 entropy-cubo
def test_entropy_cubo_three_features_gives_one_cubic_term():
    rng = np.random.default_rng(3)
    matrix = make_matrix(rng.integers(0, 3, size=(90, 3)), rng.integers(0, 2, size=90))

    problem = build_entropy_cubo(matrix, AlphaWeights(0.0, 0.0, 1.0), k=3)

    expected = entropy(matrix, [0, 1, 2]) - conditional_entropy(matrix, [0, 1, 2], [LABEL])
    assert list(problem.terms) == [(0, 1, 2)]
    assert problem.terms[(0, 1, 2)] == pytest.approx(-expected, abs=1e-12)
    assert problem.cardinality == 3


def test_entropy_cubo_linear_block_normalized_by_k():
    matrix = _label_copy_and_distractor()

    problem = build_entropy_cubo(matrix, AlphaWeights(1.0, 0.0, 0.0), k=2)

    assert problem.order == 1
    assert problem.terms[(0,)] == pytest.approx(-entropy(matrix, [LABEL]) / 2, abs=1e-12)


def test_entropy_cubo_coefficients_never_positive(planted_matrix):
    matrix, _ = planted_matrix

    problem = build_entropy_cubo(matrix, AlphaWeights(0.2, 0.3, 0.5), k=4)

    assert all(c <= 0 for c in problem.terms.values())
    assert problem.order == 3


def test_entropy_cubo_k_out_of_range():
    matrix = _label_copy_and_distractor()

    with pytest.raises(FormulationError):
        build_entropy_cubo(matrix, AlphaWeights(0.0, 0.0, 1.0), k=5)
    with pytest.raises(FormulationError):
        build_entropy_cubo(matrix, AlphaWeights(0.0, 0.0, 1.0), k=2)


#4.4 Registry
def test_every_registered_formulation_builds(planted_matrix):
    matrix, _ = planted_matrix

    for name in FORMULATIONS:
        problem = build_formulation(matrix, name, lam=1.0, k=3)
        assert problem.num_vars == matrix.num_features
        assert problem.cardinality == 3


def test_builds_are_deterministic(planted_matrix):
    matrix, _ = planted_matrix

    first = build_formulation(matrix, "entropy-cubo", k=4)
    second = build_formulation(matrix, "entropy-cubo", k=4)

    assert list(first.terms.items()) == list(second.terms.items())


def test_registry_falls_back_to_each_formulation_default_weight(planted_matrix):
    matrix, _ = planted_matrix

    assert build_formulation(matrix, "full-qubo").terms == build_full_qubo(matrix).terms
    assert build_formulation(matrix, "full-qubo").terms == build_full_qubo(matrix, 10.0).terms
    assert build_formulation(matrix, "mrmr").terms == build_mrmr(matrix, 1.0).terms


def test_unknown_formulation_rejected(planted_matrix):
    with pytest.raises(FormulationError):
        build_formulation(planted_matrix[0], "quartic", k=3)
