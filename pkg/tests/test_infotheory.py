# tests/test_infotheory.py

import numpy as np
import pytest

from core.dataset import LABEL, make_matrix
from core.infotheory import (
    EmptyColumns,
    EntropyCache,
    InfoTheoryError,
    OverlappingColumns,
    conditional_entropy,
    conditional_mutual_information,
    entropy,
    interaction_information,
    joint_distribution,
    mutual_information,
    mutual_information_from_counts,
    rank_by_relevance,
)
from tests.helpers import column_tuples, counted_entropy


def _matrix(rows, labels=None):
    values = np.array(rows, dtype=np.int64)
    if labels is None:
        labels = np.zeros(values.shape[0], dtype=np.int64)
    return make_matrix(values, np.asarray(labels, dtype=np.int64))


def _random_matrix(seed, rows=60, cols=4, alphabet=3):
    rng = np.random.default_rng(seed)
    return make_matrix(rng.integers(0, alphabet, size=(rows, cols)), rng.integers(0, 2, size=rows))


#2.1 Entropy
def test_fair_bit_has_one_bit():
    assert entropy(_matrix([[0], [1]]), [0]) == pytest.approx(1.0, abs=1e-12)


def test_constant_column_has_zero_entropy():
    assert entropy(_matrix([[1], [1], [1]]), [0]) == 0.0


def test_two_independent_bits_have_two_bits(xor_matrix):
    assert entropy(xor_matrix, [0, 1]) == pytest.approx(2.0, abs=1e-12)


def test_entropy_matches_counting_oracle():
    matrix = _random_matrix(1)
    for columns in ([0], [1, 3], [0, 2, LABEL]):
        expected = counted_entropy(column_tuples(matrix, columns))
        assert entropy(matrix, columns) == pytest.approx(expected, abs=1e-12)


def test_entropy_is_permutation_invariant_and_bounded():
    matrix = _random_matrix(2)

    assert entropy(matrix, [0, 1, 2]) == entropy(matrix, [2, 0, 1])
    assert entropy(matrix, [0, 1, 2]) <= 3 * np.log2(3) + 1e-12


def test_empty_column_list_rejected():
    with pytest.raises(EmptyColumns):
        entropy(_random_matrix(0), [])


def test_joint_distribution_counts_observed_tuples_only(xor_matrix):
    joint = joint_distribution(xor_matrix, [0, 1, 2])

    assert joint.total == 8
    assert joint.arity == 3
    assert sum(joint.counts.values()) == 8
    assert len(joint.counts) == 4


#2.2 Conditional entropy
def test_overlap_rejected():
    with pytest.raises(OverlappingColumns):
        conditional_entropy(_random_matrix(0), [0], [0])


def test_copy_of_label_has_zero_conditional_entropy():
    matrix = _matrix([[0], [1], [1], [0]], labels=[0, 1, 1, 0])

    assert conditional_entropy(matrix, [0], [LABEL]) == pytest.approx(0.0, abs=1e-12)


def test_chain_rule_on_random_matrices():
    for seed in range(5):
        matrix = _random_matrix(seed)
        joint = entropy(matrix, [0, 1])
        assert joint == pytest.approx(entropy(matrix, [0]) + conditional_entropy(matrix, [1], [0]), abs=1e-9)


#2.3 Mutual information
def test_mutual_information_is_symmetric_exactly():
    matrix = _random_matrix(4)

    assert mutual_information(matrix, [0], [1]) == mutual_information(matrix, [1], [0])


def test_copy_has_mutual_information_equal_to_entropy():
    matrix = _matrix([[0, 0], [1, 1], [2, 2], [0, 0]])

    assert mutual_information(matrix, [0], [1]) == pytest.approx(entropy(matrix, [0]), abs=1e-12)


def test_noisy_copy_three_to_one():
    # a fair; b equals a in 3 of 4 rows per value
    rows = [[0, 0]] * 3 + [[0, 1]] + [[1, 1]] * 3 + [[1, 0]]
    matrix = _matrix(rows)
    h = -(0.25 * np.log2(0.25) + 0.75 * np.log2(0.75))

    assert mutual_information(matrix, [0], [1]) == pytest.approx(1 - h, abs=1e-9)
    assert mutual_information(matrix, [0], [1]) == pytest.approx(0.1887, abs=1e-4)


def test_double_sum_form_agrees():
    for seed in range(5):
        matrix = _random_matrix(seed)
        assert mutual_information_from_counts(matrix, [0, 1], [2]) == pytest.approx(
            mutual_information(matrix, [0, 1], [2]), abs=1e-9
        )


def test_mutual_information_is_non_negative():
    for seed in range(10):
        matrix = _random_matrix(seed, rows=15)
        assert mutual_information(matrix, [0], [LABEL]) >= -1e-9
        assert conditional_mutual_information(matrix, [0], [1], [2]) >= -1e-9


#2.4 Synergy on the exact XOR table
def test_xor_conditional_mutual_information_is_one_bit(xor_matrix):
    assert conditional_mutual_information(xor_matrix, [0], [1], [2]) == pytest.approx(1.0, abs=1e-9)


def test_xor_interaction_information_is_minus_one_bit(xor_matrix):
    assert interaction_information(xor_matrix, [0, 1, 2]) == pytest.approx(-1.0, abs=1e-9)


def test_independent_bits_have_zero_interaction():
    rows = [[a, b, c] for a in (0, 1) for b in (0, 1) for c in (0, 1)]
    matrix = _matrix(rows)

    assert interaction_information(matrix, [0, 1, 2]) == pytest.approx(0.0, abs=1e-9)
    assert conditional_mutual_information(matrix, [0], [1], [2]) == pytest.approx(0.0, abs=1e-9)


def test_interaction_of_two_columns_is_mutual_information():
    matrix = _random_matrix(6)

    assert interaction_information(matrix, [0, 1]) == mutual_information(matrix, [0], [1])


def test_three_way_interaction_is_role_symmetric():
    matrix = _random_matrix(8)
    reference = interaction_information(matrix, [0, 1, 2])

    for order in ([1, 2, 0], [2, 0, 1], [0, 2, 1]):
        assert interaction_information(matrix, order) == pytest.approx(reference, abs=1e-9)


def test_interaction_needs_two_columns():
    with pytest.raises(InfoTheoryError):
        interaction_information(_random_matrix(0), [0])


def test_empty_conditioning_set_rejected():
    with pytest.raises(EmptyColumns):
        conditional_mutual_information(_random_matrix(0), [0], [1], [])


#2.5 Cache and relevance filter
def test_cache_agrees_with_direct_calls():
    matrix = _random_matrix(9)
    cache = EntropyCache(matrix)

    assert cache.entropy([2, 0]) == entropy(matrix, [0, 2])
    assert cache.relevance([1]) == pytest.approx(mutual_information(matrix, [1], [LABEL]), abs=1e-12)
    assert cache.conditional_relevance(0, 1) == pytest.approx(
        conditional_mutual_information(matrix, [0], [LABEL], [1]), abs=1e-9
    )


def test_rank_by_relevance_finds_planted_features(planted_matrix):
    matrix, planted = planted_matrix

    assert tuple(rank_by_relevance(matrix, len(planted))) == planted
