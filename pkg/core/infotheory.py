"""
infotheory.py

Purpose:
--------
Shannon-entropy family over the empirical distributions of small-alphabet
columns: entropy, conditional entropy, mutual information, conditional
mutual information and interaction information.

This module:
- Counts only the tuples actually observed (sparse joints)
- Uses the plug-in estimator, base-2 logarithms, no bias correction
- Treats the matrix as read-only

It does NOT:
- Know about PCBO formulations (see builders/formulation_builder.py)
- Estimate continuous or differential entropies

Invariants:
-----------
1. Entropy is permutation-invariant in its column list
2. I(a;b) == I(b;a)
3. H(a,b) == H(a) + H(b|a) to floating-point tolerance
4. Every quantity is a chain-rule combination of entropy() calls
"""

from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from core.dataset import LABEL, FeatureMatrix
from core.errors import UsageError


# =============================================================================
# Domain Exceptions
# =============================================================================

class InfoTheoryError(UsageError):
    """Base exception for information-theoretic contract violations."""
    pass


class OverlappingColumns(InfoTheoryError):
    """Raised when column groups that must be disjoint share an index."""
    pass


class EmptyColumns(InfoTheoryError):
    """Raised when a required column group is empty."""
    pass


# =============================================================================
# Domain Types
# =============================================================================

@dataclass(frozen=True)
class JointDistribution:
    """
    Observed joint counts over a column tuple.

    counts maps each observed value tuple to its occurrence count; tuples
    that never occur are not materialized.
    """

    counts: Dict[Tuple[int, ...], int]
    total: int
    arity: int

    def probabilities(self) -> np.ndarray:
        return np.fromiter(self.counts.values(), dtype=float) / self.total


# =============================================================================
# Counting
# =============================================================================

def _check_columns(matrix: FeatureMatrix, columns: Sequence[int]) -> List[int]:
    columns = list(columns)
    if not columns:
        raise EmptyColumns("column list must be nonempty")
    for index in columns:
        matrix.column(index)
    return columns


def _joint_codes(matrix: FeatureMatrix, columns: Sequence[int]) -> np.ndarray:
    """Encode each row's value tuple as one mixed-radix integer."""
    codes = np.zeros(matrix.num_samples, dtype=np.int64)
    for index in columns:
        codes = codes * matrix.alphabet(index) + matrix.column(index)
    return codes


def _entropy_from_counts(counts: np.ndarray) -> float:
    total = counts.sum()
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def joint_distribution(matrix: FeatureMatrix, columns: Sequence[int]) -> JointDistribution:
    """Sparse joint counts of the given columns (label addressable as LABEL)."""
    columns = _check_columns(matrix, columns)
    stacked = np.stack([matrix.column(index) for index in columns], axis=1)
    tuples, counts = np.unique(stacked, axis=0, return_counts=True)
    return JointDistribution(
        counts={tuple(int(v) for v in row): int(c) for row, c in zip(tuples, counts)},
        total=matrix.num_samples,
        arity=len(columns),
    )


# =============================================================================
# Entropy family
# =============================================================================

def entropy(matrix: FeatureMatrix, columns: Sequence[int]) -> float:
    """
    Joint Shannon entropy H(columns) in bits.

    Raises:
    -------
    EmptyColumns
        If `columns` is empty.
    """
    columns = _check_columns(matrix, columns)
    # Duplicates add no information; a set keeps H(A, A) == H(A).
    unique = sorted(set(columns))
    _, counts = np.unique(_joint_codes(matrix, unique), return_counts=True)
    return _entropy_from_counts(counts)


def _disjoint(*groups: Sequence[int]) -> None:
    seen: set = set()
    for group in groups:
        overlap = seen.intersection(group)
        if overlap:
            raise OverlappingColumns(f"column groups overlap on {sorted(overlap)}")
        seen.update(group)


def conditional_entropy(matrix: FeatureMatrix, columns: Sequence[int], given: Sequence[int]) -> float:
    """H(columns | given) = H(columns, given) - H(given)."""
    _check_columns(matrix, columns)
    _check_columns(matrix, given)
    _disjoint(columns, given)
    return entropy(matrix, list(columns) + list(given)) - entropy(matrix, given)


def mutual_information(matrix: FeatureMatrix, a: Sequence[int], b: Sequence[int]) -> float:
    """
    I(a; b) = H(a) + H(b) - H(a, b).

    Written in the symmetric form so that swapping the arguments cannot
    change the floating-point result.
    """
    _check_columns(matrix, a)
    _check_columns(matrix, b)
    _disjoint(a, b)
    return entropy(matrix, a) + entropy(matrix, b) - entropy(matrix, list(a) + list(b))


def mutual_information_from_counts(matrix: FeatureMatrix, a: Sequence[int], b: Sequence[int]) -> float:
    """I(a; b) by the double sum of p(a,b) log2 p(a,b) / (p(a) p(b))."""
    _check_columns(matrix, a)
    _check_columns(matrix, b)
    _disjoint(a, b)
    code_a = _joint_codes(matrix, a)
    code_b = _joint_codes(matrix, b)
    pairs, joint = np.unique(np.stack([code_a, code_b], axis=1), axis=0, return_counts=True)
    values_a, counts_a = np.unique(code_a, return_counts=True)
    values_b, counts_b = np.unique(code_b, return_counts=True)
    total = matrix.num_samples

    marginal_a = dict(zip(values_a.tolist(), (counts_a / total).tolist()))
    marginal_b = dict(zip(values_b.tolist(), (counts_b / total).tolist()))
    result = 0.0
    for (va, vb), count in zip(pairs.tolist(), joint.tolist()):
        p = count / total
        result += p * np.log2(p / (marginal_a[va] * marginal_b[vb]))
    return float(result)


def conditional_mutual_information(
    matrix: FeatureMatrix,
    a: Sequence[int],
    b: Sequence[int],
    given: Sequence[int],
) -> float:
    """
    I(a; b | given) = H(a|given) + H(b|given) - H(a,b|given).

    An empty `given` is rejected; call mutual_information instead.
    """
    _check_columns(matrix, a)
    _check_columns(matrix, b)
    if not list(given):
        raise EmptyColumns("conditioning set is empty; use mutual_information")
    _check_columns(matrix, given)
    _disjoint(a, b, given)
    return (
        conditional_entropy(matrix, a, given)
        + conditional_entropy(matrix, b, given)
        - conditional_entropy(matrix, list(a) + list(b), given)
    )


def _interaction(matrix: FeatureMatrix, columns: List[int], given: List[int]) -> float:
    if len(columns) == 2:
        if given:
            return conditional_mutual_information(matrix, [columns[0]], [columns[1]], given)
        return mutual_information(matrix, [columns[0]], [columns[1]])
    head, last = columns[:-1], columns[-1]
    return _interaction(matrix, head, given) - _interaction(matrix, head, given + [last])


def interaction_information(matrix: FeatureMatrix, columns: Sequence[int]) -> float:
    """
    Interaction information I(X_1; ...; X_k) by the recursion

        I(X_1;...;X_k) = I(X_1;...;X_{k-1}) - I(X_1;...;X_{k-1} | X_k)

    with mutual information as the k = 2 base case. Negative values mean
    synergy.

    Raises:
    -------
    InfoTheoryError
        If fewer than two columns are given.
    """
    columns = list(columns)
    if len(columns) < 2:
        raise InfoTheoryError(f"interaction information needs k >= 2 columns, got {len(columns)}")
    _check_columns(matrix, columns)
    if len(set(columns)) != len(columns):
        raise OverlappingColumns(f"columns must be distinct: {columns}")
    return _interaction(matrix, columns, [])


# =============================================================================
# Cached scoring
# =============================================================================

class EntropyCache:
    """
    Memoised joint entropies for one matrix.

    Keys are sorted column tuples, so H(i, j) and H(j, i) share an entry.
    Builders query the same subsets many times (with and without the
    label); this keeps each distinct subset to one counting pass.
    """

    def __init__(self, matrix: FeatureMatrix):
        self.matrix = matrix
        self._memo: Dict[Tuple[int, ...], float] = {}

    def entropy(self, columns: Iterable[int]) -> float:
        key = tuple(sorted(set(columns)))
        if key not in self._memo:
            self._memo[key] = entropy(self.matrix, key)
        return self._memo[key]

    def relevance(self, columns: Sequence[int]) -> float:
        """H(columns) - H(columns | y), i.e. I(columns; y)."""
        with_label = list(columns) + [LABEL]
        return self.entropy(columns) + self.entropy([LABEL]) - self.entropy(with_label)

    def mutual_information(self, a: int, b: int) -> float:
        return self.entropy([a]) + self.entropy([b]) - self.entropy([a, b])

    def conditional_relevance(self, i: int, j: int) -> float:
        """I(f_i; y | f_j)."""
        return (
            self.entropy([i, j]) + self.entropy([LABEL, j])
            - self.entropy([i, LABEL, j]) - self.entropy([j])
        )


def rank_by_relevance(matrix: FeatureMatrix, k: int) -> List[int]:
    """
    Univariate mutual-information filter: the k features with the largest
    I(f; y), ties broken by lower index.
    """
    if not 1 <= k <= matrix.num_features:
        raise InfoTheoryError(f"k must lie in [1, {matrix.num_features}], got {k}")
    cache = EntropyCache(matrix)
    scores = [(-cache.relevance([j]), j) for j in range(matrix.num_features)]
    return sorted(j for _, j in sorted(scores)[:k])
