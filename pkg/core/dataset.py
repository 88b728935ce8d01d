"""
dataset.py

Purpose:
--------
Small-alphabet tabular data: the FeatureMatrix every information-theoretic
scorer consumes, quantile discretization of real-valued columns, and a
planted-feature synthesizer used as a stand-in for clinical cohorts.

This module:
- Validates matrices at construction (illegal matrices are unrepresentable)
- Discretizes with frozen, serializable bin edges
- Synthesizes reproducible planted datasets

It does NOT:
- Read or write files (see repositories/tables.py)
- Compute entropies (see core/infotheory.py)

Invariants:
-----------
1. Every value in column j lies in [0, alphabets[j])
2. Every label lies in [0, label_alphabet)
3. Discretization is monotone and invariant under strictly increasing maps
4. Everything here is a pure function of its inputs (plus seed)
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.errors import DataError, UsageError

# Pseudo-column index addressing the label in column lists.
LABEL = -1


# =============================================================================
# Domain Exceptions
# =============================================================================

class DatasetError(DataError):
    """Raised when a matrix violates its invariants."""
    pass


class DiscretizationError(UsageError):
    """Raised when a discretization request is outside its contract."""
    pass


# =============================================================================
# Domain Types
# =============================================================================

@dataclass(frozen=True)
class FeatureMatrix:
    """
    Samples x features of small-alphabet integers plus an integer label.

    Attributes:
    -----------
    values : np.ndarray
        Integer matrix, shape (R, F).
    alphabets : tuple[int, ...]
        Alphabet size per feature column.
    labels : np.ndarray
        Integer vector of length R.
    label_alphabet : int
        Alphabet size of the label.
    feature_names : tuple[str, ...]
        One name per feature column.
    """

    values: np.ndarray
    alphabets: Tuple[int, ...]
    labels: np.ndarray
    label_alphabet: int
    feature_names: Tuple[str, ...]

    def __post_init__(self) -> None:
        values = np.asarray(self.values)
        labels = np.asarray(self.labels)

        if values.ndim != 2:
            raise DatasetError(f"values must be 2-D, got shape {values.shape}")
        rows, cols = values.shape
        if rows < 1 or cols < 1:
            raise DatasetError(f"matrix must have R >= 1 and F >= 1, got {values.shape}")
        if labels.shape != (rows,):
            raise DatasetError(
                f"labels length {labels.shape} does not match {rows} rows"
            )
        if not np.issubdtype(values.dtype, np.integer) or not np.issubdtype(labels.dtype, np.integer):
            raise DatasetError("values and labels must be integer arrays")
        if len(self.alphabets) != cols or len(self.feature_names) != cols:
            raise DatasetError("alphabets and feature_names need one entry per column")

        alphabets = np.asarray(self.alphabets)
        if np.any(values < 0) or np.any(values >= alphabets[np.newaxis, :]):
            bad_row, bad_col = np.argwhere((values < 0) | (values >= alphabets[np.newaxis, :]))[0]
            raise DatasetError(
                f"value {values[bad_row, bad_col]} at row {bad_row}, column "
                f"'{self.feature_names[bad_col]}' outside alphabet [0, {alphabets[bad_col]})"
            )
        if np.any(labels < 0) or np.any(labels >= self.label_alphabet):
            raise DatasetError(f"labels must lie in [0, {self.label_alphabet})")

        # Freeze the arrays so shared matrices stay read-only.
        values = values.astype(np.int64, copy=True)
        labels = labels.astype(np.int64, copy=True)
        values.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "alphabets", tuple(int(a) for a in self.alphabets))
        object.__setattr__(self, "feature_names", tuple(str(n) for n in self.feature_names))

    @property
    def num_samples(self) -> int:
        return int(self.values.shape[0])

    @property
    def num_features(self) -> int:
        return int(self.values.shape[1])

    def column(self, index: int) -> np.ndarray:
        """Feature column `index`, or the label when index == LABEL."""
        if index == LABEL:
            return self.labels
        if not 0 <= index < self.num_features:
            raise DatasetError(f"column index {index} out of range [0, {self.num_features})")
        return self.values[:, index]

    def alphabet(self, index: int) -> int:
        if index == LABEL:
            return self.label_alphabet
        if not 0 <= index < self.num_features:
            raise DatasetError(f"column index {index} out of range [0, {self.num_features})")
        return self.alphabets[index]


@dataclass(frozen=True)
class BinSpec:
    """
    Frozen quantile bin edges for one column.

    `levels` is always len(edges) + 1; duplicate quantiles are merged
    before a BinSpec is built, so edges are strictly increasing.
    """

    edges: Tuple[float, ...]
    levels: int

    def __post_init__(self) -> None:
        if self.levels < 2:
            raise DiscretizationError(f"levels must be >= 2, got {self.levels}")
        if len(self.edges) != self.levels - 1:
            raise DiscretizationError(
                f"expected {self.levels - 1} edges for {self.levels} levels, got {len(self.edges)}"
            )
        if any(b <= a for a, b in zip(self.edges, self.edges[1:])):
            raise DiscretizationError(f"edges must be strictly increasing: {self.edges}")


# =============================================================================
# Matrix construction
# =============================================================================

def make_matrix(
    values: np.ndarray,
    labels: np.ndarray,
    feature_names: Optional[Sequence[str]] = None,
    alphabets: Optional[Sequence[int]] = None,
    label_alphabet: Optional[int] = None,
) -> FeatureMatrix:
    """
    Build a FeatureMatrix, inferring alphabets as (max observed value + 1).
    """
    values = np.asarray(values)
    labels = np.asarray(labels)
    if values.ndim != 2 or values.size == 0:
        raise DatasetError(f"values must be a non-empty 2-D array, got shape {values.shape}")
    if feature_names is None:
        feature_names = [f"f{j}" for j in range(values.shape[1])]
    if alphabets is None:
        alphabets = [int(values[:, j].max()) + 1 for j in range(values.shape[1])]
    if label_alphabet is None:
        label_alphabet = int(labels.max()) + 1 if labels.size else 0
    return FeatureMatrix(
        values=values,
        alphabets=tuple(alphabets),
        labels=labels,
        label_alphabet=int(label_alphabet),
        feature_names=tuple(feature_names),
    )


def subsample_features(matrix: FeatureMatrix, columns: Sequence[int]) -> FeatureMatrix:
    """Restrict `matrix` to the feature columns listed, in that order."""
    columns = list(columns)
    if not columns:
        raise UsageError("subsample_features needs at least one column")
    for index in columns:
        matrix.column(index)
    return FeatureMatrix(
        values=matrix.values[:, columns],
        alphabets=tuple(matrix.alphabets[j] for j in columns),
        labels=matrix.labels,
        label_alphabet=matrix.label_alphabet,
        feature_names=tuple(matrix.feature_names[j] for j in columns),
    )


# =============================================================================
# Discretization
# =============================================================================

def apply_bins(values: Sequence[float], spec: BinSpec) -> np.ndarray:
    """
    Discretize with frozen edges.

    output[i] = number of edges strictly less than values[i]. Values beyond
    the outermost edges clamp to the extreme bins by construction.
    """
    values = np.asarray(values, dtype=float)
    edges = np.asarray(spec.edges, dtype=float)
    return np.searchsorted(edges, values, side="left").astype(np.int64)


def quantile_discretize(values: Sequence[float], levels: int) -> Tuple[np.ndarray, BinSpec]:
    """
    Quantile-bin a real vector into `levels` integer levels.

    Edges are the linear-interpolation empirical quantiles at j/levels for
    j = 1..levels-1. Coinciding quantiles are merged so the resulting
    BinSpec stays strictly increasing; a constant vector therefore maps
    entirely to level 0.

    Raises:
    -------
    DiscretizationError
        If levels < 2 or values is empty.
    """
    if levels < 2:
        raise DiscretizationError(f"levels must be >= 2, got {levels}")
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise DiscretizationError("cannot discretize an empty vector")

    probabilities = np.arange(1, levels) / levels
    edges = np.unique(np.quantile(values, probabilities, method="linear"))
    spec = BinSpec(edges=tuple(float(e) for e in edges), levels=len(edges) + 1)
    return apply_bins(values, spec), spec


def discretize_matrix(
    raw: np.ndarray,
    labels: Sequence[int],
    feature_names: Sequence[str],
    levels: int = 5,
    specs: Optional[Sequence[BinSpec]] = None,
) -> Tuple[FeatureMatrix, List[BinSpec]]:
    """
    Column-wise discretization of a real matrix.

    When `specs` is given the frozen edges are applied (train-time bins on
    new data); otherwise quantile edges are computed on `raw` itself.
    Alphabets are the spec's level count, not the observed maximum, so
    train and test matrices share alphabets.
    """
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 2:
        raise DatasetError(f"raw matrix must be 2-D, got shape {raw.shape}")
    if specs is not None and len(specs) != raw.shape[1]:
        raise DatasetError(f"{len(specs)} bin specs for {raw.shape[1]} columns")

    columns: List[np.ndarray] = []
    used_specs: List[BinSpec] = []
    for j in range(raw.shape[1]):
        if specs is None:
            column, spec = quantile_discretize(raw[:, j], levels)
        else:
            spec = specs[j]
            column = apply_bins(raw[:, j], spec)
        columns.append(column)
        used_specs.append(spec)

    labels = np.asarray(labels, dtype=np.int64)
    matrix = FeatureMatrix(
        values=np.stack(columns, axis=1),
        alphabets=tuple(spec.levels for spec in used_specs),
        labels=labels,
        label_alphabet=int(labels.max()) + 1,
        feature_names=tuple(feature_names),
    )
    return matrix, used_specs


# =============================================================================
# Synthetic planted data
# =============================================================================

def synthesize_planted(
    *,
    samples: int,
    features: int,
    informative: int,
    alphabet: int,
    classes: int,
    noise: float,
    seed: int,
) -> Tuple[FeatureMatrix, Tuple[int, ...]]:
    """
    Synthesize a matrix with `informative` planted label-dependent columns.

    Each planted column j is (label + shift_j) mod alphabet, and each of its
    cells is replaced by a uniform draw from the alphabet with probability
    `noise`. With alphabet >= classes and noise = 0 a planted column carries
    the full label entropy; with noise = 1 it is indistinguishable from a
    distractor. Distractor columns are uniform and label-independent.

    Returns:
    --------
    (FeatureMatrix, planted)
        planted is the sorted tuple of informative column indices.
    """
    if samples < 1 or features < 1:
        raise UsageError("samples and features must be >= 1")
    if not 0 <= informative <= features:
        raise UsageError(f"informative must lie in [0, {features}], got {informative}")
    if alphabet < 2 or classes < 1:
        raise UsageError("alphabet must be >= 2 and classes >= 1")
    if not 0.0 <= noise <= 1.0:
        raise UsageError(f"noise must lie in [0, 1], got {noise}")

    rng = np.random.default_rng(seed)
    labels = rng.integers(0, classes, size=samples)
    planted = tuple(sorted(int(j) for j in rng.choice(features, size=informative, replace=False)))

    values = rng.integers(0, alphabet, size=(samples, features))
    for j in planted:
        shift = int(rng.integers(0, alphabet))
        clean = (labels + shift) % alphabet
        flip = rng.random(samples) < noise
        values[:, j] = np.where(flip, rng.integers(0, alphabet, size=samples), clean)

    matrix = FeatureMatrix(
        values=values,
        alphabets=tuple([alphabet] * features),
        labels=labels,
        label_alphabet=classes,
        feature_names=tuple(f"f{j}" for j in range(features)),
    )
    return matrix, planted
