# =============================================================================
# File: builders/formulation_builder.py
# Purpose: Explicit PCBO construction from scored features
# =============================================================================

"""
Formulation Builder

Purpose:
--------
Transforms a FeatureMatrix into one of the four PCBO formulations.

This module:
- Scores features with entropy-family quantities (via EntropyCache)
- Emits canonical PolyBinaryProblem term maps
- Registers every formulation by name (FORMULATIONS)

It does NOT:
- Solve anything
- Apply the cardinality penalty (see core/pcbo.py)
- Convert to spin form

Invariants:
-----------
1. Deterministic (same matrix -> identical term map)
2. Pure function (the matrix is never mutated)
3. Ordered pair sums collapse onto one sorted-tuple term: both (i, j)
   and (j, i) accumulate into (i, j); diagonal pairs are excluded
4. entropy-cubo coefficients are never positive
"""

from itertools import combinations
from math import comb
from typing import Callable, Dict, Optional

from core.dataset import FeatureMatrix
from core.infotheory import EntropyCache
from core.pcbo import AlphaWeights, PolyBinaryProblem, ProblemError, Term

# Default redundancy weight for full-qubo.
FULL_QUBO_LAMBDA = 10.0
DEFAULT_ALPHA = AlphaWeights(0.0, 0.0, 1.0)


class FormulationError(ProblemError):
    """Raised when a formulation is requested outside its contract."""
    pass


class FormulationBuilder:
    """
    Builds PCBO formulations from one matrix.

    This is a TRANSFORMATION layer, not a decision layer. One builder owns
    one EntropyCache, so building several formulations from the same
    matrix reuses every counted subset.
    """

    def __init__(self, matrix: FeatureMatrix):
        self.matrix = matrix
        self.cache = EntropyCache(matrix)

    # -------------------------------------------------------------------------
    # Shared blocks
    # -------------------------------------------------------------------------

    def _relevance_terms(self, lam: float) -> Dict[Term, float]:
        return {
            (i,): -lam * self.cache.relevance([i])
            for i in range(self.matrix.num_features)
        }

    def _pair_terms(self, score: Callable[[int, int], float]) -> Dict[Term, float]:
        """Accumulate an ordered-pair score over i != j onto sorted tuples."""
        terms: Dict[Term, float] = {}
        for i, j in combinations(range(self.matrix.num_features), 2):
            terms[(i, j)] = score(i, j) + score(j, i)
        return terms

    # -------------------------------------------------------------------------
    # Formulations
    # -------------------------------------------------------------------------

    def mrmr(self, lam: float) -> PolyBinaryProblem:
        """
        Minimum-redundancy maximum-relevancy:
        Q = -lam * sum_i I(f_i; y) x_i + sum_{i != j} I(f_i; f_j) x_i x_j
        """
        terms = self._relevance_terms(lam)
        terms.update(self._pair_terms(self.cache.mutual_information))
        return PolyBinaryProblem(num_vars=self.matrix.num_features, terms=terms)

    def miqubo(self, lam: float) -> PolyBinaryProblem:
        """
        Q = -lam * sum_i I(f_i; y) x_i - sum_{i != j} I(f_i; y | f_j) x_i x_j
        """
        terms = self._relevance_terms(lam)
        terms.update(self._pair_terms(lambda i, j: -self.cache.conditional_relevance(i, j)))
        return PolyBinaryProblem(num_vars=self.matrix.num_features, terms=terms)

    def full_qubo(self, lam: float) -> PolyBinaryProblem:
        """
        Q = -lam * sum_i I(f_i; y) x_i
            + sum_{i != j} (I(f_i; f_j) - I(f_i; y | f_j)) x_i x_j
        """
        terms = self._relevance_terms(lam)
        terms.update(self._pair_terms(
            lambda i, j: self.cache.mutual_information(i, j) - self.cache.conditional_relevance(i, j)
        ))
        return PolyBinaryProblem(num_vars=self.matrix.num_features, terms=terms)

    def entropy_cubo(self, alpha: AlphaWeights, k: int) -> PolyBinaryProblem:
        """
        Third-order entropy formulation with cardinality k.

        Block m (m = 1, 2, 3) contributes, for every m-subset S of features,
        -alpha_m / C(k, m) * [H(S) - H(S | y)] on the monomial x_S.
        Blocks with zero weight are not enumerated.

        Raises:
        -------
        FormulationError
            If k is outside [1, F] or too small for a weighted block.
        """
        num_features = self.matrix.num_features
        if not 1 <= k <= num_features:
            raise FormulationError(f"k must lie in [1, {num_features}], got {k}")

        terms: Dict[Term, float] = {}
        for order, weight in enumerate(alpha.as_tuple(), start=1):
            if weight == 0.0:
                continue
            if k < order:
                raise FormulationError(f"k = {k} too small for a weighted order-{order} block")
            normalization = weight / comb(k, order)
            for subset in combinations(range(num_features), order):
                information = max(self.cache.relevance(subset), 0.0)
                terms[subset] = -normalization * information

        return PolyBinaryProblem(num_vars=num_features, terms=terms, cardinality=k)


# =============================================================================
# Public builder API
# =============================================================================

def build_mrmr(matrix: FeatureMatrix, lam: float) -> PolyBinaryProblem:
    return FormulationBuilder(matrix).mrmr(lam)


def build_miqubo(matrix: FeatureMatrix, lam: float) -> PolyBinaryProblem:
    return FormulationBuilder(matrix).miqubo(lam)


def build_full_qubo(matrix: FeatureMatrix, lam: float = FULL_QUBO_LAMBDA) -> PolyBinaryProblem:
    return FormulationBuilder(matrix).full_qubo(lam)


def build_entropy_cubo(matrix: FeatureMatrix, alpha: AlphaWeights = DEFAULT_ALPHA, k: int = 3) -> PolyBinaryProblem:
    return FormulationBuilder(matrix).entropy_cubo(alpha, k)


# Registry (whitelist) of formulation names accepted by the CLI.
FORMULATIONS = ("mrmr", "miqubo", "full-qubo", "entropy-cubo")

# Relevance weight used when the caller passes none.
DEFAULT_LAMBDAS = {"mrmr": 1.0, "miqubo": 1.0, "full-qubo": FULL_QUBO_LAMBDA}


def build_formulation(
    matrix: FeatureMatrix,
    name: str,
    *,
    lam: Optional[float] = None,
    alpha: Optional[AlphaWeights] = None,
    k: Optional[int] = None,
) -> PolyBinaryProblem:
    """
    Build a formulation by registry name.

    mrmr / miqubo / full-qubo use `lam` (DEFAULT_LAMBDAS when None) and
    set the cardinality target to `k` when one is given; entropy-cubo uses
    `alpha` and `k`.
    """
    if name not in FORMULATIONS:
        raise FormulationError(f"Unknown formulation: '{name}'. Allowed: {list(FORMULATIONS)}")

    builder = FormulationBuilder(matrix)
    if name == "entropy-cubo":
        if k is None:
            raise FormulationError("entropy-cubo needs k")
        return builder.entropy_cubo(alpha or DEFAULT_ALPHA, k)

    problem = {"mrmr": builder.mrmr, "miqubo": builder.miqubo, "full-qubo": builder.full_qubo}[name](
        DEFAULT_LAMBDAS[name] if lam is None else lam
    )
    if k is None:
        return problem
    return PolyBinaryProblem(
        num_vars=problem.num_vars, terms=problem.terms, constant=problem.constant, cardinality=k
    )
