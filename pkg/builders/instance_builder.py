"""
Instance Builder

Purpose:
--------
Reproducible random problem instances for benchmarks and property checks.

This module:
- Draws dense random polynomials (Gaussian coefficients) in spin or binary form
- Builds entropy-cubo instances from synthetic planted data

Invariants:
-----------
1. Deterministic per seed
2. No hidden global random state (every draw goes through a local PCG64)
"""

from itertools import combinations
from typing import Dict, Sequence

import numpy as np

from builders.formulation_builder import build_entropy_cubo
from core.dataset import synthesize_planted
from core.pcbo import (
    DEFAULT_LAMBDA_C,
    AlphaWeights,
    PolyBinaryProblem,
    SpinHamiltonian,
    Term,
    apply_cardinality_penalty,
    to_spin,
)

# entropy-cubo instances select max(N // 2, 3) features.
MIN_ENTROPY_CUBO_SIZE = 3


def _random_terms(num_vars: int, rng: np.random.Generator, orders: Sequence[int], density: float) -> Dict[Term, float]:
    terms: Dict[Term, float] = {}
    for order in orders:
        for term in combinations(range(num_vars), order):
            if density >= 1.0 or rng.random() < density:
                terms[term] = float(rng.normal())
    return terms


def random_spin_hamiltonian(
    num_vars: int,
    seed: int,
    *,
    orders: Sequence[int] = (1, 2, 3),
    density: float = 1.0,
) -> SpinHamiltonian:
    """Dense (or `density`-thinned) random spin polynomial, N(0, 1) coefficients."""
    rng = np.random.default_rng(seed)
    return SpinHamiltonian(num_vars=num_vars, terms=_random_terms(num_vars, rng, orders, density))


def random_binary_problem(
    num_vars: int,
    seed: int,
    *,
    orders: Sequence[int] = (1, 2, 3),
    density: float = 1.0,
) -> PolyBinaryProblem:
    """Random binary polynomial with a random constant, no cardinality target."""
    rng = np.random.default_rng(seed)
    terms = _random_terms(num_vars, rng, orders, density)
    return PolyBinaryProblem(num_vars=num_vars, terms=terms, constant=float(rng.normal()))


def entropy_cubo_instance(
    num_vars: int,
    seed: int,
    *,
    samples: int = 200,
    informative: int = 3,
    noise: float = 0.2,
    lambda_c: float = DEFAULT_LAMBDA_C,
) -> SpinHamiltonian:
    """
    Spin Hamiltonian of a penalized entropy-cubo problem selecting N/2 of N
    synthetic features (the largest combinatorial search space).
    """
    matrix, _ = synthesize_planted(
        samples=samples,
        features=num_vars,
        informative=min(informative, num_vars),
        alphabet=4,
        classes=4,
        noise=noise,
        seed=seed,
    )
    k = max(num_vars // 2, 3)
    problem = build_entropy_cubo(matrix, AlphaWeights(0.0, 0.0, 1.0), k)
    return to_spin(apply_cardinality_penalty(problem, lambda_c))
