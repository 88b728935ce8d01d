"""
resource.py

Purpose:
--------
Closed-form runtime models for recursive QAOA on hardware, and the
exponential fits that turn classical benchmark timings into a crossover
estimate.

This module:
- Bounds the shots needed to estimate every correlation to tolerance ε
  with failure probability δ (Hoeffding + union bound over 2N^3 observables)
- Composes per-shot, per-round and total reduction times
- Fits y = a e^{b x} + c to measured classical runtimes
- Searches the smallest problem size where reduce-then-solve beats solving

It does NOT:
- Measure anything (see core.harness)
- Model error correction or FLOP counts

All default model parameters are PLACEHOLDERS: no gate, overhead or
optimizer timings are known for a target device. Pass real values.
"""

import logging
import warnings
from collections import deque
from dataclasses import dataclass
from math import ceil, exp, log
from typing import Deque, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from core.errors import UsageError

logger = logging.getLogger(__name__)

CROSSOVER_SEARCH_LIMIT = 10_000


# =============================================================================
# Domain Exceptions
# =============================================================================

class ResourceModelError(UsageError):
    """Raised when model parameters fall outside their domain."""
    pass


class FitError(ResourceModelError):
    """Raised when runtime data cannot support an exponential fit."""
    pass


# =============================================================================
# Domain Types
# =============================================================================

@dataclass(frozen=True)
class RuntimeModelParams:
    """
    t_g      gate time (s)
    t_p      per-shot overhead: reset, readout, latency (s)
    t_opt    constant classical optimizer baseline per round (s)
    epsilon  correlation tolerance
    delta    failure probability
    p        QAOA depth
    """

    t_g: float = 1e-7
    t_p: float = 1e-4
    t_opt: float = 1.0
    epsilon: float = 0.1
    delta: float = 0.05
    p: int = 1

    def __post_init__(self):
        if self.t_g < 0 or self.t_p < 0 or self.t_opt < 0:
            raise ResourceModelError(
                f"times must be >= 0, got t_g={self.t_g}, t_p={self.t_p}, t_opt={self.t_opt}"
            )
        _check_tolerances(self.epsilon, self.delta)
        if self.p < 1:
            raise ResourceModelError(f"p must be >= 1, got {self.p}")


@dataclass(frozen=True)
class ExponentialFit:
    a: float
    b: float
    c: float
    rms: float
    relative_rms: float
    domain: Tuple[float, float]

    def predict(self, size: float) -> float:
        return self.a * exp(self.b * size) + self.c


def _check_tolerances(epsilon: float, delta: float) -> None:
    if not 0.0 < epsilon < 1.0:
        raise ResourceModelError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0.0 < delta < 1.0:
        raise ResourceModelError(f"delta must lie in (0, 1), got {delta}")


# =============================================================================
# Quantum runtime models
# =============================================================================

def shots_required(num_vars: int, epsilon: float, delta: float) -> int:
    """ceil( ln(2 N^3 / δ) / (2 ε^2) )"""
    if num_vars < 1:
        raise ResourceModelError(f"num_vars must be >= 1, got {num_vars}")
    _check_tolerances(epsilon, delta)
    return int(ceil(log(2.0 * num_vars ** 3 / delta) / (2.0 * epsilon ** 2)))


def time_per_shot(num_vars: int, params: RuntimeModelParams) -> float:
    return params.p * num_vars ** 3 * params.t_g + params.t_p


def single_round_time(num_vars: int, params: RuntimeModelParams) -> float:
    shots = shots_required(num_vars, params.epsilon, params.delta)
    return shots * time_per_shot(num_vars, params) + params.t_opt


def rqaoa_total_time(num_vars: int, cutoff: int, params: RuntimeModelParams) -> float:
    """Sum of single-round times for N, N-1, ..., cutoff + 1 variables."""
    if not 0 <= cutoff < num_vars:
        raise ResourceModelError(f"cutoff must lie in [0, {num_vars}), got {cutoff}")
    return float(sum(single_round_time(num_vars - i, params) for i in range(num_vars - cutoff)))


def rqaoa_asymptotic_time(num_vars: int, params: RuntimeModelParams) -> float:
    """Leading-order p N^4 t_g / ε^2, for comparison with the exact sum."""
    return params.p * num_vars ** 4 * params.t_g / params.epsilon ** 2


def hybrid_speedup_ratio(
    num_vars: int,
    cutoff: int,
    fit: ExponentialFit,
    params: RuntimeModelParams,
) -> float:
    """
    T_hybrid / T_classical, where the hybrid reduces N -> cutoff on the
    quantum device and solves the rest classically. cutoff == N means no
    reduction, so only classical time is spent.
    """
    if cutoff > num_vars:
        raise ResourceModelError(f"cutoff must be <= num_vars, got {cutoff} > {num_vars}")
    quantum = rqaoa_total_time(num_vars, cutoff, params) if cutoff < num_vars else 0.0
    return (quantum + fit.predict(cutoff)) / fit.predict(num_vars)


# =============================================================================
# Classical runtime fits
# =============================================================================

def _model(x, a, b, c):
    return a * np.exp(b * x) + c


def fit_exponential(sizes: Sequence[float], runtimes: Sequence[float]) -> ExponentialFit:
    """
    Least-squares fit of a e^{b x} + c.

    Initialised from a straight-line fit of log(y) shifted just below its
    minimum, and refined with scipy's curve_fit. Constant runtimes give
    b = 0 with a warning.
    """
    x = np.asarray(sizes, dtype=float)
    y = np.asarray(runtimes, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise FitError("sizes and runtimes must be 1-d sequences of equal length")
    if len(x) < 3:
        raise FitError(f"need at least 3 points, got {len(x)}")
    if len(np.unique(x)) != len(x):
        raise FitError("sizes must be distinct")

    order = np.argsort(x)
    x, y = x[order], y[order]
    domain = (float(x[0]), float(x[-1]))

    if np.ptp(y) == 0.0:
        logger.warning("Runtimes are constant (%.6g); fitting b = 0", y[0])
        return ExponentialFit(a=0.0, b=0.0, c=float(y[0]), rms=0.0, relative_rms=0.0, domain=domain)

    floor = y.min() - 1e-3 * np.ptp(y)
    slope, intercept = np.polyfit(x, np.log(y - floor), 1)
    initial = (float(np.exp(intercept)), float(slope), float(floor))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OptimizeWarning)
        try:
            (a, b, c), _ = curve_fit(_model, x, y, p0=initial, maxfev=20000, xtol=1e-14, ftol=1e-14)
        except RuntimeError as exc:
            logger.warning("curve_fit did not converge (%s); keeping log-domain estimate", exc)
            a, b, c = initial

    residual = y - _model(x, a, b, c)
    rms = float(np.sqrt(np.mean(residual ** 2)))
    scale = float(np.sqrt(np.mean(y ** 2)))
    return ExponentialFit(
        a=float(a), b=float(b), c=float(c),
        rms=rms,
        relative_rms=rms / scale if scale > 0 else 0.0,
        domain=domain,
    )


def crossover_size(
    fit: ExponentialFit,
    params: RuntimeModelParams,
    reduction_rounds: int,
    limit: int = CROSSOVER_SEARCH_LIMIT,
) -> Optional[int]:
    """
    Smallest N > reduction_rounds with hybrid_speedup_ratio(N, N - rounds) < 1,
    or None if there is no exponential growth or no such N up to `limit`.
    """
    if reduction_rounds < 1:
        raise ResourceModelError(f"reduction_rounds must be >= 1, got {reduction_rounds}")
    if fit.b <= 0 or fit.a <= 0:
        return None

    # Rolling sum of the last reduction_rounds single-round times: the
    # quantum part of hybrid_speedup_ratio(size, size - reduction_rounds).
    window: Deque[float] = deque()
    quantum = 0.0
    for size in range(1, limit + 1):
        round_time = single_round_time(size, params)
        window.append(round_time)
        quantum += round_time
        if len(window) > reduction_rounds:
            quantum -= window.popleft()
        if size <= reduction_rounds:
            continue
        try:
            ratio = (quantum + fit.predict(size - reduction_rounds)) / fit.predict(size)
        except OverflowError:
            return None
        if ratio < 1.0:
            return size
    return None


def best_gap(energy: float, best: float) -> Tuple[float, bool]:
    """
    |x - x*| / |x*|, or the absolute gap when x* == 0.

    Returns (gap, is_absolute).
    """
    if best == 0.0:
        return abs(energy - best), True
    return abs(energy - best) / abs(best), False
