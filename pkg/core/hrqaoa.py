"""
hrqaoa.py

Purpose:
--------
Recursive QAOA reduction loops.

Hybrid recursion (run_hrqaoa), per round:
    1. Subsample n_s small donor Hamiltonians of d_s variables
    2. Train each donor classically (independent; run concurrently)
    3. Transfer every donor's angles to the target; keep the set with the
       lowest target energy (exactly n_s target-sized <H> evaluations)
    4. Build the correlation dictionary from one target-state preparation
    5. Fix the max-|correlation| edge (core/edge_fixing.py)

Plain recursion (run_rqaoa) replaces steps 1-3 with a full variational
optimization on the target, so every optimizer iteration is a
target-sized <H> evaluation.

This module:
- Owns the variational loop (COBYLA via scipy.optimize.minimize)
- Owns donor sampling, training and selection
- Records every round in a ReductionTrace

It does NOT:
- Substitute variables (see core/edge_fixing.py)
- Solve the reduced problem (see core/pipeline.py)

Invariants:
-----------
1. Identical config + seed -> identical trace
2. Target-sized <H> evaluations per hybrid round == n_s
3. The best-so-far energy reported by the optimizer never increases
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from core.classical import brute_force
from core.edge_fixing import ELIMINATION_MODES, ReductionTrace, RoundRecord, fix_edge
from core.errors import UsageError
from core.pcbo import SpinHamiltonian, evaluate_spin
from core.seeds import derive_seed, make_rng
from core.simulator import SIMULATION_CAP, EvaluationCounter, QaoaParams, QaoaSimulator

logger = logging.getLogger(__name__)


# =============================================================================
# Domain Exceptions
# =============================================================================

class ReductionError(UsageError):
    """Base exception for recursion contract violations."""
    pass


class DonorSizeError(ReductionError):
    """Raised when a donor would not be smaller than its target."""
    pass


class EmptyDonorList(ReductionError):
    """Raised when donor selection is given nothing to select from."""
    pass


# =============================================================================
# Configuration
# =============================================================================

@dataclass(frozen=True)
class OptimizerConfig:
    """
    Derivative-free local optimizer settings.

    maxiter bounds the objective evaluations summed over all restarts.
    restarts=None keeps restarting from fresh angles until fewer than
    2p + 2 evaluations remain and spends those on random angles, so a run
    spends the whole maxiter budget.
    Initial angles are drawn uniformly from [-init_scale, init_scale].
    """

    maxiter: int = 5000
    restarts: Optional[int] = None
    rhobeg: float = 0.5
    tol: float = 1e-6
    init_scale: float = 0.5

    def __post_init__(self) -> None:
        if self.maxiter < 1:
            raise ReductionError(f"maxiter must be >= 1, got {self.maxiter}")
        if self.restarts is not None and self.restarts < 1:
            raise ReductionError(f"restarts must be >= 1, got {self.restarts}")
        if self.rhobeg <= 0 or self.tol <= 0 or self.init_scale <= 0:
            raise ReductionError("rhobeg, tol and init_scale must be positive")


@dataclass(frozen=True)
class HrqaoaConfig:
    """
    Attributes:
    -----------
    d_s, n_s : int
        Donor size and donor count.
    p : int
        QAOA depth.
    rounds : int | None
        Number of edge fixes.
    cutoff : int | None
        Stop once the problem has this many variables. With both set the
        loop stops at whichever comes first.
    elimination : str
        "random" (uniform member of the winning term) or "smallest".
    reuse_donors : bool
        Train donors once in the first round and reuse their angles.
    max_donor_retries : int
        Resampling budget for donors that come out without terms.
    threads : int
        Worker cap for concurrent donor training.
    """

    d_s: int = 4
    n_s: int = 5
    p: int = 1
    rounds: Optional[int] = None
    cutoff: Optional[int] = None
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    seed: int = 0
    elimination: str = "random"
    reuse_donors: bool = False
    max_donor_retries: int = 20
    threads: int = 1
    cap: int = SIMULATION_CAP

    def __post_init__(self) -> None:
        if self.d_s < 1 or self.n_s < 1 or self.p < 1:
            raise ReductionError("d_s, n_s and p must all be >= 1")
        if self.rounds is None and self.cutoff is None:
            raise ReductionError("set rounds or cutoff")
        if self.rounds is not None and self.rounds < 0:
            raise ReductionError(f"rounds must be >= 0, got {self.rounds}")
        if self.cutoff is not None and self.cutoff < 1:
            raise ReductionError(f"cutoff must be >= 1, got {self.cutoff}")
        if self.elimination not in ELIMINATION_MODES:
            raise ReductionError(
                f"Unknown elimination mode: '{self.elimination}'. Allowed: {list(ELIMINATION_MODES)}"
            )
        if self.threads < 1 or self.max_donor_retries < 0:
            raise ReductionError("threads must be >= 1 and max_donor_retries >= 0")

    def planned_rounds(self, num_vars: int) -> int:
        """Edge fixes to attempt on a num_vars-variable problem."""
        planned = []
        if self.rounds is not None:
            if self.rounds >= num_vars:
                raise ReductionError(f"rounds = {self.rounds} must be < N = {num_vars}")
            planned.append(self.rounds)
        if self.cutoff is not None:
            if self.cutoff >= num_vars:
                raise ReductionError(f"cutoff = {self.cutoff} must be < N = {num_vars}")
            planned.append(num_vars - self.cutoff)
        return min(planned)


# =============================================================================
# Domain Types
# =============================================================================

@dataclass(frozen=True)
class DonorResult:
    variable_subset: Tuple[int, ...]
    params: QaoaParams
    trained_energy: float
    optimizer_iterations: int


# =============================================================================
# Variational loop
# =============================================================================

def _optimize(
    simulator: QaoaSimulator,
    p: int,
    optimizer: OptimizerConfig,
    seed: int,
) -> Tuple[QaoaParams, float, int]:
    """
    COBYLA over the 2p angles with best-so-far tracking.

    Returns (best params, best energy, objective evaluations used).
    """
    # COBYLA needs n + 2 evaluations to build its first simplex.
    minimum_budget = 2 * p + 2
    if optimizer.maxiter < minimum_budget:
        raise ReductionError(f"maxiter must be >= {minimum_budget} for depth {p}, got {optimizer.maxiter}")

    rng = np.random.default_rng(seed)
    best: Dict[str, Any] = {"energy": np.inf, "theta": None}
    used = 0

    def objective(theta: np.ndarray) -> float:
        energy = simulator.energy(QaoaParams.from_vector(theta))
        if energy < best["energy"]:
            best["energy"] = energy
            best["theta"] = np.array(theta, copy=True)
        return energy

    restart = 0
    while optimizer.restarts is None or restart < optimizer.restarts:
        remaining = optimizer.maxiter - used
        if remaining < minimum_budget:
            break
        theta0 = rng.uniform(-optimizer.init_scale, optimizer.init_scale, size=2 * p)
        before = simulator.counter.energy_evaluations
        minimize(
            objective,
            theta0,
            method="COBYLA",
            tol=optimizer.tol,
            options={"maxiter": remaining, "rhobeg": optimizer.rhobeg},
        )
        spent = simulator.counter.energy_evaluations - before
        used += spent
        logger.debug("Restart %d: best energy %.6f after %d evaluations", restart, best["energy"], used)
        if spent == 0:
            break
        restart += 1

    if optimizer.restarts is None:
        # Too few evaluations left for a simplex: spend them on random angles.
        while used < optimizer.maxiter:
            objective(rng.uniform(-optimizer.init_scale, optimizer.init_scale, size=2 * p))
            used += 1

    return QaoaParams.from_vector(best["theta"]), float(best["energy"]), used


def train_donor(
    donor: SpinHamiltonian,
    p: int,
    optimizer: OptimizerConfig,
    seed: int,
    *,
    variable_subset: Sequence[int] = (),
    cap: int = SIMULATION_CAP,
) -> DonorResult:
    """Minimize <H_donor> over (gamma, beta); deterministic per seed."""
    simulator = QaoaSimulator(donor, cap=cap)
    params, energy, iterations = _optimize(simulator, p, optimizer, seed)
    return DonorResult(
        variable_subset=tuple(variable_subset),
        params=params,
        trained_energy=energy,
        optimizer_iterations=iterations,
    )


# =============================================================================
# Donors
# =============================================================================

def subsample_donor(hamiltonian: SpinHamiltonian, d_s: int, seed: int) -> Tuple[SpinHamiltonian, Tuple[int, ...]]:
    """
    Uniform d_s-subset of variables and the terms fully inside it,
    reindexed to 0..d_s-1. The offset is carried over.
    """
    if not 1 <= d_s < hamiltonian.num_vars:
        raise DonorSizeError(f"d_s must lie in [1, {hamiltonian.num_vars}), got {d_s}")
    rng = np.random.default_rng(seed)
    subset = tuple(sorted(int(i) for i in rng.choice(hamiltonian.num_vars, size=d_s, replace=False)))
    position = {old: new for new, old in enumerate(subset)}
    terms = {
        tuple(position[i] for i in term): coefficient
        for term, coefficient in hamiltonian.terms.items()
        if all(i in position for i in term)
    }
    return SpinHamiltonian(num_vars=d_s, terms=terms, offset=hamiltonian.offset), subset


def sample_donors(
    hamiltonian: SpinHamiltonian,
    d_s: int,
    n_s: int,
    root_seed: int,
    *path: Any,
    max_retries: int = 20,
) -> List[Tuple[SpinHamiltonian, Tuple[int, ...]]]:
    """
    n_s donors; donors without terms are resampled up to max_retries times
    each, then accepted with a warning.
    """
    donors = []
    for index in range(n_s):
        for attempt in range(max_retries + 1):
            donor, subset = subsample_donor(
                hamiltonian, d_s, derive_seed(root_seed, *path, "donor", index, attempt)
            )
            if donor.terms:
                break
        else:
            logger.warning("Donor %d has no internal terms after %d retries", index, max_retries)
        donors.append((donor, subset))
    return donors


def train_donors(
    donors: List[Tuple[SpinHamiltonian, Tuple[int, ...]]],
    config: HrqaoaConfig,
    *path: Any,
) -> List[DonorResult]:
    """Train donors concurrently; results keep donor order."""
    seeds = [derive_seed(config.seed, *path, "train", index) for index in range(len(donors))]

    def train(index: int) -> DonorResult:
        donor, subset = donors[index]
        return train_donor(
            donor, config.p, config.optimizer, seeds[index], variable_subset=subset, cap=config.cap
        )

    if config.threads == 1 or len(donors) == 1:
        return [train(index) for index in range(len(donors))]
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        return list(pool.map(train, range(len(donors))))


def select_donor_params(
    target: SpinHamiltonian,
    donors: Sequence[DonorResult],
    *,
    simulator: Optional[QaoaSimulator] = None,
    cap: int = SIMULATION_CAP,
) -> Tuple[QaoaParams, List[float]]:
    """
    Evaluate every donor's angles on the target (one <H> each) and return
    the lowest-energy set; ties go to the lowest donor index.
    """
    if not donors:
        raise EmptyDonorList("no donors to select from")
    if simulator is None:
        simulator = QaoaSimulator(target, cap=cap)
    energies = [simulator.energy(donor.params) for donor in donors]
    best = 0
    for index, energy in enumerate(energies):
        if energy < energies[best]:
            best = index
    return donors[best].params, energies


# =============================================================================
# Reduction loops
# =============================================================================

def _stop_reason(current: SpinHamiltonian) -> Optional[str]:
    if current.num_vars < 2:
        return "fewer than two variables"
    if not current.terms:
        return "no terms left"
    return None


def run_hrqaoa(hamiltonian: SpinHamiltonian, config: HrqaoaConfig) -> ReductionTrace:
    """
    Hybrid recursion with parameter transfer from small donors.

    Raises:
    -------
    DonorSizeError
        If d_s >= N.
    ReductionError
        If rounds or cutoff are out of range for N.
    """
    num_vars = hamiltonian.num_vars
    if config.d_s >= num_vars:
        raise DonorSizeError(f"d_s = {config.d_s} must be < N = {num_vars}")
    planned = config.planned_rounds(num_vars)

    trace = ReductionTrace(method="hrqaoa", original_num_vars=num_vars, final_problem=hamiltonian)
    trace.metadata.update({"d_s": config.d_s, "n_s": config.n_s, "p": config.p, "seed": config.seed})
    current = hamiltonian
    reused: Optional[Tuple[List[DonorResult], List[Tuple[int, ...]]]] = None

    for round_index in range(planned):
        reason = _stop_reason(current)
        if reason:
            trace.stop_reason = reason
            break

        # 1-2. Donors
        trained_now = reused is None
        if trained_now:
            d_s = min(config.d_s, current.num_vars - 1)
            donors = sample_donors(
                current, d_s, config.n_s, config.seed, "hrqaoa", round_index,
                max_retries=config.max_donor_retries,
            )
            trained = train_donors(donors, config, "hrqaoa", round_index)
            if config.reuse_donors:
                reused = (trained, [subset for _, subset in donors])
        else:
            trained = reused[0]

        # 3. Transfer
        simulator = QaoaSimulator(current, cap=config.cap)
        params, transferred = select_donor_params(current, trained, simulator=simulator)

        # 4-5. Correlations and the fix
        correlations = simulator.correlations(params)
        reduced, fix = fix_edge(
            current,
            correlations,
            round_index=round_index,
            rng=make_rng(config.seed, "hrqaoa", round_index, "eliminate"),
            elimination=config.elimination,
        )

        donor_iterations = sum(d.optimizer_iterations for d in trained) if trained_now else 0
        round_counter = EvaluationCounter(
            energy_evaluations=simulator.counter.energy_evaluations,
            circuit_executions=simulator.counter.circuit_executions,
            optimizer_iterations=donor_iterations,
        )
        trace.counters.add(round_counter)
        trace.record(reduced, RoundRecord(
            round=round_index,
            num_vars=current.num_vars,
            fix=fix,
            correlation=correlations.entries[fix.term],
            donor_subsets=[d.variable_subset for d in trained],
            donor_energies=[d.trained_energy for d in trained],
            transferred_energies=transferred,
            selected_donor=transferred.index(min(transferred)),
            target_energy=min(transferred),
            counters=round_counter.as_dict(),
        ))
        logger.info(
            "Round %d: fixed %s (sign %+d, eliminated %d), %d variables left",
            round_index, fix.term, fix.sign, fix.eliminated, reduced.num_vars,
        )
        current = reduced

    return trace


def run_rqaoa(hamiltonian: SpinHamiltonian, config: HrqaoaConfig) -> ReductionTrace:
    """
    Plain recursion: each round optimizes the QAOA angles directly on the
    current Hamiltonian. d_s, n_s and donor settings are ignored.
    """
    num_vars = hamiltonian.num_vars
    planned = config.planned_rounds(num_vars)
    trace = ReductionTrace(method="rqaoa", original_num_vars=num_vars, final_problem=hamiltonian)
    trace.metadata.update({"p": config.p, "seed": config.seed})
    current = hamiltonian

    for round_index in range(planned):
        reason = _stop_reason(current)
        if reason:
            trace.stop_reason = reason
            break

        simulator = QaoaSimulator(current, cap=config.cap)
        params, energy, iterations = _optimize(
            simulator, config.p, config.optimizer, derive_seed(config.seed, "rqaoa", round_index, "train")
        )
        correlations = simulator.correlations(params)
        reduced, fix = fix_edge(
            current,
            correlations,
            round_index=round_index,
            rng=make_rng(config.seed, "rqaoa", round_index, "eliminate"),
            elimination=config.elimination,
        )

        round_counter = EvaluationCounter(
            energy_evaluations=simulator.counter.energy_evaluations,
            circuit_executions=simulator.counter.circuit_executions,
            optimizer_iterations=iterations,
        )
        trace.counters.add(round_counter)
        trace.record(reduced, RoundRecord(
            round=round_index,
            num_vars=current.num_vars,
            fix=fix,
            correlation=correlations.entries[fix.term],
            target_energy=energy,
            counters=round_counter.as_dict(),
        ))
        logger.info(
            "Round %d: %d optimizer iterations, fixed %s, %d variables left",
            round_index, iterations, fix.term, reduced.num_vars,
        )
        current = reduced

    return trace


# =============================================================================
# Reporting helpers
# =============================================================================

def energy_gap(hamiltonian: SpinHamiltonian, spins: Sequence[int]) -> float:
    """Energy of `spins` minus the exact ground energy (brute force)."""
    _, ground = brute_force(hamiltonian)
    return evaluate_spin(hamiltonian, spins) - ground


def trace_report(trace: ReductionTrace) -> Dict[str, Any]:
    """
    Structured report of a trace: one row per round plus totals. Terms are
    written as comma-joined indices.
    """
    rows = []
    for record in trace.rounds:
        rows.append({
            "round": record.round,
            "num_vars": record.num_vars,
            "term": ",".join(str(i) for i in record.fix.term),
            "sign": record.fix.sign,
            "eliminated": record.fix.eliminated,
            "correlation": record.correlation,
            "donor_subsets": [list(s) for s in record.donor_subsets],
            "donor_energies": list(record.donor_energies),
            "transferred_energies": list(record.transferred_energies),
            "selected_donor": record.selected_donor,
            "target_energy": record.target_energy,
            "counters": dict(record.counters),
        })
    return {
        "method": trace.method,
        "original_num_vars": trace.original_num_vars,
        "final_num_vars": trace.final_problem.num_vars,
        "stop_reason": trace.stop_reason,
        "metadata": dict(trace.metadata),
        "counters": trace.counters.as_dict(),
        "rounds": rows,
    }
