"""
harness.py

Purpose:
--------
Runtime scaling benchmark for the classical solvers.

For each (size, seed) the harness builds one random instance, runs each
selected solver on it and records wall time, best energy and, where brute
force is feasible, the relative gap to the exact optimum.

This module:
- Generates instances (penalized entropy-cubo on synthetic data, or
  dense random cubic spin Hamiltonians)
- Runs solvers under the improvement-timeout protocol
- Emits one row per (size, seed, solver)
- Optionally persists each instance's rows in one SQLite transaction

It does NOT:
- Fit or interpret runtimes (see core.resource)

Notes:
------
- Times are wall-clock on a monotonic clock and therefore the only
  non-reproducible column; every other column is a pure function of the
  configuration.
- Brute force runs to completion: it has no incumbent to return early,
  so the improvement timeout applies to tabu search only.
"""

import logging
import sqlite3
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import pandas as pd

from builders.instance_builder import MIN_ENTROPY_CUBO_SIZE, entropy_cubo_instance, random_spin_hamiltonian
from core.classical import BRUTE_FORCE_CAP, TabuConfig, brute_force, tabu_search
from core.errors import UsageError
from core.pcbo import SpinHamiltonian
from core.resource import best_gap
from core.seeds import derive_seed
from db.database import BENCH_COLUMNS, insert_rows, transaction

logger = logging.getLogger(__name__)

SOLVERS = ("brute", "tabu")
INSTANCE_KINDS: Dict[str, Callable[[int, int], SpinHamiltonian]] = {
    "entropy-cubo": lambda size, seed: entropy_cubo_instance(size, seed),
    "random-cubic": lambda size, seed: random_spin_hamiltonian(size, seed),
}


class HarnessError(UsageError):
    """Raised when a benchmark configuration is invalid."""
    pass


@dataclass(frozen=True)
class HarnessConfig:
    sizes: Tuple[int, ...] = (10, 12, 14, 16)
    seeds: Tuple[int, ...] = (0, 1, 2)
    solvers: Tuple[str, ...] = SOLVERS
    instance_kind: str = "entropy-cubo"
    improvement_timeout: float = 10.0
    tabu_restarts: int = 20
    brute_force_cap: int = BRUTE_FORCE_CAP
    threads: int = 1

    def __post_init__(self):
        unknown = [s for s in self.solvers if s not in SOLVERS]
        if unknown or not self.solvers:
            raise HarnessError(f"Unknown solvers: {unknown}. Allowed: {list(SOLVERS)}")
        if self.instance_kind not in INSTANCE_KINDS:
            raise HarnessError(
                f"Unknown instance kind: '{self.instance_kind}'. Allowed: {list(INSTANCE_KINDS)}"
            )
        if not self.sizes or min(self.sizes) < 1:
            raise HarnessError(f"sizes must be positive, got {self.sizes}")
        if self.instance_kind == "entropy-cubo" and min(self.sizes) < MIN_ENTROPY_CUBO_SIZE:
            raise HarnessError(
                f"entropy-cubo instances need size >= {MIN_ENTROPY_CUBO_SIZE}, got {min(self.sizes)}"
            )
        if not self.seeds:
            raise HarnessError("at least one seed is required")
        if self.improvement_timeout <= 0:
            raise HarnessError(f"improvement_timeout must be positive, got {self.improvement_timeout}")
        if self.threads < 1:
            raise HarnessError(f"threads must be >= 1, got {self.threads}")


def _run_solver(name: str, hamiltonian: SpinHamiltonian, config: HarnessConfig, seed: int) -> Tuple[float, float, bool]:
    """(elapsed seconds, energy, timeout_hit)"""
    started = time.monotonic()
    if name == "brute":
        _, energy = brute_force(hamiltonian, cap=config.brute_force_cap)
        timeout_hit = False
    else:
        result = tabu_search(hamiltonian, TabuConfig(
            restarts=config.tabu_restarts,
            seed=derive_seed(seed, "bench", "tabu"),
            improvement_timeout=config.improvement_timeout,
        ))
        energy, timeout_hit = result.energy, result.timeout_hit
    return time.monotonic() - started, float(energy), timeout_hit


def run_instance(size: int, seed: int, config: HarnessConfig) -> List[Dict]:
    """All solver rows for one (size, seed) instance."""
    hamiltonian = INSTANCE_KINDS[config.instance_kind](size, derive_seed(seed, "bench", size))
    solvers = [s for s in config.solvers if s != "brute" or size <= config.brute_force_cap]
    if len(solvers) < len(config.solvers):
        logger.info("Skipping brute force at size %d (cap %d)", size, config.brute_force_cap)

    measured = {name: _run_solver(name, hamiltonian, config, seed) for name in solvers}
    exact = measured["brute"][1] if "brute" in measured else None

    rows = []
    for name, (elapsed, energy, timeout_hit) in measured.items():
        gap, absolute = best_gap(energy, exact) if exact is not None else (None, None)
        rows.append({
            "size": size,
            "seed": seed,
            "solver": name,
            "time": elapsed,
            "energy": energy,
            "gap": gap,
            "gap_absolute": absolute,
            "timeout_hit": timeout_hit,
        })
    logger.info("Instance size=%d seed=%d solved by %s", size, seed, ", ".join(solvers))
    return rows


def scaling_harness(config: HarnessConfig, store: Optional[sqlite3.Connection] = None) -> pd.DataFrame:
    """
    Run every (size, seed) instance and return the result table, sorted by
    size, seed and solver.

    Instances run on up to `config.threads` worker threads; each solver's
    time is its own wall time. Store writes happen on the calling thread,
    one transaction per instance.
    """
    jobs = [(size, seed) for size in config.sizes for seed in config.seeds]
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(lambda job: run_instance(*job, config), jobs))
    else:
        results = [run_instance(size, seed, config) for size, seed in jobs]

    if store is not None:
        for rows in results:
            with transaction(store) as tx:
                insert_rows(tx, rows)

    table = pd.DataFrame([row for rows in results for row in rows], columns=list(BENCH_COLUMNS))
    return table.sort_values(["size", "seed", "solver"], kind="mergesort").reset_index(drop=True)
