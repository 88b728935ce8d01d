"""
main.py

Purpose:
--------
Command-line surface. Each subcommand reads its input files, calls the
library, and writes its output files; stage boundaries are files.

Commands:
---------
discretize  raw table -> integer table + BinSpec sidecar
build       integer table -> PCBO problem file
solve       problem file -> solution + reduction trace (JSON)
sparsify    problem file -> sparsified problem + report (+ layout)
bench       classical scaling benchmark -> CSV (+ optional SQLite store)
resources   runtime models, fits and crossover -> JSON report

Exit codes: 0 success, 2 usage, 3 data, 4 resource cap. Logs go to
stderr; output files are byte-identical across re-runs with the same
inputs, flags and seed (benchmark times excepted).
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import pandas as pd

from builders.formulation_builder import build_formulation
from cli.config import ConfigError, RunConfig, load_config
from core.classical import BRUTE_FORCE_CAP, TabuConfig
from core.dataset import discretize_matrix
from core.errors import PipelineError
from core.harness import HarnessConfig, scaling_harness
from core.heavy_hex import heavy_hex_graph
from core.hrqaoa import HrqaoaConfig, OptimizerConfig, trace_report
from core.pcbo import AlphaWeights, PolyBinaryProblem, SpinHamiltonian, apply_cardinality_penalty, to_spin
from core.pipeline import FINISHERS, TabuFinisher, make_finisher, run_hybrid
from core.resource import (
    ExponentialFit,
    RuntimeModelParams,
    crossover_size,
    fit_exponential,
    hybrid_speedup_ratio,
    rqaoa_asymptotic_time,
    rqaoa_total_time,
    shots_required,
    single_round_time,
    time_per_shot,
)
from core.seeds import derive_seed
from core.sparsify import ground_state_preserved, map_heavy_hex, randomized_tail, truncate_by_weight
from db.database import get_connection
from repositories.problem_files import read_problem, write_problem
from repositories.reports import format_layout, solution_report, sparsify_summary, write_report, write_table_csv
from repositories.tables import load_bin_specs, load_raw_table, load_table, save_bin_specs, write_table

logger = logging.getLogger(__name__)

SIDECAR_SUFFIX = ".bins.json"
REPORT_SUFFIX = ".report.json"
LAYOUT_SUFFIX = ".layout.txt"


def _require_file(path: Optional[str], what: str) -> None:
    if path is not None and not Path(path).is_file():
        raise ConfigError(f"{what} not found: {path}")


def _as_spin(problem, lambda_c: float) -> SpinHamiltonian:
    """Problem file contents -> the spin Hamiltonian the solvers work on."""
    if isinstance(problem, SpinHamiltonian):
        return problem
    if problem.cardinality is not None:
        problem = apply_cardinality_penalty(problem, lambda_c)
    return to_spin(problem)


# =============================================================================
# Commands
# =============================================================================

def cmd_discretize(args: argparse.Namespace, config: RunConfig) -> None:
    _require_file(args.input, "input table")
    _require_file(args.bins, "bin spec sidecar")
    raw, labels, names = load_raw_table(args.input, config.label_column, config.delimiter)

    specs = None
    if args.bins is not None:
        specs, spec_names = load_bin_specs(args.bins)
        if spec_names != names:
            raise ConfigError(f"sidecar columns {spec_names} do not match table columns {names}")

    matrix, used = discretize_matrix(raw, labels, names, levels=config.levels, specs=specs)
    write_table(matrix, args.output, config.label_column, config.delimiter)
    save_bin_specs(used, names, args.output + SIDECAR_SUFFIX)
    logger.info("Discretized %d x %d table into %s", *raw.shape, args.output)


def cmd_build(args: argparse.Namespace, config: RunConfig) -> None:
    _require_file(args.matrix, "matrix table")
    matrix = load_table(args.matrix, config.label_column, config.delimiter)
    problem = build_formulation(
        matrix,
        config.formulation,
        lam=config.lam,
        alpha=AlphaWeights(*config.alpha),
        k=config.k,
    )
    write_problem(problem, args.output)
    logger.info("Built %s: %d variables, %d terms", config.formulation, problem.num_vars, len(problem.terms))


def _hrqaoa_config(config: RunConfig, reducing: bool) -> HrqaoaConfig:
    rounds = config.rounds
    if not reducing and rounds is None and config.cutoff is None:
        rounds = 0
    return HrqaoaConfig(
        d_s=config.d_s,
        n_s=config.n_s,
        p=config.p,
        rounds=rounds,
        cutoff=config.cutoff,
        optimizer=OptimizerConfig(maxiter=config.maxiter, restarts=config.optimizer_restarts),
        seed=config.seed,
        elimination=config.elimination,
        reuse_donors=config.reuse_donors,
        threads=config.threads,
    )


def cmd_solve(args: argparse.Namespace, config: RunConfig) -> None:
    _require_file(args.problem, "problem file")
    _require_file(args.matrix, "matrix table")
    hamiltonian = _as_spin(read_problem(args.problem), config.lambda_c)

    # brute / tabu alone are the "none" reducer with that finisher
    reducing = config.method not in FINISHERS
    method = config.method if reducing else "none"
    finisher_name = config.finisher if reducing else config.method
    if finisher_name == "tabu":
        finisher = TabuFinisher(TabuConfig(restarts=config.tabu_restarts, seed=derive_seed(config.seed, "finisher")))
    else:
        finisher = make_finisher(finisher_name)

    result = run_hybrid(
        hamiltonian=hamiltonian,
        method=method,
        finisher=finisher,
        config=_hrqaoa_config(config, reducing),
    )

    names = load_table(args.matrix, config.label_column, config.delimiter).feature_names if args.matrix else ()
    document = {
        "config": config.model_dump(),
        "method": config.method,
        "finisher": result.finisher,
        "reduced_energy": result.reduced_energy,
        "solution": solution_report(spins=result.spins, energy=result.energy, feature_names=names),
        "trace": trace_report(result.trace),
    }
    write_report(document, args.output)


def cmd_sparsify(args: argparse.Namespace, config: RunConfig) -> None:
    _require_file(args.problem, "problem file")
    hamiltonian = _as_spin(read_problem(args.problem), config.lambda_c)
    document: Dict[str, Any] = {"config": config.model_dump(), "method": config.sparsify_method}

    if config.sparsify_method == "truncate":
        sparse, report = truncate_by_weight(hamiltonian, config.keep)
    elif config.sparsify_method == "randomized-tail":
        sparse, report = randomized_tail(
            hamiltonian,
            config.threshold,
            config.budget,
            derive_seed(config.seed, "sparsify"),
            surrogate_angle=config.surrogate_angle,
        )
    else:
        graph = heavy_hex_graph(config.rows, config.cols)
        layout, sparse, report = map_heavy_hex(hamiltonian, graph, config.max_swap_cost)
        Path(args.output + LAYOUT_SUFFIX).write_text(format_layout(layout), encoding="utf-8")
        document["depth_estimate"] = layout.depth_estimate
        sweep = []
        for budget in sorted(set(config.sweep)):
            swept_layout, _, swept = map_heavy_hex(hamiltonian, graph, budget)
            sweep.append({
                "max_swap_cost": budget,
                "ratio_by_order": swept.ratio_by_order(),
                "depth_estimate": swept_layout.depth_estimate,
            })
        document["sweep"] = sweep

    document["report"] = sparsify_summary(report)
    # null above the brute-force cap
    document["ground_state_preserved"] = (
        ground_state_preserved(hamiltonian, sparse) if hamiltonian.num_vars <= BRUTE_FORCE_CAP else None
    )
    document["terms"] = {"original": len(hamiltonian.terms), "kept": len(sparse.terms)}
    write_problem(sparse, args.output)
    write_report(document, args.output + REPORT_SUFFIX)


def cmd_bench(args: argparse.Namespace, config: RunConfig) -> None:
    harness_config = HarnessConfig(
        sizes=tuple(config.sizes),
        seeds=tuple(config.seeds),
        solvers=tuple(config.solvers),
        instance_kind=config.instance_kind,
        improvement_timeout=config.improvement_timeout,
        tabu_restarts=config.tabu_restarts,
        threads=config.threads,
    )
    store = get_connection(config.db) if config.db else None
    try:
        table = scaling_harness(harness_config, store=store)
    finally:
        if store is not None:
            store.close()
    write_table_csv(table, args.output)


def _fit_from_csv(path: str, solver: str) -> ExponentialFit:
    table = pd.read_csv(path)
    missing = {"size", "solver", "time"} - set(table.columns)
    if missing:
        raise ConfigError(f"{path} lacks columns {sorted(missing)}")
    times = table[table["solver"] == solver].groupby("size")["time"].mean()
    return fit_exponential(times.index.to_numpy(dtype=float), times.to_numpy(dtype=float))


def cmd_resources(args: argparse.Namespace, config: RunConfig) -> None:
    _require_file(config.fit_from, "benchmark table")
    params = RuntimeModelParams(
        t_g=config.t_g, t_p=config.t_p, t_opt=config.t_opt,
        epsilon=config.epsilon, delta=config.delta, p=config.p,
    )

    fit: Optional[ExponentialFit] = None
    if config.fit_from is not None:
        fit = _fit_from_csv(config.fit_from, config.fit_solver)
    elif config.fit is not None:
        fit = ExponentialFit(*config.fit, rms=0.0, relative_rms=0.0, domain=(0.0, 0.0))

    rows: List[Dict[str, Any]] = []
    for size in config.sizes:
        if size < 1:
            raise ConfigError(f"resource sizes must be >= 1, got {size}")
        cutoff = max(size - config.reduction_rounds, 0)
        row = {
            "N": size,
            "shots": shots_required(size, config.epsilon, config.delta),
            "time_per_shot": time_per_shot(size, params),
            "single_round_time": single_round_time(size, params),
            "cutoff": cutoff,
            "rqaoa_total_time": rqaoa_total_time(size, cutoff, params),
            "rqaoa_asymptotic_time": rqaoa_asymptotic_time(size, params),
        }
        if fit is not None:
            try:
                row["speedup_ratio"] = hybrid_speedup_ratio(size, cutoff, fit, params)
            except OverflowError:
                row["speedup_ratio"] = None
        rows.append(row)

    document: Dict[str, Any] = {"inputs": config.model_dump(), "rows": rows}
    if fit is None:
        document["crossover"] = "no fit"
    else:
        document["fit"] = {
            "a": fit.a, "b": fit.b, "c": fit.c,
            "rms": fit.rms, "relative_rms": fit.relative_rms, "domain": list(fit.domain),
        }
        crossover = crossover_size(fit, params, config.reduction_rounds)
        document["crossover"] = crossover if crossover is not None else "no crossover"
    write_report(document, args.output)


COMMANDS: Dict[str, Callable[[argparse.Namespace, RunConfig], None]] = {
    "discretize": cmd_discretize,
    "build": cmd_build,
    "solve": cmd_solve,
    "sparsify": cmd_sparsify,
    "bench": cmd_bench,
    "resources": cmd_resources,
}


# =============================================================================
# Parser
# =============================================================================

def _count_or_fraction(text: str):
    """`--keep 3` is a term count, `--keep 0.5` a fraction."""
    try:
        return int(text)
    except ValueError:
        return float(text)


# Flags whose value lands in RunConfig; positional paths stay on the namespace.
_CONFIG_FLAGS = {
    "common": [
        ("--seed", dict(type=int)),
        ("--threads", dict(type=int)),
        ("--log-level", dict(type=str)),
    ],
    "tables": [
        ("--label-column", dict(type=str)),
        ("--delimiter", dict(type=str)),
    ],
    "discretize": [("--levels", dict(type=int))],
    "build": [
        ("--formulation", dict(type=str)),
        ("--lam", dict(type=float)),
        ("--alpha", dict(type=float, nargs=3)),
        ("--k", dict(type=int)),
    ],
    "solve": [
        ("--method", dict(type=str)),
        ("--finisher", dict(type=str)),
        ("--lambda-c", dict(type=float)),
        ("--d-s", dict(type=int)),
        ("--n-s", dict(type=int)),
        ("--p", dict(type=int)),
        ("--rounds", dict(type=int)),
        ("--cutoff", dict(type=int)),
        ("--elimination", dict(type=str)),
        ("--reuse-donors", dict(action="store_true")),
        ("--maxiter", dict(type=int)),
        ("--optimizer-restarts", dict(type=int)),
        ("--tabu-restarts", dict(type=int)),
    ],
    "sparsify": [
        ("--lambda-c", dict(type=float)),
        ("--sparsify-method", dict(type=str)),
        ("--keep", dict(type=_count_or_fraction)),
        ("--threshold", dict(type=float)),
        ("--budget", dict(type=int)),
        ("--surrogate-angle", dict(type=float)),
        ("--rows", dict(type=int)),
        ("--cols", dict(type=int)),
        ("--max-swap-cost", dict(type=int)),
        ("--sweep", dict(type=int, nargs="+")),
    ],
    "bench": [
        ("--sizes", dict(type=int, nargs="+")),
        ("--seeds", dict(type=int, nargs="+")),
        ("--solvers", dict(type=str, nargs="+")),
        ("--instance-kind", dict(type=str)),
        ("--improvement-timeout", dict(type=float)),
        ("--tabu-restarts", dict(type=int)),
        ("--db", dict(type=str)),
    ],
    "resources": [
        ("--t-g", dict(type=float)),
        ("--t-p", dict(type=float)),
        ("--t-opt", dict(type=float)),
        ("--epsilon", dict(type=float)),
        ("--delta", dict(type=float)),
        ("--p", dict(type=int)),
        ("--sizes", dict(type=int, nargs="+")),
        ("--fit", dict(type=float, nargs=3, metavar=("A", "B", "C"))),
        ("--fit-from", dict(type=str)),
        ("--fit-solver", dict(type=str)),
        ("--reduction-rounds", dict(type=int)),
    ],
}

_POSITIONALS = {
    "discretize": ["input", "output"],
    "build": ["matrix", "output"],
    "solve": ["problem", "output"],
    "sparsify": ["problem", "output"],
    "bench": ["output"],
    "resources": ["output"],
}

_USES_TABLES = ("discretize", "build", "solve")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hqfs",
        description="Hybrid higher-order feature selection: build, reduce, solve, sparsify, benchmark.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub = subparsers.add_parser(name, argument_default=argparse.SUPPRESS)
        for positional in _POSITIONALS[name]:
            sub.add_argument(positional)
        sub.add_argument("--config", dest="config_file", default=None, help="JSON config file")
        groups = ["common"] + (["tables"] if name in _USES_TABLES else []) + [name]
        for group in groups:
            for flag, options in _CONFIG_FLAGS[group]:
                sub.add_argument(flag, **options)
        if name == "discretize":
            sub.add_argument("--bins", default=None, help="apply this frozen BinSpec sidecar")
        if name == "solve":
            sub.add_argument("--matrix", default=None, help="matrix table, for feature names")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    skip = {"command", "config_file", "bins", "matrix", *(p for ps in _POSITIONALS.values() for p in ps)}
    return {key: value for key, value in vars(args).items() if key not in skip}


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        config = load_config(args.config_file, _overrides(args))
        configure_logging(config.log_level)
        COMMANDS[args.command](args, config)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0
