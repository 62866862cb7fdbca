"""
Command-line interface.

Every command reads the experiment configuration, runs one stage of the pipeline and writes its records and tables to
the output directory:

* `ed` solves for the exact ground states (prerequisite of every other stage),
* `train` trains one architecture for every size, coupling draw and network seed,
* `sweep` locates the minimal width or depth at which training converges,
* `compress` truncates the singular values of the networks trained by `train`,
* `entropy` computes the bipartite entanglement entropy of the exact ground states,
* `schema` prints the JSON schema of the configuration file.
"""

import argparse
import dataclasses
import logging
import pathlib
import sys
from dataclasses import dataclass
from typing import Annotated, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .auxiliary import Alias
from .basis import build_sector_basis
from .compress import CompressionReport, compression_curve
from .config import ExperimentConfig, config_to_json, load_config
from .ed import bipartite_entropy, page_value
from .exception import ArgumentError, ConfigError, MissingRecordError, NumericalError, SolverError
from .harness import (
    Problem,
    RunSummary,
    SweepAxis,
    TrainingJob,
    TrainingRecord,
    build_problem,
    make_architecture,
    run_identifier,
    run_jobs,
    scaling_sweep,
)
from .models import Model
from .records import (
    load_checkpoint,
    load_ground_state,
    save_checkpoint,
    save_couplings,
    save_ground_state,
    save_trajectory,
    write_csv,
    write_jsonl,
)
from .schema import classdef_to_schema
from .serialization import json_dump, object_to_json

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MISSING_RECORD = 3
EXIT_NUMERICAL = 4


@dataclass(frozen=True)
class GroundStateSummary:
    """
    Exact ground state of one problem instance.

    :param model: The physical model.
    :param num_sites: Number of sites.
    :param coupling_seed: Seed of the coupling draw.
    :param energy: Ground-state energy.
    :param residual: Norm of `H psi - E psi`.
    :param dimension: Dimension of the half-filled sector.
    """

    model: Model
    num_sites: Annotated[int, Alias("L")]
    coupling_seed: int
    energy: float
    residual: float
    dimension: int


@dataclass(frozen=True)
class CompressionSummary:
    """
    Compression curve of one trained network.

    :param run_id: Identifier of the training run.
    :param num_sites: Number of sites.
    :param coupling_seed: Seed of the coupling draw.
    :param network_seed: Seed of the parameter initialization.
    :param reports: One report per singular value threshold.
    """

    run_id: str
    num_sites: Annotated[int, Alias("L")]
    coupling_seed: int
    network_seed: int
    reports: List[CompressionReport]


@dataclass(frozen=True)
class EntropySummary:
    """
    Bipartite entanglement entropy of one exact ground state.

    :param model: The physical model.
    :param num_sites: Number of sites.
    :param coupling_seed: Seed of the coupling draw.
    :param entropy: Von Neumann entropy of the half system.
    :param page_value: Average entropy of a random pure state, for comparison.
    """

    model: Model
    num_sites: Annotated[int, Alias("L")]
    coupling_seed: int
    entropy: float
    page_value: float


def _instances(config: ExperimentConfig) -> Iterator[Tuple[int, int]]:
    for num_sites in config.sizes:
        for coupling_seed in config.coupling_seeds(num_sites):
            yield num_sites, coupling_seed


def _load_problems(config: ExperimentConfig) -> List[Problem]:
    "Rebuilds the Hamiltonians and attaches the ground states written by the `ed` command."

    problems = []
    for num_sites, coupling_seed in _instances(config):
        solution = load_ground_state(config.output_dir, config.model, num_sites, coupling_seed)
        problems.append(build_problem(config.model, num_sites, coupling_seed, solution=solution))
    return problems


def _run_columns(config: ExperimentConfig) -> List[str]:
    columns = [
        "run_id",
        "model",
        "L",
        "coupling_seed",
        "network_seed",
        "alpha",
        "mu",
        "loss",
        "best_delta_e",
        "best_step",
        "final_delta_o",
        "steps",
        "verdict",
        "num_params",
        "dimension",
    ]
    return columns + [f"best_delta_e_{step}" for step in sorted(config.snapshot_steps)]


def _run_row(summary: RunSummary) -> list:
    return [
        summary.run_id,
        summary.model,
        summary.num_sites,
        summary.coupling_seed,
        summary.network_seed,
        summary.alpha,
        summary.mu,
        summary.loss,
        summary.best_delta_e,
        summary.best_step,
        summary.final_delta_o,
        summary.steps,
        summary.verdict,
        summary.num_params,
        summary.dimension,
    ] + [best for _, best, _ in summary.snapshots]


def _store_runs(config: ExperimentConfig, records: Sequence[TrainingRecord], name: str) -> List[RunSummary]:
    summaries = []
    for record in records:
        lineage = {
            "run_id": record.run_id,
            "model": record.problem_model.value,
            "num_sites": record.num_sites,
            "coupling_seed": record.coupling_seed,
            "network_seed": record.network_seed,
            "master_seed": config.master_seed,
            "loss": record.settings.loss.value,
            "best_step": record.best_step,
            "version": __version__,
        }
        save_checkpoint(config.output_dir, record.run_id, record.best_params, lineage)
        save_trajectory(config.output_dir, record)
        summaries.append(record.summary())

    write_jsonl(config.output_dir / f"{name}.jsonl", [object_to_json(s) for s in summaries], config_to_json(config))
    write_csv(config.output_dir / f"{name}.csv", _run_columns(config), [_run_row(s) for s in summaries])
    return summaries


def cmd_ed(config: ExperimentConfig) -> None:
    "Solve for the exact ground states and write them to `ground_states/`."

    results = []
    for num_sites, coupling_seed in _instances(config):
        problem = build_problem(config.model, num_sites, coupling_seed, config.lanczos_settings(num_sites, coupling_seed))
        solution = problem.ground_state
        save_ground_state(config.output_dir, config.model, num_sites, coupling_seed, solution)
        if problem.couplings is not None:
            save_couplings(config.output_dir, problem.couplings)
        results.append(
            GroundStateSummary(config.model, num_sites, coupling_seed, solution.energy, solution.residual, problem.dimension)
        )
        print(
            f"model={config.model.value} L={num_sites} coupling_seed={coupling_seed} "
            f"energy={solution.energy:.12g} dimension={problem.dimension}"
        )
    write_jsonl(config.output_dir / "ed.jsonl", [object_to_json(r) for r in results], config_to_json(config))


def cmd_train(config: ExperimentConfig) -> None:
    "Train the configured architecture against the stored ground states."

    settings = config.training_settings()
    jobs = []
    for problem in _load_problems(config):
        architecture = make_architecture(problem.num_sites, config.alpha, config.mu, config.activation, config.skip_block_length)
        for seed in config.network_seed_values():
            jobs.append(TrainingJob(problem, architecture, settings, seed))

    records = run_jobs(jobs, config.workers)
    for summary in _store_runs(config, records, "runs"):
        print(f"run_id={summary.run_id} verdict={summary.verdict.value} best_delta_e={summary.best_delta_e:.6g}")


def cmd_sweep(config: ExperimentConfig) -> None:
    "Sweep the width or the depth and locate the minimal converging value."

    if config.sweep_axis is SweepAxis.alpha:
        grid, fixed_value = config.alpha_grid, config.sweep_mu
    else:
        grid, fixed_value = config.mu_grid, config.sweep_alpha

    outcome = scaling_sweep(
        _load_problems(config),
        config.sweep_axis,
        grid,
        config.network_seed_values(),
        config.training_settings(),
        fixed_value=fixed_value,
        activation=config.activation,
        skip_block_length=config.skip_block_length,
        workers=config.workers,
    )
    _store_runs(config, outcome.records, "sweep")
    write_jsonl(config.output_dir / "scaling.jsonl", [object_to_json(r) for r in outcome.results], config_to_json(config))
    write_csv(
        config.output_dir / "scaling.csv",
        [
            "model",
            "L",
            "coupling_seed",
            "axis",
            "fixed_value",
            "minimum_value",
            "num_params_at_minimum",
            "dimension",
            "exceeds_hilbert_dimension",
            "unbounded",
        ],
        [
            [
                r.model,
                r.num_sites,
                r.coupling_seed,
                r.axis,
                r.fixed_value,
                r.minimum_value,
                r.num_params_at_minimum,
                r.dimension,
                r.exceeds_hilbert_dimension,
                r.unbounded,
            ]
            for r in outcome.results
        ],
    )
    for r in outcome.results:
        print(
            f"model={r.model.value} L={r.num_sites} coupling_seed={r.coupling_seed} {r.axis.value}_min={r.minimum_value} "
            f"num_params={r.num_params_at_minimum} dimension={r.dimension}"
        )


def cmd_compress(config: ExperimentConfig) -> None:
    "Truncate the singular values of trained networks and measure the energy error."

    summaries: List[CompressionSummary] = []
    rows = []
    for problem in _load_problems(config):
        architecture = make_architecture(problem.num_sites, config.alpha, config.mu, config.activation, config.skip_block_length)
        for seed in config.network_seed_values():
            run_id = run_identifier(config.model, problem.num_sites, problem.coupling_seed, architecture, seed, config.loss)
            params, _ = load_checkpoint(config.output_dir, run_id)
            reports = compression_curve(params, config.svd_thresholds, problem.hamiltonian, problem.ground_state.energy)
            summaries.append(CompressionSummary(run_id, problem.num_sites, problem.coupling_seed, seed, reports))
            for report in reports:
                rows.append(
                    [
                        run_id,
                        problem.num_sites,
                        problem.coupling_seed,
                        seed,
                        report.threshold,
                        report.retained_fraction,
                        report.energy_error_before,
                        report.energy_error_after,
                        report.retained_ranks,
                    ]
                )
            LOGGER.info("compressed run_id=%s thresholds=%d", run_id, len(reports))

    write_jsonl(config.output_dir / "compression.jsonl", [object_to_json(s) for s in summaries], config_to_json(config))
    write_csv(
        config.output_dir / "compression.csv",
        ["run_id", "L", "coupling_seed", "network_seed", "threshold", "retained_fraction", "delta_e_before", "delta_e_after", "ranks"],
        rows,
    )


def cmd_entropy(config: ExperimentConfig) -> None:
    "Compute the bipartite entanglement entropy of the stored ground states."

    summaries: List[EntropySummary] = []
    by_size: Dict[int, List[float]] = {}
    for num_sites, coupling_seed in _instances(config):
        solution = load_ground_state(config.output_dir, config.model, num_sites, coupling_seed)
        entropy = bipartite_entropy(solution.vector, build_sector_basis(num_sites, num_sites // 2))
        by_size.setdefault(num_sites, []).append(entropy)
        summaries.append(EntropySummary(config.model, num_sites, coupling_seed, entropy, page_value(num_sites)))

    write_jsonl(config.output_dir / "entropy.jsonl", [object_to_json(s) for s in summaries], config_to_json(config))
    rows = [[s.model, s.num_sites, s.coupling_seed, s.entropy, s.page_value] for s in summaries]
    write_csv(config.output_dir / "entropy.csv", ["model", "L", "coupling_seed", "entropy", "page_value"], rows)
    for num_sites, values in by_size.items():
        print(f"model={config.model.value} L={num_sites} mean_entropy={np.mean(values):.6g} page_value={page_value(num_sites):.6g}")


COMMANDS: Dict[str, Callable[[ExperimentConfig], None]] = {
    "ed": cmd_ed,
    "train": cmd_train,
    "sweep": cmd_sweep,
    "compress": cmd_compress,
    "entropy": cmd_entropy,
}


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="syk-nqs", description="Neural quantum states for the SYK model.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="logging verbosity"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, handler in COMMANDS.items():
        subparser = subparsers.add_parser(name, help=(handler.__doc__ or "").strip() or None)
        subparser.add_argument("--config", type=pathlib.Path, help="JSON configuration file")
        subparser.add_argument(
            "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE", help="override a configuration field"
        )
        subparser.add_argument("--output-dir", type=pathlib.Path, help="directory receiving records and tables")
        subparser.add_argument("--workers", type=int, help="number of worker processes")
    subparsers.add_parser("schema", help="print the JSON schema of the configuration file")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = create_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    if args.command == "schema":
        json_dump(classdef_to_schema(ExperimentConfig), sys.stdout, indent=2)
        return EXIT_OK

    try:
        config = load_config(args.config, args.overrides)
        if args.output_dir is not None:
            config = dataclasses.replace(config, output_dir=args.output_dir)
        if args.workers is not None:
            config = dataclasses.replace(config, workers=args.workers)
        COMMANDS[args.command](config)
    except (ConfigError, ArgumentError) as e:
        LOGGER.error("invalid configuration: %s", e)
        return EXIT_CONFIG
    except MissingRecordError as e:
        LOGGER.error("%s", e)
        return EXIT_MISSING_RECORD
    except (SolverError, NumericalError) as e:
        LOGGER.error("computation failed: %s", e)
        return EXIT_NUMERICAL
    return EXIT_OK
