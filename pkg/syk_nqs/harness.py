"""
Training runs, the convergence truncation criterion, and width/depth scaling sweeps.

A run trains a network against the exact ground state of a problem and evaluates the relative energy error `dE` at every
step. It stops as soon as `dE` drops below the threshold. Otherwise it trains for at least `t_max` steps, then keeps
extending in blocks of `control_interval` steps as long as the estimated time to reach the threshold keeps shrinking
faster from one block to the next.
"""

import datetime
import enum
import logging
import math
import multiprocessing
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Annotated, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .auxiliary import Alias
from .basis import SectorBasis, build_sector_basis
from .core import RealArray
from .ed import GroundStateSolution, ground_state
from .exception import ArgumentError, NumericalError
from .models import CouplingTensor, Model, SparseHamiltonian, build_hamiltonian
from .nqs import Activation, Architecture, NetworkParams, SkipBlocks, init_params, num_params
from .optimize import AdamSettings, LossContext, LossKind, OptimizerState, adam_step

LOGGER = logging.getLogger(__name__)


class Verdict(enum.Enum):
    "Outcome of a training run."

    converged = "converged"
    truncated = "truncated"
    exhausted = "exhausted"
    failed = "failed"


class Decision(enum.Enum):
    "Outcome of the truncation criterion at a control boundary."

    continue_ = "continue"
    truncate = "truncate"


class SweepAxis(enum.Enum):
    "Architecture dimension varied by a scaling sweep."

    alpha = "alpha"
    mu = "mu"


@dataclass(frozen=True)
class LanczosSettings:
    """
    Parameters of the exact ground-state solver.

    :param tol: Residual norm below which the eigenpair is accepted.
    :param max_iter: Total budget of Lanczos iterations.
    :param krylov_dim: Krylov space dimension of a single restart cycle.
    :param seed: Seed of the start vector.
    """

    tol: float = 1e-9
    max_iter: int = 2000
    krylov_dim: int = 100
    seed: int = 0


@dataclass(frozen=True, eq=False)
class Problem:
    """
    A Hamiltonian in the half-filled sector together with its exact ground state.

    :param model: The physical model.
    :param num_sites: Number of sites.
    :param coupling_seed: Seed of the coupling draw (0 for the Heisenberg chain).
    :param hamiltonian: The sector Hamiltonian.
    :param ground_state: Its exact ground state.
    :param couplings: The SYK coupling tensor, if applicable.
    """

    model: Model
    num_sites: int
    coupling_seed: int
    hamiltonian: SparseHamiltonian = field(repr=False)
    ground_state: GroundStateSolution = field(repr=False)
    couplings: Optional[CouplingTensor] = field(default=None, repr=False)

    @property
    def basis(self) -> SectorBasis:
        return self.hamiltonian.basis

    @property
    def dimension(self) -> int:
        return self.hamiltonian.dimension


def build_problem(
    model: Model,
    num_sites: int,
    coupling_seed: int,
    lanczos: Optional[LanczosSettings] = None,
    *,
    solution: Optional[GroundStateSolution] = None,
) -> Problem:
    """
    Builds the half-filled sector Hamiltonian of a model and solves for its ground state.

    :param solution: A previously computed ground state to reuse instead of solving again.
    :raises SolverError: The eigensolver did not converge.
    """

    lanczos = lanczos or LanczosSettings()
    basis = build_sector_basis(num_sites, num_sites // 2)
    hamiltonian, couplings = build_hamiltonian(model, basis, coupling_seed)
    if solution is None:
        solution = ground_state(
            hamiltonian, lanczos.tol, lanczos.max_iter, krylov_dim=lanczos.krylov_dim, seed=lanczos.seed
        )
        LOGGER.info(
            "ground state solved model=%s L=%d coupling_seed=%d energy=%.12g residual=%.3e dimension=%d",
            model.value,
            num_sites,
            coupling_seed,
            solution.energy,
            solution.residual,
            hamiltonian.dimension,
        )
    elif len(solution.vector) != hamiltonian.dimension:
        raise ArgumentError(f"stored ground state has dimension {len(solution.vector)}, expected {hamiltonian.dimension}")
    return Problem(model, num_sites, coupling_seed, hamiltonian, solution, couplings)


def make_architecture(
    num_sites: int,
    alpha: int,
    mu: int,
    activation: Activation = Activation.selu,
    skip_block_length: Optional[int] = None,
) -> Architecture:
    """
    Creates an architecture, splitting the layers into residual blocks of a given length if requested.

    :raises ArgumentError: The block length does not divide the number of layers.
    """

    skip_blocks = None
    if skip_block_length is not None:
        if skip_block_length < 1 or mu % skip_block_length:
            raise ArgumentError(f"skip block length {skip_block_length} does not divide {mu} layers")
        skip_blocks = SkipBlocks(mu // skip_block_length, skip_block_length)
    return Architecture(num_sites, alpha, mu, activation, skip_blocks)


@dataclass(frozen=True)
class TrainingSettings:
    """
    Protocol of a training run.

    :param loss: Training objective.
    :param t_max: Minimum number of steps before the truncation criterion is consulted.
    :param control_interval: Spacing of the control boundaries, in steps.
    :param max_steps: Hard limit on the number of steps.
    :param threshold: Relative energy error that counts as converged.
    :param smoothing_window: Length of the flat window filter applied to the error trajectory, in steps; odd.
    :param evaluation_stride: Only every `evaluation_stride`-th step is recorded in the trajectories.
    :param snapshot_steps: Step budgets at which the best error so far is reported.
    :param adam: Optimizer hyperparameters.
    :param truncate: Whether to stop runs that the criterion predicts will not converge.
    """

    loss: LossKind = LossKind.overlap
    t_max: int = 200_000
    control_interval: int = 100_000
    max_steps: int = 1_000_000
    threshold: float = 1e-3
    smoothing_window: int = 2001
    evaluation_stride: int = 1
    snapshot_steps: Tuple[int, ...] = (50_000, 100_000, 200_000)
    adam: AdamSettings = field(default_factory=AdamSettings)
    truncate: bool = True

    def __post_init__(self) -> None:
        if self.smoothing_window < 1 or self.smoothing_window % 2 == 0:
            raise ArgumentError(f"smoothing window must be a positive odd number but got {self.smoothing_window}")
        for name in ("t_max", "control_interval", "max_steps", "evaluation_stride"):
            if getattr(self, name) < 1:
                raise ArgumentError(f"training setting `{name}` must be positive but got {getattr(self, name)}")
        if self.threshold <= 0:
            raise ArgumentError(f"threshold must be positive but got {self.threshold}")
        if self.truncate and self.t_max < minimum_history(self.control_interval, self.smoothing_window, self.evaluation_stride):
            raise ArgumentError(
                f"t_max={self.t_max} is too short for a control interval of {self.control_interval} steps "
                f"and a smoothing window of {self.smoothing_window} steps"
            )


class SnapshotMinimum(NamedTuple):
    """
    Best relative energy error within a step budget.

    :param step: The step budget.
    :param best_delta_e: Smallest error over steps `0, ..., step`.
    :param reached: Whether the run actually lasted for the full budget.
    """

    step: int
    best_delta_e: float
    reached: bool


@dataclass(frozen=True)
class RunSummary:
    """
    Outcome of a training run, as written to run records and tables.

    :param run_id: Identifier of the run, unique within an output directory.
    :param model: The physical model.
    :param num_sites: Number of sites.
    :param coupling_seed: Seed of the coupling draw.
    :param network_seed: Seed of the parameter initialization.
    :param alpha: Hidden unit density.
    :param mu: Number of layers.
    :param activation: Nonlinearity.
    :param skip_block_length: Length of residual blocks, if any.
    :param loss: Training objective.
    :param num_params: Number of complex network parameters.
    :param dimension: Dimension of the half-filled sector.
    :param best_delta_e: Smallest relative energy error reached.
    :param best_step: Step at which the smallest error was reached.
    :param final_delta_e: Relative energy error at the last evaluated step.
    :param final_delta_o: Overlap loss at the last evaluated step.
    :param steps: Number of optimizer updates applied.
    :param verdict: How the run ended.
    :param snapshots: Best error within each snapshot budget, as `[step, best_delta_e, reached]`.
    :param started_at: Wall-clock start time.
    :param elapsed_seconds: Wall-clock duration.
    :param evaluation_stride: Step spacing of the recorded trajectories.
    :param failure: Error message of a failed run.
    """

    run_id: str
    model: Model
    num_sites: Annotated[int, Alias("L")]
    coupling_seed: int
    network_seed: int
    alpha: int
    mu: int
    activation: Activation
    skip_block_length: Optional[int]
    loss: LossKind
    num_params: int
    dimension: int
    best_delta_e: float
    best_step: int
    final_delta_e: float
    final_delta_o: float
    steps: int
    verdict: Verdict
    snapshots: List[Tuple[int, float, bool]]
    started_at: datetime.datetime
    elapsed_seconds: float
    evaluation_stride: int = 1
    failure: Optional[str] = None


@dataclass(eq=False)
class TrainingRecord:
    """
    Full account of a training run.

    :param run_id: Identifier of the run.
    :param problem_model: The physical model.
    :param num_sites: Number of sites.
    :param coupling_seed: Seed of the coupling draw.
    :param network_seed: Seed of the parameter initialization.
    :param architecture: Network shape.
    :param settings: Training protocol.
    :param dimension: Dimension of the half-filled sector.
    :param steps: Recorded step indices.
    :param delta_e: Relative energy error at the recorded steps.
    :param delta_o: Overlap loss at the recorded steps.
    :param best_delta_e: Smallest error over all evaluated steps.
    :param best_step: Step of the smallest error.
    :param best_params: Parameters that attained the smallest error.
    :param snapshots: Best error within each snapshot budget.
    :param verdict: How the run ended.
    :param steps_completed: Number of optimizer updates applied.
    :param started_at: Wall-clock start time.
    :param elapsed_seconds: Wall-clock duration.
    :param failure: Error message of a failed run.
    """

    run_id: str
    problem_model: Model
    num_sites: int
    coupling_seed: int
    network_seed: int
    architecture: Architecture
    settings: TrainingSettings
    dimension: int
    steps: np.ndarray
    delta_e: RealArray
    delta_o: RealArray
    best_delta_e: float
    best_step: int
    best_params: NetworkParams
    snapshots: List[SnapshotMinimum]
    verdict: Verdict
    steps_completed: int
    started_at: datetime.datetime
    elapsed_seconds: float
    failure: Optional[str] = None

    @property
    def num_params(self) -> int:
        return num_params(self.architecture)

    def summary(self) -> RunSummary:
        skip = self.architecture.skip_blocks
        return RunSummary(
            run_id=self.run_id,
            model=self.problem_model,
            num_sites=self.num_sites,
            coupling_seed=self.coupling_seed,
            network_seed=self.network_seed,
            alpha=self.architecture.alpha,
            mu=self.architecture.mu,
            activation=self.architecture.activation,
            skip_block_length=skip.block_length if skip is not None else None,
            loss=self.settings.loss,
            num_params=self.num_params,
            dimension=self.dimension,
            best_delta_e=self.best_delta_e,
            best_step=self.best_step,
            final_delta_e=float(self.delta_e[-1]) if len(self.delta_e) else math.inf,
            final_delta_o=float(self.delta_o[-1]) if len(self.delta_o) else math.inf,
            steps=self.steps_completed,
            verdict=self.verdict,
            snapshots=[(s.step, s.best_delta_e, s.reached) for s in self.snapshots],
            started_at=self.started_at,
            elapsed_seconds=self.elapsed_seconds,
            evaluation_stride=self.settings.evaluation_stride,
            failure=self.failure,
        )


def run_identifier(
    model: Model, num_sites: int, coupling_seed: int, architecture: Architecture, network_seed: int, loss: LossKind
) -> str:
    "File-name safe identifier of a run."

    skip = architecture.skip_blocks
    suffix = "" if architecture.activation is Activation.selu else f"-{architecture.activation.value}"
    if skip is not None:
        suffix += f"-s{skip.block_length}"
    return (
        f"{model.value}-L{num_sites}-c{coupling_seed}-a{architecture.alpha}-m{architecture.mu}"
        f"-n{network_seed}-{loss.value}{suffix}"
    )


def smooth(trajectory: RealArray, window: int) -> RealArray:
    """
    Centered flat moving average; windows are truncated at both ends of the series.

    :param trajectory: The series to smooth.
    :param window: Window length, positive and odd.
    :returns: Smoothed series of the same length.
    :raises ArgumentError: The window is even, not positive or longer than the series.
    """

    series = np.asarray(trajectory, dtype=np.float64)
    if window < 1 or window % 2 == 0:
        raise ArgumentError(f"smoothing window must be a positive odd number but got {window}")
    if window > len(series):
        raise ArgumentError(f"smoothing window {window} is longer than the series of length {len(series)}")

    half = window // 2
    cumulative = np.concatenate([[0.0], np.cumsum(series)])
    index = np.arange(len(series))
    lo = np.maximum(index - half, 0)
    hi = np.minimum(index + half + 1, len(series))
    return (cumulative[hi] - cumulative[lo]) / (hi - lo)


def t_star_min(delta_e: float, slope: float, threshold: float) -> float:
    """
    Lower-bound estimate of the number of steps until the error reaches the threshold, `(dE - threshold) / |slope|`.

    :returns: The estimate, or infinity for a zero slope.
    :raises ArgumentError: The error is already at or below the threshold.
    """

    if delta_e <= threshold:
        raise ArgumentError(f"error {delta_e:.6g} is not above the threshold {threshold:.6g}")
    if slope == 0:
        return math.inf
    return (delta_e - threshold) / abs(slope)


def least_squares_slope(values: RealArray, spacing: float = 1.0) -> float:
    "Slope of the least-squares line through equally spaced samples."

    values = np.asarray(values, dtype=np.float64)
    positions = np.arange(len(values), dtype=np.float64) * spacing
    centered = positions - positions.mean()
    return float(np.dot(centered, values - values.mean()) / np.dot(centered, centered))


def _window_samples(window: int, stride: int) -> int:
    samples = max(1, window // stride)
    return samples if samples % 2 else samples + 1


def minimum_history(interval: int, window: int, stride: int = 1) -> int:
    "Smallest number of steps after which `truncation_verdict` has enough history."

    samples = _window_samples(window, stride)
    fit = max(samples, 2)
    interval_samples = max(1, interval // stride)
    # the middle boundary must lie past the first sample whose trailing fit window is fully smoothed,
    # fit - 1 + half, with n = steps // stride + 1 samples
    return (fit + 2 * (samples // 2) + interval_samples) * stride


def truncation_verdict(
    delta_e: RealArray,
    interval: int,
    threshold: float,
    window: int,
    *,
    stride: int = 1,
) -> Decision:
    """
    Decides whether a run that is still above the threshold is expected to converge.

    The error trajectory is smoothed with a flat window, and `t*_min` is estimated at three boundaries spaced `interval`
    steps apart: the most recent one sits half a window before the end of the series so that its smoothing window is
    complete, and the earliest one is moved forward if the history is too short for a fit window of fully smoothed
    samples. The slope at a boundary is the least-squares slope of the smoothed curve over the trailing window. With
    `dt*(b, b') = (t*(b') - t*(b)) / (b' - b)`, the run continues if and only if `dt*` over the later interval is smaller
    than over the earlier one.

    :param delta_e: Recorded relative energy errors, one per `stride` steps.
    :param interval: Spacing of the boundaries, in steps.
    :param threshold: Convergence threshold.
    :param window: Smoothing window, in steps.
    :param stride: Step spacing of the recorded samples.
    :returns: Whether to continue or truncate the run.
    :raises ArgumentError: The trajectory is too short to place the boundaries.
    """

    series = np.asarray(delta_e, dtype=np.float64)
    samples = _window_samples(window, stride)
    half = samples // 2
    fit = max(samples, 2)
    interval_samples = max(1, interval // stride)

    if len(series) < samples:
        raise ArgumentError(f"trajectory of {len(series)} samples is shorter than the smoothing window of {samples}")
    smoothed = smooth(series, samples)
    if np.min(smoothed) <= threshold:
        # already crossed, never truncate
        return Decision.continue_

    latest = len(series) - 1 - half
    middle = latest - interval_samples
    earliest = max(middle - interval_samples, fit - 1 + half)
    if middle <= earliest:
        raise ArgumentError(
            f"trajectory of {len(series)} samples is too short for boundaries {interval_samples} samples apart "
            f"with a fit window of {fit}"
        )

    def estimate(boundary: int) -> float:
        slope = least_squares_slope(smoothed[boundary - fit + 1 : boundary + 1], stride)
        return t_star_min(float(smoothed[boundary]), slope, threshold)

    t_earliest, t_middle, t_latest = estimate(earliest), estimate(middle), estimate(latest)
    earlier_rate = (t_middle - t_earliest) / ((middle - earliest) * stride)
    later_rate = (t_latest - t_middle) / ((latest - middle) * stride)
    LOGGER.debug(
        "truncation criterion t_star=(%.6g, %.6g, %.6g) earlier_rate=%.6g later_rate=%.6g",
        t_earliest,
        t_middle,
        t_latest,
        earlier_rate,
        later_rate,
    )
    return Decision.continue_ if later_rate < earlier_rate else Decision.truncate


def train(problem: Problem, architecture: Architecture, settings: TrainingSettings, network_seed: int) -> TrainingRecord:
    """
    Trains a network against the exact ground state of a problem.

    The relative energy error and the overlap loss are evaluated at every step, whichever loss drives the optimizer.
    A numerical failure ends the run with the `failed` verdict; the record of the steps so far is kept.

    :param problem: Hamiltonian and exact ground state.
    :param architecture: Network shape.
    :param settings: Training protocol.
    :param network_seed: Seed of the parameter initialization.
    :returns: The run record, including the best parameters.
    """

    if architecture.num_sites != problem.num_sites:
        raise ArgumentError(f"network on {architecture.num_sites} sites cannot represent a state on {problem.num_sites}")

    run_id = run_identifier(problem.model, problem.num_sites, problem.coupling_seed, architecture, network_seed, settings.loss)
    context = LossContext.create(problem.hamiltonian, problem.ground_state)
    vector = init_params(architecture, network_seed).to_real_vector()
    state = OptimizerState.create(len(vector), settings.adam)

    stride = settings.evaluation_stride
    snapshot_steps = sorted(settings.snapshot_steps)
    snapshots: List[SnapshotMinimum] = []
    recorded_steps: List[int] = []
    delta_e: List[float] = []
    delta_o: List[float] = []
    best_delta_e = math.inf
    best_step = 0
    best_vector = vector
    verdict: Optional[Verdict] = None
    failure: Optional[str] = None
    deadline = settings.t_max

    LOGGER.info("training started run_id=%s num_params=%d dimension=%d", run_id, num_params(architecture), problem.dimension)
    started_at = datetime.datetime.now(datetime.timezone.utc)
    start = time.perf_counter()

    step = 0
    while verdict is None:
        try:
            loss, grad = context.value_and_gradient(architecture, settings.loss, vector)
        except NumericalError as e:
            LOGGER.warning("training failed run_id=%s step=%d error=%s", run_id, step, e)
            verdict, failure = Verdict.failed, str(e)
            break

        error = float(loss.relative_energy_error)  # type: ignore
        if step % stride == 0:
            recorded_steps.append(step)
            delta_e.append(error)
            delta_o.append(float(loss.overlap_loss))  # type: ignore
        if error < best_delta_e:
            best_delta_e, best_step, best_vector = error, step, vector

        while len(snapshots) < len(snapshot_steps) and step >= snapshot_steps[len(snapshots)]:
            snapshots.append(SnapshotMinimum(snapshot_steps[len(snapshots)], best_delta_e, True))

        if error < settings.threshold:
            verdict = Verdict.converged
        elif step >= settings.max_steps:
            verdict = Verdict.exhausted
        elif step >= deadline:
            LOGGER.info("control boundary run_id=%s step=%d delta_e=%.6g best=%.6g", run_id, step, error, best_delta_e)
            if settings.truncate:
                decision = truncation_verdict(
                    np.array(delta_e), settings.control_interval, settings.threshold, settings.smoothing_window, stride=stride
                )
                if decision is Decision.truncate:
                    verdict = Verdict.truncated
            deadline += settings.control_interval

        if verdict is None:
            vector, state = adam_step(state, vector, grad)
            step += 1

    for budget in snapshot_steps[len(snapshots) :]:
        snapshots.append(SnapshotMinimum(budget, best_delta_e, False))

    elapsed = time.perf_counter() - start
    LOGGER.info(
        "training finished run_id=%s verdict=%s steps=%d best_delta_e=%.6g best_step=%d elapsed=%.1fs",
        run_id,
        verdict.value,
        step,
        best_delta_e,
        best_step,
        elapsed,
    )
    return TrainingRecord(
        run_id=run_id,
        problem_model=problem.model,
        num_sites=problem.num_sites,
        coupling_seed=problem.coupling_seed,
        network_seed=network_seed,
        architecture=architecture,
        settings=settings,
        dimension=problem.dimension,
        steps=np.array(recorded_steps, dtype=np.int64),
        delta_e=np.array(delta_e, dtype=np.float64),
        delta_o=np.array(delta_o, dtype=np.float64),
        best_delta_e=best_delta_e,
        best_step=best_step,
        best_params=NetworkParams.from_real_vector(architecture, best_vector, network_seed),
        snapshots=snapshots,
        verdict=verdict,
        steps_completed=step,
        started_at=started_at,
        elapsed_seconds=elapsed,
        failure=failure,
    )


@dataclass(frozen=True)
class ScalingPoint:
    """
    Training outcome at one swept architecture, aggregated over network seeds.

    :param value: The swept value (`alpha` or `mu`).
    :param num_params: Number of complex network parameters.
    :param mean_delta_e: Mean over seeds of the best relative energy error.
    :param min_delta_e: Smallest best error over seeds.
    :param max_delta_e: Largest best error over seeds.
    :param converged: Whether any seed reached the threshold.
    """

    value: int
    num_params: int
    mean_delta_e: float
    min_delta_e: float
    max_delta_e: float
    converged: bool


@dataclass(frozen=True)
class ScalingResult:
    """
    Minimal width or depth at which training reaches the threshold, for one problem.

    :param model: The physical model.
    :param num_sites: Number of sites.
    :param coupling_seed: Seed of the coupling draw.
    :param axis: The swept architecture dimension.
    :param fixed_value: Value of the dimension held fixed (`mu` for a width sweep, `alpha` for a depth sweep).
    :param grid: The swept values.
    :param points: Outcome at every swept value.
    :param dimension: Dimension of the half-filled sector, `C(L, L/2)`.
    :param minimum_value: Smallest swept value with a converged run, if any.
    :param num_params_at_minimum: Number of parameters at the minimal value.
    :param exceeds_hilbert_dimension: Whether the parameter count at the minimal value is at least the dimension.
    :param unbounded: True if no swept value converged.
    """

    model: Model
    num_sites: Annotated[int, Alias("L")]
    coupling_seed: int
    axis: SweepAxis
    fixed_value: int
    grid: List[int]
    points: List[ScalingPoint]
    dimension: int
    minimum_value: Optional[int] = None
    num_params_at_minimum: Optional[int] = None
    exceeds_hilbert_dimension: Optional[bool] = None
    unbounded: bool = False


class TrainingJob(NamedTuple):
    problem: Problem
    architecture: Architecture
    settings: TrainingSettings
    network_seed: int


def _run_job(job: TrainingJob) -> TrainingRecord:
    return train(job.problem, job.architecture, job.settings, job.network_seed)


def run_jobs(jobs: Sequence[TrainingJob], workers: int = 1) -> List[TrainingRecord]:
    """
    Trains independent runs, in parallel worker processes if `workers > 1`.

    Records are returned in the order of the jobs regardless of scheduling.
    """

    if workers <= 1 or len(jobs) <= 1:
        return [_run_job(job) for job in jobs]

    # worker processes start fresh so that no JAX runtime state is inherited
    context = multiprocessing.get_context("spawn")
    with ProcessPoolExecutor(max_workers=workers, mp_context=context) as executor:
        return list(executor.map(_run_job, jobs))


def aggregate_scaling(
    problem: Problem,
    axis: SweepAxis,
    grid: Sequence[int],
    fixed_value: int,
    records: Sequence[TrainingRecord],
    threshold: float,
) -> ScalingResult:
    "Locates the minimal converging swept value from the runs of one problem."

    points: List[ScalingPoint] = []
    for value in grid:
        matching = [r for r in records if (r.architecture.alpha if axis is SweepAxis.alpha else r.architecture.mu) == value]
        if not matching:
            continue
        errors = np.array([r.best_delta_e for r in matching])
        points.append(
            ScalingPoint(
                value=value,
                num_params=matching[0].num_params,
                mean_delta_e=float(np.mean(errors)),
                min_delta_e=float(np.min(errors)),
                max_delta_e=float(np.max(errors)),
                converged=bool(np.min(errors) < threshold),
            )
        )

    converged = [p for p in points if p.converged]
    result = ScalingResult(
        model=problem.model,
        num_sites=problem.num_sites,
        coupling_seed=problem.coupling_seed,
        axis=axis,
        fixed_value=fixed_value,
        grid=list(grid),
        points=points,
        dimension=problem.dimension,
    )
    if not converged:
        LOGGER.info("sweep unbounded model=%s L=%d grid=%s", problem.model.value, problem.num_sites, list(grid))
        return replace(result, unbounded=True)

    minimum = converged[0]
    LOGGER.info(
        "sweep minimum model=%s L=%d %s_min=%d num_params=%d dimension=%d",
        problem.model.value,
        problem.num_sites,
        axis.value,
        minimum.value,
        minimum.num_params,
        problem.dimension,
    )
    return replace(
        result,
        minimum_value=minimum.value,
        num_params_at_minimum=minimum.num_params,
        exceeds_hilbert_dimension=minimum.num_params >= problem.dimension,
    )


class SweepOutcome(NamedTuple):
    records: List[TrainingRecord]
    results: List[ScalingResult]


def scaling_sweep(
    problems: Sequence[Problem],
    axis: SweepAxis,
    grid: Sequence[int],
    network_seeds: Sequence[int],
    settings: TrainingSettings,
    *,
    fixed_value: int,
    activation: Activation = Activation.selu,
    skip_block_length: Optional[int] = None,
    workers: int = 1,
) -> SweepOutcome:
    """
    Trains every combination of problem, swept value and network seed, and locates the minimal converging value.

    :param problems: Problems to sweep, typically several sizes and coupling draws.
    :param axis: `alpha` sweeps the width at fixed depth `fixed_value`; `mu` sweeps the depth at fixed width.
    :param grid: Strictly increasing swept values.
    :param network_seeds: Seeds of the parameter initializations at every point.
    :param settings: Training protocol of every run.
    :param workers: Number of worker processes.
    :returns: All run records, and one scaling result per problem.
    :raises ArgumentError: The grid is empty or not strictly increasing, or no seeds are given.
    """

    grid = list(grid)
    if not grid or any(a >= b for a, b in zip(grid, grid[1:])):
        raise ArgumentError(f"sweep grid must be a non-empty strictly increasing sequence but got {grid}")
    if not network_seeds:
        raise ArgumentError("sweep requires at least one network seed")

    jobs: List[TrainingJob] = []
    for problem in problems:
        for value in grid:
            alpha, mu = (value, fixed_value) if axis is SweepAxis.alpha else (fixed_value, value)
            architecture = make_architecture(problem.num_sites, alpha, mu, activation, skip_block_length)
            for seed in network_seeds:
                jobs.append(TrainingJob(problem, architecture, settings, seed))

    LOGGER.info("sweep started axis=%s grid=%s runs=%d workers=%d", axis.value, grid, len(jobs), workers)
    records = run_jobs(jobs, workers)

    results: List[ScalingResult] = []
    for problem in problems:
        problem_records = [
            r
            for r in records
            if r.problem_model is problem.model and r.num_sites == problem.num_sites and r.coupling_seed == problem.coupling_seed
        ]
        results.append(aggregate_scaling(problem, axis, grid, fixed_value, problem_records, settings.threshold))
    return SweepOutcome(records, results)
