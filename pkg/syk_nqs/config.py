"""
Experiment configuration: a flat JSON document validated against the schema generated from `ExperimentConfig`.
"""

import enum
import json
import logging
import os
import pathlib
from dataclasses import dataclass, field
from typing import Annotated, List, Mapping, Optional, Sequence, Tuple

import jsonschema
import numpy as np

from .auxiliary import FloatRange, IntegerRange, MinItems, positive_int, seed64, site_count
from .core import JsonType
from .exception import ConfigError, JsonKeyError, JsonTypeError, JsonValueError
from .harness import LanczosSettings, SweepAxis, TrainingSettings, minimum_history
from .models import Model
from .nqs import Activation
from .optimize import AdamSettings, LearningRateChange, LossKind
from .schema import validate_object
from .serialization import json_to_object, object_to_json

LOGGER = logging.getLogger(__name__)

# the only setting that may come from the environment
OUTPUT_DIR_VARIABLE = "SYK_NQS_OUTPUT_DIR"


class SeedStream(enum.Enum):
    "Independent random streams split from the master seed."

    coupling = 0
    init = 1
    lanczos = 2


def derive_seed(master_seed: int, stream: SeedStream, *indices: int) -> int:
    """
    Derives a reproducible sub-seed for a named stream and a tuple of indices.

    Distinct `(stream, indices)` yield statistically independent seeds for the same master seed.
    """

    sequence = np.random.SeedSequence(entropy=master_seed, spawn_key=(stream.value, *indices))
    return int(sequence.generate_state(1, np.uint32)[0])


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Experiment configuration.

    Only `model` and `sizes` are required. Every random number is derived from `master_seed`.

    :param model: Physical model, `syk` or `heisenberg`.
    :param sizes: Numbers of sites to study; every size is even (at least 4 for SYK).
    :param master_seed: Seed from which the coupling, initialization and eigensolver seeds are derived.
    :param coupling_realizations: Number of independent coupling draws per size (the Heisenberg chain has exactly one).
    :param network_seeds: Number of independent parameter initializations per architecture.
    :param alpha: Hidden unit density of single runs.
    :param mu: Number of layers of single runs.
    :param activation: Nonlinearity applied to the real and imaginary parts of the pre-activations.
    :param skip_block_length: Length of the residual blocks, which must divide the number of layers; no residual connections if omitted.
    :param loss: Training objective, `overlap` (supervised) or `voe` (variational energy).
    :param learning_rate: Initial Adam learning rate.
    :param beta1: Adam first moment decay rate.
    :param beta2: Adam second moment decay rate.
    :param epsilon: Adam denominator offset.
    :param learning_rate_schedule: Learning rate changes, each taking effect at its step.
    :param t_max: Minimum number of training steps before the truncation criterion applies.
    :param control_interval: Spacing of the truncation checkpoints, in steps.
    :param max_steps: Hard limit on the number of training steps.
    :param threshold: Relative energy error at which a run counts as converged.
    :param smoothing_window: Odd length of the moving average applied to the error trajectory.
    :param evaluation_stride: Step spacing of the recorded trajectories.
    :param snapshot_steps: Step budgets at which the best error so far is reported.
    :param truncate: Whether runs predicted not to converge are stopped early.
    :param sweep_axis: Architecture dimension varied by the sweep command, `alpha` or `mu`.
    :param alpha_grid: Strictly increasing hidden unit densities of a width sweep.
    :param mu_grid: Strictly increasing depths of a depth sweep.
    :param sweep_mu: Fixed depth of a width sweep.
    :param sweep_alpha: Fixed hidden unit density of a depth sweep.
    :param svd_thresholds: Relative singular value thresholds evaluated by the compress command.
    :param lanczos_tol: Residual norm at which the exact ground state is accepted.
    :param lanczos_max_iter: Iteration budget of the exact eigensolver.
    :param krylov_dim: Krylov space dimension of a single eigensolver restart cycle.
    :param workers: Number of worker processes for independent training runs.
    :param output_dir: Directory receiving all records and tables.
    """

    model: Model
    sizes: Annotated[List[site_count], MinItems(1)]
    master_seed: seed64 = 0
    coupling_realizations: positive_int = 1
    network_seeds: positive_int = 4
    alpha: positive_int = 1
    mu: positive_int = 2
    activation: Activation = Activation.selu
    skip_block_length: Optional[positive_int] = None
    loss: LossKind = LossKind.overlap
    learning_rate: Annotated[float, FloatRange(minimum=0.0)] = 1e-3
    beta1: Annotated[float, FloatRange(0.0, 1.0, exclusive_maximum=True)] = 0.9
    beta2: Annotated[float, FloatRange(0.0, 1.0, exclusive_maximum=True)] = 0.999
    epsilon: Annotated[float, FloatRange(minimum=0.0)] = 1e-8
    learning_rate_schedule: List[LearningRateChange] = field(default_factory=list)
    t_max: positive_int = 200_000
    control_interval: positive_int = 100_000
    max_steps: positive_int = 1_000_000
    threshold: Annotated[float, FloatRange(minimum=0.0)] = 1e-3
    smoothing_window: positive_int = 2001
    evaluation_stride: positive_int = 1
    snapshot_steps: List[positive_int] = field(default_factory=lambda: [50_000, 100_000, 200_000])
    truncate: bool = True
    sweep_axis: SweepAxis = SweepAxis.alpha
    alpha_grid: Annotated[List[positive_int], MinItems(1)] = field(default_factory=lambda: [1, 2, 4, 8])
    mu_grid: Annotated[List[positive_int], MinItems(1)] = field(default_factory=lambda: [1, 2, 3, 4])
    sweep_mu: positive_int = 2
    sweep_alpha: positive_int = 4
    svd_thresholds: List[Annotated[float, FloatRange(0.0, 1.0, exclusive_maximum=True)]] = field(
        default_factory=lambda: [0.0, 0.01, 0.02, 0.05, 0.1, 0.2]
    )
    lanczos_tol: Annotated[float, FloatRange(minimum=0.0)] = 1e-9
    lanczos_max_iter: positive_int = 2000
    krylov_dim: Annotated[int, IntegerRange(2, 10_000)] = 100
    workers: positive_int = 1
    output_dir: pathlib.Path = pathlib.Path("results")

    def __post_init__(self) -> None:
        for size in self.sizes:
            if size % 2:
                raise ConfigError(f"half filling requires an even number of sites but got {size}", "sizes")
            if self.model is Model.syk and size < 4:
                raise ConfigError(f"SYK model requires at least 4 sites but got {size}", "sizes")
        if self.smoothing_window % 2 == 0:
            raise ConfigError(f"must be odd but got {self.smoothing_window}", "smoothing_window")
        for name in ("alpha_grid", "mu_grid"):
            grid = getattr(self, name)
            if any(a >= b for a, b in zip(grid, grid[1:])):
                raise ConfigError(f"must be strictly increasing but got {grid}", name)
        if self.skip_block_length is not None:
            depths = [self.mu, self.sweep_mu] + (self.mu_grid if self.sweep_axis is SweepAxis.mu else [])
            for depth in depths:
                if depth % self.skip_block_length:
                    raise ConfigError(f"does not divide depth {depth}", "skip_block_length")
        if self.truncate and self.t_max < minimum_history(self.control_interval, self.smoothing_window, self.evaluation_stride):
            raise ConfigError("too short for the control interval and smoothing window", "t_max")

    def coupling_seeds(self, num_sites: int) -> List[int]:
        "Coupling seeds of every realization at a size."

        if self.model is Model.heisenberg:
            return [0]
        return [derive_seed(self.master_seed, SeedStream.coupling, num_sites, r) for r in range(self.coupling_realizations)]

    def network_seed_values(self) -> List[int]:
        "Initialization seeds, shared by every architecture so that sweep points differ only in shape."

        return [derive_seed(self.master_seed, SeedStream.init, k) for k in range(self.network_seeds)]

    def lanczos_settings(self, num_sites: int, coupling_seed: int) -> LanczosSettings:
        return LanczosSettings(
            tol=self.lanczos_tol,
            max_iter=self.lanczos_max_iter,
            krylov_dim=self.krylov_dim,
            seed=derive_seed(self.master_seed, SeedStream.lanczos, num_sites, coupling_seed),
        )

    def training_settings(self) -> TrainingSettings:
        adam = AdamSettings(
            learning_rate=self.learning_rate,
            beta1=self.beta1,
            beta2=self.beta2,
            epsilon=self.epsilon,
            schedule=tuple(self.learning_rate_schedule),
        )
        return TrainingSettings(
            loss=self.loss,
            t_max=self.t_max,
            control_interval=self.control_interval,
            max_steps=self.max_steps,
            threshold=self.threshold,
            smoothing_window=self.smoothing_window,
            evaluation_stride=self.evaluation_stride,
            snapshot_steps=tuple(self.snapshot_steps),
            adam=adam,
            truncate=self.truncate,
        )


def _offending_field(error: jsonschema.exceptions.ValidationError) -> Optional[str]:
    "Name of the top-level configuration field a schema violation refers to."

    if error.absolute_path:
        return str(error.absolute_path[0])
    if error.validator == "required" and isinstance(error.instance, dict):
        missing = [name for name in error.validator_value if name not in error.instance]
        return missing[0] if missing else None
    if error.validator == "additionalProperties" and isinstance(error.instance, dict):
        known = error.schema.get("properties", {})
        extra = [name for name in error.instance if name not in known]
        return extra[0] if extra else None
    return None


def parse_override(assignment: str) -> Tuple[str, JsonType]:
    """
    Parses a command-line override `key=value`.

    The value is read as JSON if possible (numbers, booleans, lists) and taken as a plain string otherwise.
    """

    key, sep, text = assignment.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"override `{assignment}` is not of the form key=value")
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        value = text
    return key, value


def config_from_json(data: JsonType) -> ExperimentConfig:
    """
    Validates a configuration document and creates the configuration object.

    :raises ConfigError: The document violates the schema or the configuration is inconsistent.
    """

    try:
        validate_object(ExperimentConfig, data)
    except jsonschema.exceptions.ValidationError as e:
        raise ConfigError(e.message, _offending_field(e)) from e
    try:
        return json_to_object(ExperimentConfig, data)
    except (JsonKeyError, JsonTypeError, JsonValueError) as e:
        raise ConfigError(str(e)) from e


def config_to_json(config: ExperimentConfig) -> JsonType:
    return object_to_json(config)


def load_config(
    path: Optional[pathlib.Path] = None,
    overrides: Sequence[str] = (),
    environ: Optional[Mapping[str, str]] = None,
) -> ExperimentConfig:
    """
    Loads a configuration from a file, the environment and command-line overrides, in increasing precedence.

    :param path: JSON configuration file, if any.
    :param overrides: Assignments of the form `key=value`.
    :param environ: Environment variables; defaults to the process environment.
    :raises ConfigError: The file cannot be read, or the merged configuration is invalid.
    """

    environ = os.environ if environ is None else environ
    data: dict = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except FileNotFoundError as e:
            raise ConfigError(f"configuration file {path} does not exist") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"configuration file {path} is not valid JSON: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"configuration file {path} must contain a JSON object")

    output_dir = environ.get(OUTPUT_DIR_VARIABLE)
    if output_dir:
        data["output_dir"] = output_dir

    for assignment in overrides:
        key, value = parse_override(assignment)
        data[key] = value

    config = config_from_json(data)
    LOGGER.debug("configuration loaded path=%s overrides=%d", path, len(overrides))
    return config
