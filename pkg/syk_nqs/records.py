"""
Persistence of ground states, couplings, parameter checkpoints, trajectories and result tables.

Every file is first written to a temporary file in the target directory and then renamed over the destination, so a
reader never observes a partially written record.
"""

import contextlib
import csv
import enum
import json
import logging
import os
import pathlib
import tempfile
from typing import IO, Any, Dict, Iterable, Iterator, List, Sequence, Tuple

import numpy as np

from . import __version__
from .core import JsonType
from .ed import GroundStateSolution
from .exception import ArgumentError, MissingRecordError
from .harness import TrainingRecord
from .models import CouplingTensor, Model
from .nqs import Architecture, NetworkParams
from .serialization import json_dump, json_dump_string, json_to_object, object_to_json

LOGGER = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1


@contextlib.contextmanager
def atomic_open(path: pathlib.Path, mode: str = "w") -> Iterator[IO[Any]]:
    "Opens a temporary file next to `path` that replaces `path` when the block exits without an exception."

    path.parent.mkdir(parents=True, exist_ok=True)
    binary = "b" in mode
    fd, temp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, mode, **({} if binary else {"encoding": "utf-8", "newline": ""})) as f:
            yield f
        os.replace(temp_name, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(temp_name)
        raise


def _header(data: JsonType) -> np.ndarray:
    return np.array(json_dump_string(data))


def _read_header(value: np.ndarray) -> Dict[str, Any]:
    return json.loads(str(value))


def ground_state_path(output_dir: pathlib.Path, model: Model, num_sites: int, coupling_seed: int) -> pathlib.Path:
    return output_dir / "ground_states" / f"{model.value}-L{num_sites}-c{coupling_seed}.npz"


def save_ground_state(
    output_dir: pathlib.Path, model: Model, num_sites: int, coupling_seed: int, solution: GroundStateSolution
) -> pathlib.Path:
    path = ground_state_path(output_dir, model, num_sites, coupling_seed)
    header = {
        "model": model.value,
        "num_sites": num_sites,
        "coupling_seed": coupling_seed,
        "energy": solution.energy,
        "residual": solution.residual,
        "dimension": len(solution.vector),
        "version": __version__,
    }
    with atomic_open(path, "wb") as f:
        np.savez(f, vector=solution.vector, header=_header(header))
    LOGGER.debug("ground state saved path=%s", path)
    return path


def load_ground_state(output_dir: pathlib.Path, model: Model, num_sites: int, coupling_seed: int) -> GroundStateSolution:
    """
    Loads a ground state written by the `ed` command.

    :raises MissingRecordError: The record does not exist.
    """

    path = ground_state_path(output_dir, model, num_sites, coupling_seed)
    if not path.exists():
        raise MissingRecordError(str(path), "ed")
    with np.load(path, allow_pickle=False) as data:
        header = _read_header(data["header"])
        vector = np.array(data["vector"], dtype=np.complex128)
    return GroundStateSolution(float(header["energy"]), vector, float(header["residual"]))


def couplings_path(output_dir: pathlib.Path, num_sites: int, coupling_seed: int) -> pathlib.Path:
    return output_dir / "couplings" / f"syk-L{num_sites}-c{coupling_seed}.json"


def save_couplings(output_dir: pathlib.Path, couplings: CouplingTensor) -> pathlib.Path:
    path = couplings_path(output_dir, couplings.num_sites, couplings.seed)
    with atomic_open(path) as f:
        json_dump(object_to_json(couplings), f)
    return path


def load_couplings(output_dir: pathlib.Path, num_sites: int, coupling_seed: int) -> CouplingTensor:
    path = couplings_path(output_dir, num_sites, coupling_seed)
    if not path.exists():
        raise MissingRecordError(str(path), "ed")
    with open(path, "r", encoding="utf-8") as f:
        return CouplingTensor.from_json(json.load(f))


def checkpoint_path(output_dir: pathlib.Path, run_id: str) -> pathlib.Path:
    return output_dir / "checkpoints" / f"{run_id}.npz"


def save_checkpoint(output_dir: pathlib.Path, run_id: str, params: NetworkParams, lineage: JsonType) -> pathlib.Path:
    """
    Writes network parameters as a versioned checkpoint.

    :param lineage: Seeds and settings the parameters descend from.
    """

    path = checkpoint_path(output_dir, run_id)
    with atomic_open(path, "wb") as f:
        np.savez(
            f,
            version=np.array(CHECKPOINT_VERSION),
            architecture=_header(object_to_json(params.architecture)),
            theta=params.to_flat(),
            lineage=_header(lineage),
        )
    return path


def load_checkpoint(output_dir: pathlib.Path, run_id: str) -> Tuple[NetworkParams, Dict[str, Any]]:
    """
    Reads the parameters written by the `train` or `sweep` command.

    :returns: The parameters and their lineage.
    :raises MissingRecordError: The checkpoint does not exist.
    :raises ArgumentError: The checkpoint was written by an incompatible format version.
    """

    path = checkpoint_path(output_dir, run_id)
    if not path.exists():
        raise MissingRecordError(str(path), "train")
    with np.load(path, allow_pickle=False) as data:
        version = int(data["version"])
        if version != CHECKPOINT_VERSION:
            raise ArgumentError(f"checkpoint {path} has format version {version}, expected {CHECKPOINT_VERSION}")
        architecture = json_to_object(Architecture, _read_header(data["architecture"]))
        lineage = _read_header(data["lineage"])
        theta = np.array(data["theta"], dtype=np.complex128)
    seed = lineage.get("network_seed")
    return NetworkParams.from_flat(architecture, theta, seed), lineage


def trajectory_path(output_dir: pathlib.Path, run_id: str) -> pathlib.Path:
    return output_dir / "trajectories" / f"{run_id}.npz"


def save_trajectory(output_dir: pathlib.Path, record: TrainingRecord) -> pathlib.Path:
    path = trajectory_path(output_dir, record.run_id)
    with atomic_open(path, "wb") as f:
        np.savez(f, steps=record.steps, delta_e=record.delta_e, delta_o=record.delta_o)
    return path


def write_jsonl(path: pathlib.Path, results: Iterable[JsonType], config: JsonType) -> None:
    "Writes one compact JSON line per result, each carrying the resolved configuration and the code version."

    with atomic_open(path) as f:
        for result in results:
            json_dump({"version": __version__, "config": config, "result": result}, f)


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, enum.Enum):
        return str(value.value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return " ".join(_cell(v) for v in value)
    return str(value)


def write_csv(path: pathlib.Path, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    "Writes a table with a header line; floats keep their shortest round-trip representation."

    with atomic_open(path) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            if len(row) != len(columns):
                raise ArgumentError(f"row has {len(row)} cells but the table has {len(columns)} columns")
            writer.writerow([_cell(value) for value in row])


def read_csv(path: pathlib.Path) -> List[Dict[str, str]]:
    with open(path, "r", encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))
