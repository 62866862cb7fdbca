"""
Low-rank compression of trained networks.

Every weight matrix is factored as `W = U S Vh`, and singular values below `threshold * sigma_1` of the same matrix are
discarded. The truncated factors are multiplied back into dense matrices so that the compressed network is evaluated
exactly like the original one.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .core import ComplexArray, RealArray
from .exception import ArgumentError, NumericalError
from .models import SparseHamiltonian
from .nqs import NetworkParams
from .optimize import voe_loss

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class CompressionReport:
    """
    Outcome of truncating the singular values of every weight matrix.

    :param threshold: Relative cutoff; singular values with `sigma_i / sigma_1 < threshold` are dropped.
    :param retained_ranks: Number of singular values kept in every layer.
    :param full_ranks: Number of singular values of every layer, `min(fan_out, fan_in)`.
    :param retained_fraction: Share of singular values kept over all layers.
    :param energy_error_before: Relative energy error of the uncompressed network.
    :param energy_error_after: Relative energy error of the compressed network.
    """

    threshold: float
    retained_ranks: List[int]
    full_ranks: List[int]
    retained_fraction: float
    energy_error_before: float
    energy_error_after: float


def truncate_matrix(weight: ComplexArray, threshold: float) -> Tuple[ComplexArray, RealArray, int]:
    """
    Drops the singular values of a matrix below a fraction of its largest one.

    :returns: The truncated matrix, all singular values in descending order, and the number kept.
    :raises NumericalError: The singular value decomposition did not converge.
    """

    try:
        u, s, vh = np.linalg.svd(weight, full_matrices=False)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"singular value decomposition of a {weight.shape} matrix failed: {e}") from e

    if s[0] == 0:
        return weight.copy(), s, 0
    keep = int(np.count_nonzero(s >= threshold * s[0]))
    if keep == len(s):
        # nothing dropped, avoid round-off from refactoring
        return weight.copy(), s, keep
    return (u[:, :keep] * s[:keep]) @ vh[:keep], s, keep


def svd_truncate(
    params: NetworkParams, threshold: float, hamiltonian: SparseHamiltonian, ground_energy: float
) -> Tuple[NetworkParams, CompressionReport]:
    """
    Compresses every weight matrix of a network by the same relative singular value threshold; biases are unchanged.

    :param params: Trained parameters.
    :param threshold: Relative cutoff in `[0, 1)`; 0 keeps every singular value.
    :param hamiltonian: The Hamiltonian the energy error is measured with.
    :param ground_energy: Exact ground-state energy.
    :returns: The compressed parameters and the report.
    :raises ArgumentError: The threshold is outside `[0, 1)`.
    :raises NumericalError: A decomposition failed or the network amplitudes are not finite.
    """

    if not 0.0 <= threshold < 1.0:
        raise ArgumentError(f"relative singular value threshold must be in [0, 1) but got {threshold}")

    weights: List[ComplexArray] = []
    retained: List[int] = []
    full: List[int] = []
    for weight in params.weights:
        truncated, singular_values, keep = truncate_matrix(np.asarray(weight, dtype=np.complex128), threshold)
        weights.append(truncated)
        retained.append(keep)
        full.append(len(singular_values))

    compressed = NetworkParams(params.architecture, weights, [b.copy() for b in params.biases], params.seed)
    before = voe_loss(params, hamiltonian, hamiltonian.basis, ground_energy).relative_energy_error
    after = voe_loss(compressed, hamiltonian, hamiltonian.basis, ground_energy).relative_energy_error
    report = CompressionReport(
        threshold=threshold,
        retained_ranks=retained,
        full_ranks=full,
        retained_fraction=sum(retained) / sum(full),
        energy_error_before=float(before),  # type: ignore
        energy_error_after=float(after),  # type: ignore
    )
    LOGGER.debug(
        "compressed threshold=%g ranks=%s q=%.4f delta_e_before=%.6g delta_e_after=%.6g",
        threshold,
        retained,
        report.retained_fraction,
        report.energy_error_before,
        report.energy_error_after,
    )
    return compressed, report


def compression_curve(
    params: NetworkParams, thresholds: Sequence[float], hamiltonian: SparseHamiltonian, ground_energy: float
) -> List[CompressionReport]:
    "Compresses a network at every threshold, returning the retained fraction and energy error of each."

    return [svd_truncate(params, threshold, hamiltonian, ground_energy)[1] for threshold in thresholds]
