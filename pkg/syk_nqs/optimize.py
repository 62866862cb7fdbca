"""
Loss functions, their gradients with respect to the real decomposition of the network parameters, and the Adam update.

Both losses are evaluated by full summation over the sector basis:

* the overlap loss `1 - |<psi|psi_GS>| / ||psi||` against a unit-norm exact ground state;
* the variational energy `<psi|H|psi> / <psi|psi>`.

The relative energy error `(E - E_GS) / |E_GS|` is reported alongside either loss.
"""

import enum
import math
from dataclasses import dataclass, field
from functools import partial
from typing import List, Optional, Tuple

import jax
import jax.numpy as jnp
import numpy as np

from .basis import SectorBasis
from .core import ComplexArray, RealArray
from .ed import GroundStateSolution
from .exception import ArgumentError, NumericalError
from .models import SparseHamiltonian
from .nqs import Architecture, NetworkParams, log_amplitudes, log_amplitudes_from_vector

# largest admissible imaginary part of an energy expectation value
IMAGINARY_TOLERANCE = 1e-10


class LossKind(enum.Enum):
    "Training objective."

    overlap = "overlap"
    voe = "voe"


@dataclass(frozen=True)
class LossValue:
    """
    Value of a loss with monitoring quantities computed alongside.

    :param kind: Which loss was evaluated.
    :param value: The loss value.
    :param energy: Variational energy, if a Hamiltonian was available.
    :param relative_energy_error: Relative energy error `(E - E_GS) / |E_GS|`, if both energies were available.
    :param overlap_loss: Overlap loss, if the exact ground state was available.
    """

    kind: LossKind
    value: float
    energy: Optional[float] = None
    relative_energy_error: Optional[float] = None
    overlap_loss: Optional[float] = None


def relative_energy_error(energy: float, ground_energy: float) -> float:
    """
    Relative energy error `(E - E_GS) / |E_GS|`, nonnegative for variational energies.

    :raises ArgumentError: The ground-state energy is zero.
    """

    if ground_energy == 0:
        raise ArgumentError("relative energy error is undefined for a zero ground-state energy")
    return (energy - ground_energy) / abs(ground_energy)


def network_amplitudes(params: NetworkParams, basis: SectorBasis) -> ComplexArray:
    """
    Un-normalized amplitudes `psi(x)` over the basis, exponentiated after subtracting the largest real log-amplitude.

    :raises NumericalError: An amplitude is not finite.
    """

    logs = log_amplitudes(params, basis)
    if not np.all(np.isfinite(logs)):
        raise NumericalError("network produced non-finite log-amplitudes", {"non_finite": float(np.sum(~np.isfinite(logs)))})
    shift = np.max(logs.real)
    amplitudes = np.exp(logs - shift)
    if not np.all(np.isfinite(amplitudes)):
        raise NumericalError("amplitudes overflow despite shift", {"max_log_real": float(shift)})
    return amplitudes


def infidelity(psi: ComplexArray, target: ComplexArray) -> float:
    "Infidelity `1 - |<psi|target>| / ||psi||` of an un-normalized vector against a unit-norm target."

    return float(1.0 - abs(np.vdot(psi, target)) / np.linalg.norm(psi))


def _energy_value(psi: ComplexArray, hamiltonian: SparseHamiltonian) -> float:
    quotient = np.vdot(psi, hamiltonian @ psi) / np.vdot(psi, psi)
    if abs(quotient.imag) > IMAGINARY_TOLERANCE:
        raise NumericalError("energy expectation value is not real", {"real": quotient.real, "imag": quotient.imag})
    return float(quotient.real)


def overlap_loss(
    params: NetworkParams,
    ground_state: GroundStateSolution,
    basis: SectorBasis,
    hamiltonian: Optional[SparseHamiltonian] = None,
) -> LossValue:
    """
    Overlap loss `1 - |<psi|psi_GS>| / ||psi||`, invariant under `psi -> c psi` for any nonzero complex `c`.

    :param hamiltonian: If given, the energy and the relative energy error are computed alongside.
    :raises NumericalError: The network amplitudes are not finite.
    """

    psi = network_amplitudes(params, basis)
    value = infidelity(psi, ground_state.vector)
    energy = relative = None
    if hamiltonian is not None:
        energy = _energy_value(psi, hamiltonian)
        relative = relative_energy_error(energy, ground_state.energy)
    return LossValue(LossKind.overlap, value, energy, relative, value)


def voe_loss(
    params: NetworkParams,
    hamiltonian: SparseHamiltonian,
    basis: SectorBasis,
    ground_energy: Optional[float] = None,
) -> LossValue:
    """
    Variational energy `<psi|H|psi> / <psi|psi>` with a single sparse matrix-vector product.

    :param ground_energy: If given, the relative energy error is computed alongside.
    :raises NumericalError: The imaginary part of the quotient exceeds 1e-10, or the amplitudes are not finite.
    """

    psi = network_amplitudes(params, basis)
    energy = _energy_value(psi, hamiltonian)
    relative = relative_energy_error(energy, ground_energy) if ground_energy is not None else None
    return LossValue(LossKind.voe, energy, energy, relative)


def _objective(vector, architecture: Architecture, kind: LossKind, inputs, target, rows, cols, data):
    logs = log_amplitudes_from_vector(vector, architecture, inputs)
    shift = jax.lax.stop_gradient(jnp.max(logs.real))
    psi = jnp.exp(logs - shift)

    norm_squared = jnp.sum(psi.real**2 + psi.imag**2)
    overlap = 1.0 - jnp.abs(jnp.vdot(psi, target)) / jnp.sqrt(norm_squared)

    h_psi = jax.ops.segment_sum(data * psi[cols], rows, num_segments=psi.shape[0])
    energy = jnp.vdot(psi, h_psi).real / norm_squared

    loss = overlap if kind is LossKind.overlap else energy
    return loss, (energy, overlap)


@partial(jax.jit, static_argnames=("architecture", "kind"))
def _value_and_grad(vector, architecture: Architecture, kind: LossKind, inputs, target, rows, cols, data):
    return jax.value_and_grad(_objective, has_aux=True)(vector, architecture, kind, inputs, target, rows, cols, data)


@dataclass(frozen=True, eq=False)
class LossContext:
    """
    Everything a loss needs besides the parameters: the basis, the Hamiltonian in coordinate form and the exact target.

    :param hamiltonian: The Hamiltonian the energy is measured with.
    :param ground_state: The exact ground state.
    """

    hamiltonian: SparseHamiltonian
    ground_state: GroundStateSolution
    inputs: jax.Array = field(repr=False)
    target: jax.Array = field(repr=False)
    rows: jax.Array = field(repr=False)
    cols: jax.Array = field(repr=False)
    data: jax.Array = field(repr=False)

    @classmethod
    def create(cls, hamiltonian: SparseHamiltonian, ground_state: GroundStateSolution) -> "LossContext":
        if len(ground_state.vector) != hamiltonian.dimension:
            raise ArgumentError(
                f"ground state of dimension {len(ground_state.vector)} does not match Hamiltonian of dimension "
                f"{hamiltonian.dimension}"
            )
        coo = hamiltonian.matrix.tocoo()
        return cls(
            hamiltonian,
            ground_state,
            jnp.asarray(hamiltonian.basis.occupations()),
            jnp.asarray(ground_state.vector, dtype=jnp.complex128),
            jnp.asarray(coo.row, dtype=jnp.int32),
            jnp.asarray(coo.col, dtype=jnp.int32),
            jnp.asarray(coo.data, dtype=jnp.complex128),
        )

    @property
    def basis(self) -> SectorBasis:
        return self.hamiltonian.basis

    def value_and_gradient(self, architecture: Architecture, kind: LossKind, vector: RealArray) -> Tuple[LossValue, RealArray]:
        """
        Loss and its gradient with respect to the real decomposed parameter vector `[Re theta, Im theta]`.

        :raises NumericalError: The loss or its gradient is not finite.
        """

        (loss, (energy, overlap)), grad = _value_and_grad(
            jnp.asarray(vector), architecture, kind, self.inputs, self.target, self.rows, self.cols, self.data
        )
        loss, energy, overlap = float(loss), float(energy), float(overlap)
        grad = np.asarray(grad)
        if not (math.isfinite(loss) and np.all(np.isfinite(grad))):
            raise NumericalError("loss or gradient is not finite", {"loss": loss, "energy": energy})

        value = LossValue(
            kind,
            loss,
            energy,
            relative_energy_error(energy, self.ground_state.energy),
            overlap,
        )
        return value, grad


def gradient(params: NetworkParams, kind: LossKind, context: LossContext) -> RealArray:
    "Gradient of a loss with respect to every real and imaginary parameter component, ordered as `[Re theta, Im theta]`."

    _, grad = context.value_and_gradient(params.architecture, kind, params.to_real_vector())
    return grad


@dataclass(frozen=True)
class LearningRateChange:
    """
    An entry of a piecewise-constant learning rate schedule.

    :param step: Optimizer step from which the new learning rate applies.
    :param learning_rate: The learning rate in effect from `step` onwards.
    """

    step: int
    learning_rate: float


@dataclass(frozen=True)
class AdamSettings:
    """
    Hyperparameters of the Adam optimizer.

    :param learning_rate: Initial learning rate.
    :param beta1: Decay rate of the first moment estimate.
    :param beta2: Decay rate of the second moment estimate.
    :param epsilon: Term added to the denominator for numerical stability.
    :param schedule: Learning rate changes, applied in order of their step.
    """

    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    schedule: Tuple[LearningRateChange, ...] = ()

    def learning_rate_at(self, step: int) -> float:
        "Learning rate in effect at a (zero-based) optimizer step."

        learning_rate = self.learning_rate
        for change in sorted(self.schedule, key=lambda c: c.step):
            if step >= change.step:
                learning_rate = change.learning_rate
        return learning_rate


@dataclass(frozen=True, eq=False)
class OptimizerState:
    """
    Moment accumulators of Adam.

    :param first_moment: Exponential moving average of gradients.
    :param second_moment: Exponential moving average of squared gradients.
    :param step: Number of updates applied so far.
    :param settings: Hyperparameters and learning rate schedule.
    """

    first_moment: RealArray
    second_moment: RealArray
    step: int
    settings: AdamSettings

    @classmethod
    def create(cls, size: int, settings: Optional[AdamSettings] = None) -> "OptimizerState":
        return cls(np.zeros(size), np.zeros(size), 0, settings or AdamSettings())


def adam_step(state: OptimizerState, vector: RealArray, grad: RealArray) -> Tuple[RealArray, OptimizerState]:
    """
    Applies one bias-corrected Adam update.

    :param state: Current optimizer state.
    :param vector: Real decomposed parameter vector.
    :param grad: Gradient of the loss with respect to `vector`.
    :returns: The updated vector and optimizer state.
    :raises ArgumentError: The shapes of the state, the vector and the gradient disagree.
    """

    vector = np.asarray(vector, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if not (vector.shape == grad.shape == state.first_moment.shape):
        raise ArgumentError(
            f"shape mismatch: parameters {vector.shape}, gradient {grad.shape}, state {state.first_moment.shape}"
        )

    settings = state.settings
    step = state.step + 1
    first_moment = settings.beta1 * state.first_moment + (1.0 - settings.beta1) * grad
    second_moment = settings.beta2 * state.second_moment + (1.0 - settings.beta2) * grad**2
    first_unbiased = first_moment / (1.0 - settings.beta1**step)
    second_unbiased = second_moment / (1.0 - settings.beta2**step)

    learning_rate = settings.learning_rate_at(state.step)
    updated = vector - learning_rate * first_unbiased / (np.sqrt(second_unbiased) + settings.epsilon)
    return updated, OptimizerState(first_moment, second_moment, step, settings)
