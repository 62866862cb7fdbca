"""
Complex-valued fully-connected feed-forward neural quantum state.

The network maps an occupation vector `x` (entries 0.0 or 1.0) through `mu` layers `y <- phi(W y + b)` of width
`alpha L` and returns `log <x|psi> = log sum_i exp(F_i(x))` over the outputs `F` of the last layer. The activation `phi`
acts separately on the real and the imaginary part of its argument.
"""

import enum
import math
from dataclasses import dataclass, field
from functools import partial
from typing import List, Optional, Sequence, Tuple, Union

import jax
import jax.numpy as jnp
import numpy as np
from jax import config as jax_config

from .basis import SectorBasis, occupations
from .core import ComplexArray, RealArray, WordArray
from .exception import ArgumentError

# parameters, amplitudes and gradients are all double precision
jax_config.update("jax_enable_x64", True)

SELU_LAMBDA = 1.0507009873554805
SELU_ALPHA = 1.6732632423543772


class Activation(enum.Enum):
    "Scalar nonlinearity applied to the real and imaginary parts of a pre-activation."

    selu = "selu"
    tanh = "tanh"


@dataclass(frozen=True)
class SkipBlocks:
    """
    Residual connections: after every block of `block_length` layers, the affine output of the first layer is added to
    the output of the block.

    :param num_blocks: Number of blocks.
    :param block_length: Number of layers in a block.
    """

    num_blocks: int
    block_length: int


@dataclass(frozen=True)
class Architecture:
    """
    Shape of the network.

    :param num_sites: Number of sites `L`, the input dimension.
    :param alpha: Hidden unit density; every layer has `alpha L` neurons.
    :param mu: Number of layers.
    :param activation: Nonlinearity of every layer.
    :param skip_blocks: Residual connection layout, if any; requires `num_blocks * block_length == mu`.
    """

    num_sites: int
    alpha: int
    mu: int
    activation: Activation = Activation.selu
    skip_blocks: Optional[SkipBlocks] = None

    def __post_init__(self) -> None:
        for name in ("num_sites", "alpha", "mu"):
            if getattr(self, name) < 1:
                raise ArgumentError(f"architecture field `{name}` must be positive but got {getattr(self, name)}")
        if self.skip_blocks is not None:
            blocks = self.skip_blocks
            if blocks.num_blocks < 1 or blocks.block_length < 1 or blocks.num_blocks * blocks.block_length != self.mu:
                raise ArgumentError(
                    f"skip blocks {blocks.num_blocks} x {blocks.block_length} do not tile {self.mu} layers"
                )

    @property
    def width(self) -> int:
        return self.alpha * self.num_sites

    def layer_shapes(self) -> List[Tuple[int, int]]:
        "Shape `(fan_out, fan_in)` of the weight matrix of every layer."

        return [(self.width, self.num_sites)] + [(self.width, self.width)] * (self.mu - 1)


def num_params(architecture: Architecture) -> int:
    "Number of complex parameters, `(alpha L L + alpha L) + (mu - 1)(alpha L alpha L + alpha L)`."

    return sum(rows * cols + rows for rows, cols in architecture.layer_shapes())


@dataclass(eq=False)
class NetworkParams:
    """
    Complex weights and biases of a network.

    The flat parameter vector `theta` concatenates, layer by layer, the row-major weight matrix and the bias vector. The
    real decomposition used by the optimizer is `[Re theta, Im theta]`.

    :param architecture: The shape the parameters belong to.
    :param weights: Weight matrix of every layer.
    :param biases: Bias vector of every layer.
    :param seed: Seed the parameters were initialized from, if any.
    """

    architecture: Architecture
    weights: List[ComplexArray] = field(repr=False)
    biases: List[ComplexArray] = field(repr=False)
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        shapes = self.architecture.layer_shapes()
        if len(self.weights) != len(shapes) or len(self.biases) != len(shapes):
            raise ArgumentError(f"expected {len(shapes)} layers but got {len(self.weights)} weights and {len(self.biases)} biases")
        for layer, ((rows, cols), weight, bias) in enumerate(zip(shapes, self.weights, self.biases), start=1):
            if np.shape(weight) != (rows, cols) or np.shape(bias) != (rows,):
                raise ArgumentError(
                    f"layer {layer} expects weights {(rows, cols)} and bias {(rows,)} "
                    f"but got {np.shape(weight)} and {np.shape(bias)}"
                )

    @property
    def num_params(self) -> int:
        return num_params(self.architecture)

    def to_flat(self) -> ComplexArray:
        return np.concatenate([np.concatenate([w.ravel(), b]) for w, b in zip(self.weights, self.biases)]).astype(
            np.complex128
        )

    @classmethod
    def from_flat(cls, architecture: Architecture, theta: ComplexArray, seed: Optional[int] = None) -> "NetworkParams":
        theta = np.asarray(theta, dtype=np.complex128)
        expected = num_params(architecture)
        if theta.shape != (expected,):
            raise ArgumentError(f"architecture has {expected} parameters but vector has shape {theta.shape}")

        weights: List[ComplexArray] = []
        biases: List[ComplexArray] = []
        offset = 0
        for rows, cols in architecture.layer_shapes():
            weights.append(theta[offset : offset + rows * cols].reshape(rows, cols).copy())
            offset += rows * cols
            biases.append(theta[offset : offset + rows].copy())
            offset += rows
        return cls(architecture, weights, biases, seed)

    def to_real_vector(self) -> RealArray:
        theta = self.to_flat()
        return np.concatenate([theta.real, theta.imag])

    @classmethod
    def from_real_vector(cls, architecture: Architecture, vector: RealArray, seed: Optional[int] = None) -> "NetworkParams":
        vector = np.asarray(vector, dtype=np.float64)
        half = num_params(architecture)
        if vector.shape != (2 * half,):
            raise ArgumentError(f"architecture has {2 * half} real parameters but vector has shape {vector.shape}")
        return cls.from_flat(architecture, vector[:half] + 1j * vector[half:], seed)


def init_params(architecture: Architecture, seed: int) -> NetworkParams:
    """
    Draws initial parameters.

    Real and imaginary parts of every weight are independent Gaussians of variance `1 / (2 fan_in)`, so a weight has
    `E|w|^2 = 1 / fan_in`; biases start at zero.
    """

    rng = np.random.default_rng(seed)
    weights: List[ComplexArray] = []
    biases: List[ComplexArray] = []
    for rows, cols in architecture.layer_shapes():
        scale = math.sqrt(1.0 / (2.0 * cols))
        weights.append(rng.normal(0.0, scale, (rows, cols)) + 1j * rng.normal(0.0, scale, (rows, cols)))
        biases.append(np.zeros(rows, dtype=np.complex128))
    return NetworkParams(architecture, weights, biases, seed)


def selu(x):
    """
    Scaled exponential linear unit `lambda x` for `x >= 0` and `lambda a (exp(x) - 1)` otherwise.

    The derivative at 0 is the right limit `lambda`.
    """

    x = jnp.asarray(x)
    # clamping keeps the unused branch finite, otherwise its gradient turns into NaN
    return SELU_LAMBDA * jnp.where(x >= 0, x, SELU_ALPHA * jnp.expm1(jnp.minimum(x, 0.0)))


def complex_activation(z, kind: Activation = Activation.selu):
    "Applies the activation separately to the real and the imaginary part, `phi(Re z) + i phi(Im z)`."

    z = jnp.asarray(z, dtype=jnp.complex128)
    if kind is Activation.selu:
        function = selu
    elif kind is Activation.tanh:
        function = jnp.tanh
    else:
        raise ArgumentError(f"unrecognized activation: {kind}")
    return jax.lax.complex(function(z.real), function(z.imag))


def complex_logsumexp(values, axis: int = -1):
    "Numerically stable `log sum exp` of complex values; the maximum real part is factored out."

    shift = jax.lax.stop_gradient(jnp.max(values.real, axis=axis, keepdims=True))
    return jnp.squeeze(shift, axis=axis) + jnp.log(jnp.sum(jnp.exp(values - shift), axis=axis))


def unflatten(architecture: Architecture, theta) -> Tuple[List, List]:
    "Splits a flat complex parameter vector into per-layer weights and biases (works on traced arrays)."

    weights = []
    biases = []
    offset = 0
    for rows, cols in architecture.layer_shapes():
        weights.append(theta[offset : offset + rows * cols].reshape(rows, cols))
        offset += rows * cols
        biases.append(theta[offset : offset + rows])
        offset += rows
    return weights, biases


def forward(architecture: Architecture, weights: Sequence, biases: Sequence, inputs):
    """
    Log-amplitudes of a batch of occupation vectors.

    :param inputs: Array of shape `(batch, L)` with entries 0.0 and 1.0.
    :returns: Complex array of shape `(batch,)`.
    """

    activations = inputs.astype(jnp.complex128)
    first_affine = None
    skip = architecture.skip_blocks
    for layer, (weight, bias) in enumerate(zip(weights, biases), start=1):
        affine = activations @ weight.T + bias
        if first_affine is None:
            first_affine = affine
        activations = complex_activation(affine, architecture.activation)
        if skip is not None and layer % skip.block_length == 0:
            activations = activations + first_affine
    return complex_logsumexp(activations, axis=-1)


def split_real_vector(architecture: Architecture, vector):
    "Complex parameter vector `theta` from its real decomposition `[Re theta, Im theta]`."

    half = num_params(architecture)
    return jax.lax.complex(vector[:half], vector[half:])


@partial(jax.jit, static_argnames=("architecture",))
def log_amplitudes_from_vector(vector, architecture: Architecture, inputs):
    "Log-amplitudes of a batch of occupation vectors for parameters given as a real decomposed vector."

    weights, biases = unflatten(architecture, split_real_vector(architecture, vector))
    return forward(architecture, weights, biases, inputs)


def _inputs(params: NetworkParams, words: Union[SectorBasis, WordArray, Sequence[int]]) -> np.ndarray:
    num_sites = params.architecture.num_sites
    if isinstance(words, SectorBasis):
        if words.num_sites != num_sites:
            raise ArgumentError(f"network expects {num_sites} sites but basis has {words.num_sites}")
        return words.occupations()

    words = np.asarray(words, dtype=np.int64).reshape(-1)
    if np.any(words < 0) or np.any(words >> num_sites):
        raise ArgumentError(f"occupation words must have at most {num_sites} bits")
    return occupations(words, num_sites)


def log_amplitudes(params: NetworkParams, words: Union[SectorBasis, WordArray, Sequence[int]]) -> ComplexArray:
    """
    Evaluates `log <x|psi>` for every word of a basis or an array of occupation words.

    :raises ArgumentError: A word has more bits than the network has inputs.
    """

    inputs = _inputs(params, words)
    values = log_amplitudes_from_vector(jnp.asarray(params.to_real_vector()), params.architecture, jnp.asarray(inputs))
    return np.asarray(values)


def log_amplitude(params: NetworkParams, word: int) -> complex:
    "Evaluates `log <x|psi>` for a single occupation word."

    return complex(log_amplitudes(params, [word])[0])
