"""
Independent reference implementations used as oracles, and synthetic inputs.

Everything here is deliberately written in the most direct way possible (operator strings, dense matrices, Kronecker
products and straight-line loops), without sharing code paths with the package under test.
"""

import functools
import itertools
import math
from typing import List, Optional, Tuple

import numpy as np

from syk_nqs.basis import SectorBasis
from syk_nqs.models import CouplingTensor
from syk_nqs.nqs import SELU_ALPHA, SELU_LAMBDA, Activation, NetworkParams


def symbolic_two_body(word: int, i: int, j: int, k: int, l: int, num_sites: int) -> Tuple[Optional[int], int]:
    """
    Applies `c+_i c+_j c_k c_l` to the state `c+_{p_1} c+_{p_2} ... c+_{p_n} |0>` with `p_1 < p_2 < ... < p_n`.

    The state is kept as an explicit string of creation operators; operators are moved into place by adjacent
    transpositions, each of which contributes a factor of -1.
    """

    string: List[int] = [p for p in range(num_sites) if word >> p & 1]
    sign = 1
    for site, creation in ((l, False), (k, False), (j, True), (i, True)):
        if creation:
            if site in string:
                return None, 0
            string = [site] + string
            # bubble sort the new operator into position
            position = 0
            while position + 1 < len(string) and string[position] > string[position + 1]:
                string[position], string[position + 1] = string[position + 1], string[position]
                sign = -sign
                position += 1
        else:
            if site not in string:
                return None, 0
            # anticommute c_site past every creation operator to its left, then use c c+ |rest> = |rest>
            for _ in range(string.index(site)):
                sign = -sign
            string.remove(site)
    return sum(1 << p for p in string), sign


def dense_syk_hamiltonian(couplings: CouplingTensor, basis: SectorBasis) -> np.ndarray:
    "SYK Hamiltonian from the unrestricted quadruple sum over all `L^4` index combinations."

    L = couplings.num_sites
    matrix = np.zeros((len(basis), len(basis)), dtype=np.complex128)
    prefactor = (2.0 * L) ** -1.5
    index = {int(word): position for position, word in enumerate(basis.states)}
    for column, word in enumerate(basis.states):
        for i, j, k, l in itertools.product(range(L), repeat=4):
            coupling = couplings.entry(i, j, k, l)
            if coupling == 0:
                continue
            result, sign = symbolic_two_body(int(word), i, j, k, l, L)
            if result is None:
                continue
            matrix[index[result], column] += prefactor * coupling * sign
    return matrix


PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[-1, 0], [0, 1]], dtype=np.complex128)


def _site_operator(operator: np.ndarray, site: int, num_sites: int) -> np.ndarray:
    "Operator acting on one site of a chain, in the basis where bit `p` of the row index is site `p`."

    factors = [operator if p == site else np.eye(2) for p in reversed(range(num_sites))]
    return functools.reduce(np.kron, factors)


def dense_heisenberg_hamiltonian(num_sites: int, basis: SectorBasis) -> np.ndarray:
    "Periodic Heisenberg chain on the full spin space by Kronecker products, restricted to the basis words."

    dimension = 1 << num_sites
    matrix = np.zeros((dimension, dimension), dtype=np.complex128)
    for a in range(num_sites):
        b = (a + 1) % num_sites
        for pauli in (PAULI_X, PAULI_Y, PAULI_Z):
            matrix += _site_operator(pauli, a, num_sites) @ _site_operator(pauli, b, num_sites)
    return matrix[np.ix_(basis.states, basis.states)]


def _selu(x: np.ndarray) -> np.ndarray:
    return np.array([SELU_LAMBDA * v if v >= 0 else SELU_LAMBDA * SELU_ALPHA * (math.exp(v) - 1.0) for v in x.ravel()]).reshape(
        x.shape
    )


def reference_amplitudes(params: NetworkParams, inputs: np.ndarray) -> np.ndarray:
    "Network amplitudes `sum_i exp(F_i(x))`, evaluated one input row at a time."

    architecture = params.architecture
    function = _selu if architecture.activation is Activation.selu else np.tanh
    amplitudes = []
    for x in inputs:
        y = np.asarray(x, dtype=np.complex128)
        first = None
        for layer in range(architecture.mu):
            z = params.weights[layer] @ y + params.biases[layer]
            if first is None:
                first = z
            y = function(z.real) + 1j * function(z.imag)
            skip = architecture.skip_blocks
            if skip is not None and (layer + 1) % skip.block_length == 0:
                y = y + first
        amplitudes.append(np.sum(np.exp(y)))
    return np.array(amplitudes)


def exponential_curve(amplitude: float, tau: float, offset: float, length: int) -> np.ndarray:
    "Synthetic error trajectory `amplitude exp(-t / tau) + offset` for `t = 0, ..., length - 1`."

    t = np.arange(length, dtype=np.float64)
    return amplitude * np.exp(-t / tau) + offset


def random_params(params: NetworkParams, seed: int, bias_scale: float = 0.3) -> NetworkParams:
    "Copy of parameters with random complex biases, so that gradient checks exercise every parameter."

    rng = np.random.default_rng(seed)
    biases = [bias_scale * (rng.standard_normal(b.shape) + 1j * rng.standard_normal(b.shape)) for b in params.biases]
    return NetworkParams(params.architecture, [w.copy() for w in params.weights], biases, params.seed)
