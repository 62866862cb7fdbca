"""
Exact ground states and entanglement diagnostics.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List

import numpy as np
import scipy.linalg

from .basis import SectorBasis
from .core import ComplexArray
from .exception import ArgumentError, SolverError
from .models import SparseHamiltonian

LOGGER = logging.getLogger(__name__)

# norm below which a Lanczos vector signals an invariant subspace
BREAKDOWN_TOLERANCE = 1e-14

# singular values below this cutoff do not contribute to the entropy
SINGULAR_VALUE_CUTOFF = 1e-14


@dataclass(frozen=True, eq=False)
class GroundStateSolution:
    """
    Lowest eigenpair of a Hamiltonian.

    :param energy: Ground-state energy.
    :param vector: Unit-norm ground-state amplitudes over the sector basis; the largest-magnitude amplitude is real and
        positive.
    :param residual: Norm of `H psi - E psi`.
    """

    energy: float
    vector: ComplexArray = field(repr=False)
    residual: float


def _fix_phase(vector: ComplexArray) -> ComplexArray:
    pivot = vector[np.argmax(np.abs(vector))]
    return vector * (abs(pivot) / pivot)


def _lanczos_cycle(hamiltonian: SparseHamiltonian, start: ComplexArray, steps: int) -> ComplexArray:
    "Runs at most `steps` Lanczos iterations with full re-orthogonalization and returns the lowest Ritz vector."

    dimension = hamiltonian.dimension
    basis = np.zeros((steps, dimension), dtype=np.complex128)
    alphas: List[float] = []
    betas: List[float] = []

    basis[0] = start
    for j in range(steps):
        w = hamiltonian @ basis[j]
        alphas.append(float(np.vdot(basis[j], w).real))

        # two passes of classical Gram-Schmidt keep the Krylov basis orthogonal to machine precision
        previous = basis[: j + 1]
        w = w - previous.T @ (previous.conj() @ w)
        w = w - previous.T @ (previous.conj() @ w)

        beta = float(np.linalg.norm(w))
        if j + 1 == steps or beta < BREAKDOWN_TOLERANCE:
            break
        betas.append(beta)
        basis[j + 1] = w / beta

    size = len(alphas)
    if size == 1:
        return basis[0]
    _, ritz = scipy.linalg.eigh_tridiagonal(np.array(alphas), np.array(betas[: size - 1]), select="i", select_range=(0, 0))
    vector = basis[:size].T @ ritz[:, 0]
    return vector / np.linalg.norm(vector)


def ground_state(
    hamiltonian: SparseHamiltonian,
    tol: float = 1e-9,
    max_iter: int = 2000,
    *,
    krylov_dim: int = 100,
    seed: int = 0,
) -> GroundStateSolution:
    """
    Finds the lowest eigenpair with restarted Lanczos iterations.

    Each cycle builds a Krylov space of at most `krylov_dim` vectors from the current start vector; the next cycle
    restarts from the lowest Ritz vector. The first start vector is a seeded complex Gaussian vector.

    :param hamiltonian: A Hermitian operator.
    :param tol: Residual norm `||H psi - E psi||` below which the eigenpair is accepted.
    :param max_iter: Total budget of matrix-vector products across all cycles.
    :param krylov_dim: Maximum dimension of the Krylov space in a single cycle.
    :param seed: Seed of the start vector.
    :returns: The ground-state solution.
    :raises SolverError: The residual did not drop below `tol` within `max_iter` iterations.
    """

    dimension = hamiltonian.dimension
    if dimension < 1:
        raise ArgumentError("Hamiltonian has an empty basis")
    if dimension == 1:
        energy = float(hamiltonian.matrix[0, 0].real)
        return GroundStateSolution(energy, np.ones(1, dtype=np.complex128), 0.0)

    rng = np.random.default_rng(seed)
    vector = rng.standard_normal(dimension) + 1j * rng.standard_normal(dimension)
    vector /= np.linalg.norm(vector)

    best_residual = math.inf
    iterations = 0
    while iterations < max_iter:
        steps = min(krylov_dim, dimension, max_iter - iterations)
        vector = _lanczos_cycle(hamiltonian, vector, steps)
        iterations += steps

        product = hamiltonian @ vector
        energy = float(np.vdot(vector, product).real)
        residual = float(np.linalg.norm(product - energy * vector))
        best_residual = min(best_residual, residual)
        LOGGER.debug("Lanczos cycle iterations=%d energy=%.12g residual=%.3e", iterations, energy, residual)

        if residual < tol:
            return GroundStateSolution(energy, _fix_phase(vector), residual)

    raise SolverError(f"Lanczos did not converge within {max_iter} iterations", best_residual)


def rayleigh_quotient(hamiltonian: SparseHamiltonian, psi: ComplexArray) -> float:
    "Energy expectation value `<psi|H|psi> / <psi|psi>` of a (not necessarily normalized) vector."

    return float((np.vdot(psi, hamiltonian @ psi) / np.vdot(psi, psi)).real)


def bipartite_entropy(psi: ComplexArray, basis: SectorBasis) -> float:
    """
    Von Neumann entropy (natural logarithm) of the reduced density matrix on sites `0, ..., L/2 - 1`.

    The sector vector is embedded into the product space of the two halves: the low `L/2` bits of a word index the
    subsystem and the high bits its complement, so every particle-number split between the halves is retained.

    :param psi: Unit-norm amplitudes over the basis.
    :param basis: Sector basis on an even number of sites.
    :returns: The entanglement entropy.
    :raises ArgumentError: The vector is not normalized within 1e-8, or does not match the basis.
    """

    psi = np.asarray(psi, dtype=np.complex128)
    if basis.num_sites % 2:
        raise ArgumentError(f"bipartition requires an even number of sites but got {basis.num_sites}")
    if psi.shape != (len(basis),):
        raise ArgumentError(f"vector of shape {psi.shape} does not match basis of dimension {len(basis)}")
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > 1e-8:
        raise ArgumentError(f"state vector must be normalized but has norm {norm:.12g}")

    half = basis.num_sites // 2
    mask = (1 << half) - 1
    coefficients = np.zeros((1 << half, 1 << half), dtype=np.complex128)
    coefficients[basis.states & mask, basis.states >> half] = psi

    singular_values = np.linalg.svd(coefficients, compute_uv=False)
    singular_values = singular_values[singular_values >= SINGULAR_VALUE_CUTOFF]
    probabilities = singular_values**2
    return float(-np.sum(probabilities * np.log(probabilities)))


def page_value(num_sites: int) -> float:
    """
    Average entanglement entropy of a random pure state on a half system of `L/2` sites, `(L/2) ln 2 - 1/2`.

    :raises ArgumentError: The number of sites is odd.
    """

    if num_sites % 2:
        raise ArgumentError(f"half-system bipartition requires an even number of sites but got {num_sites}")
    return num_sites // 2 * math.log(2.0) - 0.5
