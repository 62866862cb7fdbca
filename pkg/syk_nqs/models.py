"""
Model Hamiltonians projected onto a fixed particle-number sector.

The complex SYK model is `H = (2L)^(-3/2) sum_{ijkl} J_{ij;kl} c+_i c+_j c_k c_l` with random couplings obeying
`J*_{ij;kl} = J_{lk;ji}` and `J_{ij;kl} = -J_{ji;kl}`. The Heisenberg chain `H = sum_i sigma_i . sigma_{i+1}` with periodic
boundary conditions serves as a baseline with area-law entanglement; its zero-magnetization subspace is identified with
the half-filled sector (bit 1 is spin up).
"""

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import scipy.sparse

from .basis import SectorBasis, annihilate, create
from .core import ComplexArray, JsonType
from .exception import ArgumentError, JsonValueError
from .serializer import float_to_json

LOGGER = logging.getLogger(__name__)

# entries of smaller magnitude are dropped from assembled matrices
DROP_TOLERANCE = 1e-15


class Model(enum.Enum):
    "Physical model whose ground state is studied."

    syk = "syk"
    heisenberg = "heisenberg"


def site_pairs(num_sites: int) -> List[Tuple[int, int]]:
    "Ordered site pairs `(i, j)` with `i < j`, in lexicographic order."

    return [(i, j) for i in range(num_sites) for j in range(i + 1, num_sites)]


@dataclass(frozen=True, eq=False)
class CouplingTensor:
    """
    Random SYK vertex stored through its independent entries.

    The tensor is parametrized by a Hermitian matrix `M` over ordered pairs `P = (i, j)`, `i < j`:
    `J_{ij;kl} = s(i, j) s(k, l) M[P(i, j), P(k, l)]` where `s(a, b)` is +1 for `a < b` and -1 for `a > b`, and
    `J_{ij;kl} = 0` when `i = j` or `k = l`. Antisymmetry in either index pair follows from the sign factors and the
    Hermiticity relation `J*_{ij;kl} = J_{lk;ji}` from `M` being Hermitian. The upper triangle of `M` (diagonal included)
    holds the canonical entries; diagonal entries are real.

    :param num_sites: Number of sites `L`.
    :param seed: Seed of the pseudo-random generator the entries were drawn with.
    :param pair_matrix: Hermitian matrix `M` of shape `(P, P)` with `P = L(L-1)/2`.
    """

    num_sites: int
    seed: int
    pair_matrix: ComplexArray = field(repr=False)

    @property
    def pairs(self) -> List[Tuple[int, int]]:
        return site_pairs(self.num_sites)

    def _pair_index(self, a: int, b: int) -> Tuple[int, int]:
        "Index of the unordered pair `{a, b}` and the sign of its ordering."

        lo, hi = min(a, b), max(a, b)
        index = lo * (2 * self.num_sites - lo - 1) // 2 + (hi - lo - 1)
        return index, (1 if a < b else -1)

    def entry(self, i: int, j: int, k: int, l: int) -> complex:
        "Coupling `J_{ij;kl}` for arbitrary site indices."

        if i == j or k == l:
            return 0j
        p, sp = self._pair_index(i, j)
        q, sq = self._pair_index(k, l)
        return complex(sp * sq * self.pair_matrix[p, q])

    def to_dense(self) -> np.ndarray:
        "Full `(L, L, L, L)` tensor with all symmetry images filled in."

        L = self.num_sites
        tensor = np.zeros((L, L, L, L), dtype=np.complex128)
        for i in range(L):
            for j in range(L):
                for k in range(L):
                    for l in range(L):
                        tensor[i, j, k, l] = self.entry(i, j, k, l)
        return tensor

    def to_json(self) -> JsonType:
        rows, cols = np.triu_indices(self.pair_matrix.shape[0])
        entries = self.pair_matrix[rows, cols]
        return {
            "num_sites": self.num_sites,
            "seed": self.seed,
            "entries": [[float_to_json(value.real), float_to_json(value.imag)] for value in entries],
        }

    @classmethod
    def from_json(cls, obj: JsonType) -> "CouplingTensor":
        if not isinstance(obj, dict):
            raise JsonValueError(f"coupling record expects a JSON `object` but got: {obj}")
        try:
            num_sites = int(obj["num_sites"])  # type: ignore
            seed = int(obj["seed"])  # type: ignore
            entries = np.array([complex(re, im) for re, im in obj["entries"]], dtype=np.complex128)  # type: ignore
        except (KeyError, TypeError, ValueError) as e:
            raise JsonValueError(f"malformed coupling record: {e}") from e

        num_pairs = num_sites * (num_sites - 1) // 2
        rows, cols = np.triu_indices(num_pairs)
        if len(entries) != len(rows):
            raise JsonValueError(f"coupling record for L={num_sites} expects {len(rows)} entries but has {len(entries)}")
        matrix = np.zeros((num_pairs, num_pairs), dtype=np.complex128)
        matrix[rows, cols] = entries
        matrix[cols, rows] = np.conj(entries)
        return cls(num_sites, seed, matrix)


def sample_syk_couplings(num_sites: int, seed: int) -> CouplingTensor:
    """
    Draws the random SYK vertex.

    Off-diagonal canonical entries are complex Gaussians with real and imaginary parts of variance 1/2, so that
    `E|J|^2 = 1`; entries that Hermiticity maps onto their own conjugate are real with unit variance.

    :param num_sites: Number of sites, even and at least 4.
    :param seed: Seed of the pseudo-random generator.
    :raises ArgumentError: The number of sites is odd or too small.
    """

    if num_sites < 4 or num_sites % 2:
        raise ArgumentError(f"SYK model requires an even number of sites L >= 4 but got {num_sites}")

    rng = np.random.default_rng(seed)
    num_pairs = num_sites * (num_sites - 1) // 2
    diagonal = rng.standard_normal(num_pairs)
    rows, cols = np.triu_indices(num_pairs, k=1)
    off_diagonal = (rng.standard_normal(len(rows)) + 1j * rng.standard_normal(len(rows))) / math.sqrt(2)

    matrix = np.diag(diagonal).astype(np.complex128)
    matrix[rows, cols] = off_diagonal
    matrix[cols, rows] = np.conj(off_diagonal)
    return CouplingTensor(num_sites, seed, matrix)


@dataclass(frozen=True, eq=False)
class SparseHamiltonian:
    """
    A Hermitian operator restricted to a sector basis, stored as compressed sparse rows with sorted column indices.

    :param basis: The basis the rows and columns refer to.
    :param matrix: Square CSR matrix of dimension `len(basis)`.
    """

    basis: SectorBasis
    matrix: scipy.sparse.csr_matrix = field(repr=False)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, vector: ComplexArray) -> ComplexArray:
        return self.matrix @ vector

    def to_dense(self) -> ComplexArray:
        return self.matrix.toarray()

    def hermiticity_error(self) -> float:
        "Largest absolute deviation between an entry and the conjugate of its transpose."

        difference = self.matrix - self.matrix.conj().T
        return float(abs(difference).max()) if difference.nnz else 0.0


def _assemble(basis: SectorBasis, rows: List[np.ndarray], cols: List[np.ndarray], data: List[np.ndarray]) -> SparseHamiltonian:
    dimension = len(basis)
    if rows:
        matrix = scipy.sparse.coo_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(dimension, dimension)
        ).tocsr()
    else:
        matrix = scipy.sparse.csr_matrix((dimension, dimension), dtype=np.complex128)
    matrix.sum_duplicates()
    matrix.data[np.abs(matrix.data) < DROP_TOLERANCE] = 0
    matrix.eliminate_zeros()
    matrix.sort_indices()
    return SparseHamiltonian(basis, matrix.astype(np.complex128))


def build_syk_hamiltonian(couplings: CouplingTensor, basis: SectorBasis) -> SparseHamiltonian:
    """
    Assembles the SYK Hamiltonian in a sector basis.

    Summing the four orderings of each index pair reduces the quadruple sum to ordered pairs `i < j`, `k < l` with
    coefficient `4 (2L)^(-3/2) M[P(i, j), P(k, l)]`; terms with coincident indices vanish and are skipped.

    :param couplings: The random vertex.
    :param basis: Sector basis on the same number of sites.
    :raises ArgumentError: The basis and the couplings disagree on the number of sites.
    """

    if basis.num_sites != couplings.num_sites:
        raise ArgumentError(f"basis has {basis.num_sites} sites but couplings have {couplings.num_sites}")

    L = couplings.num_sites
    prefactor = 4.0 * (2.0 * L) ** -1.5
    pairs = couplings.pairs
    columns = np.arange(len(basis), dtype=np.int64)

    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []
    data: List[np.ndarray] = []
    for q, (k, l) in enumerate(pairs):
        # c_k c_l: annihilate l first
        words, sign_l, alive_l = annihilate(basis.states, l)
        words, sign_k, alive_k = annihilate(words, k)
        alive = alive_l & alive_k
        if not alive.any():
            continue
        mid_words = words[alive]
        mid_signs = (sign_l * sign_k)[alive]
        mid_columns = columns[alive]

        for p, (i, j) in enumerate(pairs):
            coefficient = couplings.pair_matrix[p, q]
            if coefficient == 0:
                continue
            # c+_i c+_j: create j first
            out_words, sign_j, alive_j = create(mid_words, j)
            out_words, sign_i, alive_i = create(out_words, i)
            keep = alive_j & alive_i
            if not keep.any():
                continue
            rows.append(basis.rank_array(out_words[keep]))
            cols.append(mid_columns[keep])
            data.append(prefactor * coefficient * (mid_signs * sign_j * sign_i)[keep])

    hamiltonian = _assemble(basis, rows, cols, data)
    LOGGER.debug("SYK Hamiltonian assembled L=%d dimension=%d nnz=%d", L, hamiltonian.dimension, hamiltonian.matrix.nnz)
    return hamiltonian


def build_heisenberg(num_sites: int, basis: SectorBasis) -> SparseHamiltonian:
    """
    Assembles the periodic Heisenberg chain in Pauli-matrix normalization on the zero-magnetization sector.

    Each bond `(i, i+1 mod L)` contributes +1 on the diagonal for parallel spins, -1 for antiparallel spins, and flips an
    antiparallel pair with amplitude 2. For `L = 2` both bonds connect the same pair of sites.

    :param num_sites: Number of sites, even.
    :param basis: The half-filled sector basis on `num_sites` sites.
    :raises ArgumentError: The basis is not the half-filled sector on `num_sites` sites.
    """

    if num_sites < 2 or num_sites % 2:
        raise ArgumentError(f"Heisenberg chain requires an even number of sites but got {num_sites}")
    if basis.num_sites != num_sites or basis.num_particles != num_sites // 2:
        raise ArgumentError(
            f"Heisenberg chain on L={num_sites} requires the sector n={num_sites // 2} "
            f"but got L={basis.num_sites} n={basis.num_particles}"
        )

    words = basis.states
    columns = np.arange(len(basis), dtype=np.int64)
    diagonal = np.zeros(len(basis), dtype=np.float64)

    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []
    data: List[np.ndarray] = []
    for a in range(num_sites):
        b = (a + 1) % num_sites
        antiparallel = (((words >> a) ^ (words >> b)) & 1) == 1
        diagonal += np.where(antiparallel, -1.0, 1.0)
        flipped = words[antiparallel] ^ ((1 << a) | (1 << b))
        rows.append(basis.rank_array(flipped))
        cols.append(columns[antiparallel])
        data.append(np.full(len(flipped), 2.0, dtype=np.complex128))

    rows.append(columns)
    cols.append(columns)
    data.append(diagonal.astype(np.complex128))
    return _assemble(basis, rows, cols, data)


def build_hamiltonian(model: Model, basis: SectorBasis, coupling_seed: int) -> Tuple[SparseHamiltonian, Optional[CouplingTensor]]:
    """
    Builds the Hamiltonian of a model in the half-filled sector.

    :param model: Which model to build.
    :param basis: The half-filled sector basis.
    :param coupling_seed: Seed of the coupling draw; ignored for the Heisenberg chain.
    :returns: The Hamiltonian and, for the SYK model, the coupling tensor it was built from.
    """

    if model is Model.syk:
        couplings = sample_syk_couplings(basis.num_sites, coupling_seed)
        return build_syk_hamiltonian(couplings, basis), couplings
    else:
        return build_heisenberg(basis.num_sites, basis), None
