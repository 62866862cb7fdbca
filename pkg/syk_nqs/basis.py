"""
Fixed particle-number occupation basis and the action of fermionic operators on occupation words.

An occupation word is an integer whose bit `p` is set when site `p` is occupied; site 0 is the least significant bit.
Fermionic signs follow the Jordan-Wigner convention in which an operator acting on site `p` picks up a factor of -1 for
every occupied site with an index strictly lower than `p`.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .core import WordArray
from .exception import ArgumentError

MAX_SITES = 30


@dataclass(frozen=True)
class SignedState:
    """
    Result of applying a string of fermionic operators to an occupation word.

    :param word: The resulting occupation word, or `None` if the string annihilates the state.
    :param sign: Accumulated fermionic sign (+1 or -1); 0 for an annihilated state.
    """

    word: Optional[int]
    sign: int

    @property
    def annihilated(self) -> bool:
        return self.word is None


ANNIHILATED = SignedState(None, 0)


def _binomial_table(num_sites: int, num_particles: int) -> np.ndarray:
    "Table of binomial coefficients `C(p, m)` for `0 <= p <= num_sites` and `0 <= m <= num_particles + 1`."

    table = np.zeros((num_sites + 1, num_particles + 2), dtype=np.int64)
    for p in range(num_sites + 1):
        for m in range(num_particles + 2):
            table[p, m] = math.comb(p, m)
    return table


@dataclass(frozen=True, eq=False)
class SectorBasis:
    """
    Occupation words of `num_sites` sites with exactly `num_particles` set bits, in increasing integer order.

    The position of a word is its combinadic rank: with occupied sites `c_1 < c_2 < ... < c_n`, the rank is the sum of
    binomial coefficients `C(c_m, m)`. Colexicographic order of the occupied sets coincides with integer order of the
    words, hence `rank_index(states[i]) == i`.

    :param num_sites: Number of sites `L`.
    :param num_particles: Number of particles `n`.
    :param states: Read-only array of occupation words.
    """

    num_sites: int
    num_particles: int
    states: WordArray = field(repr=False)
    _binomials: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.states)

    @property
    def dimension(self) -> int:
        return len(self.states)

    def rank_index(self, word: int) -> int:
        """
        Position of an occupation word in the basis.

        :raises ArgumentError: The word does not belong to the sector.
        """

        word = int(word)
        if word < 0 or word >> self.num_sites or word.bit_count() != self.num_particles:
            raise ArgumentError(f"word {word:#b} is not in the sector L={self.num_sites} n={self.num_particles}")

        rank = 0
        count = 0
        for p in range(self.num_sites):
            if word >> p & 1:
                count += 1
                rank += int(self._binomials[p, count])
        return rank

    def rank_array(self, words: WordArray) -> np.ndarray:
        "Vectorized `rank_index` for words already known to belong to the sector."

        words = np.asarray(words, dtype=np.int64)
        ranks = np.zeros(words.shape, dtype=np.int64)
        counts = np.zeros(words.shape, dtype=np.int64)
        for p in range(self.num_sites):
            bits = (words >> p) & 1
            counts += bits
            ranks += bits * self._binomials[p, np.minimum(counts, self.num_particles + 1)]
        return ranks

    def occupations(self) -> np.ndarray:
        "Occupation numbers as a `(D, L)` array of 0.0 and 1.0 values; column `p` is site `p`."

        return occupations(self.states, self.num_sites)


def occupations(words: WordArray, num_sites: int) -> np.ndarray:
    "Expands occupation words into a `(len(words), num_sites)` array of 0.0 and 1.0 values."

    words = np.asarray(words, dtype=np.int64)
    return ((words[:, np.newaxis] >> np.arange(num_sites, dtype=np.int64)) & 1).astype(np.float64)


def build_sector_basis(num_sites: int, num_particles: int) -> SectorBasis:
    """
    Enumerates the occupation basis at fixed particle number.

    :param num_sites: Number of sites, at least 1 and at most 30.
    :param num_particles: Number of particles, between 0 and `num_sites`.
    :returns: Basis with words in increasing integer order.
    :raises ArgumentError: The site or particle count is out of range.
    """

    if not 1 <= num_sites <= MAX_SITES:
        raise ArgumentError(f"number of sites must be in [1, {MAX_SITES}] but got {num_sites}")
    if not 0 <= num_particles <= num_sites:
        raise ArgumentError(f"number of particles must be in [0, {num_sites}] but got {num_particles}")

    words = sorted(sum(1 << p for p in occupied) for occupied in itertools.combinations(range(num_sites), num_particles))
    states = np.array(words, dtype=np.int64)
    states.setflags(write=False)
    return SectorBasis(num_sites, num_particles, states, _binomial_table(num_sites, num_particles))


def _fermion_sign(word: int, site: int) -> int:
    return -1 if (word & ((1 << site) - 1)).bit_count() & 1 else 1


def apply_two_body(word: int, i: int, j: int, k: int, l: int, *, num_sites: int) -> SignedState:
    """
    Applies the normal-ordered operator string `c+_i c+_j c_k c_l` to an occupation word.

    Operators act right to left: `c_l` first, `c+_i` last.

    :param word: Occupation word.
    :param i: Site of the outer creation operator.
    :param j: Site of the inner creation operator.
    :param k: Site of the inner annihilation operator.
    :param l: Site of the outer annihilation operator.
    :param num_sites: Number of sites; every index must be in `[0, num_sites)`.
    :returns: The resulting word with its accumulated sign, or `ANNIHILATED`.
    :raises ArgumentError: A site index is out of range.
    """

    for name, site in (("i", i), ("j", j), ("k", k), ("l", l)):
        if not 0 <= site < num_sites:
            raise ArgumentError(f"site index {name}={site} out of range [0, {num_sites})")

    sign = 1
    for site, creation in ((l, False), (k, False), (j, True), (i, True)):
        occupied = word >> site & 1
        if occupied == creation:
            return ANNIHILATED
        sign *= _fermion_sign(word, site)
        word ^= 1 << site
    return SignedState(word, sign)


def _apply(words: WordArray, site: int, creation: bool) -> Tuple[WordArray, np.ndarray, np.ndarray]:
    words = np.asarray(words, dtype=np.int64)
    occupied = (words >> site) & 1
    alive = occupied == (0 if creation else 1)
    below = np.bitwise_count(words & ((1 << site) - 1))
    signs = np.where(below & 1, -1, 1).astype(np.int8)
    return words ^ (1 << site), signs, alive


def annihilate(words: WordArray, site: int) -> Tuple[WordArray, np.ndarray, np.ndarray]:
    """
    Applies `c_site` to every word of an array.

    :returns: A tuple of resulting words, fermionic signs and a mask of words that survive (site was occupied).
    """

    return _apply(words, site, False)


def create(words: WordArray, site: int) -> Tuple[WordArray, np.ndarray, np.ndarray]:
    """
    Applies `c+_site` to every word of an array.

    :returns: A tuple of resulting words, fermionic signs and a mask of words that survive (site was empty).
    """

    return _apply(words, site, True)
