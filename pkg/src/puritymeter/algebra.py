"""Generalized Gell-Mann generators of SU(N) and Bloch-space vector products.

Generators are normalized as ``Tr(T^a T^b) = 2 delta^ab`` so that for N = 2
they are the Pauli matrices and for N = 3 the standard Gell-Mann matrices
lambda^1 ... lambda^8. Indices are 0-based in code: the diagonal generator
built from the first ``k`` levels sits at index ``k**2 - 2`` (``k = 2..N``),
i.e. lambda^3 is ``generators[2]`` and lambda^8 is ``generators[7]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import DimensionError


@dataclass(frozen=True, eq=False)
class GeneratorSet:
    """The N**2 - 1 generators of SU(N) with cached structure constants.

    Attributes
    ----------
    dim : int
        Number of levels N.
    generators : ndarray, shape (N**2 - 1, N, N)
        Hermitian traceless matrices ``T^a``.
    f : ndarray, shape (D, D, D)
        Totally antisymmetric structure constants, ``[T^a, T^b] = 2i f^abc T^c``.
    d : ndarray, shape (D, D, D)
        Totally symmetric structure constants,
        ``{T^a, T^b} = (4/N) delta^ab + 2 d^abc T^c``.
    """

    dim: int
    generators: np.ndarray
    f: np.ndarray
    d: np.ndarray

    @property
    def size(self) -> int:
        """Bloch-space dimension N**2 - 1."""
        return self.dim**2 - 1

    @property
    def diagonal_indices(self) -> np.ndarray:
        """Indices of the diagonal (Casimir-direction) generators."""
        return np.array([k**2 - 2 for k in range(2, self.dim + 1)])

    def __repr__(self) -> str:
        return f"GeneratorSet(dim={self.dim})"


def gellmann_matrices(N: int) -> np.ndarray:
    """Return the generalized Gell-Mann matrices for N levels.

    For each ``k = 2..N`` the symmetric/antisymmetric pairs coupling level
    ``k - 1`` to the lower levels come first, followed by the diagonal
    generator ``sqrt(2/(k(k-1))) diag(1, ..., 1, -(k-1), 0, ..., 0)``.
    """
    if N < 2:
        raise ValueError(f"need N >= 2 levels, got {N}")
    mats = []
    for k in range(2, N + 1):
        j = k - 1
        for i in range(j):
            sym = np.zeros((N, N), dtype=complex)
            sym[i, j] = sym[j, i] = 1.0
            asym = np.zeros((N, N), dtype=complex)
            asym[i, j] = -1j
            asym[j, i] = 1j
            mats.extend((sym, asym))
        diag = np.zeros(N)
        diag[:j] = 1.0
        diag[j] = -j
        mats.append(np.diag(diag * np.sqrt(2.0 / (j * (j + 1)))).astype(complex))
    return np.array(mats)


def structure_constants(generators: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Compute ``(f, d)`` from the trace formulas.

    ``d^abc = Tr(T^a {T^b, T^c}) / 4`` and ``f^abc = Tr(T^a [T^b, T^c]) / 4i``.
    """
    # t[a, b, c] = Tr(T^a T^b T^c)
    t = np.einsum("aij,bjk,cki->abc", generators, generators, generators)
    t_swapped = t.transpose(0, 2, 1)
    f = ((t - t_swapped) / 4j).real
    d = ((t + t_swapped) / 4).real
    return f, d


@lru_cache(maxsize=None)
def _cached_generators(N: int) -> GeneratorSet:
    gens = gellmann_matrices(N)
    f, d = structure_constants(gens)
    for arr in (gens, f, d):
        arr.setflags(write=False)
    return GeneratorSet(dim=N, generators=gens, f=f, d=d)


def build_generators(N: int) -> GeneratorSet:
    """Return the (cached, read-only) SU(N) generator set."""
    if int(N) != N or N < 2:
        raise ValueError(f"need an integer N >= 2, got {N!r}")
    return _cached_generators(int(N))


def _check_pair(a, b, gens: GeneratorSet) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != (gens.size,) or b.shape != (gens.size,):
        raise DimensionError(
            f"expected Bloch vectors of length {gens.size} for N={gens.dim}, "
            f"got {a.shape} and {b.shape}"
        )
    return a, b


def cross(a, b, gens: GeneratorSet) -> np.ndarray:
    """Antisymmetric product ``(a x b)^c = f^cab a^a b^b``."""
    a, b = _check_pair(a, b, gens)
    return np.einsum("cab,a,b->c", gens.f, a, b)


def star(a, b, gens: GeneratorSet) -> np.ndarray:
    """Symmetric product ``(a * b)^c = d^cab a^a b^b``."""
    a, b = _check_pair(a, b, gens)
    return np.einsum("cab,a,b->c", gens.d, a, b)


def casimir_direction(k: int, gens: GeneratorSet) -> np.ndarray:
    """Unit Bloch vector along the (k-1)-th Casimir generator, ``2 <= k <= N``.

    The only nonzero entry is at 0-based index ``k**2 - 2``.
    """
    if not 2 <= k <= gens.dim:
        raise ValueError(f"k must lie in 2..{gens.dim}, got {k}")
    out = np.zeros(gens.size)
    out[k**2 - 2] = 1.0
    return out


def level_coefficients(gens: GeneratorSet) -> np.ndarray:
    """Coefficients ``gamma[i, alpha]`` expanding the level-i direction.

    Row ``i`` holds ``sqrt(2N/(N-1)) T^alpha_ii / 2`` for every diagonal
    generator ``alpha`` (columns ordered as ``gens.diagonal_indices``).
    """
    N = gens.dim
    diag = gens.generators[gens.diagonal_indices].diagonal(axis1=1, axis2=2).real
    return 0.5 * np.sqrt(2 * N / (N - 1)) * diag.T


def level_direction(i: int, gens: GeneratorSet) -> np.ndarray:
    """Unit Bloch vector of the pure level state ``|i><i|`` (0-based ``i``)."""
    if not 0 <= i < gens.dim:
        raise IndexError(f"level {i} out of range for N={gens.dim}")
    out = np.zeros(gens.size)
    out[gens.diagonal_indices] = level_coefficients(gens)[i]
    return out
