"""SWAP, sqrt(SWAP) and fractional-SWAP gates on two N-level systems.

Two-body gates are ``(N**2, N**2)`` arrays acting on ``C^N (x) C^N`` with
the first factor most significant. Three-body operators act on
``C^N (x) C^N (x) C^N`` with subsystems numbered 0, 1, 2; by convention the
ancilla is subsystem 2.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .algebra import GeneratorSet, build_generators
from .exceptions import DimensionError

ANCILLA = 2


def swap_operator(gens: GeneratorSet) -> np.ndarray:
    """SWAP from the generators: ``S = I/N + (1/2) sum_c T^c (x) T^c``."""
    N = gens.dim
    T = gens.generators
    S = np.einsum("cij,ckl->ikjl", T, T).reshape(N * N, N * N) / 2
    return S + np.eye(N * N) / N


def permutation_swap(N: int) -> np.ndarray:
    """SWAP as the explicit basis permutation ``|i, j> -> |j, i>``."""
    S = np.zeros((N * N, N * N))
    for i in range(N):
        for j in range(N):
            S[j * N + i, i * N + j] = 1.0
    return S


def fractional_swap(gens: GeneratorSet, gt: float) -> np.ndarray:
    """``exp(-i gt S) = cos(gt) I - i sin(gt) S`` (uses ``S^2 = I``)."""
    S = swap_operator(gens)
    return np.cos(gt) * np.eye(S.shape[0]) - 1j * np.sin(gt) * S


def sqrt_swap(gens: GeneratorSet) -> np.ndarray:
    """The gate ``U = (I - iS)/sqrt(2)``; note ``U^2 = -iS``, not S."""
    S = swap_operator(gens)
    return (np.eye(S.shape[0]) - 1j * S) / np.sqrt(2)


def gate_dim(U) -> int:
    size = np.shape(U)[0]
    N = int(round(np.sqrt(size)))
    if N * N != size or np.shape(U) != (size, size):
        raise DimensionError(f"gate of shape {np.shape(U)} is not N^2 x N^2")
    return N


def embed_gate(U, slots: tuple[int, int]) -> np.ndarray:
    """Lift a two-body gate to three N-level systems.

    ``U`` acts on subsystems ``slots = (s, t)`` (0-based, ``s`` playing the
    role of U's first factor) and as the identity on the remaining one.
    """
    s, t = slots
    if s == t or not {s, t} <= {0, 1, 2}:
        raise ValueError(f"slots must be two distinct indices in 0..2, got {slots}")
    N = gate_dim(U)
    (rest,) = {0, 1, 2} - {s, t}
    u = np.asarray(U).reshape(N, N, N, N)
    out_idx = [""] * 3
    in_idx = [""] * 3
    out_idx[s], out_idx[t], out_idx[rest] = "a", "b", "y"
    in_idx[s], in_idx[t], in_idx[rest] = "c", "d", "z"
    full = np.einsum(f"abcd,yz->{''.join(out_idx)}{''.join(in_idx)}", u, np.eye(N))
    return full.reshape(N**3, N**3)


@lru_cache(maxsize=None)
def protocol_unitary(N: int) -> np.ndarray:
    """sqrt(SWAP) on (0, 2) followed by sqrt(SWAP) on (1, 2)."""
    U = sqrt_swap(build_generators(N))
    total = embed_gate(U, (1, ANCILLA)) @ embed_gate(U, (0, ANCILLA))
    total.setflags(write=False)
    return total


def apply(U, rho) -> np.ndarray:
    """Conjugate a state: ``U rho U^dag``."""
    return U @ rho @ np.conj(U).T
