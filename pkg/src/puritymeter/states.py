"""Density matrices, Bloch vectors and exact purity for N-level systems.

States are plain complex ``(N, N)`` arrays and Bloch vectors plain real
arrays of length ``N**2 - 1``; the functions here convert between the two
with the parametrization ``rho = I/N + sqrt((N-1)/(2N)) a.T``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .algebra import GeneratorSet, build_generators
from .exceptions import DimensionError, NonPhysicalStateError

#: Absolute tolerance on Hermiticity, trace and the minimum eigenvalue.
PHYSICAL_TOL = 1e-10
#: Largest drift tolerated when re-normalizing channel outputs.
DRIFT_TOL = 1e-8


def bloch_scale(N: int) -> float:
    """The coefficient ``sqrt((N-1)/(2N))`` multiplying ``a.T``."""
    return np.sqrt((N - 1) / (2 * N))


def dim_from_bloch(a) -> int:
    """Recover N from a Bloch vector of length ``N**2 - 1``."""
    size = np.shape(a)[-1]
    N = int(round(np.sqrt(size + 1)))
    if N * N - 1 != size or N < 2:
        raise DimensionError(f"length {size} is not N**2 - 1 for any N >= 2")
    return N


@dataclass(frozen=True)
class PurityReport:
    exact: float
    per_level_rho2: np.ndarray


@dataclass(frozen=True)
class PhysicalityCheck:
    """Outcome of :func:`is_physical`; truthy when the state is physical."""

    ok: bool
    min_eigenvalue: float
    trace_error: float
    hermiticity_error: float

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        return (
            f"min eigenvalue {self.min_eigenvalue:.3e}, "
            f"|Tr - 1| = {self.trace_error:.3e}, "
            f"|rho - rho^dag|_max = {self.hermiticity_error:.3e}"
        )


def bloch_to_density(a, gens: GeneratorSet | None = None) -> np.ndarray:
    """Build ``I/N + sqrt((N-1)/(2N)) a.T``; positivity is not guaranteed."""
    a = np.asarray(a, dtype=float)
    N = dim_from_bloch(a)
    if gens is None:
        gens = build_generators(N)
    elif gens.dim != N:
        raise DimensionError(f"Bloch vector is for N={N}, generators for N={gens.dim}")
    return np.eye(N) / N + bloch_scale(N) * np.einsum("c,cij->ij", a, gens.generators)


def density_to_bloch(rho, gens: GeneratorSet | None = None) -> np.ndarray:
    """Bloch vector ``a^b = sqrt(N/(2(N-1))) Tr(T^b rho)``."""
    rho = np.asarray(rho)
    N = rho.shape[0]
    if gens is None:
        gens = build_generators(N)
    elif gens.dim != N:
        raise DimensionError(f"state is N={N}, generators are N={gens.dim}")
    traces = np.einsum("bij,ji->b", gens.generators, rho).real
    return traces / (2 * bloch_scale(N))


def purity_exact(rho) -> PurityReport:
    """Brute-force purity ``Tr(rho^2)`` together with the diagonal of rho^2."""
    rho = np.asarray(rho)
    rho2 = rho @ rho
    per_level = np.diagonal(rho2).real.copy()
    return PurityReport(exact=float(per_level.sum()), per_level_rho2=per_level)


def purity_from_bloch(a) -> float:
    """Purity ``1/N + (N-1)/N |a|^2`` of the state with Bloch vector ``a``."""
    a = np.asarray(a, dtype=float)
    N = dim_from_bloch(a)
    return 1.0 / N + (N - 1) / N * float(a @ a)


def is_physical(rho, tol: float = PHYSICAL_TOL) -> PhysicalityCheck:
    rho = np.asarray(rho)
    herm_err = float(np.max(np.abs(rho - rho.conj().T)))
    trace_err = float(abs(np.trace(rho) - 1))
    min_eig = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0])
    ok = herm_err <= tol and trace_err <= tol and min_eig >= -tol
    return PhysicalityCheck(ok, min_eig, trace_err, herm_err)


def require_physical(rho, tol: float = PHYSICAL_TOL, name: str = "state") -> np.ndarray:
    """Return ``rho`` as an array, raising NonPhysicalStateError if it is not a state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise NonPhysicalStateError(f"{name} must be a square matrix, got shape {rho.shape}")
    check = is_physical(rho, tol)
    if not check:
        raise NonPhysicalStateError(f"{name} is not a density matrix: {check.describe()}")
    return rho


def renormalize(rho, tol: float = DRIFT_TOL) -> np.ndarray:
    """Re-Hermitize and trace-normalize; drift beyond ``tol`` is an error."""
    rho = np.asarray(rho)
    herm = (rho + rho.conj().T) / 2
    drift = max(float(np.max(np.abs(rho - herm))), float(abs(np.trace(rho) - 1)))
    if drift > tol:
        raise NonPhysicalStateError(f"numerical drift {drift:.3e} exceeds {tol:.0e}")
    return herm / np.trace(herm).real


def random_density(N: int, rank: int | None = None, seed=None) -> np.ndarray:
    """Random state ``G G^dag / Tr(G G^dag)`` from a complex Ginibre ``N x rank`` G.

    ``rank=1`` gives Haar-random pure states. ``seed`` may be an int, a
    ``SeedSequence`` or a ``numpy.random.Generator``.
    """
    if N < 2:
        raise ValueError(f"need N >= 2, got {N}")
    rank = N if rank is None else rank
    if not 1 <= rank <= N:
        raise ValueError(f"rank must lie in 1..{N}, got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((N, rank)) + 1j * rng.standard_normal((N, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def basis_state(i: int, N: int) -> np.ndarray:
    """The projector ``|i><i|`` (0-based level)."""
    if not 0 <= i < N:
        raise IndexError(f"level {i} out of range for N={N}")
    rho = np.zeros((N, N), dtype=complex)
    rho[i, i] = 1.0
    return rho


def population(rho, i: int) -> float:
    """Probability ``<i|rho|i>`` of finding the system in level ``i`` (0-based)."""
    rho = np.asarray(rho)
    if not 0 <= i < rho.shape[0]:
        raise IndexError(f"level {i} out of range for N={rho.shape[0]}")
    return float(rho[i, i].real)


def populations(rho) -> np.ndarray:
    return np.diagonal(np.asarray(rho)).real.copy()


# -- JSON ------------------------------------------------------------------


def complex_to_json(matrix) -> list:
    """Nested ``[re, im]`` pairs for a complex array of any rank."""
    arr = np.asarray(matrix, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def complex_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def state_to_json(rho=None, *, bloch=None) -> dict:
    """Serialize either a matrix (``{"dim", "matrix"}``) or a Bloch vector."""
    if (rho is None) == (bloch is None):
        raise ValueError("pass exactly one of rho or bloch")
    if bloch is not None:
        bloch = np.asarray(bloch, dtype=float)
        return {"dim": dim_from_bloch(bloch), "bloch": bloch.tolist()}
    rho = np.asarray(rho)
    return {"dim": rho.shape[0], "matrix": complex_to_json(rho)}


def state_from_json(data: dict, tol: float = PHYSICAL_TOL) -> np.ndarray:
    """Parse the state JSON schema and return a validated density matrix."""
    try:
        N = int(data["dim"])
    except (KeyError, TypeError, ValueError) as exc:
        raise NonPhysicalStateError("state JSON needs an integer 'dim'") from exc
    if "matrix" in data:
        rho = complex_from_json(data["matrix"])
    elif "bloch" in data:
        bloch = np.asarray(data["bloch"], dtype=float)
        if bloch.shape != (N * N - 1,):
            raise DimensionError(f"'bloch' must have {N * N - 1} entries for dim {N}")
        rho = bloch_to_density(bloch)
    else:
        raise NonPhysicalStateError("state JSON needs 'matrix' or 'bloch'")
    if rho.shape != (N, N):
        raise DimensionError(f"matrix shape {rho.shape} does not match dim {N}")
    return require_physical(rho, tol)


def read_state(path) -> np.ndarray:
    return state_from_json(json.loads(Path(path).read_text()))


def write_state(path, rho) -> None:
    Path(path).write_text(json.dumps(state_to_json(rho)))
