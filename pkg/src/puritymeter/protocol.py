"""The two-gate purity measurement and its estimators.

Two copies of the target ``rho`` and an ancilla ``omega`` start in
``rho (x) rho (x) omega``. A sqrt(SWAP) couples the first copy to the
ancilla, a second sqrt(SWAP) couples the other copy to the ancilla, and the
ancilla population of the prepared level is measured. The ancilla state
after both gates is computed three ways:

* ``"tripartite"``: dense evolution of the three-body state, then a partial
  trace over both target copies;
* ``"sequential"``: two applications of the reduced channel
  ``Lambda(r1 (x) r2) = Tr_1[U (r1 (x) r2) U^dag]``;
* ``"bloch"``: the closed-form map on Bloch vectors.

The estimators take measured expectation values or populations rather
than states, so they can be fed either exact or sampled data.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import gates
from .algebra import GeneratorSet, build_generators, cross
from .exceptions import DimensionError, EstimatorError, EstimatorSelectionError
from .states import (
    basis_state,
    bloch_scale,
    bloch_to_density,
    density_to_bloch,
    populations,
    purity_exact,
    renormalize,
    require_physical,
)

ROUTES = ("tripartite", "sequential", "bloch")

#: Slack allowed on a reconstructed |a|^2 before it is treated as inconsistent.
BLOCH_NORM_SLACK = 1e-8

#: (a^3, a^8) components of the ancilla directions n_1, n_2, n_3 for N = 3,
#: i.e. the Bloch vectors of diag(1,0,0), diag(0,1,0), diag(0,0,1).
QUTRIT_DIRECTIONS = np.array(
    [
        [np.sqrt(3) / 2, 0.5],
        [-np.sqrt(3) / 2, 0.5],
        [0.0, -1.0],
    ]
)


# -- state evolution -------------------------------------------------------


def partial_trace(rho, keep: Sequence[int], N: int, n_sys: int) -> np.ndarray:
    """Reduce an ``n_sys``-partite state of N-level systems onto ``keep``."""
    keep = sorted(keep)
    t = np.asarray(rho).reshape((N,) * (2 * n_sys))
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n_sys])
    col = list(letters[n_sys : 2 * n_sys])
    for k in range(n_sys):
        if k not in keep:
            col[k] = row[k]
    out = "".join(row[k] for k in keep) + "".join(col[k] for k in keep)
    reduced = np.einsum(f"{''.join(row)}{''.join(col)}->{out}", t)
    m = N ** len(keep)
    return reduced.reshape(m, m)


def _same_dim(*mats) -> int:
    dims = {np.shape(m)[0] for m in mats}
    if len(dims) != 1:
        raise DimensionError(f"state dimensions differ: {sorted(dims)}")
    return dims.pop()


def channel_lambda(rho1, rho2, U=None) -> np.ndarray:
    """Reduced state of the second system after ``U`` acts on ``rho1 (x) rho2``.

    ``U`` defaults to sqrt(SWAP).
    """
    N = _same_dim(rho1, rho2)
    if U is None:
        U = gates.sqrt_swap(build_generators(N))
    elif gates.gate_dim(U) != N:
        raise DimensionError(f"gate is for N={gates.gate_dim(U)}, states for N={N}")
    joint = gates.apply(U, np.kron(rho1, rho2))
    return renormalize(partial_trace(joint, [1], N, 2))


def bloch_map(a, b, gens: GeneratorSet) -> np.ndarray:
    """Bloch vector of ``channel_lambda(rho_a, rho_b, sqrt_swap)``.

    ``(a + b)/2 + sqrt((N-1)/(2N)) a x b``.
    """
    return 0.5 * (np.asarray(a) + np.asarray(b)) + bloch_scale(gens.dim) * cross(a, b, gens)


def ancilla_after_protocol(rho, omega, route: str = "tripartite") -> np.ndarray:
    """Ancilla state after both gates, starting from ``rho (x) rho (x) omega``."""
    N = _same_dim(rho, omega)
    if route == "tripartite":
        total = gates.protocol_unitary(N)
        joint = gates.apply(total, np.kron(np.kron(rho, rho), omega))
        return renormalize(partial_trace(joint, [gates.ANCILLA], N, 3))
    if route == "sequential":
        U = gates.sqrt_swap(build_generators(N))
        return channel_lambda(rho, channel_lambda(rho, omega, U), U)
    if route == "bloch":
        gens = build_generators(N)
        a = density_to_bloch(rho, gens)
        n = density_to_bloch(omega, gens)
        return bloch_to_density(bloch_map(a, bloch_map(a, n, gens), gens), gens)
    raise ValueError(f"unknown route {route!r}; choose from {ROUTES}")


def ancilla_expectation(rho, n, route: str = "tripartite") -> float:
    """``Tr[(n.T) omega2]`` for an ancilla prepared with Bloch vector ``n``."""
    rho = np.asarray(rho)
    gens = build_generators(rho.shape[0])
    omega2 = ancilla_after_protocol(rho, bloch_to_density(n, gens), route)
    observable = np.einsum("c,cij->ij", np.asarray(n, dtype=float), gens.generators)
    return float(np.trace(observable @ omega2).real)


# -- closed forms ----------------------------------------------------------


def expectation_qubit(n_dot_a: float, a_sq: float) -> float:
    """Spin expectation along ``n`` of the qubit ancilla after both gates."""
    return 0.25 * (1 + 3 * n_dot_a + n_dot_a**2 - a_sq)


def expectation_general(n_dot_a: float, a_cross_n_sq: float, N: int) -> float:
    """Expectation of ``n.T`` on the ancilla after both gates, for N levels."""
    return np.sqrt(2 * (N - 1) / N) * (
        0.25 + 0.75 * n_dot_a - (N - 1) / (2 * N) * a_cross_n_sq
    )


def level_probability(rho2_nn: float, p_n: float) -> float:
    """Probability of finding the ancilla back in its prepared level ``n``.

    ``1/4 - <n|rho^2|n>/2 + 3 p_n/4 + p_n^2/2``.
    """
    return 0.25 - 0.5 * rho2_nn + 0.75 * p_n + 0.5 * p_n**2


def level_expectation(P, N: int):
    """Convert a level population of the ancilla to ``Tr[(n_i.T) omega]``.

    For the level-i direction ``n_i.T = sqrt(2N/(N-1)) (|i><i| - I/N)``.
    """
    return np.sqrt(2 * N / (N - 1)) * (np.asarray(P, dtype=float) - 1.0 / N)


def diagonal_bloch_components(p, gens: GeneratorSet) -> np.ndarray:
    """Diagonal Bloch components ``a^alpha`` from the level populations of rho.

    ``a^alpha = (1/2) sum_i T^alpha_ii Tr[(n_i.T) rho]``, ordered as
    ``gens.diagonal_indices``.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (gens.dim,):
        raise DimensionError(f"need {gens.dim} populations, got {p.shape}")
    diag = gens.generators[gens.diagonal_indices].diagonal(axis1=1, axis2=2).real
    return 0.5 * diag @ level_expectation(p, gens.dim)


def _checked_norm(a_sq: float, strict: bool) -> float:
    if not strict:
        return a_sq
    if a_sq < -BLOCH_NORM_SLACK or a_sq > 1 + BLOCH_NORM_SLACK:
        raise EstimatorError(
            f"reconstructed |a|^2 = {a_sq:.3e} lies outside [0, 1]; inputs are inconsistent"
        )
    return min(max(a_sq, 0.0), 1.0)


# -- estimators ------------------------------------------------------------


def estimate_purity_qubit(n_dot_a: float, script_N: float) -> float:
    """Qubit purity from ``n.a`` and the ancilla spin expectation along ``n``."""
    return 1 + 1.5 * n_dot_a + 0.5 * n_dot_a**2 - 2 * script_N


def estimate_purity_qutrit(script_N, a3: float, a8: float, strict: bool = True) -> float:
    """Qutrit purity from the three level-prepared ancilla expectations.

    ``script_N[k]`` is ``Tr[(n_k.lambda) omega2]`` with the ancilla prepared
    in level ``k``; ``a3``, ``a8`` are the diagonal Bloch components of rho.
    """
    script_N = np.asarray(script_N, dtype=float)
    if script_N.shape != (3,):
        raise DimensionError(f"need 3 expectation values, got {script_N.shape}")
    n_dot_a = QUTRIT_DIRECTIONS @ np.array([a3, a8])
    # invert N_k = (1/sqrt3)(1/2 + 3/2 n_k.a - 2/3 (a x n_k)^2)
    cross_sq = 1.5 * (0.5 + 1.5 * n_dot_a - np.sqrt(3) * script_N)
    # each off-diagonal component appears in two of the three (a x n_k)^2
    off_diagonal = (2.0 / 3.0) * cross_sq.sum()
    a_sq = _checked_norm(off_diagonal + a3**2 + a8**2, strict)
    return 1.0 / 3.0 + 2.0 / 3.0 * a_sq


def estimate_purity_populations(P, p) -> float:
    """Purity from the ancilla return probabilities and target populations.

    Summing ``level_probability`` over all levels and solving for the purity
    gives ``(N + 3)/2 + sum p_n^2 - 2 sum P_n``.
    """
    P = np.asarray(P, dtype=float)
    p = np.asarray(p, dtype=float)
    if P.shape != p.shape or P.ndim != 1:
        raise DimensionError(f"P and p must be equal-length vectors, got {P.shape}, {p.shape}")
    N = len(P)
    return (N + 3) / 2 + float(p @ p) - 2 * float(P.sum())


def estimate_purity_casimir(script_N, p, gens: GeneratorSet, strict: bool = True) -> float:
    """General-N purity from level-prepared ancilla expectations.

    Uses ``sum_i (a x n_i)^2 = N/(N-1) (|a|^2 - sum_alpha (a^alpha)^2)`` to
    recover the off-diagonal weight and the target populations for the
    diagonal components.
    """
    N = gens.dim
    script_N = np.asarray(script_N, dtype=float)
    p = np.asarray(p, dtype=float)
    if script_N.shape != (N,) or p.shape != (N,):
        raise DimensionError(f"need {N} expectations and populations")
    n_dot_a = (N * p - 1) / (N - 1)
    scale = np.sqrt(2 * (N - 1) / N)
    cross_sq = (2 * N / (N - 1)) * (0.25 + 0.75 * n_dot_a - script_N / scale)
    diagonal = diagonal_bloch_components(p, gens)
    a_sq = (N - 1) / N * cross_sq.sum() + float(diagonal @ diagonal)
    a_sq = _checked_norm(a_sq, strict)
    return 1.0 / N + (N - 1) / N * a_sq


# -- measurement records and reports ---------------------------------------


@dataclass
class ProtocolOutcome:
    """Level populations underlying every estimator.

    ``ancilla_populations[n]`` is the probability of finding the ancilla in
    level n after both gates when it was prepared in level n (each entry is
    a separate preparation, so they need not sum to one).
    ``target_populations[n]`` is ``<n|rho|n>``; ``intermediate_populations``
    holds ``<n|omega1|n>`` for the same preparations, when computed.
    """

    dim: int
    ancilla_populations: np.ndarray
    target_populations: np.ndarray
    intermediate_populations: np.ndarray | None = None

    def to_dict(self) -> dict:
        out = {
            "dim": self.dim,
            "ancilla_populations": np.asarray(self.ancilla_populations).tolist(),
            "target_populations": np.asarray(self.target_populations).tolist(),
        }
        if self.intermediate_populations is not None:
            out["intermediate_populations"] = np.asarray(self.intermediate_populations).tolist()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ProtocolOutcome":
        inter = data.get("intermediate_populations")
        return cls(
            dim=int(data["dim"]),
            ancilla_populations=np.asarray(data["ancilla_populations"], dtype=float),
            target_populations=np.asarray(data["target_populations"], dtype=float),
            intermediate_populations=None if inter is None else np.asarray(inter, dtype=float),
        )


@dataclass
class EstimateReport:
    name: str
    value: float
    exact: float
    inputs_used: str = ""
    std_error: float | None = None

    @property
    def abs_error(self) -> float:
        return abs(self.value - self.exact)

    def to_dict(self) -> dict:
        out = {"name": self.name, "value": self.value}
        if self.std_error is not None:
            out["std_error"] = self.std_error
        out.update(exact=self.exact, abs_error=self.abs_error)
        if self.inputs_used:
            out["inputs_used"] = self.inputs_used
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "EstimateReport":
        return cls(
            name=data["name"],
            value=float(data["value"]),
            exact=float(data["exact"]),
            inputs_used=data.get("inputs_used", ""),
            std_error=data.get("std_error"),
        )


def measure_protocol(rho, route: str = "tripartite", intermediate: bool = True) -> ProtocolOutcome:
    """Exact populations for every level preparation of the ancilla."""
    rho = require_physical(rho, name="target state")
    N = rho.shape[0]
    P = np.empty(N)
    q = np.empty(N) if intermediate else None
    U = gates.sqrt_swap(build_generators(N))
    for n in range(N):
        omega = basis_state(n, N)
        P[n] = ancilla_after_protocol(rho, omega, route)[n, n].real
        if intermediate:
            q[n] = channel_lambda(rho, omega, U)[n, n].real
    return ProtocolOutcome(N, P, populations(rho), q)


@dataclass(frozen=True)
class Estimator:
    name: str
    dims: Callable[[int], bool]
    compute: Callable[..., float]
    inputs_used: str


def _qubit_from_populations(P, p, gens, strict=True):
    # ancilla and reference direction n = +z, i.e. level 0
    return estimate_purity_qubit(2 * p[0] - 1, 2 * P[0] - 1)


def _qutrit_from_populations(P, p, gens, strict=True):
    a3, a8 = diagonal_bloch_components(p, gens)
    return estimate_purity_qutrit(level_expectation(P, 3), a3, a8, strict=strict)


def _populations(P, p, gens, strict=True):
    return estimate_purity_populations(P, p)


def _casimir_from_populations(P, p, gens, strict=True):
    return estimate_purity_casimir(level_expectation(P, gens.dim), p, gens, strict=strict)


ESTIMATORS: dict[str, Estimator] = {
    e.name: e
    for e in (
        Estimator("qubit", lambda N: N == 2, _qubit_from_populations,
                  "P_0 (ancilla prepared in level 0), p_0"),
        Estimator("qutrit", lambda N: N == 3, _qutrit_from_populations,
                  "P_0..P_2, p_0..p_2 (for a^3, a^8)"),
        Estimator("populations", lambda N: N >= 2, _populations,
                  "P_n and p_n for every level"),
        Estimator("casimir", lambda N: N >= 2, _casimir_from_populations,
                  "P_n and p_n for every level (via a^alpha)"),
    )
}


def applicable_estimators(N: int) -> list[str]:
    return [name for name, e in ESTIMATORS.items() if e.dims(N)]


def check_estimators(names: Sequence[str] | None, N: int) -> list[str]:
    """Validate an estimator selection for dimension N (None means all applicable)."""
    if names is None:
        return applicable_estimators(N)
    names = list(names)
    for name in names:
        if name not in ESTIMATORS:
            raise EstimatorSelectionError(
                f"unknown estimator {name!r}; choose from {sorted(ESTIMATORS)}"
            )
        if not ESTIMATORS[name].dims(N):
            raise EstimatorSelectionError(f"estimator {name!r} does not apply to N={N}")
    return names


def evaluate_estimator(name: str, P, p, gens: GeneratorSet | None = None, strict: bool = True) -> float:
    P = np.asarray(P, dtype=float)
    if gens is None:
        gens = build_generators(len(P))
    check_estimators([name], gens.dim)
    return float(ESTIMATORS[name].compute(P, np.asarray(p, dtype=float), gens, strict=strict))


def estimate(
    outcome: ProtocolOutcome,
    estimators: Sequence[str] | None = None,
    exact: float | None = None,
) -> list[EstimateReport]:
    """Run the selected estimators on noiseless (or any) populations."""
    names = check_estimators(estimators, outcome.dim)
    gens = build_generators(outcome.dim)
    exact = float("nan") if exact is None else exact
    return [
        EstimateReport(
            name,
            evaluate_estimator(name, outcome.ancilla_populations, outcome.target_populations, gens),
            exact,
            ESTIMATORS[name].inputs_used,
        )
        for name in names
    ]


def exact_report(rho, estimators: Sequence[str] | None = None) -> dict:
    """JSON-ready report of noiseless estimates for ``rho``."""
    rho = require_physical(rho, name="target state")
    names = check_estimators(estimators, rho.shape[0])
    outcome = measure_protocol(rho)
    reports = estimate(outcome, names, purity_exact(rho).exact)
    out = outcome.to_dict()
    out["estimates"] = [r.to_dict() for r in reports]
    return out


def read_exact_report(data: dict) -> tuple[ProtocolOutcome, list[EstimateReport]]:
    """Inverse of :func:`exact_report` (up to the state itself)."""
    return ProtocolOutcome.from_dict(data), [EstimateReport.from_dict(e) for e in data["estimates"]]
