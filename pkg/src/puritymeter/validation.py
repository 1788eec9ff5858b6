"""Self-checks of the algebra, gates, routes and estimators.

Each check returns the worst deviation found and, on failure, a short
description of the first counterexample. Checks fetch generators through
``algebra.build_generators`` at call time so a corrupted generator set can
be injected for negative-control testing.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import algebra, gates, protocol, states

TOL = 1e-10
GATE_TOL = 1e-12


@dataclass
class CheckResult:
    name: str
    dim: int
    passed: bool
    max_error: float
    counterexample: str = ""


@dataclass(frozen=True)
class Check:
    name: str
    run: Callable[[int, int, np.random.Generator], tuple[float, str]]
    tol: float = TOL
    dims: Callable[[int], bool] = lambda N: True


CHECKS: list[Check] = []


def check(name: str, tol: float = TOL, dims=lambda N: True):
    def register(fn):
        CHECKS.append(Check(name, fn, tol, dims))
        return fn

    return register


def _worst(errors) -> tuple[float, str]:
    """Pick the largest error from ``(error, description)`` pairs."""
    worst, where = 0.0, ""
    for err, desc in errors:
        if err > worst:
            worst, where = err, desc
    return worst, where


def _random_bloch(N, rng):
    return states.density_to_bloch(states.random_density(N, rng.integers(1, N + 1), rng))


@check("T^a Hermitian and traceless")
def _hermitian(N, trials, rng):
    T = algebra.build_generators(N).generators
    herm = np.abs(T - T.conj().transpose(0, 2, 1)).max(axis=(1, 2))
    trace = np.abs(np.trace(T, axis1=1, axis2=2))
    return _worst((e, f"generator a={a}") for a, e in enumerate(np.maximum(herm, trace)))


@check("Tr(T^a T^b) = 2 delta^ab")
def _normalization(N, trials, rng):
    T = algebra.build_generators(N).generators
    gram = np.einsum("aij,bji->ab", T, T)
    err = np.abs(gram - 2 * np.eye(len(T)))
    a, b = np.unravel_index(err.argmax(), err.shape)
    return float(err.max()), f"a={a}, b={b}"


@check("f totally antisymmetric, d totally symmetric")
def _symmetry(N, trials, rng):
    g = algebra.build_generators(N)
    errs = []
    for perm, sign in (((1, 0, 2), -1), ((0, 2, 1), -1), ((2, 1, 0), -1)):
        errs.append((float(np.abs(g.f - sign * g.f.transpose(perm)).max()), f"f under {perm}"))
        errs.append((float(np.abs(g.d - g.d.transpose(perm)).max()), f"d under {perm}"))
    return _worst(errs)


@check("f^abc f^abd = N delta^cd")
def _ff(N, trials, rng):
    g = algebra.build_generators(N)
    err = np.abs(np.einsum("abc,abd->cd", g.f, g.f) - N * np.eye(g.size))
    c, d = np.unravel_index(err.argmax(), err.shape)
    return float(err.max()), f"c={c}, d={d}"


@check("d^abc d^abd = (N^2-4)/N delta^cd and d^aab = 0")
def _dd(N, trials, rng):
    g = algebra.build_generators(N)
    err = np.abs(np.einsum("abc,abd->cd", g.d, g.d) - (N**2 - 4) / N * np.eye(g.size))
    trace_err = np.abs(np.einsum("aab->b", g.d))
    c, d = np.unravel_index(err.argmax(), err.shape)
    return _worst([(float(err.max()), f"c={c}, d={d}"),
                   (float(trace_err.max()), f"d^aab at b={trace_err.argmax()}")])


@check("f^abc f^cde = (2/N)(dd - dd) + d^adc d^ceb - d^bdc d^cea")
def _ffdd(N, trials, rng):
    g = algebra.build_generators(N)
    D = g.size
    errs = []
    for _ in range(max(trials, 1) * 20):
        a, b, d, e = (int(x) for x in rng.integers(0, D, size=4))
        lhs = g.f[a, b, :] @ g.f[:, d, e]
        rhs = (2 / N) * ((a == d) * (b == e) - (b == d) * (a == e)) \
            + g.d[a, d, :] @ g.d[:, e, b] - g.d[b, d, :] @ g.d[:, e, a]
        errs.append((abs(lhs - rhs), f"a={a}, b={b}, d={d}, e={e}"))
    return _worst(errs)


@check("T^a T^b = (2/N) delta^ab + (d^abc + i f^abc) T^c")
def _product(N, trials, rng):
    g = algebra.build_generators(N)
    T = g.generators
    lhs = np.einsum("aij,bjk->abik", T, T)
    rhs = (2 / N) * np.einsum("ab,ik->abik", np.eye(g.size), np.eye(N)) \
        + np.einsum("abc,cik->abik", g.d + 1j * g.f, T)
    err = np.abs(lhs - rhs).max(axis=(2, 3))
    a, b = np.unravel_index(err.argmax(), err.shape)
    return float(err.max()), f"a={a}, b={b}"


@check("sum_a T^a_ij T^a_kl = -(2/N) d_ij d_kl + 2 d_il d_jk")
def _completeness(N, trials, rng):
    T = algebra.build_generators(N).generators
    lhs = np.einsum("aij,akl->ijkl", T, T)
    I = np.eye(N)
    rhs = -(2 / N) * np.einsum("ij,kl->ijkl", I, I) + 2 * np.einsum("il,jk->ijkl", I, I)
    err = np.abs(lhs - rhs)
    return float(err.max()), "indices " + str(np.unravel_index(err.argmax(), err.shape))


@check("qutrit (a x n)^2 = 2/3[a^2 - (n.a)^2] - (n*a)^2 + (a*a).(n*n)", dims=lambda N: N == 3)
def _acrossb(N, trials, rng):
    g = algebra.build_generators(N)
    errs = []
    for _ in range(max(trials, 1) * 10):
        a = rng.standard_normal(g.size)
        n = rng.standard_normal(g.size)
        n /= np.linalg.norm(n)
        lhs = np.sum(algebra.cross(a, n, g) ** 2)
        na = algebra.star(n, a, g)
        rhs = (2 / 3) * (a @ a - (n @ a) ** 2) - na @ na \
            + algebra.star(a, a, g) @ algebra.star(n, n, g)
        errs.append((abs(lhs - rhs), f"a={a.round(6).tolist()}, n={n.round(6).tolist()}"))
    return _worst(errs)


@check("qutrit (a x n_k)^2 closed forms", dims=lambda N: N == 3)
def _qutrit_closed_forms(N, trials, rng):
    g = algebra.build_generators(N)
    # 0-based positions of a^1, a^2, a^4 ... a^7
    groups = ([0, 1, 3, 4], [0, 1, 5, 6], [3, 4, 5, 6])
    errs = []
    for _ in range(max(trials, 1) * 10):
        a = rng.standard_normal(g.size)
        for k, idx in enumerate(groups):
            n_k = algebra.level_direction(k, g)
            lhs = np.sum(algebra.cross(a, n_k, g) ** 2)
            errs.append((abs(lhs - 0.75 * np.sum(a[idx] ** 2)), f"k={k}, a={a.round(6).tolist()}"))
    return _worst(errs)


@check("SWAP from generators equals basis permutation", tol=GATE_TOL)
def _swap(N, trials, rng):
    S = gates.swap_operator(algebra.build_generators(N))
    return float(np.abs(S - gates.permutation_swap(N)).max()), f"N={N}"


@check("U unitary, U^2 = -iS, U^4 = -I", tol=GATE_TOL)
def _sqrt_swap(N, trials, rng):
    g = algebra.build_generators(N)
    U = gates.sqrt_swap(g)
    S = gates.swap_operator(g)
    I = np.eye(N * N)
    U2 = U @ U
    return _worst([
        (float(np.abs(U.conj().T @ U - I).max()), "U^dag U - I"),
        (float(np.abs(U2 + 1j * S).max()), "U^2 + iS"),
        (float(np.abs(U2 @ U2 + I).max()), "U^4 + I"),
    ])


@check("fractional SWAP group law")
def _group_law(N, trials, rng):
    g = algebra.build_generators(N)
    errs = []
    for _ in range(max(trials, 1)):
        t1, t2 = rng.uniform(-np.pi, np.pi, size=2)
        lhs = gates.fractional_swap(g, t1) @ gates.fractional_swap(g, t2)
        errs.append((float(np.abs(lhs - gates.fractional_swap(g, t1 + t2)).max()),
                     f"gt1={t1:.6f}, gt2={t2:.6f}"))
    return _worst(errs)


@check("sum_i (a x n_i)^2 = N/(N-1)(a^2 - sum_alpha a_alpha^2)")
def _summation(N, trials, rng):
    g = algebra.build_generators(N)
    diag = g.diagonal_indices
    errs = []
    for _ in range(max(trials, 1) * 5):
        a = rng.standard_normal(g.size)
        lhs = sum(np.sum(algebra.cross(a, algebra.level_direction(i, g), g) ** 2) for i in range(N))
        rhs = N / (N - 1) * (a @ a - a[diag] @ a[diag])
        errs.append((abs(lhs - rhs), f"a={a.round(6).tolist()}"))
    return _worst(errs)


@check("sum_i gamma_alpha gamma_beta = N/(N-1) delta and n_i maps to |i><i|")
def _gamma(N, trials, rng):
    g = algebra.build_generators(N)
    gamma = algebra.level_coefficients(g)
    errs = [(float(np.abs(gamma.T @ gamma - N / (N - 1) * np.eye(N - 1)).max()), "gamma Gram")]
    for i in range(N):
        rho = states.bloch_to_density(algebra.level_direction(i, g), g)
        errs.append((float(np.abs(rho - states.basis_state(i, N)).max()), f"level {i}"))
    return _worst(errs)


@check("Bloch/density roundtrip and purity from Bloch")
def _roundtrip(N, trials, rng):
    g = algebra.build_generators(N)
    errs = []
    for t in range(trials):
        rho = states.random_density(N, rng.integers(1, N + 1), rng)
        a = states.density_to_bloch(rho, g)
        errs.append((float(np.abs(states.bloch_to_density(a, g) - rho).max()), f"trial {t}"))
        errs.append((abs(states.purity_from_bloch(a) - states.purity_exact(rho).exact),
                     f"trial {t} purity"))
    return _worst(errs)


@check("tripartite, sequential and Bloch routes agree")
def _routes(N, trials, rng):
    errs = []
    for t in range(trials):
        rho = states.random_density(N, rng.integers(1, N + 1), rng)
        omega = states.random_density(N, 1, rng)
        ref = protocol.ancilla_after_protocol(rho, omega, "tripartite")
        for route in ("sequential", "bloch"):
            other = protocol.ancilla_after_protocol(rho, omega, route)
            errs.append((float(np.abs(other - ref).max()), f"trial {t}, route {route}"))
    return _worst(errs)


@check("P_n = 1/4 - <n|rho^2|n>/2 + 3p_n/4 + p_n^2/2")
def _per_level(N, trials, rng):
    errs = []
    for t in range(trials):
        rho = states.random_density(N, rng.integers(1, N + 1), rng)
        outcome = protocol.measure_protocol(rho, intermediate=False)
        rho2 = states.purity_exact(rho).per_level_rho2
        law = protocol.level_probability(rho2, outcome.target_populations)
        err = np.abs(outcome.ancilla_populations - law)
        errs.append((float(err.max()), f"trial {t}, level {err.argmax()}"))
    return _worst(errs)


@check("estimators reproduce Tr(rho^2) on exact inputs", tol=1e-9)
def _estimators(N, trials, rng):
    errs = []
    for t in range(trials):
        rho = states.random_density(N, rng.integers(1, N + 1), rng)
        exact = states.purity_exact(rho).exact
        for rep in protocol.estimate(protocol.measure_protocol(rho), exact=exact):
            errs.append((rep.abs_error, f"trial {t}, estimator {rep.name}"))
    return _worst(errs)


def run_validation(dims=range(2, 6), trials: int = 10, seed: int = 0) -> list[CheckResult]:
    """Run every applicable check for every N in ``dims``."""
    results = []
    for N in dims:
        for idx, chk in enumerate(CHECKS):
            if not chk.dims(N):
                continue
            rng = np.random.default_rng([seed, N, idx])
            err, where = chk.run(N, trials, rng)
            passed = bool(err <= chk.tol)
            example = "" if passed else f"N={N}, seed={seed}, {where} (error {err:.3e})"
            results.append(CheckResult(chk.name, N, passed, float(err), example))
    return results


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  N  status  max error"]
    for r in results:
        status = "pass" if r.passed else "FAIL"
        lines.append(f"{r.name:<{width}}  {r.dim}  {status:<6}  {r.max_error:.2e}")
    return "\n".join(lines)
