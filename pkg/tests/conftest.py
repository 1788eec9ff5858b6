import numpy as np
import pytest

from puritymeter import algebra


def permutation_swap(N):
    S = np.zeros((N * N, N * N))
    for i in range(N):
        for j in range(N):
            S[j * N + i, i * N + j] = 1.0
    return S


def _apply_two_body(psi, U, s, t, N):
    """Apply a two-body gate to axes (s, t) of a 3-qudit state vector."""
    psi = psi.reshape(N, N, N)
    psi = np.moveaxis(psi, (s, t), (0, 1))
    psi = (U @ psi.reshape(N * N, N)).reshape(N, N, N)
    return np.moveaxis(psi, (0, 1), (s, t)).reshape(-1)


def oracle_ancilla_state(rho, omega):
    """Brute-force ancilla state after both gates.

    Works on state vectors from the spectral decompositions of rho and
    omega, with SWAP as an explicit permutation matrix.
    """
    N = rho.shape[0]
    U = (np.eye(N * N) - 1j * permutation_swap(N)) / np.sqrt(2)
    w_rho, v_rho = np.linalg.eigh(rho)
    w_om, v_om = np.linalg.eigh(omega)
    out = np.zeros((N, N), dtype=complex)
    for pa, va in zip(w_rho, v_rho.T):
        for pb, vb in zip(w_rho, v_rho.T):
            for pc, vc in zip(w_om, v_om.T):
                weight = pa * pb * pc
                if abs(weight) < 1e-15:
                    continue
                psi = np.kron(np.kron(va, vb), vc)
                psi = _apply_two_body(psi, U, 0, 2, N)
                psi = _apply_two_body(psi, U, 1, 2, N)
                m = psi.reshape(N * N, N)
                out += weight * (m.T @ m.conj())
    return out


def oracle_return_probability(rho, n):
    N = rho.shape[0]
    omega = np.zeros((N, N), dtype=complex)
    omega[n, n] = 1
    return float(oracle_ancilla_state(rho, omega)[n, n].real)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def faulty_generators(monkeypatch):
    """Generator sets whose f tensor has one totally antisymmetric triple sign-flipped.

    For N >= 3 the triple (a^4, a^5, a^8) is flipped in all six index
    orders, which keeps f antisymmetric but breaks f^abc f^abd = N delta^cd.
    """
    real_build = algebra.build_generators

    def build(N):
        gens = real_build(N)
        if N < 3:
            return gens
        f = gens.f.copy()
        triple = (3, 4, 7)
        for perm in ((0, 1, 2), (1, 2, 0), (2, 0, 1), (1, 0, 2), (0, 2, 1), (2, 1, 0)):
            idx = tuple(triple[p] for p in perm)
            f[idx] = -f[idx]
        return algebra.GeneratorSet(N, gens.generators, f, gens.d)

    monkeypatch.setattr(algebra, "build_generators", build)
    return build


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): acceptance criterion with a short label")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is not None and report.when == "call":
        report.user_properties.append(("acceptance", marker.args[0]))


def pytest_terminal_summary(terminalreporter):
    lines = []
    for status in ("passed", "failed"):
        for rep in terminalreporter.stats.get(status, []):
            props = dict(rep.user_properties)
            if "acceptance" in props:
                verdict = "PASS" if rep.passed else "FAIL"
                detail = props.get("detail", "")
                lines.append((props["acceptance"], f"{verdict}  {props['acceptance']}  {detail}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
