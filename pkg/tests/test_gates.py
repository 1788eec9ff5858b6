import numpy as np
import pytest

from puritymeter import gates
from puritymeter.algebra import build_generators

from conftest import permutation_swap


def basis_ket(N, *levels):
    psi = np.zeros(N ** len(levels), dtype=complex)
    idx = 0
    for lvl in levels:
        idx = idx * N + lvl
    psi[idx] = 1
    return psi


@pytest.mark.parametrize("N", range(2, 7))
class TestSwap:
    def test_matches_permutation(self, N):
        S = gates.swap_operator(build_generators(N))
        np.testing.assert_allclose(S, permutation_swap(N), atol=1e-12)

    def test_involution_hermitian(self, N):
        S = gates.swap_operator(build_generators(N))
        np.testing.assert_allclose(S @ S, np.eye(N * N), atol=1e-12)
        np.testing.assert_allclose(S, S.conj().T, atol=1e-12)

    def test_fixed_points(self, N):
        S = gates.swap_operator(build_generators(N))
        for i in range(N):
            np.testing.assert_allclose(S @ basis_ket(N, i, i), basis_ket(N, i, i), atol=1e-12)


def test_qubit_heisenberg_form():
    sigma = build_generators(2).generators
    S = 0.5 * (np.eye(4) + sum(np.kron(s, s) for s in sigma))
    expected = np.eye(4)[[0, 2, 1, 3]]
    np.testing.assert_allclose(S, expected, atol=1e-15)


@pytest.mark.parametrize("N", range(2, 7))
class TestSqrtSwap:
    def test_unitary(self, N):
        U = gates.sqrt_swap(build_generators(N))
        np.testing.assert_allclose(U.conj().T @ U, np.eye(N * N), atol=1e-12)

    def test_powers(self, N):
        g = build_generators(N)
        U = gates.sqrt_swap(g)
        S = gates.swap_operator(g)
        np.testing.assert_allclose(U @ U + 1j * S, 0, atol=1e-12)
        np.testing.assert_allclose(np.linalg.matrix_power(U, 4), -np.eye(N * N), atol=1e-12)

    def test_fractional(self, N, rng):
        g = build_generators(N)
        np.testing.assert_allclose(gates.fractional_swap(g, 0), np.eye(N * N), atol=1e-15)
        np.testing.assert_allclose(gates.fractional_swap(g, np.pi / 4), gates.sqrt_swap(g), atol=1e-12)
        np.testing.assert_allclose(
            gates.fractional_swap(g, np.pi / 2), -1j * gates.swap_operator(g), atol=1e-12
        )
        for _ in range(5):
            t1, t2 = rng.uniform(-3, 3, size=2)
            np.testing.assert_allclose(
                gates.fractional_swap(g, t1) @ gates.fractional_swap(g, t2),
                gates.fractional_swap(g, t1 + t2),
                atol=1e-10,
            )


def test_sqrt_swap_on_basis_state():
    U = gates.sqrt_swap(build_generators(2))
    expected = (basis_ket(2, 0, 1) - 1j * basis_ket(2, 1, 0)) / np.sqrt(2)
    np.testing.assert_allclose(U @ basis_ket(2, 0, 1), expected, atol=1e-15)


class TestEmbed:
    def test_identity(self):
        np.testing.assert_array_equal(gates.embed_gate(np.eye(9), (0, 2)), np.eye(27))

    @pytest.mark.parametrize("N", [2, 3, 4])
    def test_swap_wiring(self, N):
        S = gates.swap_operator(build_generators(N))
        S02 = gates.embed_gate(S, (0, 2))
        S12 = gates.embed_gate(S, (1, 2))
        for i in range(N):
            for j in range(N):
                for n in range(N):
                    ket = basis_ket(N, i, j, n)
                    np.testing.assert_allclose(S02 @ ket, basis_ket(N, n, j, i), atol=1e-12)
                    np.testing.assert_allclose(S12 @ S02 @ ket, basis_ket(N, n, i, j), atol=1e-12)

    def test_slot_order_matters_for_asymmetric_gate(self):
        A = np.kron(np.diag([1, -1]), np.eye(2)).astype(complex)
        np.testing.assert_allclose(gates.embed_gate(A, (0, 2)), np.kron(np.diag([1, -1]), np.eye(4)))
        np.testing.assert_allclose(
            gates.embed_gate(A, (2, 0)), np.kron(np.eye(4), np.diag([1, -1]))
        )

    @pytest.mark.parametrize("N", [2, 3, 4])
    def test_unitary_and_ordering(self, N, rng):
        U = gates.sqrt_swap(build_generators(N))
        U02 = gates.embed_gate(U, (0, 2))
        U12 = gates.embed_gate(U, (1, 2))
        for op in (U02, U12):
            np.testing.assert_allclose(op.conj().T @ op, np.eye(N**3), atol=1e-12)
        assert not np.allclose(U02 @ U12, U12 @ U02)
        np.testing.assert_allclose(gates.protocol_unitary(N), U12 @ U02, atol=1e-15)

    def test_two_sqrt_swaps_on_product(self):
        # |a, b, n> -> (|a,b,n> - i|a,n,b> - i|n,b,a> - |n,a,b>)/2
        N = 3
        a, b, n = 0, 1, 2
        out = gates.protocol_unitary(N) @ basis_ket(N, a, b, n)
        expected = 0.5 * (
            basis_ket(N, a, b, n) - 1j * basis_ket(N, a, n, b)
            - 1j * basis_ket(N, n, b, a) - basis_ket(N, n, a, b)
        )
        np.testing.assert_allclose(out, expected, atol=1e-12)

    @pytest.mark.parametrize("slots", [(0, 0), (1, 3), (-1, 2)])
    def test_bad_slots(self, slots):
        with pytest.raises(ValueError):
            gates.embed_gate(np.eye(4), slots)
