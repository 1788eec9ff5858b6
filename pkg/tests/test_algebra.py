import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from puritymeter import algebra
from puritymeter.algebra import build_generators, casimir_direction, cross, star
from puritymeter.exceptions import DimensionError

PAULI = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex
)

GELLMANN = np.zeros((8, 3, 3), dtype=complex)
GELLMANN[0][[0, 1], [1, 0]] = 1
GELLMANN[1][0, 1], GELLMANN[1][1, 0] = -1j, 1j
GELLMANN[2] = np.diag([1, -1, 0])
GELLMANN[3][[0, 2], [2, 0]] = 1
GELLMANN[4][0, 2], GELLMANN[4][2, 0] = -1j, 1j
GELLMANN[5][[1, 2], [2, 1]] = 1
GELLMANN[6][1, 2], GELLMANN[6][2, 1] = -1j, 1j
GELLMANN[7] = np.diag([1, 1, -2]) / np.sqrt(3)

# qutrit ancilla directions, 0-based components (a^3 -> 2, a^8 -> 7)
N1 = np.zeros(8)
N1[2], N1[7] = np.sqrt(3) / 2, 0.5
N3 = np.zeros(8)
N3[7] = -1.0


def levi_civita():
    eps = np.zeros((3, 3, 3))
    eps[0, 1, 2] = eps[1, 2, 0] = eps[2, 0, 1] = 1
    eps[0, 2, 1] = eps[2, 1, 0] = eps[1, 0, 2] = -1
    return eps


def f_by_projection(T):
    """Solve [T^a, T^b] = 2i f^abc T^c by least squares on the flattened basis."""
    D, N, _ = T.shape
    basis = T.reshape(D, N * N).T
    f = np.zeros((D, D, D))
    for a in range(D):
        for b in range(D):
            comm = (T[a] @ T[b] - T[b] @ T[a]).reshape(-1) / 2j
            coef, *_ = np.linalg.lstsq(basis, comm, rcond=None)
            f[a, b] = coef.real
    return f


class TestBuildGenerators:
    def test_qubit_is_pauli(self):
        g = build_generators(2)
        np.testing.assert_allclose(g.generators, PAULI, atol=1e-15)
        np.testing.assert_allclose(g.f, levi_civita(), atol=1e-15)
        np.testing.assert_allclose(g.d, 0, atol=1e-15)

    def test_qutrit_is_gellmann(self):
        g = build_generators(3)
        np.testing.assert_allclose(g.generators, GELLMANN, atol=1e-15)
        np.testing.assert_allclose(g.generators[2], np.diag([1, -1, 0]), atol=1e-15)
        np.testing.assert_allclose(g.generators[7], np.diag([1, 1, -2]) / np.sqrt(3), atol=1e-15)

    def test_qutrit_known_structure_constants(self):
        g = build_generators(3)
        assert g.f[0, 1, 2] == pytest.approx(1.0)
        assert g.f[3, 4, 7] == pytest.approx(np.sqrt(3) / 2)
        assert g.f[5, 6, 7] == pytest.approx(np.sqrt(3) / 2)
        assert g.d[0, 0, 7] == pytest.approx(1 / np.sqrt(3))
        assert g.d[7, 7, 7] == pytest.approx(-1 / np.sqrt(3))

    def test_su4_f_contraction_against_projection(self):
        g = build_generators(4)
        f = f_by_projection(g.generators)
        np.testing.assert_allclose(g.f, f, atol=1e-12)
        np.testing.assert_allclose(np.einsum("abc,abd->cd", f, f), 4 * np.eye(15), atol=1e-10)

    @pytest.mark.parametrize("N", [1, 0, -3])
    def test_rejects_small_N(self, N):
        with pytest.raises(ValueError):
            build_generators(N)

    def test_is_read_only(self):
        g = build_generators(3)
        with pytest.raises(ValueError):
            g.f[0, 0, 0] = 1.0

    def test_diagonal_generators_at_square_indices(self):
        for N in range(2, 7):
            g = build_generators(N)
            for idx in range(g.size):
                offdiag = g.generators[idx] - np.diag(np.diag(g.generators[idx]))
                is_diag = np.allclose(offdiag, 0)
                assert is_diag == (idx in set(g.diagonal_indices))


@pytest.mark.parametrize("N", range(2, 7))
def test_hermitian_traceless_normalized(N):
    T = build_generators(N).generators
    np.testing.assert_allclose(T, T.conj().transpose(0, 2, 1), atol=1e-12)
    np.testing.assert_allclose(np.trace(T, axis1=1, axis2=2), 0, atol=1e-12)
    np.testing.assert_allclose(np.einsum("aij,bji->ab", T, T), 2 * np.eye(N * N - 1), atol=1e-12)


@pytest.mark.parametrize("N", range(2, 6))
class TestStructureConstants:
    def test_total_symmetry(self, N):
        g = build_generators(N)
        for perm in [(1, 0, 2), (0, 2, 1), (2, 1, 0), (1, 2, 0)]:
            sign = 1 if perm == (1, 2, 0) else -1
            np.testing.assert_allclose(g.f, sign * g.f.transpose(perm), atol=1e-12)
            np.testing.assert_allclose(g.d, g.d.transpose(perm), atol=1e-12)

    def test_contractions(self, N):
        g = build_generators(N)
        eye = np.eye(g.size)
        np.testing.assert_allclose(np.einsum("abc,abd->cd", g.f, g.f), N * eye, atol=1e-10)
        np.testing.assert_allclose(
            np.einsum("abc,abd->cd", g.d, g.d), (N**2 - 4) / N * eye, atol=1e-10
        )
        np.testing.assert_allclose(np.einsum("aab->b", g.d), 0, atol=1e-10)

    def test_ff_dd_relation(self, N):
        g = build_generators(N)
        eye = np.eye(g.size)
        lhs = np.einsum("abc,cde->abde", g.f, g.f)
        rhs = (2 / N) * (np.einsum("ad,be->abde", eye, eye) - np.einsum("bd,ae->abde", eye, eye))
        rhs += np.einsum("adc,ceb->abde", g.d, g.d) - np.einsum("bdc,cea->abde", g.d, g.d)
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)

    def test_product_decomposition(self, N):
        g = build_generators(N)
        T = g.generators
        for a in range(g.size):
            for b in range(g.size):
                expected = (2 / N) * (a == b) * np.eye(N) + np.einsum(
                    "c,cij->ij", g.d[a, b] + 1j * g.f[a, b], T
                )
                np.testing.assert_allclose(T[a] @ T[b], expected, atol=1e-10)

    def test_completeness(self, N):
        T = build_generators(N).generators
        I = np.eye(N)
        expected = -(2 / N) * np.einsum("ij,kl->ijkl", I, I) + 2 * np.einsum("il,jk->ijkl", I, I)
        np.testing.assert_allclose(np.einsum("aij,akl->ijkl", T, T), expected, atol=1e-10)


class TestProducts:
    def test_cross_qubit(self):
        g = build_generators(2)
        np.testing.assert_allclose(cross([1, 0, 0], [0, 1, 0], g), [0, 0, 1])

    def test_cross_diagonal_sector_vanishes(self):
        g = build_generators(3)
        assert np.sum(cross(N1, N3, g) ** 2) == pytest.approx(0, abs=1e-15)

    def test_star_vanishes_for_qubits(self, rng):
        g = build_generators(2)
        np.testing.assert_allclose(star(rng.normal(size=3), rng.normal(size=3), g), 0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            cross(np.ones(3), np.ones(8), build_generators(3))
        with pytest.raises(DimensionError):
            star(np.ones(8), np.ones(8), build_generators(2))

    @given(N=st.integers(2, 5), seed=st.integers(0, 2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_product_symmetries(self, N, seed):
        g = build_generators(N)
        r = np.random.default_rng(seed)
        a, b = r.normal(size=(2, g.size))
        np.testing.assert_allclose(cross(a, b, g), -cross(b, a, g), atol=1e-12)
        np.testing.assert_allclose(cross(a, a, g), 0, atol=1e-12)
        np.testing.assert_allclose(star(a, b, g), star(b, a, g), atol=1e-12)
        n = b / np.linalg.norm(b)
        assert n @ star(a, n, g) == pytest.approx(a @ star(n, n, g), abs=1e-12)

    def test_qutrit_cross_square_identity(self, rng):
        g = build_generators(3)
        for _ in range(100):
            a = rng.normal(size=8)
            n = rng.normal(size=8)
            n /= np.linalg.norm(n)
            lhs = np.sum(cross(a, n, g) ** 2)
            na = star(n, a, g)
            rhs = (2 / 3) * (a @ a - (n @ a) ** 2) - na @ na + star(a, a, g) @ star(n, n, g)
            assert lhs == pytest.approx(rhs, abs=1e-10)


class TestCasimirDirections:
    def test_qutrit(self):
        g = build_generators(3)
        np.testing.assert_array_equal(casimir_direction(2, g), np.eye(8)[2])
        np.testing.assert_array_equal(casimir_direction(3, g), np.eye(8)[7])

    def test_qubit(self):
        np.testing.assert_array_equal(casimir_direction(2, build_generators(2)), [0, 0, 1])

    @pytest.mark.parametrize("N", range(2, 7))
    def test_selects_diagonal_generator(self, N):
        g = build_generators(N)
        for k in range(2, N + 1):
            n = casimir_direction(k, g)
            assert np.count_nonzero(n) == 1
            T = np.einsum("c,cij->ij", n, g.generators)
            np.testing.assert_allclose(T, g.generators[k**2 - 2])
            np.testing.assert_allclose(T, np.diag(np.diag(T)))

    @pytest.mark.parametrize("k", [1, 4])
    def test_out_of_range(self, k):
        with pytest.raises(ValueError):
            casimir_direction(k, build_generators(3))

    def test_level_directions_qutrit(self):
        g = build_generators(3)
        np.testing.assert_allclose(algebra.level_direction(0, g), N1, atol=1e-15)
        np.testing.assert_allclose(algebra.level_direction(2, g), N3, atol=1e-15)
        n2 = N1.copy()
        n2[2] *= -1
        np.testing.assert_allclose(algebra.level_direction(1, g), n2, atol=1e-15)

    @pytest.mark.parametrize("N", range(2, 7))
    def test_gamma_gram(self, N):
        gamma = algebra.level_coefficients(build_generators(N))
        np.testing.assert_allclose(gamma.T @ gamma, N / (N - 1) * np.eye(N - 1), atol=1e-10)

    @pytest.mark.parametrize("N", range(2, 7))
    def test_summation_identity(self, N, rng):
        g = build_generators(N)
        diag = g.diagonal_indices
        for _ in range(20):
            a = rng.normal(size=g.size)
            lhs = sum(np.sum(cross(a, algebra.level_direction(i, g), g) ** 2) for i in range(N))
            assert lhs == pytest.approx(N / (N - 1) * (a @ a - a[diag] @ a[diag]), abs=1e-10)
