import numpy as np
import pytest

from riqs import linalg

from conftest import random_hermitian, random_state


I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)


class TestKron:
    def test_identity(self):
        assert np.array_equal(linalg.kron(I2, I2), np.eye(4))

    def test_diagonal_structure(self):
        out = linalg.kron(np.diag([1.0, 2.0]), I2)
        assert np.array_equal(out, np.diag([1.0, 1.0, 2.0, 2.0]))

    def test_involution(self):
        xx = linalg.kron(SX, SX)
        assert np.max(np.abs(xx @ xx - np.eye(4))) == 0.0

    def test_associativity_and_mixed_product(self, rng):
        a, b, c, d = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(4))
        left = linalg.kron(linalg.kron(a, b), c)
        right = linalg.kron(a, linalg.kron(b, c))
        assert np.max(np.abs(left - right)) < 1e-12
        mixed = linalg.kron(a, b) @ linalg.kron(c, d)
        assert np.max(np.abs(mixed - linalg.kron(a @ c, b @ d))) < 1e-12


class TestExpmUnitary:
    def test_zero_generator(self):
        assert np.allclose(linalg.expm_unitary(np.zeros((3, 3)), 2.0), np.eye(3))

    def test_diagonal_phase(self):
        u = linalg.expm_unitary(np.diag([0.0, np.pi]), 1.0)
        assert np.max(np.abs(u - np.diag([1.0, -1.0]))) < 1e-14

    def test_unitarity_residual(self, rng):
        h = random_hermitian(rng, 8)
        u = linalg.expm_unitary(h, 1.0)
        assert np.max(np.abs(u @ u.conj().T - np.eye(8))) <= 1e-12

    def test_semigroup(self, rng):
        h = random_hermitian(rng, 5)
        u = linalg.expm_unitary(h, 0.7 + 0.4)
        v = linalg.expm_unitary(h, 0.7) @ linalg.expm_unitary(h, 0.4)
        assert np.max(np.abs(u - v)) <= 1e-10

    def test_rejects_non_hermitian(self, rng):
        bad = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        with pytest.raises(ValueError, match="Hermitian"):
            linalg.expm_unitary(bad, 1.0)


class TestEigGeneral:
    def test_diagonal(self):
        w, _, _ = linalg.eig_general(np.diag([1.0, 0.5j]))
        assert np.allclose(w, [1.0, 0.5j])

    def test_rotation_spectrum(self):
        phi = 0.73
        rot = np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])
        w, _, _ = linalg.eig_general(rot)
        assert np.allclose(sorted(w, key=lambda z: z.imag), [np.exp(-1j * phi), np.exp(1j * phi)])

    def test_residuals_and_biorthogonality(self, rng):
        m = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
        w, vr, vl = linalg.eig_general(m)
        for i in range(16):
            assert np.linalg.norm(m @ vr[:, i] - w[i] * vr[:, i]) <= 1e-10
            assert np.linalg.norm(vl[:, i].conj() @ m - w[i] * vl[:, i].conj()) <= 1e-9
        # random matrices have simple spectra: left/right pairs biorthogonal
        gram = vl.conj().T @ vr
        assert np.max(np.abs(gram - np.diag(np.diag(gram)))) < 1e-8
        assert np.max(np.abs(np.diag(gram) - 1.0)) < 1e-8

    def test_ordering(self):
        w, _, _ = linalg.eig_general(np.diag([0.5, 1.0, -1.0, 0.5j]))
        assert np.allclose(w, [1.0, -1.0, 0.5, 0.5j])

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            linalg.eig_general(np.zeros((2, 3)))


class TestPartialTrace:
    def test_product_state(self, rng):
        rho = random_state(rng, 2)
        sigma = random_state(rng, 3)
        out = linalg.partial_trace(np.kron(rho, sigma), (2, 3), keep=(0,))
        assert np.max(np.abs(out - rho)) < 1e-13

    def test_all_factors_traced(self, rng):
        rho = random_state(rng, 6)
        out = linalg.partial_trace(rho, (2, 3), keep=())
        assert out.shape == (1, 1)
        assert abs(out[0, 0] - 1.0) < 1e-13

    def test_maximally_entangled(self):
        bell = np.zeros(4, dtype=complex)
        bell[0] = bell[3] = 1 / np.sqrt(2)
        rho = np.outer(bell, bell.conj())
        for keep in ((0,), (1,)):
            out = linalg.partial_trace(rho, (2, 2), keep=keep)
            assert np.max(np.abs(out - np.eye(2) / 2)) < 1e-14

    def test_trace_and_positivity_preserved(self, rng):
        rho = random_state(rng, 12)
        out = linalg.partial_trace(rho, (2, 3, 2), keep=(1,))
        assert abs(np.trace(out) - 1.0) < 1e-12
        assert np.linalg.eigvalsh(linalg.hermitianize(out)).min() >= -1e-10

    def test_linearity(self, rng):
        a = random_state(rng, 4)
        b = random_state(rng, 4)
        lhs = linalg.partial_trace(2.0 * a - 0.5 * b, (2, 2), keep=(0,))
        rhs = 2.0 * linalg.partial_trace(a, (2, 2), (0,)) - 0.5 * linalg.partial_trace(
            b, (2, 2), (0,)
        )
        assert np.max(np.abs(lhs - rhs)) < 1e-13

    def test_rejects_inconsistent_factorization(self, rng):
        with pytest.raises(ValueError):
            linalg.partial_trace(np.eye(6), (2, 2), keep=(0,))


class TestMapMatrix:
    def test_identity_map(self):
        m = linalg.map_to_matrix(lambda x: x, 3)
        assert np.array_equal(m, np.eye(9))

    def test_phase_conjugation(self):
        phi = 1.1
        u = np.diag([1.0, np.exp(1j * phi)])
        m = linalg.map_to_matrix(lambda x: u @ x @ u.conj().T, 2)
        expected = np.diag([1.0, np.exp(1j * phi), np.exp(-1j * phi), 1.0])
        assert np.max(np.abs(m - expected)) < 1e-14

    def test_round_trip_random_cp_map(self, rng):
        kraus = [rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(3)]

        def apply(x):
            return sum(k @ x @ k.conj().T for k in kraus)

        m = linalg.map_to_matrix(apply, 3)
        for _ in range(10):
            x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
            assert np.max(np.abs(apply(x) - linalg.apply_map_matrix(m, x))) <= 1e-12

    def test_composition_is_product(self, rng):
        u = linalg.expm_unitary(random_hermitian(rng, 2), 1.0)
        v = linalg.expm_unitary(random_hermitian(rng, 2), 0.3)
        mu = linalg.map_to_matrix(lambda x: u @ x @ u.conj().T, 2)
        mv = linalg.map_to_matrix(lambda x: v @ x @ v.conj().T, 2)
        muv = linalg.map_to_matrix(lambda x: u @ (v @ x @ v.conj().T) @ u.conj().T, 2)
        assert np.max(np.abs(muv - mu @ mv)) <= 1e-10

    def test_vec_unvec_round_trip(self, rng):
        x = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        assert np.array_equal(linalg.unvec(linalg.vec(x), 4), x)


class TestFactorTools:
    def test_conjugate_on_factors_matches_dense(self, rng):
        dims = (2, 3, 2)
        rho = random_state(rng, 12)
        u = linalg.expm_unitary(random_hermitian(rng, 4), 1.0)
        out = linalg.conjugate_on_factors(rho, dims, u, (0, 2))
        big = linalg.embed_on_factors(u, dims, (0, 2))
        assert np.max(np.abs(out - big @ rho @ big.conj().T)) < 1e-12

    def test_conjugate_order_of_factors(self, rng):
        # acting factors listed in non-adjacent positions, middle spectator
        dims = (2, 2, 2)
        rho = random_state(rng, 8)
        u = linalg.expm_unitary(random_hermitian(rng, 4), 0.9)
        direct = linalg.conjugate_on_factors(rho, dims, u, (0, 2))
        big = np.kron(u, np.eye(2)).reshape(2, 2, 2, 2, 2, 2)
        big = big.transpose(0, 2, 1, 3, 5, 4).reshape(8, 8)  # reorder to (0,1,2)
        assert np.max(np.abs(direct - big @ rho @ big.conj().T)) < 1e-12

    def test_apply_superop_on_factor(self, rng):
        dims = (2, 3)
        rho = random_state(rng, 6)
        kraus = [rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(2)]
        superop = linalg.map_to_matrix(
            lambda x: sum(k @ x @ k.conj().T for k in kraus), 2
        )
        out = linalg.apply_superop_on_factor(rho, dims, superop, 0)
        expected = sum(
            np.kron(k, np.eye(3)) @ rho @ np.kron(k, np.eye(3)).conj().T for k in kraus
        )
        assert np.max(np.abs(out - expected)) < 1e-12

    def test_expectation_value(self, rng):
        dims = (2, 2, 2)
        rho = random_state(rng, 8)
        op = random_hermitian(rng, 4)
        val = linalg.expectation_value(rho, dims, op, (0, 2))
        big = linalg.embed_on_factors(op, dims, (0, 2))
        assert abs(val - np.trace(rho @ big)) < 1e-12


def test_trace_distance_basics():
    rho = np.diag([1.0, 0.0]).astype(complex)
    sigma = np.diag([0.5, 0.5]).astype(complex)
    assert abs(linalg.trace_distance(rho, rho)) < 1e-15
    assert abs(linalg.trace_distance(rho, sigma) - 0.5) < 1e-12
