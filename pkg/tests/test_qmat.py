import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liiflow.qmat import (
    ConvergenceError,
    DensityMatrix,
    InvalidStateError,
    PureState,
    approx_equal,
    eig_hermitian,
    haar_random_pure,
    haar_random_pure_batch,
    ket,
    kron,
    matrix_sqrt_psd,
    partial_trace,
    permute_subsystems,
    purify,
    reduce_pure,
)

from .conftest import bell_vector, projector

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return x + x.conj().T


def random_density(dims, seed, rank=None):
    rng = np.random.default_rng(seed)
    d = int(np.prod(dims))
    r = rank or d
    x = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    rho = x @ x.conj().T
    return DensityMatrix(rho / np.trace(rho).real, dims)


class TestKron:
    def test_identity(self):
        assert approx_equal(kron(np.eye(2), np.eye(2)), np.eye(4), 0)

    def test_scalar_factor(self):
        assert approx_equal(kron(SX, [[1]]), SX, 0)

    def test_zz(self):
        assert approx_equal(kron(SZ, SZ), np.diag([1, -1, -1, 1]), 0)

    def test_rectangular_shape(self):
        a = np.arange(6).reshape(2, 3)
        b = np.arange(2).reshape(2, 1)
        assert kron(a, b).shape == (4, 3)
        assert approx_equal(kron(a, b), np.kron(a, b), 0)


class TestStates:
    def test_density_validation_names_violation(self):
        with pytest.raises(InvalidStateError, match="trace"):
            DensityMatrix(np.eye(2), [2])
        with pytest.raises(InvalidStateError, match="Hermitian"):
            DensityMatrix([[0.5, 0.1], [0.3, 0.5]], [2])
        with pytest.raises(InvalidStateError, match="positive semidefinite"):
            DensityMatrix(np.diag([1.2, -0.2]), [2])
        with pytest.raises(InvalidStateError, match="shape"):
            DensityMatrix(np.eye(4) / 4, [2])

    def test_round_off_negative_eigenvalue_accepted(self):
        DensityMatrix(np.diag([1 + 5e-10, -5e-10]), [2])

    def test_pure_norm(self):
        with pytest.raises(InvalidStateError, match="norm"):
            PureState([1, 1], [2])
        with pytest.raises(InvalidStateError):
            PureState([1, 0, 0], [2])


class TestPartialTrace:
    def test_bell_reduction(self):
        rho = DensityMatrix(projector(bell_vector()), [2, 2])
        assert approx_equal(partial_trace(rho, [0]).matrix, np.eye(2) / 2, 1e-12)

    def test_product_reduction(self):
        a = np.diag([0.25, 0.75])
        b = np.array([[0.6, 0.2j], [-0.2j, 0.4]])
        rho = DensityMatrix(np.kron(a, b), [2, 2])
        assert approx_equal(partial_trace(rho, [1]).matrix, b, 1e-12)
        assert approx_equal(partial_trace(rho, [0]).matrix, a, 1e-12)

    def test_nested_reductions_agree(self):
        rho = haar_random_pure([2, 2, 2], 11).density()
        two_step = partial_trace(partial_trace(rho, [0, 2]), [0])
        assert approx_equal(two_step.matrix, partial_trace(rho, [0]).matrix, 1e-12)

    def test_reduce_pure_matches_partial_trace(self):
        psi = haar_random_pure([2, 3, 2], 5)
        for keep in ([0], [1], [2], [0, 2], [1, 2]):
            assert approx_equal(
                reduce_pure(psi, keep).matrix, partial_trace(psi.density(), keep).matrix, 1e-12
            )

    def test_errors(self):
        rho = haar_random_pure([2, 2], 0).density()
        with pytest.raises(IndexError):
            partial_trace(rho, [2])
        with pytest.raises(ValueError):
            partial_trace(rho, [])
        with pytest.raises(ValueError):
            partial_trace(rho, [1, 0])

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**31), n=st.integers(2, 4))
    def test_every_single_party_reduction_has_unit_trace(self, seed, n):
        rho = random_density([2] * n, seed)
        for k in range(n):
            assert abs(np.trace(partial_trace(rho, [k]).matrix) - 1) <= 1e-10


class TestPermute:
    def test_identity(self):
        rho = random_density([2, 3], 1)
        assert approx_equal(permute_subsystems(rho, [0, 1]).matrix, rho.matrix, 0)

    def test_swap_product(self):
        a = np.diag([0.1, 0.9])
        b = np.diag([0.2, 0.3, 0.5])
        rho = DensityMatrix(np.kron(a, b), [2, 3])
        swapped = permute_subsystems(rho, [1, 0])
        assert swapped.dims == (3, 2)
        assert approx_equal(swapped.matrix, np.kron(b, a), 1e-15)

    def test_double_swap(self):
        rho = random_density([2, 2], 2)
        twice = permute_subsystems(permute_subsystems(rho, [1, 0]), [1, 0])
        assert approx_equal(twice.matrix, rho.matrix, 0)

    def test_malformed(self):
        with pytest.raises(ValueError):
            permute_subsystems(random_density([2, 2], 3), [0, 0])

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**31), perm=st.permutations([0, 1, 2]))
    def test_spectrum_preserved(self, seed, perm):
        rho = random_density([2, 2, 2], seed)
        w0 = eig_hermitian(rho.matrix)[0]
        w1 = eig_hermitian(permute_subsystems(rho, perm).matrix)[0]
        assert np.max(np.abs(w0 - w1)) <= 1e-10


class TestEigHermitian:
    def test_diagonal(self):
        w, v = eig_hermitian(np.diag([1.0, 2.0, 3.0]))
        assert approx_equal(w, [1, 2, 3], 0)
        assert approx_equal(v, np.eye(3), 0)

    def test_pauli_x(self):
        w, _ = eig_hermitian(SX)
        assert approx_equal(w, [-1, 1], 1e-14)

    @pytest.mark.parametrize("n", [2, 3, 4, 8, 16])
    def test_reconstruction(self, n):
        h = random_hermitian(n, n)
        w, v = eig_hermitian(h)
        assert np.max(np.abs((v * w) @ v.conj().T - h)) <= 1e-9
        assert np.max(np.abs(v.conj().T @ v - np.eye(n))) <= 1e-9
        assert abs(np.sum(w) - np.trace(h).real) <= 1e-9
        # LAPACK as an independent spectrum check
        assert np.max(np.abs(w - np.linalg.eigvalsh(h))) <= 1e-9

    def test_batched_matches_single(self):
        hs = np.stack([random_hermitian(4, s) for s in range(5)])
        wb, vb = eig_hermitian(hs)
        for k in range(5):
            w, _ = eig_hermitian(hs[k])
            assert approx_equal(wb[k], w, 1e-12)
            assert np.max(np.abs((vb[k] * wb[k]) @ vb[k].conj().T - hs[k])) <= 1e-9

    def test_degenerate_and_tiny_offdiagonals(self):
        h = np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex)
        h[2, 3] = h[3, 2] = 1e-310
        w, _ = eig_hermitian(h)
        assert approx_equal(w, [0, 0, 0.5, 0.5], 1e-15)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            eig_hermitian(np.array([[0, 1], [0, 0]]))

    def test_sweep_cap(self):
        with pytest.raises(ConvergenceError):
            eig_hermitian(random_hermitian(6, 0), max_sweeps=1)


class TestSqrt:
    def test_identity(self):
        assert approx_equal(matrix_sqrt_psd(np.eye(4)), np.eye(4), 1e-14)

    def test_diagonal(self):
        assert approx_equal(matrix_sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), 1e-14)

    def test_random_psd(self):
        m = random_density([2, 2], 9).matrix
        r = matrix_sqrt_psd(m)
        assert np.max(np.abs(r @ r - m)) <= 1e-8

    def test_clamps_round_off(self):
        r = matrix_sqrt_psd(np.diag([1.0, -5e-10]))
        assert approx_equal(r, np.diag([1.0, 0.0]), 0)

    def test_rejects_negative(self):
        with pytest.raises(InvalidStateError):
            matrix_sqrt_psd(np.diag([1.0, -1e-6]))


class TestPurify:
    def test_pure_input_gets_trivial_ancilla(self):
        psi = purify(DensityMatrix(np.diag([1.0, 0.0]), [2]))
        assert psi.dims == (2, 1)
        assert approx_equal(np.abs(psi.amplitudes), [1, 0], 1e-12)

    def test_maximally_mixed(self):
        psi = purify(DensityMatrix(np.eye(2) / 2, [2]))
        assert psi.dims == (2, 2)
        schmidt = np.linalg.svd(psi.amplitudes.reshape(2, 2), compute_uv=False)
        assert approx_equal(schmidt, [2**-0.5] * 2, 1e-12)

    def test_rank_two_round_trip(self):
        rho = random_density([2, 2], 4, rank=2)
        psi = purify(rho)
        assert psi.dims == (2, 2, 2)
        assert np.max(np.abs(reduce_pure(psi, [0, 1]).matrix - rho.matrix)) <= 1e-9

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**31), rank=st.integers(1, 4))
    def test_round_trip_property(self, seed, rank):
        rho = random_density([2, 2], seed, rank=rank)
        psi = purify(rho)
        assert psi.dims[-1] == rank
        assert np.max(np.abs(reduce_pure(psi, [0, 1]).matrix - rho.matrix)) <= 1e-9


class TestHaar:
    def test_normalized(self):
        psi = haar_random_pure([2], 123)
        assert abs(np.linalg.norm(psi.amplitudes) - 1) <= 1e-12

    def test_deterministic(self):
        a = haar_random_pure([2, 2, 2], 99)
        b = haar_random_pure([2, 2, 2], 99)
        assert np.array_equal(a.amplitudes, b.amplitudes)

    def test_first_moment(self):
        samples = haar_random_pure_batch([2], 10_000, 2024)
        mean = np.mean([abs(s.amplitudes[0]) ** 2 for s in samples])
        assert abs(mean - 0.5) <= 0.02

    def test_rejects_trivial_dims(self):
        with pytest.raises(InvalidStateError):
            haar_random_pure([1, 2], 0)

    def test_ket_helper(self):
        assert approx_equal(ket("10"), [0, 0, 1, 0], 0)
        assert approx_equal(ket("12", [2, 3]), np.eye(6)[5], 0)
