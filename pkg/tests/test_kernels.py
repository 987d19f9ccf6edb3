import numpy as np
import pytest

from tensor_ginv.errors import NoConvergence, NotHermitian
from tensor_ginv.kernels import _round_robin, hermitian_jacobi, matrix_svd, rank_from_sigma, svd_inverse


def complex_gaussian(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


@pytest.mark.parametrize("rows,cols", [(1, 1), (4, 4), (6, 3), (3, 6), (8, 1), (1, 5), (7, 7)])
def test_matrix_svd_factors(rng, rows, cols):
    m = complex_gaussian(rng, rows, cols)
    u, sigma, v = matrix_svd(m)

    assert u.shape == (rows, rows)
    assert v.shape == (cols, cols)
    assert sigma.shape == (min(rows, cols),)
    assert np.all(np.diff(sigma) <= 0.0)

    d = np.zeros((rows, cols))
    d[np.arange(sigma.size), np.arange(sigma.size)] = sigma
    np.testing.assert_allclose(u @ d @ v.conj().T, m, atol=1e-12)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(rows), atol=1e-12)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(cols), atol=1e-12)
    np.testing.assert_allclose(sigma, np.linalg.svd(m, compute_uv=False), rtol=1e-12)


def test_matrix_svd_rank_deficient(rng):
    m = complex_gaussian(rng, 6, 2) @ complex_gaussian(rng, 2, 5)
    u, sigma, v = matrix_svd(m)

    assert rank_from_sigma(sigma, m.shape) == 2
    np.testing.assert_allclose(u.conj().T @ u, np.eye(6), atol=1e-12)
    np.testing.assert_allclose(u[:, :5] * sigma @ v.conj().T, m, atol=1e-12)


def test_matrix_svd_zero_matrix():
    u, sigma, v = matrix_svd(np.zeros((3, 2)))

    np.testing.assert_array_equal(sigma, np.zeros(2))
    np.testing.assert_array_equal(u, np.eye(3))
    assert rank_from_sigma(sigma, (3, 2)) == 0


def test_matrix_svd_phase_convention(rng):
    u, _, _ = matrix_svd(complex_gaussian(rng, 5, 3))
    for k in range(3):
        column = u[:, k]
        lead = column[np.argmax(np.abs(column))]
        assert lead.imag == pytest.approx(0.0, abs=1e-15)
        assert lead.real > 0.0


def test_matrix_svd_is_deterministic(rng):
    m = complex_gaussian(rng, 5, 4)
    first = matrix_svd(m)
    second = matrix_svd(m.copy())
    for x, y in zip(first, second):
        np.testing.assert_array_equal(x, y)


def test_matrix_svd_sweep_cap(rng):
    with pytest.raises(NoConvergence):
        matrix_svd(complex_gaussian(rng, 4, 4), max_sweeps=0)


@pytest.mark.parametrize("n", [1, 2, 5, 8])
def test_round_robin_covers_each_pair_once(n):
    seen = []
    for ps, qs in _round_robin(n):
        members = list(ps) + list(qs)
        assert len(members) == len(set(members))
        assert np.all(ps < qs)
        seen.extend(zip(ps.tolist(), qs.tolist()))
    assert sorted(seen) == [(p, q) for p in range(n) for q in range(p + 1, n)]


@pytest.mark.parametrize("n", [1, 3, 6])
def test_hermitian_jacobi(rng, n):
    x = complex_gaussian(rng, n, n)
    h = x + x.conj().T
    q, lam = hermitian_jacobi(h, 1e-10)

    assert np.all(np.diff(lam) <= 0.0)
    np.testing.assert_allclose(lam, np.linalg.eigvalsh(h)[::-1], atol=1e-12)
    np.testing.assert_allclose((q * lam) @ q.conj().T, h, atol=1e-12)
    np.testing.assert_allclose(q.conj().T @ q, np.eye(n), atol=1e-12)


def test_hermitian_jacobi_on_a_larger_matrix(rng):
    x = complex_gaussian(rng, 24, 24)
    h = x + x.conj().T
    q, lam = hermitian_jacobi(h, 1e-10)
    scale = np.linalg.norm(h)

    np.testing.assert_allclose(lam, np.linalg.eigvalsh(h)[::-1], atol=1e-12 * scale)
    assert np.linalg.norm((q * lam) @ q.conj().T - h) <= 1e-12 * scale
    np.testing.assert_allclose(q.conj().T @ q, np.eye(24), atol=1e-12)


def test_hermitian_jacobi_sweep_cap(rng):
    x = complex_gaussian(rng, 4, 4)
    with pytest.raises(NoConvergence):
        hermitian_jacobi(x + x.conj().T, 1e-10, max_sweeps=0)
    diagonal = np.diag([3.0, -1.0, 2.0])
    q, lam = hermitian_jacobi(diagonal, 1e-10, max_sweeps=1)
    np.testing.assert_array_equal(lam, [3.0, 2.0, -1.0])
    np.testing.assert_array_equal(np.abs(q), np.eye(3)[:, [0, 2, 1]])


def test_hermitian_jacobi_rejects_non_hermitian(rng):
    with pytest.raises(NotHermitian):
        hermitian_jacobi(complex_gaussian(rng, 3, 3), 1e-10)


def test_svd_inverse(rng):
    m = complex_gaussian(rng, 4, 4)
    inverse, ratio = svd_inverse(m)

    assert ratio > 0.0
    np.testing.assert_allclose(inverse @ m, np.eye(4), atol=1e-11)


def test_svd_inverse_singular_returns_zero_ratio():
    inverse, ratio = svd_inverse(np.array([[1.0, 0.0], [0.0, 0.0]]))

    assert ratio == 0.0
    np.testing.assert_array_equal(inverse, np.zeros((2, 2)))
