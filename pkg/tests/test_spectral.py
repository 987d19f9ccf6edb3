import numpy as np
import pytest

from tensor_ginv.errors import (
    NotHermitian,
    NotPositiveDefinite,
    ShapeMismatch,
    SingularTensor,
    SingularTransform,
    SingularWeight,
    ZeroTensor,
)
from tensor_ginv.fixtures import load_fixture
from tensor_ginv.generators import gaussian_tensor, random_hpd, random_invertible, random_tensor, random_unitary
from tensor_ginv.geninv import mp_inverse, relative_residual
from tensor_ginv.kernels import EPS, matrix_svd
from tensor_ginv.spectral import (
    HpdFactors,
    frd_transform_witness,
    full_rank_decomposition,
    hermitian_eig,
    hermitian_inverse,
    hpd_sqrt,
    invert,
    tensor_svd,
)
from tensor_ginv.tensor import (
    DenseTensor,
    EinsteinShape,
    identity_tensor,
    is_diagonal,
    is_unitary,
    reshape_rank,
    rsh,
    zeros,
)
from tensor_ginv.tensor_io import parse_tensor
from tests.conftest import assert_tensor_close


def test_tensor_svd(rng, shape):
    a = gaussian_tensor(rng, *shape)
    f = tensor_svd(a)

    assert f.u.shape == EinsteinShape.of(shape[0], shape[0])
    assert f.v.shape == EinsteinShape.of(shape[1], shape[1])
    assert f.d.shape == a.shape
    assert is_unitary(f.u) and is_unitary(f.v) and is_diagonal(f.d)
    assert relative_residual(a, f.u @ f.d @ f.v.H) <= 1e-10
    np.testing.assert_allclose(f.sigma, np.linalg.svd(rsh(a), compute_uv=False), rtol=1e-12)


@pytest.mark.parametrize("rank", [0, 1, 2])
def test_tensor_svd_counts_rank_nonzero_values(rng, rank):
    a = random_tensor(rng, (2, 2), (3,), rank=rank)
    f = tensor_svd(a)
    cutoff = 1e-10 * max(f.sigma, default=0.0)

    assert sum(1 for s in f.sigma if s > cutoff) == reshape_rank(a, 1e-10) == rank


def test_tensor_svd_values_are_the_unfolding_values(rng, shape):
    a = gaussian_tensor(rng, *shape)
    assert tensor_svd(a).sigma == tuple(float(s) for s in matrix_svd(rsh(a)).sigma)


def test_full_rank_decomposition(rng, shape):
    rank = max(1, int(min(np.prod(shape[0]), np.prod(shape[1]))) - 1)
    a = random_tensor(rng, *shape, rank=rank)
    frd = full_rank_decomposition(a)
    eye = identity_tensor((frd.r,))

    assert frd.r == rank
    assert frd.f.shape == EinsteinShape.of(shape[0], (rank,))
    assert frd.g.shape == EinsteinShape.of((rank,), shape[1])
    assert relative_residual(a, frd.f @ frd.g) <= 1e-10
    assert relative_residual(eye, mp_inverse(frd.f) @ frd.f) <= 1e-10
    assert relative_residual(eye, frd.g @ mp_inverse(frd.g)) <= 1e-10
    assert reshape_rank(frd.f) == reshape_rank(frd.g) == reshape_rank(a) == rank


def test_full_rank_decomposition_of_zero():
    with pytest.raises(ZeroTensor):
        full_rank_decomposition(zeros(EinsteinShape.of((2,), (3,))))


def test_frd_transform_witness(rng):
    a = random_tensor(rng, (2, 2), (3,), rank=2)
    frd = full_rank_decomposition(a)
    b = random_invertible(rng, (2,))
    other = frd_transform_witness(frd, b)

    assert relative_residual(a, other.f @ other.g) <= 1e-10
    assert relative_residual(mp_inverse(other.f), invert(b) @ mp_inverse(frd.f)) <= 1e-8
    assert relative_residual(mp_inverse(other.g), mp_inverse(frd.g) @ b) <= 1e-8


def test_frd_transform_witness_rejects_bad_transforms(rng):
    frd = full_rank_decomposition(random_tensor(rng, (2, 2), (3,), rank=2))
    with pytest.raises(ShapeMismatch):
        frd_transform_witness(frd, random_invertible(rng, (3,)))
    singular = DenseTensor.from_matrix(np.array([[1.0, 0.0], [0.0, 0.0]]))
    with pytest.raises(SingularTransform):
        frd_transform_witness(frd, singular)


@pytest.mark.parametrize("modes", [(1,), (3,), (2, 2), (2, 3)])
def test_hpd_sqrt(rng, modes):
    p = random_hpd(rng, modes)
    f = hpd_sqrt(p)
    eye = identity_tensor(modes)

    assert f.positive_definite
    assert all(0.5 - 1e-12 <= lam <= 2.0 + 1e-12 for lam in f.eigenvalues)
    assert_tensor_close(f.sqrt @ f.sqrt, p, atol=1e-12)
    assert_tensor_close(f.inv_sqrt @ f.sqrt, eye, atol=1e-12)
    assert_tensor_close(f.inverse @ p, eye, atol=1e-12)
    assert_tensor_close(f.sqrt.H, f.sqrt, atol=1e-12)
    assert_tensor_close(f.sqrt @ f.inv_sqrt, eye, atol=1e-12)
    assert relative_residual(f.sqrt @ f.inv_sqrt, f.inv_sqrt @ f.sqrt) <= 1e-12


def test_hpd_inverted_factors(rng):
    f = hpd_sqrt(random_hpd(rng, (2, 2)))
    g = f.inverted()

    assert g.matrix is f.inverse
    assert g.sqrt is f.inv_sqrt
    assert g.inverted().matrix is f.matrix
    assert g.eigenvalues[0] == pytest.approx(1.0 / f.eigenvalues[-1])


def test_hpd_identity_factors():
    f = HpdFactors.identity((2, 3))
    assert f.modes == (2, 3)
    assert f.sqrt == identity_tensor((2, 3))


def test_hpd_sqrt_rejects_indefinite():
    n = DenseTensor.from_matrix(np.diag([2.0, -1.0]))
    with pytest.raises(NotPositiveDefinite):
        hpd_sqrt(n)


def test_hpd_sqrt_rejects_zero_weight():
    with pytest.raises(NotPositiveDefinite):
        hpd_sqrt(zeros(EinsteinShape.of((2,), (2,))))


def test_hpd_sqrt_allow_indefinite():
    n = DenseTensor.from_matrix(np.diag([2.0, -1.0]))
    f = hpd_sqrt(n, allow_indefinite=True)

    assert not f.positive_definite
    assert_tensor_close(f.sqrt @ f.sqrt, n, atol=1e-14)
    assert_tensor_close(f.inv_sqrt @ f.sqrt, identity_tensor((2,)), atol=1e-14)


def test_hpd_sqrt_indefinite_singular():
    with pytest.raises(SingularWeight):
        hpd_sqrt(DenseTensor.from_matrix(np.diag([1.0, 0.0, -1.0])), allow_indefinite=True)


def test_hermitian_eig(rng):
    p = random_hpd(rng, (2, 2))
    q, lam = hermitian_eig(p)
    d = DenseTensor.from_matrix(np.diag(lam), (2, 2), (2, 2))

    assert list(lam) == sorted(lam, reverse=True)
    assert relative_residual(p, q @ d @ q.H) <= 1e-12


def test_hermitian_eig_rejects_non_hermitian(rng):
    with pytest.raises(NotHermitian):
        hermitian_eig(gaussian_tensor(rng, (2,), (2,)))
    with pytest.raises(ShapeMismatch):
        hermitian_eig(gaussian_tensor(rng, (2,), (3,)))


def test_hermitian_inverse_of_indefinite_weight(rng):
    u = random_unitary(rng, (2, 2))
    d = DenseTensor.from_matrix(np.diag([3.0, -1.0, 0.5, -2.0]), (2, 2), (2, 2))
    p = u @ d @ u.H

    assert_tensor_close(hermitian_inverse(p) @ p, identity_tensor((2, 2)), atol=1e-12)
    with pytest.raises(SingularWeight):
        hermitian_inverse(DenseTensor.from_matrix(np.diag([1.0, 0.0, -1.0])))


def test_invert(rng):
    t = random_invertible(rng, (2, 3))
    assert_tensor_close(invert(t) @ t, identity_tensor((2, 3)), atol=1e-11)


def test_invert_singular(rng):
    m = np.eye(4, dtype=complex)
    m[:, 3] = 0.0
    t = DenseTensor.from_matrix(m, (2, 2), (2, 2))
    with pytest.raises(SingularTensor):
        invert(t)


@pytest.fixture
def worked_example():
    return {role: parse_tensor(p) for role, p in load_fixture("worked_example")["tensors"].items()}


def test_worked_example_factorizations(worked_example):
    a = worked_example["A"]
    sigma = tensor_svd(a).sigma
    frd = full_rank_decomposition(a)
    eye = identity_tensor((3,))

    assert reshape_rank(a) == 3
    assert sum(1 for s in sigma if s > 8 * EPS * sigma[0]) == 3
    assert frd.r == 3
    assert relative_residual(eye, mp_inverse(frd.f) @ frd.f) <= 1e-12
    assert relative_residual(eye, frd.g @ mp_inverse(frd.g)) <= 1e-12


def test_worked_example_row_weight_is_positive_definite(worked_example):
    f = hpd_sqrt(worked_example["M"])

    assert f.positive_definite
    # [[3, 0, 1], [0, 2, 0], [1, 0, 2]] has eigenvalues (5 + sqrt 5) / 2, 2 and (5 - sqrt 5) / 2
    np.testing.assert_allclose(f.eigenvalues, [(5 + np.sqrt(5)) / 2, 2.0, (5 - np.sqrt(5)) / 2], rtol=1e-12)
