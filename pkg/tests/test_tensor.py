import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from tensor_ginv.errors import ContractionMismatch, NonFiniteEntries, ShapeMismatch
from tensor_ginv.generators import gaussian_tensor, make_rng, random_tensor, random_unitary
from tensor_ginv.tensor import (
    DenseTensor,
    EinsteinShape,
    as_modes,
    conj_transpose,
    einstein_product,
    identity_tensor,
    is_diagonal,
    is_hermitian,
    is_idempotent,
    is_skew_hermitian,
    is_unitary,
    reshape_rank,
    rsh,
    rsh_inv,
    structural_predicates,
    zeros,
)
from tests.conftest import assert_tensor_close

modes = st.lists(st.integers(min_value=1, max_value=3), min_size=1, max_size=2).map(tuple)
seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def test_rsh_of_matrix_is_unchanged():
    m = np.arange(6.0).reshape(3, 2)
    t = DenseTensor.from_matrix(m)

    np.testing.assert_array_equal(rsh(t), m)


def test_rsh_index_map():
    array = np.zeros((2, 3, 2))
    array[1, 0, 0] = 7.0
    t = DenseTensor.from_array(array, 2)

    m = rsh(t)
    assert m.shape == (6, 2)
    assert m[1, 0] == 7.0
    assert np.count_nonzero(m) == 1


def test_rsh_index_map_general(rng):
    t = gaussian_tensor(rng, (2, 3), (4,))
    m = rsh(t)
    for i1 in range(2):
        for i2 in range(3):
            for j in range(4):
                assert m[i1 + 2 * i2, j] == t.array[i1, i2, j]


def test_rsh_is_a_view(rng):
    t = gaussian_tensor(rng, (2, 2), (3,))
    assert np.shares_memory(rsh(t), t.array)


def test_round_trip_is_bit_exact(rng):
    t = gaussian_tensor(rng, (2, 2), (3,))
    assert rsh_inv(rsh(t), t.shape) == t

    m = rng.standard_normal((6, 2)) + 1j * rng.standard_normal((6, 2))
    np.testing.assert_array_equal(rsh(rsh_inv(m, EinsteinShape.of((2, 3), (2,)))), m)


def test_rsh_inv_scalar():
    t = rsh_inv(np.array([[2.5]]), EinsteinShape.of((1,), (1,)))
    assert t.entries.tolist() == [2.5]


def test_rsh_inv_rejects_wrong_counts():
    with pytest.raises(ShapeMismatch):
        rsh_inv(np.zeros((6, 2)), EinsteinShape.of((2, 2), (2,)))


@pytest.mark.parametrize("row_modes,col_modes", [((0,), (2,)), ((), ()), ((2 ** 16, 2 ** 16), (1,))])
def test_invalid_shapes(row_modes, col_modes):
    with pytest.raises(ShapeMismatch):
        EinsteinShape.of(row_modes, col_modes)


def test_empty_mode_group_is_allowed():
    shape = EinsteinShape.of((2, 3), ())
    assert shape.row_count == 6
    assert shape.col_count == 1


def test_non_finite_entries_rejected():
    with pytest.raises(NonFiniteEntries):
        DenseTensor(EinsteinShape.of((2,), (1,)), np.array([1.0, np.nan]))


def test_tensor_is_read_only(rng):
    t = gaussian_tensor(rng, (2,), (2,))
    with pytest.raises(ValueError):
        t.array[0, 0] = 1.0


def test_identity_law(rng):
    a = gaussian_tensor(rng, (2, 3), (2,))
    assert_tensor_close(identity_tensor((2, 3)) @ a, a, atol=0.0, rtol=0.0)
    assert_tensor_close(a @ identity_tensor((2,)), a, atol=0.0, rtol=0.0)


def test_einstein_product_against_einsum(rng):
    a = gaussian_tensor(rng, (2,), (3, 2))
    b = gaussian_tensor(rng, (3, 2), (2,))
    expected = np.einsum("ijk,jkl->il", a.array, b.array)

    c = einstein_product(a, b)
    assert c.shape == EinsteinShape.of((2,), (2,))
    np.testing.assert_allclose(c.array, expected, atol=1e-12)


def test_einstein_product_rejects_permuted_modes(rng):
    a = gaussian_tensor(rng, (2,), (2, 3))
    b = gaussian_tensor(rng, (3, 2), (2,))
    with pytest.raises(ContractionMismatch):
        einstein_product(a, b)


def test_indefinite_gram_of_counterexample():
    a = np.zeros((2, 3, 2))
    a[:, :, 0] = np.array([1, -1, 0, 2, 1, 1]).reshape(2, 3, order="F")
    a[:, :, 1] = np.array([2, 2, 0, 0, 3, 1]).reshape(2, 3, order="F")
    m = np.diag([2.0, -1.0, 2.0, 1.0, 1.0, 3.0])
    at = DenseTensor.from_array(a, 2)
    mt = DenseTensor.from_matrix(m, (2, 3), (2, 3))

    gram = at.H @ mt @ at
    np.testing.assert_array_equal(rsh(gram), np.array([[9, 12], [12, 16]]))
    assert reshape_rank(gram, 1e-10) == 1


def test_conj_transpose(rng):
    a = gaussian_tensor(rng, (2, 3), (2,))
    h = conj_transpose(a)

    assert h.shape == EinsteinShape.of((2,), (2, 3))
    np.testing.assert_array_equal(rsh(h), rsh(a).conj().T)
    assert h.H == a


def test_arithmetic(rng):
    a = gaussian_tensor(rng, (2,), (3,))
    b = gaussian_tensor(rng, (2,), (3,))

    np.testing.assert_array_equal((a + b).array, a.array + b.array)
    np.testing.assert_array_equal((a - b).array, a.array - b.array)
    np.testing.assert_array_equal((2j * a).array, 2j * a.array)
    assert (-a + a) == zeros(a.shape)
    assert a.norm() == pytest.approx(np.linalg.norm(rsh(a)))
    with pytest.raises(ShapeMismatch):
        a + a.H


def test_structural_predicates(rng):
    eye = identity_tensor((2, 2))
    u = random_unitary(rng, (2, 3))
    a = gaussian_tensor(rng, (2,), (2,))
    hermitian = a + a.H
    skew = a - a.H
    projector = random_tensor(rng, (2, 2), (1,))
    projector = projector @ projector.H * (1.0 / projector.norm() ** 2)

    assert is_diagonal(eye) and is_hermitian(eye) and is_unitary(eye) and is_idempotent(eye)
    assert is_unitary(u) and not is_hermitian(u)
    assert is_hermitian(hermitian) and not is_skew_hermitian(hermitian)
    assert is_skew_hermitian(skew) and not is_hermitian(skew)
    assert is_idempotent(projector) and not is_diagonal(projector)


def test_rectangular_diagonal():
    m = np.zeros((3, 2))
    m[0, 0], m[1, 1] = 2.0, -1.0
    assert is_diagonal(DenseTensor.from_matrix(m))
    m[2, 0] = 1.0
    assert not is_diagonal(DenseTensor.from_matrix(m))


def test_square_only_predicates_on_rectangular(rng):
    a = gaussian_tensor(rng, (2,), (3,))
    with pytest.raises(ShapeMismatch):
        is_hermitian(a)

    flags = structural_predicates(a)
    assert flags.diagonal is False
    assert flags.hermitian is None
    assert flags.unitary is None


@pytest.mark.parametrize("rank", [0, 1, 3])
def test_reshape_rank(rng, rank):
    assert reshape_rank(random_tensor(rng, (2, 2), (3,), rank=rank)) == rank


@pytest.mark.parametrize("text,expected", [("2,3", [2, 3]), ("4", [4]), ("", []), (None, []), ((1, 2), [1, 2])])
def test_as_modes(text, expected):
    assert as_modes(text) == expected


@hyp_settings(deadline=None, max_examples=40)
@given(i=modes, j=modes, seed=seeds, data=st.data())
def test_rank_is_invariant_under_conj_transpose(i, j, seed, data):
    rng = make_rng(seed)
    full = min(int(np.prod(i)), int(np.prod(j)))
    rank = data.draw(st.integers(min_value=0, max_value=full))
    a = random_tensor(rng, i, j, rank=rank)

    assert reshape_rank(a, 1e-10) == reshape_rank(a.H, 1e-10) == rank


@hyp_settings(deadline=None, max_examples=40)
@given(i=modes, j=modes, k=modes, seed=seeds)
def test_product_is_unfolding_homomorphism(i, j, k, seed):
    rng = make_rng(seed)
    a = gaussian_tensor(rng, i, j)
    b = gaussian_tensor(rng, j, k)
    np.testing.assert_allclose(rsh(a @ b), rsh(a) @ rsh(b), atol=1e-12)


@hyp_settings(deadline=None, max_examples=40)
@given(i=modes, j=modes, k=modes, h=modes, seed=seeds)
def test_product_is_associative(i, j, k, h, seed):
    rng = make_rng(seed)
    a = gaussian_tensor(rng, i, j)
    b = gaussian_tensor(rng, j, k)
    c = gaussian_tensor(rng, k, h)
    assert_tensor_close((a @ b) @ c, a @ (b @ c), rtol=1e-12, atol=1e-12)


@hyp_settings(deadline=None, max_examples=40)
@given(i=modes, j=modes, k=modes, seed=seeds)
def test_transpose_reverses_products(i, j, k, seed):
    rng = make_rng(seed)
    a = gaussian_tensor(rng, i, j)
    b = gaussian_tensor(rng, j, k)
    assert_tensor_close((a @ b).H, b.H @ a.H, rtol=0.0, atol=1e-12)


@hyp_settings(deadline=None, max_examples=40)
@given(i=modes, j=modes, seed=seeds)
def test_round_trip_property(i, j, seed):
    t = gaussian_tensor(make_rng(seed), i, j)
    assert rsh_inv(rsh(t), t.shape) == t
    assert rsh_inv(rsh(t).copy(), EinsteinShape.of(i, j)) == t
