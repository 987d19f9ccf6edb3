import numpy as np
import pytest

from tensor_ginv.fixtures import load_fixture
from tensor_ginv.generators import make_rng, random_hpd, random_tensor
from tensor_ginv.tensor import DenseTensor
from tensor_ginv.tensor_io import parse_tensor, save_tensor

# (row_modes, col_modes) pairs covering orders 2 to 4, tall, wide and square unfoldings
SHAPES = [
    ((3,), (2,)),
    ((2,), (3,)),
    ((2, 3), (2,)),
    ((2,), (3, 2)),
    ((2, 2), (2, 2)),
    ((3, 2), (2, 2)),
    ((1, 3), (2,)),
]


@pytest.fixture
def rng() -> np.random.Generator:
    return make_rng(20240521)


@pytest.fixture(params=SHAPES, ids=lambda s: f"{list(s[0])}x{list(s[1])}")
def shape(request):
    return request.param


def weighted_instance(rng: np.random.Generator, row_modes, col_modes, rank=None):
    """Random tensor with random HPD weights over its row and column modes."""
    a = random_tensor(rng, row_modes, col_modes, rank=rank)
    return a, random_hpd(rng, row_modes), random_hpd(rng, col_modes)


def assert_tensor_close(actual: DenseTensor, expected: DenseTensor, rtol: float = 1e-10, atol: float = 1e-10):
    assert actual.shape == expected.shape
    np.testing.assert_allclose(actual.entries, expected.entries, rtol=rtol, atol=atol)


@pytest.fixture
def counterexample_files(tmp_path):
    """Tensors of the indefinite-weight counterexample written as interchange files."""
    paths = {}
    for role, payload in load_fixture("counterexample")["tensors"].items():
        paths[role] = tmp_path / f"{role}.json"
        save_tensor(parse_tensor(payload), paths[role])
    return paths
