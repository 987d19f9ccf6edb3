import json

import numpy as np
import pytest

from tensor_ginv.errors import TensorFormatError
from tensor_ginv.generators import gaussian_tensor
from tensor_ginv.tensor import DenseTensor, EinsteinShape
from tensor_ginv.tensor_io import dumps, load_tensor, parse_tensor, save_tensor, tensor_to_dict


def test_parse_real_tensor():
    t = parse_tensor({"row_modes": [2], "col_modes": [2], "real": [1, 2, 3, 4]})

    assert t.shape == EinsteinShape.of((2,), (2,))
    np.testing.assert_array_equal(t.array, np.array([[1, 3], [2, 4]]))


def test_parse_complex_tensor():
    t = parse_tensor({"row_modes": [1], "col_modes": [2], "real": [1, 0], "imag": [0, -1]})
    np.testing.assert_array_equal(t.entries, np.array([1.0, -1.0j]))


@pytest.mark.parametrize(
    "payload",
    [
        {"row_modes": [2], "col_modes": [2], "real": [1, 2, 3]},
        {"row_modes": [2], "col_modes": [2], "real": [1, 2, 3, 4], "imag": [0]},
        {"row_modes": [2], "real": [1, 2]},
        {"row_modes": [0], "col_modes": [2], "real": []},
        {"row_modes": [2], "col_modes": [1], "real": ["a", 1]},
        {"row_modes": [2], "col_modes": [1], "real": [float("nan"), 1]},
        {"row_modes": [1], "col_modes": [1], "real": [0], "imag": [float("inf")]},
    ],
)
def test_parse_rejects_malformed_payloads(payload):
    with pytest.raises(TensorFormatError):
        parse_tensor(payload)


def test_imag_is_omitted_for_real_tensors():
    t = DenseTensor(EinsteinShape.of((2,), (1,)), np.array([1.0, 2.0]))
    assert "imag" not in tensor_to_dict(t)


def test_save_and_load(tmp_path, rng):
    t = gaussian_tensor(rng, (2, 3), (2,))
    path = tmp_path / "t.json"
    save_tensor(t, path)

    assert load_tensor(path) == t


def test_load_rejects_bad_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(TensorFormatError):
        load_tensor(path)


def test_load_missing_file(tmp_path):
    with pytest.raises(TensorFormatError):
        load_tensor(tmp_path / "missing.json")


@pytest.mark.parametrize(
    "value,expected",
    [
        (0.1, "0.10000000000000001"),
        (1.0, "1.0"),
        (-2.5, "-2.5"),
        (3, "3"),
        (True, "true"),
        (None, "null"),
        (float("inf"), "null"),
    ],
)
def test_dumps_scalars(value, expected):
    assert dumps(value) == expected + "\n"


def test_dumps_is_valid_json_and_stable(rng):
    t = gaussian_tensor(rng, (2,), (2,))
    doc = {"name": "x", "tensor": tensor_to_dict(t), "flags": [True, False]}

    text = dumps(doc)
    assert text == dumps(doc)
    decoded = json.loads(text)
    assert decoded["tensor"]["real"] == t.entries.real.tolist()
    assert decoded["tensor"]["imag"] == t.entries.imag.tolist()
