"""
Tensor interchange files and deterministic JSON rendering.

A tensor file is a JSON object::

    {"row_modes": [2, 3], "col_modes": [2], "real": [...], "imag": [...]}

``real`` (and the optional ``imag``) hold the unfolding entries in
column-major order. Every float is written with 17 significant digits.
"""
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
from pydantic import BaseModel, ValidationError, model_validator

from tensor_ginv.errors import NonFiniteEntries, ShapeMismatch, TensorFormatError
from tensor_ginv.tensor import DenseTensor, EinsteinShape

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class TensorPayload(BaseModel):
    row_modes: List[int]
    col_modes: List[int]
    real: List[float]
    imag: Optional[List[float]] = None

    @model_validator(mode="after")
    def _lengths_match(self) -> "TensorPayload":
        expected = int(np.prod(self.row_modes, dtype=np.int64)) * int(np.prod(self.col_modes, dtype=np.int64))
        if len(self.real) != expected:
            raise ValueError(f"'real' has {len(self.real)} entries, shape needs {expected}")
        if self.imag is not None and len(self.imag) != expected:
            raise ValueError(f"'imag' has {len(self.imag)} entries, shape needs {expected}")
        return self

    def to_tensor(self) -> DenseTensor:
        try:
            shape = EinsteinShape.of(self.row_modes, self.col_modes)
        except ShapeMismatch as e:
            raise TensorFormatError(str(e))
        entries = np.asarray(self.real, dtype=np.float64).astype(np.complex128)
        if self.imag is not None:
            entries = entries + 1j * np.asarray(self.imag, dtype=np.float64)
        try:
            return DenseTensor(shape, entries)
        except NonFiniteEntries as e:
            raise TensorFormatError(str(e))

    @classmethod
    def from_tensor(cls, t: DenseTensor) -> "TensorPayload":
        entries = t.entries
        imag = entries.imag.tolist() if np.any(entries.imag != 0.0) else None
        return cls(
            row_modes=list(t.row_modes),
            col_modes=list(t.col_modes),
            real=entries.real.tolist(),
            imag=imag,
        )


def parse_tensor(obj: Dict[str, Any]) -> DenseTensor:
    """Validate a decoded JSON object and build the tensor."""
    try:
        payload = TensorPayload.model_validate(obj)
    except ValidationError as e:
        raise TensorFormatError(f"Invalid tensor payload: {str(e)}")
    return payload.to_tensor()


def load_tensor(path: PathLike) -> DenseTensor:
    """
    Read a tensor interchange file.

    Raises:
        TensorFormatError: on unreadable JSON, missing fields, length mismatches
            or non-finite entries
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            obj = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise TensorFormatError(f"Error reading tensor file {path}: {str(e)}")
    tensor = parse_tensor(obj)
    logger.info(f"Loaded tensor {tensor.shape} from {path}")
    return tensor


def tensor_to_dict(t: DenseTensor) -> Dict[str, Any]:
    return TensorPayload.from_tensor(t).model_dump(exclude_none=True)


def _render_float(x: float) -> str:
    if not np.isfinite(x):
        return "null"
    text = format(float(x), ".17g")
    if "e" not in text and "." not in text:
        text += ".0"
    return text


def _render(value: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    close = " " * (indent * level)
    if isinstance(value, BaseModel):
        value = value.model_dump()
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _render_float(float(value))
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_render(v, indent, level + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        if len(value) == 0:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in value):
            return "[" + ", ".join(_render(v, indent, level + 1) for v in value) + "]"
        items = [f"{pad}{_render(v, indent, level + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + close + "]"
    raise TypeError(f"cannot render {type(value).__name__} as JSON")


def dumps(value: Any, indent: int = 2) -> str:
    """JSON text with 17-significant-digit floats and stable key order."""
    return _render(value, indent, 0) + "\n"


def save_tensor(t: DenseTensor, path: PathLike) -> None:
    write_text(dumps(tensor_to_dict(t)), path)


def write_text(text: str, path: Optional[PathLike]) -> None:
    """Write to ``path``; ``None`` or ``-`` writes to standard output."""
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    logger.info(f"Wrote {path}")
