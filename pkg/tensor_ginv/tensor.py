"""
Dense complex tensors with an explicit row-mode / column-mode split.

A tensor of shape ``I_1 x ... x I_M x J_1 x ... x J_N`` is stored as the
Fortran-ordered ndarray of those dimensions, so flattening in column-major
order yields the unfolding matrix ``rsh(a)`` with the first row index fastest.
``rsh`` is therefore a view, and the Einstein product is a matrix product of
unfoldings.
"""
import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from tensor_ginv.config import settings
from tensor_ginv.errors import ContractionMismatch, NonFiniteEntries, ShapeMismatch
from tensor_ginv.kernels import matrix_svd, rank_from_sigma

logger = logging.getLogger(__name__)

MAX_GROUP_SIZE = 2 ** 31

ModeList = Tuple[int, ...]
Matrix = np.ndarray


class EinsteinShape(BaseModel):
    """Ordered row-mode and column-mode dimensions of a tensor."""

    model_config = ConfigDict(frozen=True)

    row_modes: ModeList
    col_modes: ModeList

    @field_validator("row_modes", "col_modes")
    @classmethod
    def _positive_dims(cls, modes: ModeList) -> ModeList:
        for dim in modes:
            if dim < 1:
                raise ValueError(f"mode dimensions must be >= 1, got {list(modes)}")
        if int(np.prod(modes, dtype=object)) > MAX_GROUP_SIZE:
            raise ValueError(f"mode group {list(modes)} exceeds 2^31 entries")
        return tuple(int(d) for d in modes)

    @model_validator(mode="after")
    def _not_empty(self) -> "EinsteinShape":
        if not self.row_modes and not self.col_modes:
            raise ValueError("a tensor needs at least one mode")
        return self

    @classmethod
    def of(cls, row_modes: Sequence[int], col_modes: Sequence[int]) -> "EinsteinShape":
        try:
            return cls(row_modes=tuple(row_modes), col_modes=tuple(col_modes))
        except ValueError as e:
            raise ShapeMismatch(f"Invalid shape {list(row_modes)} x {list(col_modes)}: {str(e)}")

    @property
    def row_count(self) -> int:
        return int(np.prod(self.row_modes, dtype=np.int64))

    @property
    def col_count(self) -> int:
        return int(np.prod(self.col_modes, dtype=np.int64))

    @property
    def dims(self) -> ModeList:
        return self.row_modes + self.col_modes

    @property
    def is_square(self) -> bool:
        return self.row_modes == self.col_modes

    def transposed(self) -> "EinsteinShape":
        return EinsteinShape(row_modes=self.col_modes, col_modes=self.row_modes)

    def __str__(self) -> str:
        return f"{list(self.row_modes)}x{list(self.col_modes)}"


class DenseTensor:
    """
    Immutable dense complex tensor.

    ``a @ b`` is the Einstein product and ``a.H`` the conjugate transpose.
    """

    __slots__ = ("_shape", "_data")

    def __init__(self, shape: EinsteinShape, data: np.ndarray):
        # Owned copy; flat or unfolded input is folded in column-major order
        data = np.array(data, dtype=np.complex128, order="F")
        if data.shape != shape.dims:
            if data.size != shape.row_count * shape.col_count:
                raise ShapeMismatch(
                    f"{data.size} entries cannot fill a tensor of shape {shape}"
                )
            data = np.asfortranarray(data.reshape(shape.dims, order="F"))
        if not np.all(np.isfinite(data)):
            raise NonFiniteEntries(f"tensor of shape {shape} has non-finite entries")
        data.flags.writeable = False
        self._shape = shape
        self._data = data

    @classmethod
    def from_array(cls, array, n_row_modes: int) -> "DenseTensor":
        """Build from an ndarray indexed ``[i_1, ..., i_M, j_1, ..., j_N]``."""
        array = np.asarray(array)
        if not 0 <= n_row_modes <= array.ndim:
            raise ShapeMismatch(f"cannot split {array.ndim} modes after {n_row_modes}")
        shape = EinsteinShape.of(array.shape[:n_row_modes], array.shape[n_row_modes:])
        return cls(shape, array)

    @classmethod
    def from_matrix(cls, m, row_modes: Sequence[int] = (), col_modes: Sequence[int] = ()) -> "DenseTensor":
        """Wrap a 2-D array; mode lists default to a single row and column mode."""
        m = np.asarray(m)
        shape = EinsteinShape.of(row_modes or (m.shape[0],), col_modes or (m.shape[1],))
        return rsh_inv(m, shape)

    @property
    def shape(self) -> EinsteinShape:
        return self._shape

    @property
    def row_modes(self) -> ModeList:
        return self._shape.row_modes

    @property
    def col_modes(self) -> ModeList:
        return self._shape.col_modes

    @property
    def array(self) -> np.ndarray:
        """Read-only ndarray view with natural multi-index layout."""
        return self._data

    @property
    def entries(self) -> np.ndarray:
        """Flat buffer in unfolding column-major order."""
        return self._data.ravel(order="F")

    @property
    def H(self) -> "DenseTensor":
        return conj_transpose(self)

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def _require_same_shape(self, other: "DenseTensor") -> None:
        if self._shape != other._shape:
            raise ShapeMismatch(f"shapes differ: {self._shape} vs {other._shape}")

    def __add__(self, other: "DenseTensor") -> "DenseTensor":
        self._require_same_shape(other)
        return DenseTensor(self._shape, self._data + other._data)

    def __sub__(self, other: "DenseTensor") -> "DenseTensor":
        self._require_same_shape(other)
        return DenseTensor(self._shape, self._data - other._data)

    def __neg__(self) -> "DenseTensor":
        return DenseTensor(self._shape, -self._data)

    def __mul__(self, scalar: complex) -> "DenseTensor":
        if isinstance(scalar, DenseTensor):
            return NotImplemented
        return DenseTensor(self._shape, self._data * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other: "DenseTensor") -> "DenseTensor":
        return einstein_product(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DenseTensor):
            return NotImplemented
        return self._shape == other._shape and bool(np.array_equal(self._data, other._data))

    __hash__ = None

    def __repr__(self) -> str:
        return f"DenseTensor(shape={self._shape})"


def zeros(shape: EinsteinShape) -> DenseTensor:
    return DenseTensor(shape, np.zeros(shape.dims, dtype=np.complex128, order="F"))


def rsh(t: DenseTensor) -> Matrix:
    """Unfolding matrix of ``t``; a read-only view of its buffer."""
    return t.array.reshape(t.shape.row_count, t.shape.col_count, order="F")


def rsh_inv(m: Matrix, target: EinsteinShape) -> DenseTensor:
    """
    Fold a matrix back into a tensor of shape ``target``.

    Raises:
        ShapeMismatch: if ``m`` is not row_count x col_count
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape != (target.row_count, target.col_count):
        raise ShapeMismatch(
            f"matrix of shape {m.shape} does not unfold a {target} tensor "
            f"({target.row_count}x{target.col_count})"
        )
    return DenseTensor(target, m.reshape(target.dims, order="F"))


def einstein_product(a: DenseTensor, b: DenseTensor) -> DenseTensor:
    """
    Contract the column modes of ``a`` against the row modes of ``b``.

    Raises:
        ContractionMismatch: unless ``a.col_modes == b.row_modes`` elementwise
    """
    if a.col_modes != b.row_modes:
        raise ContractionMismatch(
            f"cannot contract column modes {list(a.col_modes)} against row modes {list(b.row_modes)}"
        )
    shape = EinsteinShape(row_modes=a.row_modes, col_modes=b.col_modes)
    return rsh_inv(rsh(a) @ rsh(b), shape)


def conj_transpose(a: DenseTensor) -> DenseTensor:
    return rsh_inv(rsh(a).conj().T, a.shape.transposed())


def identity_tensor(modes: Sequence[int]) -> DenseTensor:
    modes = tuple(modes)
    if not modes:
        raise ShapeMismatch("identity tensor needs at least one mode")
    shape = EinsteinShape.of(modes, modes)
    return rsh_inv(np.eye(shape.row_count, dtype=np.complex128), shape)


def _scale(a: DenseTensor) -> float:
    return max(1.0, a.norm())


def _require_square(a: DenseTensor, predicate: str) -> None:
    if not a.shape.is_square:
        raise ShapeMismatch(f"{predicate} needs row_modes == col_modes, got {a.shape}")


def is_diagonal(a: DenseTensor, tol: Optional[float] = None) -> bool:
    tol = settings.PREDICATE_TOLERANCE if tol is None else tol
    m = rsh(a)
    k = min(m.shape)
    off = m.copy()
    off[np.arange(k), np.arange(k)] = 0.0
    return float(np.linalg.norm(off)) <= tol * _scale(a)


def is_hermitian(a: DenseTensor, tol: Optional[float] = None) -> bool:
    _require_square(a, "hermitian")
    tol = settings.PREDICATE_TOLERANCE if tol is None else tol
    return (a - a.H).norm() <= tol * _scale(a)


def is_skew_hermitian(a: DenseTensor, tol: Optional[float] = None) -> bool:
    _require_square(a, "skew_hermitian")
    tol = settings.PREDICATE_TOLERANCE if tol is None else tol
    return (a + a.H).norm() <= tol * _scale(a)


def is_unitary(a: DenseTensor, tol: Optional[float] = None) -> bool:
    _require_square(a, "unitary")
    tol = settings.PREDICATE_TOLERANCE if tol is None else tol
    return (a @ a.H - identity_tensor(a.row_modes)).norm() <= tol * _scale(a)


def is_idempotent(a: DenseTensor, tol: Optional[float] = None) -> bool:
    _require_square(a, "idempotent")
    tol = settings.PREDICATE_TOLERANCE if tol is None else tol
    return (a @ a - a).norm() <= tol * _scale(a)


class StructureFlags(BaseModel):
    """Square-only flags are None for non-square tensors."""

    diagonal: bool
    hermitian: Optional[bool] = None
    skew_hermitian: Optional[bool] = None
    unitary: Optional[bool] = None
    idempotent: Optional[bool] = None


def structural_predicates(a: DenseTensor, tol: Optional[float] = None) -> StructureFlags:
    flags = StructureFlags(diagonal=is_diagonal(a, tol))
    if a.shape.is_square:
        flags.hermitian = is_hermitian(a, tol)
        flags.skew_hermitian = is_skew_hermitian(a, tol)
        flags.unitary = is_unitary(a, tol)
        flags.idempotent = is_idempotent(a, tol)
    return flags


def reshape_rank(a: DenseTensor, tol: Optional[float] = None) -> int:
    """Rank of ``rsh(a)``: singular values above ``tol * sigma_max``."""
    m = rsh(a)
    sigma = matrix_svd(m).sigma
    return rank_from_sigma(sigma, m.shape, tol)


def as_modes(text: Union[str, Sequence[int], None]) -> List[int]:
    """Parse ``"2,3"`` (or an int sequence) into a mode list; empty string means no modes."""
    if text is None:
        return []
    if isinstance(text, str):
        text = text.strip()
        return [int(part) for part in text.split(",") if part.strip()] if text else []
    return [int(d) for d in text]
