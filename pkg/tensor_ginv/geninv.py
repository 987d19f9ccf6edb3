"""
Moore-Penrose and weighted Moore-Penrose inverses of tensors.

The weighted inverse is computed from the square-root formula
``A†_{M,N} = N^{-1/2} (M^{1/2} A N^{-1/2})† M^{1/2}``; the full-rank
decomposition route is kept as an independent cross-check.
"""
import logging
from typing import Dict, Iterable, Optional, Tuple, Union

from pydantic import BaseModel, Field

from tensor_ginv.config import settings
from tensor_ginv.errors import ShapeMismatch, SingularCore, SingularTensor
from tensor_ginv.kernels import matrix_svd, rank_from_sigma
from tensor_ginv.spectral import HpdFactors, full_rank_decomposition, hermitian_inverse, hpd_sqrt, invert
from tensor_ginv.tensor import DenseTensor, EinsteinShape, identity_tensor, reshape_rank, rsh, rsh_inv

logger = logging.getLogger(__name__)

WeightLike = Union[DenseTensor, HpdFactors, None]


class CheckReport(BaseModel):
    """
    Named residuals of a check and its verdict.

    ``passed`` holds iff every entry of ``residuals`` is within ``tolerance``.
    ``details`` carries informational residuals that do not affect the verdict.
    """

    name: str
    residuals: Dict[str, float]
    tolerance: float
    passed: bool
    marginal: bool = False
    details: Dict[str, float] = Field(default_factory=dict)

    @classmethod
    def from_residuals(
        cls,
        name: str,
        residuals: Dict[str, float],
        tolerance: float,
        details: Optional[Dict[str, float]] = None,
        watch: Iterable[float] = (),
    ) -> "CheckReport":
        residuals = {k: float(v) for k, v in residuals.items()}
        passed = all(v <= tolerance for v in residuals.values())
        near = [*residuals.values(), *watch]
        marginal = any(tolerance / 10.0 < v <= 10.0 * tolerance for v in near)
        if marginal:
            logger.warning(f"Check '{name}' has a residual within 10x of tolerance {tolerance:.1e}")
        return cls(
            name=name,
            residuals=residuals,
            tolerance=tolerance,
            passed=passed,
            marginal=marginal,
            details={k: float(v) for k, v in (details or {}).items()},
        )

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)


def relative_residual(lhs: DenseTensor, rhs: DenseTensor) -> float:
    """``||lhs - rhs||_F / max(1, ||lhs||_F)``."""
    return (lhs - rhs).norm() / max(1.0, lhs.norm())


def as_weight(w: WeightLike, modes, allow_indefinite: bool = False) -> HpdFactors:
    """Factor a weight over ``modes``; ``None`` is the identity."""
    modes = tuple(modes)
    if w is None:
        return HpdFactors.identity(modes)
    factors = w if isinstance(w, HpdFactors) else hpd_sqrt(w, allow_indefinite=allow_indefinite)
    if factors.modes != modes or factors.matrix.col_modes != modes:
        raise ShapeMismatch(
            f"weight of shape {factors.matrix.shape} does not act on modes {list(modes)}"
        )
    return factors


class WeightPair:
    """
    Row weight ``m`` and column weight ``n`` for a target tensor shape.

    The square-root factors are computed once at construction.
    """

    __slots__ = ("m_factors", "n_factors")

    def __init__(self, m_factors: HpdFactors, n_factors: HpdFactors):
        self.m_factors = m_factors
        self.n_factors = n_factors

    @classmethod
    def for_shape(
        cls,
        shape: EinsteinShape,
        m: WeightLike = None,
        n: WeightLike = None,
        allow_indefinite: bool = False,
    ) -> "WeightPair":
        """
        Args:
            shape: shape of the tensor to be inverted
            m: weight over ``shape.row_modes`` (None for identity)
            n: weight over ``shape.col_modes`` (None for identity)
            allow_indefinite: accept Hermitian invertible, indefinite weights

        Raises:
            ShapeMismatch: if a weight does not act on the matching modes
            NotPositiveDefinite: if a weight is not HPD and ``allow_indefinite`` is False
        """
        return cls(
            as_weight(m, shape.row_modes, allow_indefinite),
            as_weight(n, shape.col_modes, allow_indefinite),
        )

    @classmethod
    def identity(cls, shape: EinsteinShape) -> "WeightPair":
        return cls.for_shape(shape)

    @property
    def m(self) -> DenseTensor:
        return self.m_factors.matrix

    @property
    def n(self) -> DenseTensor:
        return self.n_factors.matrix

    def conforms_to(self, shape: EinsteinShape) -> bool:
        return self.m_factors.modes == shape.row_modes and self.n_factors.modes == shape.col_modes


def _require_conforming(a: DenseTensor, w: WeightPair) -> None:
    if not w.conforms_to(a.shape):
        raise ShapeMismatch(
            f"weights over {list(w.m_factors.modes)} and {list(w.n_factors.modes)} "
            f"do not conform to a tensor of shape {a.shape}"
        )


def mp_inverse(a: DenseTensor, rank_tol: Optional[float] = None) -> DenseTensor:
    """
    Moore-Penrose inverse from the truncated SVD of ``rsh(a)``.

    Args:
        a: any tensor
        rank_tol: relative truncation; None selects max(rows, cols) * eps

    Returns:
        tensor of shape (a.col_modes, a.row_modes)
    """
    rank_tol = settings.RANK_TOLERANCE if rank_tol is None else rank_tol
    m = rsh(a)
    u, sigma, v = matrix_svd(m)
    k = rank_from_sigma(sigma, m.shape, rank_tol)
    pinv = (v[:, :k] / sigma[:k]) @ u[:, :k].conj().T
    return rsh_inv(pinv, a.shape.transposed())


def mp_inverse_frd(a: DenseTensor, rank_tol: Optional[float] = None) -> DenseTensor:
    """
    Moore-Penrose inverse as ``G* (F* A G*)^-1 F*`` from a full-rank decomposition.

    Raises:
        ZeroTensor: for a tensor of reshaping rank 0
        SingularCore: if ``F* A G*`` is numerically singular
    """
    rank_tol = settings.RANK_TOLERANCE if rank_tol is None else rank_tol
    frd = full_rank_decomposition(a, rank_tol)
    f_h, g_h = frd.f.H, frd.g.H
    try:
        core_inv = invert(f_h @ a @ g_h)
    except SingularTensor as e:
        raise SingularCore(f"core of the full-rank decomposition is singular: {str(e)}")
    return g_h @ core_inv @ f_h


def wmp_inverse(a: DenseTensor, w: WeightPair, rank_tol: Optional[float] = None) -> DenseTensor:
    """
    Weighted Moore-Penrose inverse ``N^{-1/2} (M^{1/2} A N^{-1/2})† M^{1/2}``.

    Raises:
        ShapeMismatch: if ``w`` does not conform to ``a``
    """
    _require_conforming(a, w)
    m_half = w.m_factors.sqrt
    n_inv_half = w.n_factors.inv_sqrt
    return n_inv_half @ mp_inverse(m_half @ a @ n_inv_half, rank_tol) @ m_half


def wmp_inverse_frd(a: DenseTensor, w: WeightPair, rank_tol: Optional[float] = None) -> DenseTensor:
    """
    Weighted inverse ``N^-1 G* (F* M A N^-1 G*)^-1 F* M`` from a full-rank decomposition.

    Raises:
        ZeroTensor, SingularCore, ShapeMismatch
    """
    _require_conforming(a, w)
    rank_tol = settings.RANK_TOLERANCE if rank_tol is None else rank_tol
    frd = full_rank_decomposition(a, rank_tol)
    f_h, g_h = frd.f.H, frd.g.H
    n_inv, m = w.n_factors.inverse, w.m
    try:
        core_inv = invert(f_h @ m @ a @ n_inv @ g_h)
    except SingularTensor as e:
        raise SingularCore(f"weighted core of the full-rank decomposition is singular: {str(e)}")
    return n_inv @ g_h @ core_inv @ f_h @ m


def wmp_inverse_left_invertible(a: DenseTensor, w: WeightPair, rank_tol: Optional[float] = None) -> DenseTensor:
    """``N^-1 (A* M A N^-1)^-1 A* M`` for a tensor of full column reshaping rank."""
    _require_conforming(a, w)
    if reshape_rank(a, rank_tol) != a.shape.col_count:
        raise ShapeMismatch(f"tensor of shape {a.shape} is not left invertible")
    n_inv = w.n_factors.inverse
    return n_inv @ invert(a.H @ w.m @ a @ n_inv) @ a.H @ w.m


def wmp_inverse_right_invertible(a: DenseTensor, w: WeightPair, rank_tol: Optional[float] = None) -> DenseTensor:
    """``N^-1 A* (M A N^-1 A*)^-1 M`` for a tensor of full row reshaping rank."""
    _require_conforming(a, w)
    if reshape_rank(a, rank_tol) != a.shape.row_count:
        raise ShapeMismatch(f"tensor of shape {a.shape} is not right invertible")
    n_inv = w.n_factors.inverse
    return n_inv @ a.H @ invert(w.m @ a @ n_inv @ a.H) @ w.m


def weighted_pinv(
    a: DenseTensor,
    m: WeightLike = None,
    n: WeightLike = None,
    rank_tol: Optional[float] = None,
) -> DenseTensor:
    """``A†_{M,N}`` with either weight omitted meaning the identity."""
    if m is None and n is None:
        return mp_inverse(a, rank_tol)
    return wmp_inverse(a, WeightPair.for_shape(a.shape, m, n), rank_tol)


def _hermitian_weight(w: WeightLike, modes) -> Tuple[DenseTensor, DenseTensor]:
    """A weight over ``modes`` and its inverse; indefinite weights are accepted."""
    modes = tuple(modes)
    if w is None:
        eye = identity_tensor(modes)
        return eye, eye
    matrix = w.matrix if isinstance(w, HpdFactors) else w
    if matrix.row_modes != modes or matrix.col_modes != modes:
        raise ShapeMismatch(f"weight of shape {matrix.shape} does not act on modes {list(modes)}")
    if isinstance(w, HpdFactors):
        return matrix, w.inverse
    return matrix, hermitian_inverse(matrix)


def weighted_conj_transpose(a: DenseTensor, n: WeightLike, m: WeightLike) -> DenseTensor:
    """
    Weighted conjugate transpose ``A#_{N,M} = N^-1 A* M``.

    The weights need to be Hermitian and invertible, not positive definite.

    Args:
        a: tensor of shape (row_modes, col_modes)
        n: weight over ``a.col_modes``
        m: weight over ``a.row_modes``

    Raises:
        NotHermitian: if a weight is not Hermitian
        SingularWeight: if a weight is numerically singular
        ShapeMismatch: if a weight does not act on the matching modes
    """
    _, n_inverse = _hermitian_weight(n, a.col_modes)
    m_matrix, _ = _hermitian_weight(m, a.row_modes)
    return n_inverse @ a.H @ m_matrix


def range_inclusion(
    b: DenseTensor,
    a: DenseTensor,
    tol: Optional[float] = None,
    rank_tol: Optional[float] = None,
) -> CheckReport:
    """
    Check ``R(B) ⊆ R(A)`` through ``A A† B = B``.

    Raises:
        ShapeMismatch: unless ``a.row_modes == b.row_modes``
    """
    if a.row_modes != b.row_modes:
        raise ShapeMismatch(f"range inclusion needs equal row modes, got {a.shape} and {b.shape}")
    tol = settings.TOLERANCE if tol is None else tol
    projected = a @ (mp_inverse(a, rank_tol) @ b)
    residual = (projected - b).norm() / max(1.0, b.norm())
    return CheckReport.from_residuals("range_inclusion", {"projection": residual}, tol)


def corange_inclusion(
    b: DenseTensor,
    a: DenseTensor,
    tol: Optional[float] = None,
    rank_tol: Optional[float] = None,
) -> CheckReport:
    """
    Check ``R(B*) ⊆ R(A*)`` through ``B A† A = B``.

    Raises:
        ShapeMismatch: unless ``a.col_modes == b.col_modes``
    """
    if a.col_modes != b.col_modes:
        raise ShapeMismatch(f"corange inclusion needs equal column modes, got {a.shape} and {b.shape}")
    tol = settings.TOLERANCE if tol is None else tol
    projected = (b @ mp_inverse(a, rank_tol)) @ a
    residual = (projected - b).norm() / max(1.0, b.norm())
    return CheckReport.from_residuals("corange_inclusion", {"projection": residual}, tol)


def penrose_report(
    a: DenseTensor,
    x: DenseTensor,
    w: Optional[WeightPair] = None,
    tol: Optional[float] = None,
) -> CheckReport:
    """
    Residuals of the four (weighted) Penrose equations for the pair (A, X).

    The two Hermitian equations are symmetrized by ``M`` and ``N`` when ``w`` is given.

    Raises:
        ShapeMismatch: if ``x`` does not have the transposed shape of ``a``
    """
    if x.shape != a.shape.transposed():
        raise ShapeMismatch(f"candidate of shape {x.shape} cannot invert a tensor of shape {a.shape}")
    tol = settings.PREDICATE_TOLERANCE if tol is None else tol
    if w is not None:
        _require_conforming(a, w)
    ax = a @ x
    xa = x @ a
    left = w.m @ ax if w is not None else ax
    right = w.n @ xa if w is not None else xa
    residuals = {
        "axa": (ax @ a - a).norm() / max(1.0, a.norm()),
        "xax": (xa @ x - x).norm() / max(1.0, x.norm()),
        "max_hermitian": (left.H - left).norm() / max(1.0, left.norm()),
        "nxa_hermitian": (right.H - right).norm() / max(1.0, right.norm()),
    }
    name = "weighted_penrose" if w is not None else "penrose"
    return CheckReport.from_residuals(name, residuals, tol)

