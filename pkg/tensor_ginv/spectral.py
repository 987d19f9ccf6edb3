"""
Tensor-level spectral factorizations lifted through the unfolding map.

Every routine here unfolds its input with ``rsh``, calls a matrix kernel and
folds the factors back with ``rsh_inv``.
"""
import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np

from tensor_ginv.config import settings
from tensor_ginv.errors import (
    NotPositiveDefinite,
    ShapeMismatch,
    SingularTensor,
    SingularTransform,
    SingularWeight,
    ZeroTensor,
)
from tensor_ginv.kernels import EPS, hermitian_jacobi, matrix_svd, rank_from_sigma, svd_inverse
from tensor_ginv.tensor import DenseTensor, EinsteinShape, identity_tensor, rsh, rsh_inv

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SvdFactors:
    u: DenseTensor
    d: DenseTensor
    v: DenseTensor
    sigma: Tuple[float, ...]


@dataclass(frozen=True)
class FrdFactors:
    f: DenseTensor
    g: DenseTensor
    r: int


class HermitianEig(NamedTuple):
    q: DenseTensor
    eigenvalues: Tuple[float, ...]


@dataclass(frozen=True)
class HpdFactors:
    """
    Square root, inverse square root and inverse of a Hermitian weight.

    ``matrix`` is the weight itself. With ``allow_indefinite`` the roots are
    principal complex roots and ``positive_definite`` is False.
    """

    matrix: DenseTensor
    sqrt: DenseTensor
    inv_sqrt: DenseTensor
    inverse: DenseTensor
    eigenvalues: Tuple[float, ...]
    positive_definite: bool = True

    @property
    def modes(self) -> Tuple[int, ...]:
        return self.matrix.row_modes

    def inverted(self) -> "HpdFactors":
        """Factors of the inverse weight."""
        return HpdFactors(
            matrix=self.inverse,
            sqrt=self.inv_sqrt,
            inv_sqrt=self.sqrt,
            inverse=self.matrix,
            eigenvalues=tuple(sorted((1.0 / lam for lam in self.eigenvalues), reverse=True)),
            positive_definite=self.positive_definite,
        )

    @classmethod
    def identity(cls, modes) -> "HpdFactors":
        eye = identity_tensor(modes)
        n = eye.shape.row_count
        return cls(matrix=eye, sqrt=eye, inv_sqrt=eye, inverse=eye, eigenvalues=(1.0,) * n)


def tensor_svd(a: DenseTensor) -> SvdFactors:
    """
    SVD ``a = u @ d @ v.H`` with ``u``, ``v`` unitary and ``d`` diagonal.

    Raises:
        NoConvergence: propagated from the Jacobi kernel
    """
    m = rsh(a)
    u, sigma, v = matrix_svd(m)
    d = np.zeros(m.shape, dtype=np.complex128)
    k = sigma.size
    d[np.arange(k), np.arange(k)] = sigma
    return SvdFactors(
        u=rsh_inv(u, EinsteinShape(row_modes=a.row_modes, col_modes=a.row_modes)),
        d=rsh_inv(d, a.shape),
        v=rsh_inv(v, EinsteinShape(row_modes=a.col_modes, col_modes=a.col_modes)),
        sigma=tuple(float(s) for s in sigma),
    )


def _require_square(p: DenseTensor, what: str) -> None:
    if not p.shape.is_square:
        raise ShapeMismatch(f"{what} needs a square tensor, got {p.shape}")


def hermitian_eig(p: DenseTensor, tol: Optional[float] = None) -> HermitianEig:
    """
    Unitary diagonalization ``p = q @ diag(eigenvalues) @ q.H``.

    Args:
        p: square tensor, Hermitian within ``tol``
        tol: Hermitian residual tolerance (relative), default settings.PREDICATE_TOLERANCE

    Returns:
        HermitianEig with real eigenvalues in descending order

    Raises:
        ShapeMismatch: if row_modes != col_modes
        NotHermitian: if the Hermitian residual exceeds ``tol``
    """
    _require_square(p, "hermitian_eig")
    tol = settings.PREDICATE_TOLERANCE if tol is None else tol
    q, lam = hermitian_jacobi(rsh(p), tol)
    return HermitianEig(q=rsh_inv(q, p.shape), eigenvalues=tuple(float(x) for x in lam))


def _spectral_function(q: np.ndarray, values: np.ndarray, shape: EinsteinShape) -> DenseTensor:
    return rsh_inv((q * values) @ q.conj().T, shape)


def hpd_sqrt(p: DenseTensor, tol: Optional[float] = None, allow_indefinite: bool = False) -> HpdFactors:
    """
    Square-root factors of a Hermitian positive definite weight.

    Args:
        p: Hermitian weight tensor
        tol: Hermitian residual tolerance and relative eigenvalue floor
        allow_indefinite: accept Hermitian invertible weights with negative
            eigenvalues, using principal complex roots

    Raises:
        NotPositiveDefinite: if an eigenvalue is <= tol * lambda_max
        SingularWeight: if ``allow_indefinite`` and an eigenvalue is numerically zero
    """
    tol = settings.PREDICATE_TOLERANCE if tol is None else tol
    _require_square(p, "hpd_sqrt")
    q, lam = hermitian_jacobi(rsh(p), tol)
    floor = tol * float(lam[0])
    definite = bool(lam[0] > 0.0 and lam[-1] > floor)
    if not definite:
        if not allow_indefinite:
            raise NotPositiveDefinite(
                f"weight of shape {p.shape} has eigenvalue {lam[-1]:.6g} <= {floor:.3e}"
            )
        magnitude = np.abs(lam)
        if magnitude.max() == 0.0 or np.any(magnitude <= tol * magnitude.max()):
            raise SingularWeight(f"weight of shape {p.shape} is numerically singular")
        logger.warning(
            f"Weight of shape {p.shape} is indefinite (min eigenvalue {lam[-1]:.6g}); "
            f"using principal complex square roots"
        )

    roots = np.sqrt(lam.astype(np.complex128)) if not definite else np.sqrt(lam)
    return HpdFactors(
        matrix=p,
        sqrt=_spectral_function(q, roots, p.shape),
        inv_sqrt=_spectral_function(q, 1.0 / roots, p.shape),
        inverse=_spectral_function(q, 1.0 / lam, p.shape),
        eigenvalues=tuple(float(x) for x in lam),
        positive_definite=definite,
    )


def hermitian_inverse(p: DenseTensor, tol: Optional[float] = None) -> DenseTensor:
    """
    Inverse of a Hermitian invertible weight, definite or not, from reciprocal eigenvalues.

    Raises:
        ShapeMismatch: if ``p`` is not square
        NotHermitian: if the Hermitian residual exceeds ``tol``
        SingularWeight: if an eigenvalue is <= tol * max |eigenvalue|
    """
    tol = settings.PREDICATE_TOLERANCE if tol is None else tol
    _require_square(p, "hermitian_inverse")
    q, lam = hermitian_jacobi(rsh(p), tol)
    magnitude = np.abs(lam)
    if magnitude.max() == 0.0 or np.any(magnitude <= tol * magnitude.max()):
        raise SingularWeight(f"weight of shape {p.shape} is numerically singular")
    return _spectral_function(q, 1.0 / lam, p.shape)


def invert(t: DenseTensor) -> DenseTensor:
    """
    Ordinary inverse of a square tensor.

    Raises:
        ShapeMismatch: if ``t`` is not square
        SingularTensor: if sigma_min / sigma_max <= n * eps
    """
    _require_square(t, "invert")
    inverse, ratio = svd_inverse(rsh(t))
    if ratio <= t.shape.row_count * EPS:
        raise SingularTensor(f"tensor of shape {t.shape} is singular (sigma ratio {ratio:.3e})")
    return rsh_inv(inverse, t.shape)


def full_rank_decomposition(a: DenseTensor, tol: Optional[float] = None) -> FrdFactors:
    """
    Factor ``a = f @ g`` with ``f`` left invertible and ``g`` right invertible.

    The inner mode is a single mode ``[r]`` with ``r = reshape_rank(a)``.
    ``f = U_r diag(sigma_r)`` and ``g = V_r^H`` from the thin SVD.

    Raises:
        ZeroTensor: if the reshaping rank is zero
    """
    m = rsh(a)
    u, sigma, v = matrix_svd(m)
    r = rank_from_sigma(sigma, m.shape, tol)
    if r == 0:
        raise ZeroTensor(f"tensor of shape {a.shape} has reshaping rank 0")
    f = u[:, :r] * sigma[:r]
    g = v[:, :r].conj().T
    logger.debug(f"Full-rank decomposition of {a.shape} with r={r}")
    return FrdFactors(
        f=rsh_inv(f, EinsteinShape(row_modes=a.row_modes, col_modes=(r,))),
        g=rsh_inv(g, EinsteinShape(row_modes=(r,), col_modes=a.col_modes)),
        r=r,
    )


def frd_transform_witness(frd: FrdFactors, b: DenseTensor) -> FrdFactors:
    """
    Another full-rank decomposition ``(f @ b, b^-1 @ g)`` of the same tensor.

    Raises:
        ShapeMismatch: unless ``b`` has shape [r] x [r]
        SingularTransform: if ``b`` is numerically singular
    """
    expected = (frd.r,)
    if b.row_modes != expected or b.col_modes != expected:
        raise ShapeMismatch(f"transform must have shape {list(expected)}x{list(expected)}, got {b.shape}")
    try:
        b_inv = invert(b)
    except SingularTensor as e:
        raise SingularTransform(str(e))
    return FrdFactors(f=frd.f @ b, g=b_inv @ frd.g, r=frd.r)
