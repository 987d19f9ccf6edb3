"""
Dense matrix kernels: one-sided Jacobi SVD and two-sided Hermitian Jacobi.

Both kernels share the complex rotation in ``_rotation`` and visit column
pairs in a fixed round-robin order, so the same input always produces the
same factors bit for bit.
"""
import logging
from functools import lru_cache
from typing import NamedTuple, Optional, Tuple

import numpy as np

from tensor_ginv.config import settings
from tensor_ginv.errors import NoConvergence, NotHermitian

logger = logging.getLogger(__name__)

EPS = float(np.finfo(np.float64).eps)
# Off-diagonal threshold floor relative to the column (or diagonal) scale
OFF_DIAGONAL_FLOOR = 1e-15


class MatrixSvd(NamedTuple):
    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray


class MatrixEig(NamedTuple):
    q: np.ndarray
    eigenvalues: np.ndarray


@lru_cache(maxsize=64)
def _round_robin(n: int) -> Tuple[Tuple[np.ndarray, np.ndarray], ...]:
    """Tournament schedule: every round is a set of disjoint (p, q) pairs, p < q."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        pairs = [(players[i], players[size - 1 - i]) for i in range(size // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p >= 0 and q >= 0]
        if pairs:
            ps = np.array([p for p, _ in pairs], dtype=np.intp)
            qs = np.array([q for _, q in pairs], dtype=np.intp)
            ps.setflags(write=False)
            qs.setflags(write=False)
            rounds.append((ps, qs))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _rotation(alpha: np.ndarray, beta: np.ndarray, gamma: np.ndarray):
    """
    Rotation parameters that annihilate the (p, q) coupling ``gamma``.

    ``alpha`` and ``beta`` are the diagonal (Gram) entries of the pair. The
    returned (c, s, e) act on columns as
    ``x_p' = c x_p - s conj(e) x_q`` and ``x_q' = s x_p + c conj(e) x_q``.
    """
    g = np.abs(gamma)
    e = gamma / g
    zeta = (beta - alpha) / (2.0 * g)
    t = np.where(zeta >= 0.0, 1.0, -1.0) / (np.abs(zeta) + np.hypot(1.0, zeta))
    c = 1.0 / np.hypot(1.0, t)
    return c, c * t, e


def _rotate_columns(x: np.ndarray, ps, qs, c, s, e) -> None:
    xp = x[:, ps]
    xq = x[:, qs] * np.conj(e)
    x[:, ps] = c * xp - s * xq
    x[:, qs] = s * xp + c * xq


def _normalize_phases(u: np.ndarray, v: Optional[np.ndarray] = None) -> None:
    """Make the first largest-modulus entry of each column of ``u`` real and nonnegative."""
    if u.size == 0:
        return
    pivots = np.argmax(np.abs(u), axis=0)
    lead = u[pivots, np.arange(u.shape[1])]
    modulus = np.abs(lead)
    phase = np.ones_like(lead)
    nonzero = modulus > 0
    phase[nonzero] = np.conj(lead[nonzero]) / modulus[nonzero]
    u *= phase
    if v is not None:
        k = min(u.shape[1], v.shape[1])
        v[:, :k] *= phase[:k]


def _complete_basis(u_r: np.ndarray, rows: int) -> np.ndarray:
    """Extend orthonormal columns ``u_r`` to a full unitary matrix."""
    r = u_r.shape[1]
    if r == rows:
        return u_r
    q, _ = np.linalg.qr(np.hstack([u_r, np.eye(rows, dtype=np.complex128)]))
    return np.hstack([u_r, q[:, r:rows]])


def _jacobi_tall(m: np.ndarray, max_sweeps: int) -> MatrixSvd:
    rows, cols = m.shape
    w = np.array(m, dtype=np.complex128, order="F", copy=True)
    v = np.eye(cols, dtype=np.complex128)
    norm = np.linalg.norm(w)
    if norm == 0.0:
        return MatrixSvd(np.eye(rows, dtype=np.complex128), np.zeros(cols), v)

    negligible = (OFF_DIAGONAL_FLOOR * norm) ** 2
    rel = max(OFF_DIAGONAL_FLOOR, rows * EPS)
    schedule = _round_robin(cols)

    for sweep in range(max_sweeps):
        rotated = False
        for ps, qs in schedule:
            xp, xq = w[:, ps], w[:, qs]
            alpha = np.einsum("ij,ij->j", xp.conj(), xp).real
            beta = np.einsum("ij,ij->j", xq.conj(), xq).real
            gamma = np.einsum("ij,ij->j", xp.conj(), xq)
            active = (
                (np.abs(gamma) > rel * np.sqrt(alpha * beta))
                & (alpha > negligible)
                & (beta > negligible)
            )
            if not active.any():
                continue
            rotated = True
            p, q = ps[active], qs[active]
            c, s, e = _rotation(alpha[active], beta[active], gamma[active])
            _rotate_columns(w, p, q, c, s, e)
            _rotate_columns(v, p, q, c, s, e)
        if not rotated:
            logger.debug(f"Jacobi SVD of {rows}x{cols} converged after {sweep} sweeps")
            break
    else:
        raise NoConvergence(
            f"One-sided Jacobi did not converge within {max_sweeps} sweeps on a {rows}x{cols} matrix"
        )

    sigma = np.linalg.norm(w, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma, w, v = sigma[order], w[:, order], v[:, order]

    cutoff = rows * EPS * sigma[0]
    r = int(np.count_nonzero(sigma > cutoff))
    u_r = w[:, :r] / sigma[:r]
    u = _complete_basis(u_r, rows)
    return MatrixSvd(u, sigma, v)


def matrix_svd(m: np.ndarray, max_sweeps: Optional[int] = None) -> MatrixSvd:
    """
    Full singular value decomposition ``m = u @ diag(sigma) @ v^H``.

    Args:
        m: 2-D array, converted to complex128
        max_sweeps: Jacobi sweep cap, defaults to ``settings.MAX_JACOBI_SWEEPS``

    Returns:
        MatrixSvd with unitary ``u`` (rows x rows), descending ``sigma``
        of length min(rows, cols) and unitary ``v`` (cols x cols)

    Raises:
        NoConvergence: if the sweep cap is exceeded
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"matrix_svd expects a 2-D array, got shape {m.shape}")
    sweeps = settings.MAX_JACOBI_SWEEPS if max_sweeps is None else max_sweeps
    rows, cols = m.shape

    if rows >= cols:
        u, sigma, v = _jacobi_tall(m, sweeps)
    else:
        # m^H = U' S V'^H, hence m = V' S U'^H
        v, sigma, u = _jacobi_tall(m.conj().T, sweeps)

    _normalize_phases(u, v)
    return MatrixSvd(u, sigma, v)


def rank_from_sigma(sigma: np.ndarray, shape: Tuple[int, int], tol: Optional[float] = None) -> int:
    """Count singular values above ``tol * sigma_max``; default tol is max(rows, cols) * eps."""
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    rel = max(shape) * EPS if tol is None else tol
    return int(np.count_nonzero(sigma > rel * sigma[0]))


def hermitian_jacobi(h: np.ndarray, tol: float, max_sweeps: Optional[int] = None) -> MatrixEig:
    """
    Eigendecomposition ``h = q @ diag(eigenvalues) @ q^H`` of a Hermitian matrix.

    Eigenvalues are real and sorted descending.

    Raises:
        NotHermitian: if ``||h - h^H||_F > tol * max(1, ||h||_F)``
        NoConvergence: if the sweep cap is exceeded
    """
    h = np.asarray(h, dtype=np.complex128)
    n = h.shape[0]
    if h.ndim != 2 or h.shape[1] != n:
        raise ValueError(f"hermitian_jacobi expects a square matrix, got shape {h.shape}")
    scale = max(1.0, float(np.linalg.norm(h)))
    residual = float(np.linalg.norm(h - h.conj().T))
    if residual > tol * scale:
        raise NotHermitian(f"Hermitian residual {residual:.3e} exceeds {tol:.1e} relative")

    sweeps = settings.MAX_JACOBI_SWEEPS if max_sweeps is None else max_sweeps
    a = 0.5 * (h + h.conj().T)
    q = np.eye(n, dtype=np.complex128)
    norm = float(np.linalg.norm(a))
    if norm == 0.0:
        return MatrixEig(q, np.zeros(n))

    threshold = max(OFF_DIAGONAL_FLOOR, n * EPS) * norm
    schedule = _round_robin(n)
    for sweep in range(sweeps):
        rotated = False
        for ps, qs in schedule:
            gamma = a[ps, qs]
            active = np.abs(gamma) > threshold
            if not active.any():
                continue
            rotated = True
            p, qq = ps[active], qs[active]
            c, s, e = _rotation(a[p, p].real, a[qq, qq].real, gamma[active])
            # J* A J: rotate columns of A, then columns of (A J)* = J* A
            _rotate_columns(a, p, qq, c, s, e)
            a = a.conj().T
            _rotate_columns(a, p, qq, c, s, e)
            a = 0.5 * (a + a.conj().T)
            _rotate_columns(q, p, qq, c, s, e)
        if not rotated:
            logger.debug(f"Hermitian Jacobi on {n}x{n} converged after {sweep} sweeps")
            break
    else:
        raise NoConvergence(f"Hermitian Jacobi did not converge within {sweeps} sweeps on {n}x{n}")

    eigenvalues = np.real(np.diag(a)).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues, q = eigenvalues[order], q[:, order]
    _normalize_phases(q)
    return MatrixEig(q, eigenvalues)


def svd_inverse(m: np.ndarray) -> Tuple[np.ndarray, float]:
    """Inverse of a square matrix through the SVD kernel, plus sigma_min / sigma_max."""
    u, sigma, v = matrix_svd(m)
    ratio = float(sigma[-1] / sigma[0]) if sigma[0] > 0 else 0.0
    if ratio <= m.shape[0] * EPS:
        return np.zeros_like(u), ratio
    return (v / sigma) @ u.conj().T, ratio

