"""Seeded random tensors for tests, the catalog harness and the ``gen`` subcommand."""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from tensor_ginv.errors import HypothesisUnsatisfiable
from tensor_ginv.spectral import tensor_svd
from tensor_ginv.tensor import DenseTensor, EinsteinShape, rsh, rsh_inv

logger = logging.getLogger(__name__)

# Spectrum of generated weights and well-conditioned tensors
SPECTRUM: Tuple[float, float] = (0.5, 2.0)


def make_rng(seed: int = 0) -> np.random.Generator:
    """PCG64 generator for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(seed))


def _complex_gaussian(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def orthonormal_columns(rng: np.random.Generator, rows: int, k: int) -> np.ndarray:
    q, r = np.linalg.qr(_complex_gaussian(rng, rows, k))
    # Fix the QR phase freedom so the distribution is Haar
    d = np.diag(r)
    return q * (d / np.abs(d))


def gaussian_tensor(rng: np.random.Generator, row_modes: Sequence[int], col_modes: Sequence[int]) -> DenseTensor:
    """Entries i.i.d. standard complex normal."""
    shape = EinsteinShape.of(row_modes, col_modes)
    return rsh_inv(_complex_gaussian(rng, shape.row_count, shape.col_count), shape)


def random_tensor(
    rng: np.random.Generator,
    row_modes: Sequence[int],
    col_modes: Sequence[int],
    rank: Optional[int] = None,
    spectrum: Tuple[float, float] = SPECTRUM,
) -> DenseTensor:
    """
    Random tensor with prescribed reshaping rank and singular values drawn
    uniformly from ``spectrum``.

    Raises:
        HypothesisUnsatisfiable: if ``rank`` exceeds min(row_count, col_count) or is negative
    """
    shape = EinsteinShape.of(row_modes, col_modes)
    full = min(shape.row_count, shape.col_count)
    rank = full if rank is None else rank
    if not 0 <= rank <= full:
        raise HypothesisUnsatisfiable(f"rank {rank} is not realizable for shape {shape}")
    if rank == 0:
        return rsh_inv(np.zeros((shape.row_count, shape.col_count)), shape)
    u = orthonormal_columns(rng, shape.row_count, rank)
    v = orthonormal_columns(rng, shape.col_count, rank)
    sigma = rng.uniform(*spectrum, size=rank)
    return rsh_inv((u * sigma) @ v.conj().T, shape)


def random_unitary(rng: np.random.Generator, modes: Sequence[int]) -> DenseTensor:
    """Left singular factor of a Gaussian tensor over ``modes``."""
    return tensor_svd(gaussian_tensor(rng, modes, modes)).u


def random_invertible(rng: np.random.Generator, modes: Sequence[int]) -> DenseTensor:
    return random_tensor(rng, modes, modes)


def random_hpd(rng: np.random.Generator, modes: Sequence[int], spectrum: Tuple[float, float] = SPECTRUM) -> DenseTensor:
    """``Q diag(lambda) Q*`` with ``Q`` unitary and ``lambda`` uniform in ``spectrum``."""
    q = rsh(random_unitary(rng, modes))
    lam = rng.uniform(*spectrum, size=q.shape[0])
    p = (q * lam) @ q.conj().T
    shape = EinsteinShape.of(modes, modes)
    return rsh_inv(0.5 * (p + p.conj().T), shape)


def full_row_rank_factor(
    rng: np.random.Generator,
    row_modes: Sequence[int],
    col_modes: Sequence[int],
    needed_rank: int,
) -> DenseTensor:
    """
    Random right factor ``R`` such that ``X @ R`` keeps the range of ``X``
    whenever ``rank(X) <= needed_rank``.

    Raises:
        HypothesisUnsatisfiable: if ``col_modes`` cannot carry ``needed_rank`` directions
    """
    shape = EinsteinShape.of(row_modes, col_modes)
    if shape.col_count < needed_rank:
        raise HypothesisUnsatisfiable(
            f"{shape.col_count} columns cannot preserve a range of dimension {needed_rank}"
        )
    return random_tensor(rng, row_modes, col_modes)
