"""
Reverse-order laws for (weighted) Moore-Penrose inverses of tensor products.

``check_rol`` and ``check_weighted_rol`` evaluate both sides of an
equivalence: the law itself and the range conditions that characterize it,
so the two verdicts can be compared. The constructive formulas always hold
and return the product inverse through intermediate tensors.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from tensor_ginv.config import settings
from tensor_ginv.errors import ContractionMismatch
from tensor_ginv.geninv import (
    CheckReport,
    WeightLike,
    as_weight,
    corange_inclusion,
    range_inclusion,
    relative_residual,
    weighted_conj_transpose,
    weighted_pinv,
)
from tensor_ginv.tensor import DenseTensor

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RolReport:
    """
    Outcome of a reverse-order-law check.

    ``law_holds`` iff ``||direct - reversed||_F <= tolerance * max(1, ||direct||_F)``.
    """

    direct: DenseTensor
    reversed: DenseTensor
    condition_checks: List[CheckReport]
    law_holds: bool
    conditions_hold: bool
    law_residual: float
    tolerance: float

    def to_check(self, name: str) -> CheckReport:
        """Agreement of the two verdicts as a single check."""
        agree = self.law_holds == self.conditions_hold
        condition_residual = max((c.max_residual for c in self.condition_checks), default=0.0)
        discrepancy = 0.0 if agree else max(self.law_residual, condition_residual)
        return CheckReport.from_residuals(
            name,
            {"iff_discrepancy": discrepancy},
            self.tolerance,
            details={"law": self.law_residual, "conditions": condition_residual},
            watch=(self.law_residual, condition_residual),
        )

    def summary(self) -> Dict[str, Any]:
        return {
            "law_holds": self.law_holds,
            "conditions_hold": self.conditions_hold,
            "law_residual": self.law_residual,
            "tolerance": self.tolerance,
            "conditions": [c.model_dump() for c in self.condition_checks],
        }


def _require_contractible(a: DenseTensor, b: DenseTensor) -> None:
    if a.col_modes != b.row_modes:
        raise ContractionMismatch(
            f"product needs a.col_modes == b.row_modes, got {list(a.col_modes)} and {list(b.row_modes)}"
        )


def _report(
    direct: DenseTensor,
    reversed_: DenseTensor,
    checks: List[CheckReport],
    tol: float,
) -> RolReport:
    residual = relative_residual(direct, reversed_)
    return RolReport(
        direct=direct,
        reversed=reversed_,
        condition_checks=checks,
        law_holds=residual <= tol,
        conditions_hold=all(c.passed for c in checks),
        law_residual=residual,
        tolerance=tol,
    )


def check_rol(
    a: DenseTensor,
    b: DenseTensor,
    tol: Optional[float] = None,
    rank_tol: Optional[float] = None,
) -> RolReport:
    """
    Compare ``(A B)†`` with ``B† A†`` and test the characterizing conditions
    ``R(A* A B) ⊆ R(B)`` and ``R(B B* A*) ⊆ R(A*)``.

    Raises:
        ShapeMismatch: if ``a`` and ``b`` are not contractible
    """
    _require_contractible(a, b)
    tol = settings.TOLERANCE if tol is None else tol
    a_h = a.H
    direct = weighted_pinv(a @ b, rank_tol=rank_tol)
    reversed_ = weighted_pinv(b, rank_tol=rank_tol) @ weighted_pinv(a, rank_tol=rank_tol)
    checks = [
        range_inclusion(a_h @ a @ b, b, tol, rank_tol),
        corange_inclusion(a @ b @ b.H, a, tol, rank_tol),
    ]
    return _report(direct, reversed_, checks, tol)


def _weights(a: DenseTensor, b: DenseTensor, m: WeightLike, n: WeightLike, p: WeightLike):
    return (
        as_weight(m, a.row_modes),
        as_weight(n, b.col_modes),
        as_weight(p, a.col_modes),
    )


def check_weighted_rol(
    a: DenseTensor,
    b: DenseTensor,
    m: WeightLike,
    n: WeightLike,
    p: WeightLike,
    tol: Optional[float] = None,
    rank_tol: Optional[float] = None,
) -> RolReport:
    """
    Compare ``(A B)†_{M,N}`` with ``B†_{P,N} A†_{M,P}`` and test
    ``R(A#_{P,M} A B) ⊆ R(B)`` and ``R(B B#_{N,P} A#_{P,M}) ⊆ R(A#_{P,M})``.

    Args:
        a: left factor, shape (I, J)
        b: right factor, shape (J, K)
        m: weight over I
        n: weight over K
        p: weight over J

    Raises:
        ShapeMismatch, NotPositiveDefinite
    """
    _require_contractible(a, b)
    tol = settings.TOLERANCE if tol is None else tol
    m_f, n_f, p_f = _weights(a, b, m, n, p)
    a_hash = weighted_conj_transpose(a, p_f, m_f)
    b_hash = weighted_conj_transpose(b, n_f, p_f)
    direct = weighted_pinv(a @ b, m_f, n_f, rank_tol)
    reversed_ = weighted_pinv(b, p_f, n_f, rank_tol) @ weighted_pinv(a, m_f, p_f, rank_tol)
    checks = [
        range_inclusion(a_hash @ a @ b, b, tol, rank_tol),
        range_inclusion(b @ b_hash @ a_hash, a_hash, tol, rank_tol),
    ]
    return _report(direct, reversed_, checks, tol)


@dataclass(frozen=True)
class ProductIntermediates:
    a1: DenseTensor
    b1: DenseTensor
    a1_dagger: DenseTensor
    b1_dagger: DenseTensor
    result: DenseTensor = field(repr=False)


def product_intermediates(
    a: DenseTensor,
    b: DenseTensor,
    m: WeightLike,
    n: WeightLike,
    p: WeightLike,
    rank_tol: Optional[float] = None,
) -> ProductIntermediates:
    """
    ``B1 = A†_{M,P} A B``, ``A1 = A B1 (B1)†_{P,N}`` and
    ``(A B)†_{M,N} = (B1)†_{P,N} (A1)†_{M,P}``.
    """
    _require_contractible(a, b)
    m_f, n_f, p_f = _weights(a, b, m, n, p)
    b1 = weighted_pinv(a, m_f, p_f, rank_tol) @ a @ b
    b1_dagger = weighted_pinv(b1, p_f, n_f, rank_tol)
    a1 = a @ b1 @ b1_dagger
    a1_dagger = weighted_pinv(a1, m_f, p_f, rank_tol)
    return ProductIntermediates(a1, b1, a1_dagger, b1_dagger, b1_dagger @ a1_dagger)


def b1_first_intermediates(
    a: DenseTensor,
    b: DenseTensor,
    m: WeightLike,
    n: WeightLike,
    p: WeightLike,
    rank_tol: Optional[float] = None,
) -> ProductIntermediates:
    """
    ``A1 = A B B†_{P,I}``, ``B1 = (A1)†_{M,P} A1 B`` and
    ``(A B)†_{M,N} = (B1)†_{P,N} (A1)†_{M,P}``.
    """
    _require_contractible(a, b)
    m_f, n_f, p_f = _weights(a, b, m, n, p)
    a1 = a @ b @ weighted_pinv(b, p_f, None, rank_tol)
    a1_dagger = weighted_pinv(a1, m_f, p_f, rank_tol)
    b1 = a1_dagger @ a1 @ b
    b1_dagger = weighted_pinv(b1, p_f, n_f, rank_tol)
    return ProductIntermediates(a1, b1, a1_dagger, b1_dagger, b1_dagger @ a1_dagger)


def wmp_product_via_intermediates(
    a: DenseTensor,
    b: DenseTensor,
    m: WeightLike,
    n: WeightLike,
    p: WeightLike,
    rank_tol: Optional[float] = None,
) -> DenseTensor:
    return product_intermediates(a, b, m, n, p, rank_tol).result


def wmp_product_via_b1_first(
    a: DenseTensor,
    b: DenseTensor,
    m: WeightLike,
    n: WeightLike,
    p: WeightLike,
    rank_tol: Optional[float] = None,
) -> DenseTensor:
    return b1_first_intermediates(a, b, m, n, p, rank_tol).result


def check_triple_rol(
    u: DenseTensor,
    v: DenseTensor,
    w: DenseTensor,
    m: WeightLike,
    n: WeightLike,
    tol: Optional[float] = None,
    rank_tol: Optional[float] = None,
) -> RolReport:
    """
    Sufficient conditions ``R(W) ⊆ R((U V)*)`` and ``R(U*) ⊆ R(V W)`` for
    ``(U V W)†_{M,N} = W†_{I,N} V† U†_{M,I}``.

    The law residual is always computed; it is only asserted by callers when
    ``conditions_hold``.

    Raises:
        ShapeMismatch, NotPositiveDefinite
    """
    _require_contractible(u, v)
    _require_contractible(v, w)
    tol = settings.TOLERANCE if tol is None else tol
    m_f = as_weight(m, u.row_modes)
    n_f = as_weight(n, w.col_modes)
    uv = u @ v
    vw = v @ w
    checks = [
        range_inclusion(w, uv.H, tol, rank_tol),
        range_inclusion(u.H, vw, tol, rank_tol),
    ]
    direct = weighted_pinv(uv @ w, m_f, n_f, rank_tol)
    reversed_ = (
        weighted_pinv(w, None, n_f, rank_tol)
        @ weighted_pinv(v, rank_tol=rank_tol)
        @ weighted_pinv(u, m_f, None, rank_tol)
    )
    report = _report(direct, reversed_, checks, tol)
    if report.conditions_hold and not report.law_holds:
        logger.warning(f"Triple reverse-order law residual {report.law_residual:.3e} despite satisfied conditions")
    return report

