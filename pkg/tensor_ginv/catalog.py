"""
Executable catalog of generalized-inverse identities.

Each ``IdentityCase`` pairs an evaluator, which maps named input tensors to a
``CheckReport``, with a generator of seeded random inputs. Cases come in three
kinds:

* unconditional: the identity holds for every input;
* conditional: the identity holds when its range hypotheses hold, and the
  generator constructs inputs that satisfy them;
* equivalence: the report checks that the law and its characterizing
  conditions agree, over a mix of constructed and unconstrained inputs.
"""
import logging
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, computed_field

from tensor_ginv.config import settings
from tensor_ginv.errors import HypothesisUnsatisfiable, ShapeMismatch
from tensor_ginv.generators import (
    full_row_rank_factor,
    orthonormal_columns,
    random_hpd,
    random_invertible,
    random_tensor,
)
from tensor_ginv.geninv import (
    CheckReport,
    as_weight,
    range_inclusion,
    relative_residual,
    weighted_conj_transpose,
    weighted_pinv,
)
from tensor_ginv.rol import (
    check_rol,
    check_triple_rol,
    check_weighted_rol,
    wmp_product_via_b1_first,
    wmp_product_via_intermediates,
)
from tensor_ginv.spectral import frd_transform_witness, full_rank_decomposition, invert
from tensor_ginv.tensor import DenseTensor, EinsteinShape, identity_tensor, rsh, rsh_inv

logger = logging.getLogger(__name__)

Inputs = Dict[str, DenseTensor]
Evaluator = Callable[[Inputs, float, Optional[float]], CheckReport]
Generator = Callable[[np.random.Generator, "ShapeFamily", int], Inputs]

WEIGHT_ROLES = ("M", "N", "P", "Q")


class CaseKind(str, Enum):
    UNCONDITIONAL = "unconditional"
    CONDITIONAL = "conditional"
    EQUIVALENCE = "equivalence"


@dataclass(frozen=True)
class ShapeFamily:
    """Mode lists for the four index groups I, J, K, H of a factor chain."""

    i: Tuple[int, ...]
    j: Tuple[int, ...]
    k: Tuple[int, ...]
    h: Tuple[int, ...]

    def modes(self, letter: str) -> Tuple[int, ...]:
        return getattr(self, letter.lower())

    def count(self, letter: str) -> int:
        return int(np.prod(self.modes(letter)))


FAMILIES: Tuple[ShapeFamily, ...] = (
    ShapeFamily(i=(2,), j=(3,), k=(2,), h=(3,)),
    ShapeFamily(i=(2, 2), j=(3,), k=(2, 2), h=(2,)),
    ShapeFamily(i=(2, 2), j=(2, 2), k=(2,), h=(2, 2)),
)


@dataclass(frozen=True)
class IdentityCase:
    """
    One catalog entry.

    ``roles`` lists the tensor roles the evaluator reads; weight roles that are
    absent from the inputs default to the identity.
    """

    key: str
    roles: Tuple[str, ...]
    anchor: str
    kind: CaseKind
    evaluator: Evaluator
    generator: Generator

    @property
    def tensor_roles(self) -> Tuple[str, ...]:
        return tuple(r for r in self.roles if r not in WEIGHT_ROLES)


# Input generation

def _layout_generator(layout: Dict[str, str]) -> Generator:
    """Random inputs from a role layout such as ``{"A": "IJ", "M": "I"}``."""

    def generate(rng: np.random.Generator, family: ShapeFamily, index: int) -> Inputs:
        inputs = {}
        for role, letters in layout.items():
            if role in WEIGHT_ROLES:
                inputs[role] = random_hpd(rng, family.modes(letters))
            else:
                inputs[role] = random_tensor(rng, family.modes(letters[0]), family.modes(letters[1]))
        return inputs

    return generate


def _weights(rng: np.random.Generator, family: ShapeFamily, **letters: str) -> Inputs:
    return {role: random_hpd(rng, family.modes(letter)) for role, letter in letters.items()}


def _chain(inputs: Inputs) -> DenseTensor:
    return inputs["U"] @ inputs["V"] @ inputs["W"]


def _pair_with_star_range(rng: np.random.Generator, family: ShapeFamily) -> Inputs:
    """A and B = A* R with R(B) = R(A*)."""
    rank = min(family.count("I"), family.count("J"), family.count("K"))
    a = random_tensor(rng, family.i, family.j, rank=rank)
    r = full_row_rank_factor(rng, family.i, family.k, rank)
    return {"A": a, "B": a.H @ r}


def _pair_with_hash_range(rng: np.random.Generator, family: ShapeFamily) -> Inputs:
    """A, weights and B = A#_{P,M} R with R(B) = R(A#_{P,M})."""
    inputs = _weights(rng, family, M="I", N="K", P="J")
    rank = min(family.count("I"), family.count("J"), family.count("K"))
    a = random_tensor(rng, family.i, family.j, rank=rank)
    r = full_row_rank_factor(rng, family.i, family.k, rank)
    inputs["A"] = a
    inputs["B"] = weighted_conj_transpose(a, inputs["P"], inputs["M"]) @ r
    return inputs


def _generate_rol_sufficient(rng: np.random.Generator, family: ShapeFamily, index: int) -> Inputs:
    inputs = _pair_with_star_range(rng, family)
    inputs.update(_weights(rng, family, M="I", N="K"))
    return inputs


def _generate_weighted_sufficient(rng: np.random.Generator, family: ShapeFamily, index: int) -> Inputs:
    return _pair_with_hash_range(rng, family)


def _generate_rv1(rng: np.random.Generator, family: ShapeFamily, index: int) -> Inputs:
    if index % 2 == 0:
        return _pair_with_star_range(rng, family)
    return {
        "A": random_tensor(rng, family.i, family.j),
        "B": random_tensor(rng, family.j, family.k),
    }


def _generate_weighted_equivalence(rng: np.random.Generator, family: ShapeFamily, index: int) -> Inputs:
    if index % 2 == 0:
        return _pair_with_hash_range(rng, family)
    inputs = _weights(rng, family, M="I", N="K", P="J")
    inputs["A"] = random_tensor(rng, family.i, family.j)
    inputs["B"] = random_tensor(rng, family.j, family.k)
    return inputs


def _generate_triple(rng: np.random.Generator, family: ShapeFamily, index: int) -> Inputs:
    """
    U = L S*, V = S C and W = V* U* R, where S spans R(U*).

    V V* maps R(U*) onto itself, which gives R(U*) = R(V W) and
    R(W) = R((U V)*).
    """
    s = min(family.count(x) for x in "IJKH")
    basis = orthonormal_columns(rng, family.count("J"), s)
    left = rsh(random_tensor(rng, family.i, (s,)))
    coupling = rsh(random_tensor(rng, (s,), family.k))
    u = rsh_inv(left @ basis.conj().T, EinsteinShape.of(family.i, family.j))
    v = rsh_inv(basis @ coupling, EinsteinShape.of(family.j, family.k))
    r = full_row_rank_factor(rng, family.i, family.h, s)
    inputs = {"U": u, "V": v, "W": v.H @ u.H @ r}
    inputs.update(_weights(rng, family, M="I", N="H"))
    return inputs


def _generate_frd(rng: np.random.Generator, family: ShapeFamily, index: int) -> Inputs:
    rank = max(1, min(family.count("I"), family.count("J")) - index % 2)
    return {
        "A": random_tensor(rng, family.i, family.j, rank=rank),
        "B": random_invertible(rng, (rank,)),
    }


# Evaluators

def _weight(inputs: Inputs, role: str, modes: Sequence[int]):
    return as_weight(inputs.get(role), modes)


def _unconditional(
    compute: Callable[[Inputs, Optional[float]], Dict[str, float]],
) -> Evaluator:
    def evaluate(inputs: Inputs, tol: float, rank_tol: Optional[float]) -> CheckReport:
        return CheckReport.from_residuals("identity", compute(inputs, rank_tol), tol)

    return evaluate


def _equivalence(
    compute: Callable[[Inputs, float, Optional[float]], Tuple[Dict[str, float], float]],
) -> Evaluator:
    """Wrap a computation returning (condition residuals, law residual)."""

    def evaluate(inputs: Inputs, tol: float, rank_tol: Optional[float]) -> CheckReport:
        conditions, law = compute(inputs, tol, rank_tol)
        condition_residual = max(conditions.values())
        agree = (condition_residual <= tol) == (law <= tol)
        details = dict(conditions)
        details["law"] = law
        return CheckReport.from_residuals(
            "equivalence",
            {"iff_discrepancy": 0.0 if agree else max(condition_residual, law)},
            tol,
            details=details,
            watch=(condition_residual, law),
        )

    return evaluate


def _hash_involution(x: Inputs, rank_tol: Optional[float]) -> Dict[str, float]:
    a = x["A"]
    m, n = _weight(x, "M", a.row_modes), _weight(x, "N", a.col_modes)
    a_hash = weighted_conj_transpose(a, n, m)
    return {"involution": relative_residual(a, weighted_conj_transpose(a_hash, m, n))}


def _hash_reversal(x: Inputs, rank_tol: Optional[float]) -> Dict[str, float]:
    a, b = x["A"], x["B"]
    m, n, p = _weight(x, "M", a.row_modes), _weight(x, "N", a.col_modes), _weight(x, "P", b.col_modes)
    lhs = weighted_conj_transpose(a @ b, p, m)
    rhs = weighted_conj_transpose(b, p, n) @ weighted_conj_transpose(a, n, m)
    return {"reversal": relative_residual(lhs, rhs)}


def _hash_dagger_swap(x: Inputs, rank_tol: Optional[float]) -> Dict[str, float]:
    a = x["A"]
    m, n = _weight(x, "M", a.row_modes), _weight(x, "N", a.col_modes)
    lhs = weighted_pinv(weighted_conj_transpose(a, n, m), n, m, rank_tol)
    rhs = weighted_conj_transpose(weighted_pinv(a, m, n, rank_tol), m, n)
    return {"swap": relative_residual(lhs, rhs)}


def _hash_sandwich_a(x: Inputs, rank_tol: Optional[float]) -> Dict[str, float]:
    a = x["A"]
    m, n = _weight(x, "M", a.row_modes), _weight(x, "N", a.col_modes)
    a_hash = weighted_conj_transpose(a, n, m)
    a_hash_dagger = weighted_pinv(a_hash, n, m, rank_tol)
    return {
        "left": relative_residual(a, a @ a_hash @ a_hash_dagger),
        "right": relative_residual(a, a_hash_dagger @ a_hash @ a),
    }


def _hash_sandwich_hash(x: Inputs, rank_tol: Optional[float]) -> Dict[str, float]:
    a = x["A"]
    m, n = _weight(x, "M", a.row_modes), _weight(x, "N", a.col_modes)
    a_hash = weighted_conj_transpose(a, n, m)
    a_dagger = weighted_pinv(a, m, n, rank_tol)
    return {
        "left": relative_residual(a_hash, a_dagger @ a @ a_hash),
        "right": relative_residual(a_hash, a_hash @ a @ a_dagger),
    }


def _hash_range(x: Inputs, rank_tol: Optional[float]) -> Dict[str, float]:
    a = x["A"]
    m, n = _weight(x, "M", a.row_modes), _weight(x, "N", a.col_modes)
    a_hash = weighted_conj_transpose(a, n, m)
    projector = weighted_pinv(a, m, n, rank_tol) @ a
    return {
        "projector_in_hash": range_inclusion(projector, a_hash, rank_tol=rank_tol).max_residual,
        "hash_in_projector": range_inclusion(a_hash, projector, rank_tol=rank_tol).max_residual,
    }


def _lemma42_a(x: Inputs, rank_tol: Optional[float]) -> Dict[str, float]:
    a = x["A"]
    m = _weight(x, "M", a.row_modes)
    return {"left_projector": relative_residual(
        weighted_pinv(a, rank_tol=rank_tol) @ a, weighted_pinv(a, m, None, rank_tol) @ a
    )}


def _lemma42_b(x: Inputs, rank_tol: Optional[float]) -> Dict[str, float]:
    a = x["A"]
    n = _weight(x, "N", a.col_modes)
    return {"right_projector": relative_residual(
        a @ weighted_pinv(a, rank_tol=rank_tol), a @ weighted_pinv(a, None, n, rank_tol)
    )}


def _lemma42_c(x: Inputs, rank_tol: Optional[float]) -> Dict[str, float]:
    a = x["A"]
    m = _weight(x, "M", a.row_modes)
    lhs = weighted_pinv(a, m, None, rank_tol).H
    rhs = m.sqrt @ weighted_pinv(a.H @ m.sqrt, rank_tol=rank_tol)
    return {"row_weighted_star": relative_residual(lhs, rhs)}


def _lemma42_d(x: Inputs, rank_tol: Optional[float]) -> Dict[str, float]:
    a = x["A"]
    n = _weight(x, "N", a.col_modes)
    lhs = weighted_pinv(a, None, n, rank_tol).H
    rhs = weighted_pinv(n.inv_sqrt @ a.H, rank_tol=rank_tol) @ n.inv_sqrt
    return {"column_weighted_star": relative_residual(lhs, rhs)}


def _sandwich_uv(x: Inputs, rank_tol: Optional[float]) -> Dict[str, float]:
    u, v = x["U"], x["V"]
    m, n = _weight(x, "M", u.row_modes), _weight(x, "N", v.col_modes)
    u_dagger = weighted_pinv(u, m, None, rank_tol)
    v_dagger = weighted_pinv(v, None, n, rank_tol)
    lhs = weighted_pinv(u @ v, m, n, rank_tol)
    rhs = (
        weighted_pinv(u_dagger.H @ v, m.inverted(), n, rank_tol)
        @ (v_dagger @ u_dagger).H
        @ weighted_pinv(u @ v_dagger.H, m, n.inverted(), rank_tol)
    )
    return {"sandwich": relative_residual(lhs, rhs)}


def _a1_decomp_a(x: Inputs, rank_tol: Optional[float]) -> Dict[str, float]:
    u, v, w = x["U"], x["V"], x["W"]
    a = _chain(x)
    m, n = _weight(x, "M", a.row_modes), _weight(x, "N", a.col_modes)
    v_dagger = weighted_pinv(v, rank_tol=rank_tol)
    left = weighted_pinv(u @ v @ v_dagger, rank_tol=rank_tol) @ a
    right = a @ weighted_pinv(v_dagger @ v @ w, rank_tol=rank_tol)
    rhs = weighted_pinv(left, None, n, rank_tol) @ v @ weighted_pinv(right, m, None, rank_tol)
    return {"decomposition": relative_residual(weighted_pinv(a, m, n, rank_tol), rhs)}


def _a1_decomp_b(x: Inputs, rank_tol: Optional[float]) -> Dict[str, float]:
    u, v, w = x["U"], x["V"], x["W"]
    a = _chain(x)
    m, n = _weight(x, "M", a.row_modes), _weight(x, "N", a.col_modes)
    v_dagger_h = weighted_pinv(v, rank_tol=rank_tol).H
    left = weighted_pinv(u @ v_dagger_h, rank_tol=rank_tol) @ a
    right = a @ weighted_pinv(v_dagger_h @ w, rank_tol=rank_tol)
    v_h = v.H
    rhs = weighted_pinv(left, None, n, rank_tol) @ v_h @ v @ v_h @ weighted_pinv(right, m, None, rank_tol)
    return {"decomposition": relative_residual(weighted_pinv(a, m, n, rank_tol), rhs)}


def _uvw_a(x: Inputs, rank_tol: Optional[float]) -> Dict[str, float]:
    u, v, w = x["U"], x["V"], x["W"]
    m, n = _weight(x, "M", u.row_modes), _weight(x, "N", w.col_modes)
    u_hat = weighted_pinv(u, m, None, rank_tol).H
    w_hat = weighted_pinv(w, None, n, rank_tol).H
    rhs = (
        weighted_pinv(u_hat @ v @ w, m.inverted(), n, rank_tol)
        @ u_hat @ v @ w_hat
        @ weighted_pinv(u @ v @ w_hat, m, n.inverted(), rank_tol)
    )
    return {"triple": relative_residual(weighted_pinv(_chain(x), m, n, rank_tol), rhs)}


def _uvw_b(x: Inputs, rank_tol: Optional[float]) -> Dict[str, float]:
    u, v, w = x["U"], x["V"], x["W"]
    m, n = _weight(x, "M", u.row_modes), _weight(x, "N", w.col_modes)
    uv_hat = weighted_pinv(u @ v, m, None, rank_tol).H
    vw_hat = weighted_pinv(v @ w, None, n, rank_tol).H
    rhs = (
        weighted_pinv(uv_hat @ w, m.inverted(), n, rank_tol)
        @ uv_hat @ weighted_pinv(v, rank_tol=rank_tol) @ vw_hat
        @ weighted_pinv(u @ vw_hat, m, n.inverted(), rank_tol)
    )
    return {"triple": relative_residual(weighted_pinv(_chain(x), m, n, rank_tol), rhs)}


def _uvw1(x: Inputs, rank_tol: Optional[float]) -> Dict[str, float]:
    u, v, w = x["U"], x["V"], x["W"]
    a = _chain(x)
    m, n = _weight(x, "M", a.row_modes), _weight(x, "N", a.col_modes)
    left = weighted_pinv(u, rank_tol=rank_tol) @ a
    right = a @ weighted_pinv(w, rank_tol=rank_tol)
    rhs = weighted_pinv(left, None, n, rank_tol) @ v @ weighted_pinv(right, m, None, rank_tol)
    return {"decomposition": relative_residual(weighted_pinv(a, m, n, rank_tol), rhs)}


def _uvw1_corollary_a(x: Inputs, rank_tol: Optional[float]) -> Dict[str, float]:
    u, v, w = x["U"], x["V"], x["W"]
    a = _chain(x)
    m, n = _weight(x, "M", a.row_modes), _weight(x, "N", a.col_modes)
    p, q = _weight(x, "P", v.row_modes), _weight(x, "Q", v.col_modes)
    left = weighted_pinv(u, None, p, rank_tol) @ a
    right = a @ weighted_pinv(w, q, None, rank_tol)
    rhs = weighted_pinv(left, p, n, rank_tol) @ v @ weighted_pinv(right, m, q, rank_tol)
    return {"decomposition": relative_residual(weighted_pinv(a, m, n, rank_tol), rhs)}


def _uvw1_corollary_b(x: Inputs, rank_tol: Optional[float]) -> Dict[str, float]:
    u, v, w = x["U"], x["V"], x["W"]
    a = _chain(x)
    m, n = _weight(x, "M", a.row_modes), _weight(x, "N", a.col_modes)
    p, q = _weight(x, "P", v.row_modes), _weight(x, "Q", v.col_modes)
    left = weighted_pinv(u @ v @ weighted_pinv(v, p, None, rank_tol), m, p, rank_tol) @ a
    right = a @ weighted_pinv(weighted_pinv(v, None, q, rank_tol) @ v @ w, q, n, rank_tol)
    rhs = weighted_pinv(left, p, n, rank_tol) @ v @ weighted_pinv(right, m, q, rank_tol)
    return {"decomposition": relative_residual(weighted_pinv(a, m, n, rank_tol), rhs)}


def _product_intermediates(x: Inputs, rank_tol: Optional[float]) -> Dict[str, float]:
    a, b = x["A"], x["B"]
    m, n, p = _weight(x, "M", a.row_modes), _weight(x, "N", b.col_modes), _weight(x, "P", a.col_modes)
    direct = weighted_pinv(a @ b, m, n, rank_tol)
    return {"intermediates": relative_residual(direct, wmp_product_via_intermediates(a, b, m, n, p, rank_tol))}


def _product_b1_first(x: Inputs, rank_tol: Optional[float]) -> Dict[str, float]:
    a, b = x["A"], x["B"]
    m, n, p = _weight(x, "M", a.row_modes), _weight(x, "N", b.col_modes), _weight(x, "P", a.col_modes)
    direct = weighted_pinv(a @ b, m, n, rank_tol)
    return {"b1_first": relative_residual(direct, wmp_product_via_b1_first(a, b, m, n, p, rank_tol))}


def _idr1_c(x: Inputs, rank_tol: Optional[float]) -> Dict[str, float]:
    a, b = x["A"], x["B"]
    with_dagger = a @ weighted_pinv(b, rank_tol=rank_tol)
    with_star = a @ b.H
    return {
        "dagger_in_star": range_inclusion(with_dagger, with_star, rank_tol=rank_tol).max_residual,
        "star_in_dagger": range_inclusion(with_star, with_dagger, rank_tol=rank_tol).max_residual,
    }


def _frd_nonuniqueness(x: Inputs, rank_tol: Optional[float]) -> Dict[str, float]:
    a, b = x["A"], x["B"]
    frd = full_rank_decomposition(a, rank_tol)
    if b.row_modes != (frd.r,):
        raise HypothesisUnsatisfiable(f"transform over {list(b.row_modes)} does not match rank {frd.r}")
    other = frd_transform_witness(frd, b)
    f_dagger = weighted_pinv(other.f, rank_tol=rank_tol)
    g_dagger = weighted_pinv(other.g, rank_tol=rank_tol)
    eye = identity_tensor((frd.r,))
    return {
        "reconstruction": relative_residual(a, other.f @ other.g),
        "left_factor_dagger": relative_residual(f_dagger, invert(b) @ weighted_pinv(frd.f, rank_tol=rank_tol)),
        "right_factor_dagger": relative_residual(g_dagger, weighted_pinv(frd.g, rank_tol=rank_tol) @ b),
        "left_inverse": relative_residual(eye, f_dagger @ other.f),
        "right_inverse": relative_residual(eye, other.g @ g_dagger),
    }


def _rol_sufficient(x: Inputs, tol: float, rank_tol: Optional[float]) -> CheckReport:
    a, b = x["A"], x["B"]
    m, n = _weight(x, "M", a.row_modes), _weight(x, "N", b.col_modes)
    a_h = a.H
    law = relative_residual(
        weighted_pinv(a @ b, m, n, rank_tol),
        weighted_pinv(b, None, n, rank_tol) @ weighted_pinv(a, m, None, rank_tol),
    )
    return CheckReport.from_residuals("conditional", {
        "range_b_in_a_star": range_inclusion(b, a_h, tol, rank_tol).max_residual,
        "range_a_star_in_b": range_inclusion(a_h, b, tol, rank_tol).max_residual,
        "law": law,
    }, tol)


def _rol_weighted_sufficient(x: Inputs, tol: float, rank_tol: Optional[float]) -> CheckReport:
    a, b = x["A"], x["B"]
    m, n, p = _weight(x, "M", a.row_modes), _weight(x, "N", b.col_modes), _weight(x, "P", a.col_modes)
    a_hash = weighted_conj_transpose(a, p, m)
    law = relative_residual(
        weighted_pinv(a @ b, m, n, rank_tol),
        weighted_pinv(b, p, n, rank_tol) @ weighted_pinv(a, m, p, rank_tol),
    )
    return CheckReport.from_residuals("conditional", {
        "range_b_in_hash": range_inclusion(b, a_hash, tol, rank_tol).max_residual,
        "null_space": range_inclusion(p.inv_sqrt @ a.H, p.sqrt @ b @ n.inv_sqrt, tol, rank_tol).max_residual,
        "law": law,
    }, tol)


def _triple_rol(x: Inputs, tol: float, rank_tol: Optional[float]) -> CheckReport:
    report = check_triple_rol(x["U"], x["V"], x["W"], x.get("M"), x.get("N"), tol, rank_tol)
    residuals = {f"condition_{i}": c.max_residual for i, c in enumerate(report.condition_checks, 1)}
    residuals["law"] = report.law_residual
    return CheckReport.from_residuals("conditional", residuals, tol)


def _rv1(x: Inputs, tol: float, rank_tol: Optional[float]) -> CheckReport:
    return check_rol(x["A"], x["B"], tol, rank_tol).to_check("equivalence")


def _rv2(x: Inputs, tol: float, rank_tol: Optional[float]) -> CheckReport:
    return check_weighted_rol(x["A"], x["B"], x.get("M"), x.get("N"), x.get("P"), tol, rank_tol).to_check("equivalence")


def _weighted_parts(x: Inputs, rank_tol: Optional[float]):
    a, b = x["A"], x["B"]
    m, n, p = _weight(x, "M", a.row_modes), _weight(x, "N", b.col_modes), _weight(x, "P", a.col_modes)
    a_dagger = weighted_pinv(a, m, p, rank_tol)
    b_dagger = weighted_pinv(b, p, n, rank_tol)
    law = relative_residual(weighted_pinv(a @ b, m, n, rank_tol), b_dagger @ a_dagger)
    return a, b, m, n, p, a_dagger, b_dagger, law


def _rv2_corollary(x: Inputs, tol: float, rank_tol: Optional[float]):
    a, b, m, n, p, a_dagger, b_dagger, law = _weighted_parts(x, rank_tol)
    a_hash = weighted_conj_transpose(a, p, m)
    b_hash = weighted_conj_transpose(b, n, p)
    bba = b @ b_hash @ a_hash
    aab = a_hash @ a @ b
    return {
        "left_equation": relative_residual(bba, a_dagger @ a @ bba),
        "right_equation": relative_residual(aab, b @ b_dagger @ aab),
    }, law


def _iff_intermediate(x: Inputs, tol: float, rank_tol: Optional[float]):
    a, b, m, n, p, a_dagger, b_dagger, law = _weighted_parts(x, rank_tol)
    return {
        "first_factor": relative_residual(
            weighted_pinv(a_dagger @ a @ b, p, n, rank_tol), b_dagger @ a_dagger @ a
        ),
        "second_factor": relative_residual(
            weighted_pinv(a @ b @ b_dagger, m, p, rank_tol), b @ b_dagger @ a_dagger
        ),
    }, law


_A = {"A": "IJ", "M": "I", "N": "J"}
_AB = {"A": "IJ", "B": "JK", "M": "I", "N": "K", "P": "J"}
_UV = {"U": "IJ", "V": "JK", "M": "I", "N": "K"}
_UVW = {"U": "IJ", "V": "JK", "W": "KH", "M": "I", "N": "H"}
_UVW_PQ = dict(_UVW, P="J", Q="K")


def _case(key, kind, anchor, evaluator, generator, roles) -> IdentityCase:
    return IdentityCase(key, tuple(roles), anchor, kind, evaluator, generator)


def _layout_case(key: str, anchor: str, compute, layout: Dict[str, str]) -> IdentityCase:
    return _case(key, CaseKind.UNCONDITIONAL, anchor, _unconditional(compute), _layout_generator(layout), layout)


CATALOG: Dict[str, IdentityCase] = {c.key: c for c in [
    _layout_case("weighted-hash-involution", "(A#_{N,M})#_{M,N} = A", _hash_involution, _A),
    _layout_case(
        "weighted-hash-reversal", "(A B)#_{P,M} = B#_{P,N} A#_{N,M}", _hash_reversal,
        {"A": "IJ", "B": "JK", "M": "I", "N": "J", "P": "K"},
    ),
    _layout_case("hash-dagger-swap", "(A#_{N,M})†_{N,M} = (A†_{M,N})#_{M,N}", _hash_dagger_swap, _A),
    _layout_case("hash-sandwich-A", "A = A A# (A#)†_{N,M} = (A#)†_{N,M} A# A", _hash_sandwich_a, _A),
    _layout_case("hash-sandwich-hash", "A# = A†_{M,N} A A# = A# A A†_{M,N}", _hash_sandwich_hash, _A),
    _layout_case("hash-range", "R(A†_{M,N} A) = R(A#_{N,M})", _hash_range, _A),
    _layout_case("lemma42-a", "A†_{M,I} A = A† A", _lemma42_a, {"A": "IJ", "M": "I"}),
    _layout_case("lemma42-b", "A A†_{I,N} = A A†", _lemma42_b, {"A": "IJ", "N": "J"}),
    _layout_case("lemma42-c", "(A†_{M,I})* = M^{1/2} (A* M^{1/2})†", _lemma42_c, {"A": "IJ", "M": "I"}),
    _layout_case("lemma42-d", "(A†_{I,N})* = (N^{-1/2} A*)† N^{-1/2}", _lemma42_d, {"A": "IJ", "N": "J"}),
    _layout_case(
        "sandwich-UV",
        "(U V)†_{M,N} = [(U†_{M,I})* V]†_{M^-1,N} (V†_{I,N} U†_{M,I})* [U (V†_{I,N})*]†_{M,N^-1}",
        _sandwich_uv, _UV,
    ),
    _layout_case("A1-decomp-a", "A†_{M,N} = X†_{I,N} V Y†_{M,I}, X = (U V V†)† A, Y = A (V† V W)†", _a1_decomp_a, _UVW),
    _layout_case(
        "A1-decomp-b", "A†_{M,N} = X†_{I,N} V* V V* Y†_{M,I}, X = [U (V†)*]† A, Y = A [(V†)* W]†",
        _a1_decomp_b, _UVW,
    ),
    _layout_case(
        "UVW-a",
        "(U V W)†_{M,N} = [(U†_{M,I})* V W]†_{M^-1,N} (U†_{M,I})* V (W†_{I,N})* [U V (W†_{I,N})*]†_{M,N^-1}",
        _uvw_a, _UVW,
    ),
    _layout_case(
        "UVW-b",
        "(U V W)†_{M,N} = [((U V)†_{M,I})* W]†_{M^-1,N} ((U V)†_{M,I})* V† ((V W)†_{I,N})* [U ((V W)†_{I,N})*]†_{M,N^-1}",
        _uvw_b, _UVW,
    ),
    _layout_case("uvw1", "A†_{M,N} = X†_{I,N} V Y†_{M,I}, X = U† A, Y = A W†", _uvw1, _UVW),
    _layout_case(
        "uvw1-corollary-a", "A†_{M,N} = (U†_{I,P} A)†_{P,N} V (A W†_{Q,I})†_{M,Q}", _uvw1_corollary_a, _UVW_PQ,
    ),
    _layout_case(
        "uvw1-corollary-b",
        "A†_{M,N} = [(U V V†_{P,I})†_{M,P} A]†_{P,N} V [A (V†_{I,Q} V W)†_{Q,N}]†_{M,Q}",
        _uvw1_corollary_b, _UVW_PQ,
    ),
    _case(
        "rol-sufficient", CaseKind.CONDITIONAL, "R(B) = R(A*) implies (A B)†_{M,N} = B†_{I,N} A†_{M,I}",
        _rol_sufficient, _generate_rol_sufficient, ("A", "B", "M", "N"),
    ),
    _case(
        "rv1", CaseKind.EQUIVALENCE, "(A B)† = B† A† iff R(A* A B) ⊆ R(B) and R(B B* A*) ⊆ R(A*)",
        _rv1, _generate_rv1, ("A", "B"),
    ),
    _case(
        "rv2", CaseKind.EQUIVALENCE,
        "(A B)†_{M,N} = B†_{P,N} A†_{M,P} iff R(A#_{P,M} A B) ⊆ R(B) and R(B B#_{N,P} A#_{P,M}) ⊆ R(A#_{P,M})",
        _rv2, _generate_weighted_equivalence, ("A", "B", "M", "N", "P"),
    ),
    _case(
        "rv2-corollary", CaseKind.EQUIVALENCE,
        "law iff A†_{M,P} A B B#_{N,P} A#_{P,M} = B B#_{N,P} A#_{P,M} and B B†_{P,N} A#_{P,M} A B = A#_{P,M} A B",
        _equivalence(_rv2_corollary), _generate_weighted_equivalence, ("A", "B", "M", "N", "P"),
    ),
    _case(
        "iff-intermediate", CaseKind.EQUIVALENCE,
        "law iff (A†_{M,P} A B)†_{P,N} = B†_{P,N} A†_{M,P} A and (A B B†_{P,N})†_{M,P} = B B†_{P,N} A†_{M,P}",
        _equivalence(_iff_intermediate), _generate_weighted_equivalence, ("A", "B", "M", "N", "P"),
    ),
    _case(
        "rol-weighted-sufficient", CaseKind.CONDITIONAL,
        "R(B) ⊆ R(A#_{P,M}) and R(P^{-1/2} A*) ⊆ R(P^{1/2} B N^{-1/2}) imply (A B)†_{M,N} = B†_{P,N} A†_{M,P}",
        _rol_weighted_sufficient, _generate_weighted_sufficient, ("A", "B", "M", "N", "P"),
    ),
    _case(
        "triple-rol", CaseKind.CONDITIONAL,
        "R(W) ⊆ R((U V)*) and R(U*) ⊆ R(V W) imply (U V W)†_{M,N} = W†_{I,N} V† U†_{M,I}",
        _triple_rol, _generate_triple, ("U", "V", "W", "M", "N"),
    ),
    _layout_case(
        "product-intermediates", "(A B)†_{M,N} = (B1)†_{P,N} (A1)†_{M,P}, B1 = A†_{M,P} A B, A1 = A B1 (B1)†_{P,N}",
        _product_intermediates, _AB,
    ),
    _layout_case(
        "product-b1-first", "(A B)†_{M,N} = (B1)†_{P,N} (A1)†_{M,P}, A1 = A B B†_{P,I}, B1 = (A1)†_{M,P} A1 B",
        _product_b1_first, _AB,
    ),
    _case(
        "frd-nonuniqueness", CaseKind.UNCONDITIONAL, "(F B)† = B^-1 F† and (B^-1 G)† = G† B",
        _unconditional(_frd_nonuniqueness), _generate_frd, ("A", "B"),
    ),
    _layout_case("idr1-c", "R(A B†) = R(A B*)", _idr1_c, {"A": "IJ", "B": "KJ"}),
]}


def get_case(key: str) -> IdentityCase:
    try:
        return CATALOG[key]
    except KeyError:
        raise ShapeMismatch(f"Unknown identity case '{key}'; known cases: {', '.join(CATALOG)}")


def instance_rng(seed: int, key: str, index: int) -> np.random.Generator:
    """Per-instance stream, independent of evaluation order."""
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(zlib.crc32(key.encode()), index))
    return np.random.Generator(np.random.PCG64(sequence))


def generate_inputs(key: str, seed: int = 0, index: int = 0) -> Inputs:
    case = get_case(key)
    return case.generator(instance_rng(seed, key, index), FAMILIES[index % len(FAMILIES)], index)


def evaluate_identity(
    key: str,
    inputs: Optional[Inputs] = None,
    tol: Optional[float] = None,
    rank_tol: Optional[float] = None,
    seed: int = 0,
    index: int = 0,
) -> CheckReport:
    """
    Residual report of a catalog identity.

    Args:
        key: catalog key
        inputs: tensors by role; None self-generates instance ``index`` from ``seed``
        tol: pass threshold, default settings.TOLERANCE
        rank_tol: relative truncation for inner pseudoinverses,
            default settings.CATALOG_RANK_TOLERANCE

    Raises:
        ShapeMismatch: for unknown keys, missing roles or non-conforming shapes
        HypothesisUnsatisfiable: if the generator cannot realize the case's hypotheses
    """
    case = get_case(key)
    tol = settings.TOLERANCE if tol is None else tol
    rank_tol = settings.CATALOG_RANK_TOLERANCE if rank_tol is None else rank_tol
    if inputs is None:
        inputs = generate_inputs(key, seed, index)
    missing = [role for role in case.tensor_roles if role not in inputs]
    if missing:
        raise ShapeMismatch(f"case '{key}' needs tensors for roles {missing}")
    report = case.evaluator(inputs, tol, rank_tol)
    return report.model_copy(update={"name": key})


class CaseSummary(BaseModel):
    kind: CaseKind
    anchor: str
    instances: int
    max_residual: float
    failures: int
    marginals: int
    unsatisfiable: int = 0
    suspected_typo: bool = False


class CatalogSummary(BaseModel):
    seed: int
    tolerance: float
    cases: Dict[str, CaseSummary] = Field(default_factory=dict)

    @computed_field
    @property
    def passed(self) -> bool:
        return all(c.failures == 0 and c.unsatisfiable == 0 for c in self.cases.values())


def _default_instances(case: IdentityCase) -> int:
    if case.kind is CaseKind.EQUIVALENCE:
        return settings.EQUIVALENCE_INSTANCES
    return settings.CATALOG_INSTANCES


def _run_instance(key: str, seed: int, index: int, tol: float, rank_tol: Optional[float]) -> Optional[CheckReport]:
    try:
        return evaluate_identity(key, None, tol, rank_tol, seed, index)
    except HypothesisUnsatisfiable as e:
        logger.warning(f"Case '{key}' instance {index}: {str(e)}")
        return None


def run_catalog(
    keys: Optional[Sequence[str]] = None,
    instances: Optional[int] = None,
    seed: int = 0,
    tol: Optional[float] = None,
    rank_tol: Optional[float] = None,
    workers: Optional[int] = None,
) -> CatalogSummary:
    """
    Evaluate seeded instances of catalog cases and aggregate per case.

    Instances are independent, so they may run on a thread pool; the summary
    does not depend on ``workers``.
    """
    tol = settings.TOLERANCE if tol is None else tol
    workers = settings.CATALOG_WORKERS if workers is None else workers
    cases = [get_case(k) for k in (keys or list(CATALOG))]

    tasks: List[Tuple[str, int]] = []
    for case in cases:
        count = instances if instances is not None else _default_instances(case)
        tasks.extend((case.key, i) for i in range(count))

    logger.info(f"Running {len(tasks)} catalog instances over {len(cases)} cases with {workers} worker(s)")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda t: _run_instance(t[0], seed, t[1], tol, rank_tol), tasks))
    else:
        results = [_run_instance(key, seed, i, tol, rank_tol) for key, i in tasks]

    grouped: Dict[str, List[Optional[CheckReport]]] = {case.key: [] for case in cases}
    for (key, _), report in zip(tasks, results):
        grouped[key].append(report)

    summary = CatalogSummary(seed=seed, tolerance=tol)
    for case in cases:
        reports = grouped[case.key]
        done = [r for r in reports if r is not None]
        failures = sum(1 for r in done if not r.passed)
        summary.cases[case.key] = CaseSummary(
            kind=case.kind,
            anchor=case.anchor,
            instances=len(reports),
            max_residual=max((r.max_residual for r in done), default=0.0),
            failures=failures,
            marginals=sum(1 for r in done if r.marginal),
            unsatisfiable=len(reports) - len(done),
            suspected_typo=bool(done) and failures > len(done) / 2,
        )
        if failures:
            logger.warning(f"Case '{case.key}' failed on {failures}/{len(done)} instances")
    return summary
