"""
Built-in transcribed fixtures: a weighted product inverse worked through its
intermediates, and an indefinite-weight counterexample.

The JSON files under ``data/`` are guarded by ``data/SHA256SUMS``; a file whose
digest drifted is refused.
"""
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

from tensor_ginv.errors import FixtureIntegrityError, NotPositiveDefinite
from tensor_ginv.geninv import (
    CheckReport,
    WeightPair,
    penrose_report,
    relative_residual,
    weighted_pinv,
)
from tensor_ginv.rol import product_intermediates
from tensor_ginv.spectral import hpd_sqrt
from tensor_ginv.tensor import DenseTensor, reshape_rank
from tensor_ginv.tensor_io import parse_tensor

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parent / "data"
CHECKSUMS = "SHA256SUMS"

# Printed values carry four decimals
PRINTED_TOLERANCE = 5e-4
AGREEMENT_TOLERANCE = 1e-10
PENROSE_TOLERANCE = 1e-10


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _expected_digests(data_dir: Path) -> Dict[str, str]:
    digests = {}
    with open(data_dir / CHECKSUMS, "r", encoding="utf-8") as f:
        for line in f:
            if line.strip():
                digest, name = line.split()
                digests[name.lstrip("*")] = digest
    return digests


def load_fixture(name: str, data_dir: Path = DATA_DIR) -> Dict[str, Any]:
    """
    Load ``<name>.json`` after checking its SHA-256 digest.

    Raises:
        FixtureIntegrityError: if the file is missing, unlisted or its digest differs
    """
    filename = f"{name}.json"
    path = data_dir / filename
    try:
        expected = _expected_digests(data_dir).get(filename)
        actual = _sha256(path)
    except OSError as e:
        raise FixtureIntegrityError(f"Error reading fixture {filename}: {str(e)}")
    if expected is None:
        raise FixtureIntegrityError(f"Fixture {filename} is not listed in {CHECKSUMS}")
    if actual != expected:
        raise FixtureIntegrityError(f"Fixture {filename} has digest {actual}, expected {expected}")
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def _tensors(section: Dict[str, Any]) -> Dict[str, DenseTensor]:
    return {key: parse_tensor(value) for key, value in section.items() if isinstance(value, dict)}


def max_abs_deviation(actual: DenseTensor, expected: DenseTensor) -> float:
    return float(np.max(np.abs(actual.entries - expected.entries)))


def run_worked_example(data_dir: Path = DATA_DIR) -> List[CheckReport]:
    """
    Reproduce the weighted product inverse of the worked example.

    Returns one report per stage: the printed result, the printed
    intermediates, agreement between the direct and intermediate routes,
    and the weighted Penrose residuals of the direct result.
    """
    fixture = load_fixture("worked_example", data_dir)
    t = _tensors(fixture["tensors"])
    expected = _tensors(fixture["expected"])
    a, b, m, n, p = t["A"], t["B"], t["M"], t["N"], t["P"]
    tol = float(fixture.get("tolerance", PRINTED_TOLERANCE))

    p_factors = hpd_sqrt(p)
    logger.info(f"Worked example weight P is positive definite, min eigenvalue {p_factors.eigenvalues[-1]:.6g}")

    ab = a @ b
    direct = weighted_pinv(ab, m, n)
    stages = product_intermediates(a, b, m, n, p_factors)

    reports = [
        CheckReport.from_residuals(
            "worked_example_result",
            {"max_abs_deviation": max_abs_deviation(direct, expected["result"])},
            tol,
            details={"min_eigenvalue_p": p_factors.eigenvalues[-1]},
        ),
        CheckReport.from_residuals(
            "worked_example_intermediates",
            {
                "b1": max_abs_deviation(stages.b1, expected["b1"]),
                "a1": max_abs_deviation(stages.a1, expected["a1"]),
                "a1_dagger": max_abs_deviation(stages.a1_dagger, expected["a1_dagger"]),
                "b1_dagger": max_abs_deviation(stages.b1_dagger, expected["b1_dagger"]),
                "result": max_abs_deviation(stages.result, expected["result"]),
            },
            tol,
        ),
        CheckReport.from_residuals(
            "worked_example_agreement",
            {"direct_vs_intermediates": relative_residual(direct, stages.result)},
            AGREEMENT_TOLERANCE,
        ),
    ]
    penrose = penrose_report(ab, direct, WeightPair.for_shape(ab.shape, m, n), PENROSE_TOLERANCE)
    reports.append(penrose.model_copy(update={"name": "worked_example_penrose"}))
    return reports


def run_counterexample(data_dir: Path = DATA_DIR) -> List[CheckReport]:
    """
    Check the indefinite-weight counterexample.

    ``A`` has full column reshaping rank while ``A* M A`` is singular, so the
    weighted Penrose equations have no solution. The candidate built from
    principal complex square roots must therefore fail them.
    """
    fixture = load_fixture("counterexample", data_dir)
    t = _tensors(fixture["tensors"])
    expected = fixture["expected"]
    a, m, n = t["A"], t["M"], t["N"]

    gram = a.H @ m @ a
    gram_expected = parse_tensor(expected["weighted_gram"])
    tensor_rank = reshape_rank(a, PENROSE_TOLERANCE)
    gram_rank = reshape_rank(gram, PENROSE_TOLERANCE)

    rejected = []
    for role, weight in (("M", m), ("N", n)):
        try:
            hpd_sqrt(weight)
        except NotPositiveDefinite:
            rejected.append(role)

    weights = WeightPair.for_shape(a.shape, m, n, allow_indefinite=True)
    candidate = weighted_pinv(a, weights.m_factors, weights.n_factors)
    penrose = penrose_report(a, candidate, weights, PENROSE_TOLERANCE)
    logger.info(f"Counterexample candidate Penrose residuals: {penrose.residuals}")

    exact = bool(np.array_equal(gram.entries, gram_expected.entries))
    checks = {
        "gram_exact": 0.0 if exact else max_abs_deviation(gram, gram_expected),
        "tensor_rank": float(abs(tensor_rank - int(expected["tensor_rank"]))),
        "gram_rank": float(abs(gram_rank - int(expected["gram_rank"]))),
        "weights_rejected": float(2 - len(rejected)),
        "candidate_is_not_inverse": 0.0 if not penrose.passed else 1.0,
    }
    return [
        CheckReport.from_residuals(
            "counterexample",
            checks,
            0.0,
            details={f"candidate_{k}": v for k, v in penrose.residuals.items()},
        )
    ]
