import numpy as np
import pytest

from tensor_ginv.catalog import (
    CATALOG,
    FAMILIES,
    WEIGHT_ROLES,
    CaseKind,
    CatalogSummary,
    IdentityCase,
    evaluate_identity,
    generate_inputs,
    get_case,
    instance_rng,
    run_catalog,
)
from tensor_ginv.errors import HypothesisUnsatisfiable, ShapeMismatch
from tensor_ginv.generators import random_tensor
from tensor_ginv.geninv import CheckReport
from tensor_ginv.tensor import identity_tensor

WEIGHTED_CASES = sorted(k for k, c in CATALOG.items() if set(c.roles) & set(WEIGHT_ROLES))


@pytest.mark.parametrize("key", sorted(CATALOG))
def test_catalog_case_holds(key):
    summary = run_catalog([key], instances=50, seed=2024)
    case = summary.cases[key]

    assert case.instances == 50
    assert case.unsatisfiable == 0
    assert case.failures == 0, f"max residual {case.max_residual:.3e}"
    assert not case.suspected_typo


def test_every_case_is_well_formed():
    assert len(CATALOG) >= 28
    for key, case in CATALOG.items():
        assert case.key == key
        assert case.anchor
        assert case.tensor_roles
        assert isinstance(case.kind, CaseKind)


def test_generated_inputs_cover_roles():
    for key, case in CATALOG.items():
        inputs = generate_inputs(key, seed=1, index=0)
        assert set(case.tensor_roles) <= set(inputs), key


def test_generation_is_reproducible():
    first = generate_inputs("UVW-a", seed=9, index=4)
    second = generate_inputs("UVW-a", seed=9, index=4)
    other = generate_inputs("UVW-a", seed=9, index=5)

    assert first.keys() == second.keys()
    assert all(first[role] == second[role] for role in first)
    # Instance index selects the shape family round-robin
    assert first["U"].row_modes == FAMILIES[4 % len(FAMILIES)].i
    assert other["U"].col_modes == FAMILIES[5 % len(FAMILIES)].j


def test_instance_streams_are_independent():
    a = instance_rng(0, "rv1", 0).standard_normal(4)
    b = instance_rng(0, "rv1", 1).standard_normal(4)
    c = instance_rng(0, "rv2", 0).standard_normal(4)

    np.testing.assert_array_equal(a, instance_rng(0, "rv1", 0).standard_normal(4))
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_weighted_cases_include_multi_factor_entries():
    for key in ("sandwich-UV", "UVW-a", "UVW-b", "uvw1", "uvw1-corollary-a", "uvw1-corollary-b",
                "A1-decomp-a", "A1-decomp-b", "rv2", "product-intermediates"):
        assert key in WEIGHTED_CASES


@pytest.mark.parametrize("key", WEIGHTED_CASES)
def test_identity_weights_match_omitted_weights(key):
    inputs = generate_inputs(key, seed=4, index=1)
    unweighted = {role: t for role, t in inputs.items() if role not in WEIGHT_ROLES}
    identity = dict(unweighted)
    for role in set(inputs) & set(WEIGHT_ROLES):
        identity[role] = identity_tensor(inputs[role].row_modes)

    plain = evaluate_identity(key, unweighted)
    with_identities = evaluate_identity(key, identity)

    assert plain.residuals.keys() == with_identities.residuals.keys()
    assert plain.passed == with_identities.passed
    if CATALOG[key].kind is CaseKind.UNCONDITIONAL:
        assert plain.passed, plain.residuals
    for name, value in plain.residuals.items():
        assert abs(value - with_identities.residuals[name]) <= 1e-12


def test_evaluate_identity_names_report():
    report = evaluate_identity("rv1", seed=0, index=3)
    assert report.name == "rv1"
    assert report.passed


def test_evaluate_identity_with_explicit_inputs(rng):
    a = random_tensor(rng, (2,), (3,), rank=1)
    b = random_tensor(rng, (2,), (3,))
    report = evaluate_identity("idr1-c", {"A": a, "B": b})

    assert report.passed
    assert set(report.residuals) == {"dagger_in_star", "star_in_dagger"}


def test_unknown_case():
    with pytest.raises(ShapeMismatch):
        get_case("no-such-identity")
    with pytest.raises(ShapeMismatch):
        run_catalog(["no-such-identity"], instances=1)


def test_missing_role(rng):
    with pytest.raises(ShapeMismatch):
        evaluate_identity("rv1", {"A": random_tensor(rng, (2,), (2,))})


def test_frd_transform_must_match_rank(rng):
    inputs = {"A": random_tensor(rng, (2,), (3,), rank=1), "B": identity_tensor((2,))}
    with pytest.raises(HypothesisUnsatisfiable):
        evaluate_identity("frd-nonuniqueness", inputs)


def test_summary_does_not_depend_on_workers():
    keys = ["hash-range", "lemma42-c", "rv2"]
    serial = run_catalog(keys, instances=6, seed=13, workers=1)
    threaded = run_catalog(keys, instances=6, seed=13, workers=4)

    assert serial.model_dump() == threaded.model_dump()


def test_summary_serializes_verdict():
    summary = run_catalog(["lemma42-a"], instances=2)
    dumped = summary.model_dump(mode="json")

    assert dumped["passed"] is True
    assert dumped["cases"]["lemma42-a"]["kind"] == "unconditional"
    assert CatalogSummary(seed=0, tolerance=1e-8).passed


def _always_fails(inputs, tol, rank_tol):
    return CheckReport.from_residuals("identity", {"residual": 1.0}, tol)


def _unsatisfiable(rng, family, index):
    raise HypothesisUnsatisfiable("no instance for this family")


def _single_tensor(rng, family, index):
    return {"A": random_tensor(rng, family.i, family.j)}


def test_broken_case_is_flagged(monkeypatch):
    broken = IdentityCase("broken", ("A",), "A = 2 A", CaseKind.UNCONDITIONAL, _always_fails, _single_tensor)
    monkeypatch.setitem(CATALOG, "broken", broken)

    summary = run_catalog(["broken"], instances=4)
    case = summary.cases["broken"]
    assert case.failures == 4
    assert case.suspected_typo
    assert not summary.passed


def test_unsatisfiable_instances_are_counted(monkeypatch):
    case = IdentityCase("impossible", ("A",), "-", CaseKind.CONDITIONAL, _always_fails, _unsatisfiable)
    monkeypatch.setitem(CATALOG, "impossible", case)

    summary = run_catalog(["impossible"], instances=3)
    assert summary.cases["impossible"].unsatisfiable == 3
    assert summary.cases["impossible"].failures == 0
    assert not summary.cases["impossible"].suspected_typo
    assert not summary.passed
