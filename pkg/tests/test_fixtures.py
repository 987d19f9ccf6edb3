import json
import shutil

import pytest

from tensor_ginv.errors import FixtureIntegrityError
from tensor_ginv.fixtures import DATA_DIR, load_fixture, run_counterexample, run_worked_example


@pytest.fixture
def data_copy(tmp_path):
    target = tmp_path / "data"
    shutil.copytree(DATA_DIR, target)
    return target


@pytest.mark.parametrize("name", ["worked_example", "counterexample"])
def test_bundled_fixtures_match_checksums(name):
    fixture = load_fixture(name)
    assert "tensors" in fixture
    assert "expected" in fixture


def test_tampered_fixture_is_rejected(data_copy):
    path = data_copy / "worked_example.json"
    doc = json.loads(path.read_text())
    doc["tolerance"] = 1.0
    path.write_text(json.dumps(doc))

    with pytest.raises(FixtureIntegrityError):
        load_fixture("worked_example", data_copy)
    with pytest.raises(FixtureIntegrityError):
        run_worked_example(data_copy)


def test_unlisted_fixture_is_rejected(data_copy):
    (data_copy / "extra.json").write_text("{}")
    with pytest.raises(FixtureIntegrityError):
        load_fixture("extra", data_copy)


def test_missing_checksums(data_copy):
    (data_copy / "SHA256SUMS").unlink()
    with pytest.raises(FixtureIntegrityError):
        load_fixture("counterexample", data_copy)


def test_worked_example():
    reports = run_worked_example()

    assert [r.name for r in reports] == [
        "worked_example_result",
        "worked_example_intermediates",
        "worked_example_agreement",
        "worked_example_penrose",
    ]
    for report in reports:
        assert report.passed, (report.name, report.residuals)
    assert reports[0].details["min_eigenvalue_p"] > 0.0
    assert set(reports[1].residuals) == {"b1", "a1", "a1_dagger", "b1_dagger", "result"}


def test_counterexample():
    (report,) = run_counterexample()

    assert report.name == "counterexample"
    assert report.passed, report.residuals
    assert report.tolerance == 0.0
    assert any(v > 1e-10 for v in report.details.values())
