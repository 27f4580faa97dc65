import pytest

from app.core.forms import SymmetricMatrix
from app.services.syz_transform import (
    basis_round_trip,
    check_toric_transform,
    default_matrices,
    semiflat_checks,
    semiflat_identity_report,
)


@pytest.mark.parametrize("name", ["CP1", "CP2", "CP1xCP1"])
def test_transform_check_passes_at_cutoff_three(presets, name):
    report = check_toric_transform(presets[name], 3)
    assert report.passed, report.failing_strata
    assert report.superpotential_identity
    assert report.cutoff == 3
    assert report.failing_strata == []
    assert report.strata_checked > 0


def test_cutoff_zero_includes_the_semiflat_identity(cp2):
    report = check_toric_transform(cp2, 0)
    assert report.passed
    assert report.semiflat_identity
    assert report.strata_checked == 1


def test_default_matrices_are_reproducible():
    first = [phi.to_json() for phi in default_matrices(2)]
    second = [phi.to_json() for phi in default_matrices(2)]
    assert first == second
    assert len(first) == 6
    assert first[0] == SymmetricMatrix.identity(2).to_json()


def test_basis_round_trip_has_no_failures():
    assert basis_round_trip(1) == []
    assert basis_round_trip(2) == []


def test_semiflat_checks_name_each_identity():
    checks = semiflat_checks(1, [SymmetricMatrix.identity(1)], round_trip=True)
    assert all(check.passed for check in checks)
    assert len(checks) == 6


def test_semiflat_identity_report_for_all_dimensions():
    report = semiflat_identity_report()
    assert report.passed
    assert report.dims == [1, 2, 3, 4]
    failing = [check.name for check in report.checks if not check.passed]
    assert failing == []
