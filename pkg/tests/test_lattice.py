import math
from fractions import Fraction

import numpy as np
import pytest

from app.core.lattice import (
    barycenter,
    disc_area,
    euler_characteristic,
    guillemin_hessian,
    guillemin_potential,
    integer_det,
    is_normalized,
    is_primitive,
    is_projective_product,
    legendre_gradient,
    log_map,
    normalize_basis,
    polytope_vertices,
    unimodular_transform,
    validate_smooth_fano,
)
from app.errors import DomainError, PreconditionError, StructuralError
from app.models import MomentPoint
from app.services.mirror import build_superpotential
from app.services.polytope_loader import PRESETS
from tests.conftest import polytope


@pytest.mark.parametrize("name", PRESETS)
def test_presets_validate(loader, name):
    report = validate_smooth_fano(loader.load_preset(name))
    assert report.passed
    assert [check.name for check in report.checks] == ["primitive", "unimodular", "complete"]
    assert report.warnings == []


def test_determinant_two_cone_fails():
    fp = polytope(2, 1, [((1, 0), (0,)), ((0, 1), (0,)), ((-1, -2), (1,))], [(1, 2), (2, 3), (1, 3)])
    report = validate_smooth_fano(fp)
    assert not report.passed
    unimodular = next(check for check in report.checks if check.name == "unimodular")
    assert not unimodular.passed
    assert unimodular.witness == {"cone": [1, 3], "det": -2}
    assert "|det| = 2" in unimodular.detail


def test_non_primitive_normal_fails():
    fp = polytope(1, 1, [((2,), (0,)), ((-1,), (1,))], [(1,), (2,)])
    report = validate_smooth_fano(fp)
    assert not next(check for check in report.checks if check.name == "primitive").passed


def test_incomplete_fan_fails():
    fp = polytope(2, 1, [((1, 0), (0,)), ((0, 1), (0,)), ((-1, -1), (1,))], [(1, 2), (2, 3)])
    report = validate_smooth_fano(fp)
    complete = next(check for check in report.checks if check.name == "complete")
    assert not complete.passed


def test_non_fano_data_warns():
    hirzebruch3 = polytope(
        2, 2,
        [((1, 0), (0, 0)), ((0, 1), (0, 0)), ((-1, 3), (1, 0)), ((0, -1), (0, 1))],
        [(1, 2), (2, 3), (3, 4), (1, 4)],
    )
    report = validate_smooth_fano(hirzebruch3)
    assert report.passed
    assert any("not Fano" in warning for warning in report.warnings)


def test_dimension_mismatch_is_structural(loader):
    with pytest.raises(StructuralError):
        loader.parse({"dim": 2, "kahler_params": 1, "facets": [
            {"normal": [1, 0], "q_exponent": [0]},
            {"normal": [0, 1], "q_exponent": [0]},
            {"normal": [-1], "q_exponent": [1]},
        ], "maximal_cones": [[1, 2], [2, 3], [1, 3]]})


@pytest.mark.parametrize("name, expected", [
    ("CP1", 2), ("CP2", 3), ("CP3", 4), ("CP1xCP1", 4), ("CP1xCP2", 6), ("Bl1CP2", 4),
])
def test_euler_characteristic(presets, name, expected):
    assert euler_characteristic(presets[name]) == expected


def test_lattice_helpers():
    assert is_primitive((2, 3))
    assert not is_primitive((2, 4))
    assert integer_det([(1, 0), (-1, -2)]) == -2


def test_unimodular_transform_rejects_singular_matrix(cp2):
    with pytest.raises(PreconditionError):
        unimodular_transform(cp2, [[2, 0], [0, 1]])


def test_validation_is_invariant_under_basis_change(cp2):
    moved = unimodular_transform(cp2, [[1, 1], [0, 1]])
    assert moved.facets[1].normal == (1, 1)
    assert validate_smooth_fano(moved).passed
    assert not is_normalized(moved)


def test_normalize_keeps_normalized_input(cp2):
    assert normalize_basis(cp2) is cp2


def test_normalize_undoes_a_basis_change(cp2):
    restored = normalize_basis(unimodular_transform(cp2, [[1, 1], [0, 1]]))
    assert is_normalized(restored)
    assert euler_characteristic(restored) == 3
    assert build_superpotential(restored).render() == "z1 + z2 + q1*z1^-1*z2^-1"


def test_normalize_relabels_permuted_rays():
    fp = polytope(2, 1, [((-1, -1), (1,)), ((1, 0), (0,)), ((0, 1), (0,))], [(2, 3), (1, 3), (1, 2)])
    normalized = normalize_basis(fp)
    assert normalized.normals == [(1, 0), (0, 1), (-1, -1)]
    assert [facet.q_exponent for facet in normalized.facets] == [(0,), (0,), (1,)]


def test_normalize_cp1_flip():
    fp = polytope(1, 1, [((-1,), (1,)), ((1,), (0,))], [(1,), (2,)])
    normalized = normalize_basis(fp)
    assert normalized.normals == [(1,), (-1,)]
    assert build_superpotential(normalized).render() == "z1 + q1*z1^-1"


def test_normalize_moves_exponents_to_the_remaining_facets():
    fp = polytope(1, 1, [((1,), (1,)), ((-1,), (1,))], [(1,), (2,)])
    normalized = normalize_basis(fp)
    assert normalized.normals == [(1,), (-1,)]
    assert [facet.q_exponent for facet in normalized.facets] == [(0,), (2,)]


def test_normalize_needs_a_unimodular_cone():
    fp = polytope(1, 1, [((2,), (0,)), ((-2,), (1,))], [(1,), (2,)])
    with pytest.raises(PreconditionError):
        normalize_basis(fp)


def test_guillemin_potential_values(cp1, cp2):
    assert guillemin_potential(cp2, MomentPoint(coordinates=(1, 1))) == pytest.approx(0)
    assert guillemin_potential(cp2, MomentPoint(coordinates=("1/2", "1/2"))) == pytest.approx(0.5 * math.log(2))
    assert guillemin_potential(cp1, MomentPoint(coordinates=(1,))) == pytest.approx(0)


def test_legendre_gradient_values(cp1, cp2):
    assert np.allclose(legendre_gradient(cp2, MomentPoint(coordinates=(1, 1))), [0, 0])
    assert np.allclose(legendre_gradient(cp1, MomentPoint(coordinates=(1,))), [0])
    assert legendre_gradient(cp1, MomentPoint(coordinates=("3/2",)))[0] == pytest.approx(0.5 * math.log(3))


def test_legendre_gradient_matches_finite_differences(cp2):
    h = 1e-6
    for x in [(0.7, 0.9), (1.5, 0.4), (0.2, 2.1)]:
        gradient = legendre_gradient(cp2, MomentPoint(coordinates=x))
        for j in range(2):
            plus = list(x)
            minus = list(x)
            plus[j] += h
            minus[j] -= h
            estimate = (
                guillemin_potential(cp2, MomentPoint(coordinates=plus))
                - guillemin_potential(cp2, MomentPoint(coordinates=minus))
            ) / (2 * h)
            assert estimate == pytest.approx(gradient[j], rel=1e-6, abs=1e-9)


def test_boundary_points_are_rejected(cp2):
    with pytest.raises(DomainError):
        guillemin_potential(cp2, MomentPoint(coordinates=(0, 1)))
    with pytest.raises(DomainError):
        legendre_gradient(cp2, MomentPoint(coordinates=(2, 2)))


def test_supports_are_required(cp2):
    bare = cp2.model_copy(update={"facets": tuple(f.model_copy(update={"support": None}) for f in cp2.facets)})
    with pytest.raises(StructuralError):
        guillemin_potential(bare, MomentPoint(coordinates=(1, 1)))


def test_guillemin_hessian(cp2):
    phi = guillemin_hessian(cp2, MomentPoint(coordinates=(1, 1)))
    assert phi.entry(1, 1) == 1
    assert phi.entry(1, 2) == Fraction(1, 2)
    assert phi.inverse_entry(1, 1) == Fraction(4, 3)


def test_vertices_and_barycenter(cp2):
    assert sorted(polytope_vertices(cp2)) == [(0, 0), (0, 3), (3, 0)]
    assert barycenter(cp2).coordinates == (1, 1)


def test_disc_area(cp2):
    x = MomentPoint(coordinates=("1/2", "1/2"))
    assert disc_area(cp2, x, 3) == pytest.approx(4 * math.pi)
    with pytest.raises(PreconditionError):
        disc_area(cp2, x, 4)


def test_log_map():
    assert np.allclose(log_map([1, -math.e, 1j]), [0, 1, 0])
    with pytest.raises(DomainError):
        log_map([0, 1])


@pytest.mark.parametrize("name, expected", [
    ("CP1", True), ("CP2", True), ("CP3", True), ("CP1xCP1", True), ("CP1xCP2", True), ("Bl1CP2", False),
])
def test_projective_products(presets, name, expected):
    assert is_projective_product(presets[name]) is expected


def test_projective_product_needs_product_cones():
    square = [((1, 0), (0, 0)), ((0, 1), (0, 0)), ((-1, 0), (1, 0)), ((0, -1), (0, 1))]
    assert is_projective_product(polytope(2, 2, square, [(1, 2), (2, 3), (3, 4), (1, 4)]))
    assert not is_projective_product(polytope(2, 2, square, [(1, 2), (2, 3), (3, 4), (1, 3)]))
