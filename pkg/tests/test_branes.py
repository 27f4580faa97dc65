import cmath
import math

import numpy as np
import pytest

from app.errors import DomainError
from app.models import ABranePoint, BBranePoint
from app.services.branes import (
    brane_correspondence,
    brane_correspondence_inverse,
    brane_report,
    clifford_form,
    endomorphism_dim,
    floer_m1,
    floer_m1_from_discs,
    floer_nontrivial,
    koszul_cohomology,
    round_sig,
    rounded_pair,
)
from app.services.critical_points import critical_points
from app.services.mirror import build_superpotential
from app.services.polytope_loader import PRESETS


def test_origin_maps_to_identity():
    assert brane_correspondence(ABranePoint(x=(0, 0), y=(0, 0))).z == (1, 1)


def test_one_dimensional_example():
    (z,) = brane_correspondence(ABranePoint(x=(1,), y=(math.pi,))).z
    assert z == pytest.approx(-math.exp(-1))


def test_round_trip_reduces_angles():
    a = ABranePoint(x=(0.3, -0.2), y=(1.0, 7.0))
    back = brane_correspondence_inverse(brane_correspondence(a))
    assert back.x == pytest.approx(a.x)
    assert back.y == pytest.approx((1.0, 7.0 - 2 * math.pi))


def test_inverse_rejects_zero():
    with pytest.raises(DomainError):
        brane_correspondence_inverse(BBranePoint(z=(0, 1)))


def test_mismatched_lengths_are_rejected():
    with pytest.raises(ValueError):
        ABranePoint(x=(0, 0), y=(0,))


def test_floer_differential_at_cp2_center(w_cp2):
    assert np.allclose(floer_m1(w_cp2, [1, 1]), [0, 0])
    assert np.allclose(floer_m1(w_cp2, [2, 1]), [1.5, 0.5])
    assert floer_nontrivial(w_cp2, [1, 1])
    assert not floer_nontrivial(w_cp2, [2, 1])
    assert endomorphism_dim(w_cp2, [1, 1]) == 4
    assert endomorphism_dim(w_cp2, [2, 1]) == 0


def test_floer_differential_from_discs(cp2, w_cp2):
    q = {"q1": 0.5}
    for a in [ABranePoint(x=(0.1, 0.4), y=(0.3, 2.0)), ABranePoint(x=(-0.5, 0.2), y=(4.0, 1.0))]:
        (z1, z2) = brane_correspondence(a).z
        assert np.allclose(floer_m1_from_discs(cp2, a, q), floer_m1(w_cp2, [z1, z2], q))


def test_koszul_cohomology(w_cp2):
    assert koszul_cohomology(w_cp2, [1, 1]) == [1, 2, 1]
    assert koszul_cohomology(w_cp2, [2, 1]) == [0, 0, 0]


def test_clifford_form_at_cp2_center(w_cp2):
    assert np.allclose(clifford_form(w_cp2, [1, 1], {"q1": 1}), [[2, 1], [1, 2]])


@pytest.mark.parametrize("name", PRESETS)
def test_branes_at_critical_points(presets, name):
    w = build_superpotential(presets[name])
    points = critical_points(w)
    assert points
    for z in points:
        assert floer_nontrivial(w, z)
        assert endomorphism_dim(w, z) == 2 ** w.nvars
        assert abs(np.linalg.det(clifford_form(w, z))) > 1e-8


def test_brane_report(w_cp2):
    zeta = cmath.exp(2j * math.pi / 3)
    report = brane_report(w_cp2, np.array([zeta, zeta]), {"q1": 1}, digits=10)
    assert report.nontrivial
    assert report.endomorphism_dim == 4
    assert report.koszul_cohomology == [1, 2, 1]
    assert report.coordinates[0] == pytest.approx((-0.5, math.sqrt(3) / 2))


def test_round_sig():
    assert round_sig(1.23456789, 3) == 1.23
    assert round_sig(-2.5e-3, 2) == -0.0025
    assert round_sig(2.5e-13, 12) == 2.5e-13
    assert round_sig(1.234567891234567e-20, 4) == 1.235e-20
    assert round_sig(0.0, 12) == 0.0


def test_rounded_pair_is_relative_to_the_modulus():
    assert rounded_pair(1 + 1e-17j, 12) == (1.0, 0.0)
    assert rounded_pair(3e-13 + 1e-30j, 12) == (3e-13, 0.0)
    assert rounded_pair(-2.5e-14 + 1.5e-14j, 3) == (-2.5e-14, 1.5e-14)
    assert rounded_pair(0j, 12) == (0.0, 0.0)


def test_random_non_critical_points_are_trivial(w_cp2):
    rng = np.random.default_rng(17)
    tol = 1e-10
    checked = 0
    while checked < 100:
        z = np.exp(rng.uniform(-1.5, 1.5, 2) + 1j * rng.uniform(0, 2 * np.pi, 2))
        if np.max(np.abs(floer_m1(w_cp2, z))) <= 10 * tol:
            continue
        assert not floer_nontrivial(w_cp2, z, tol=tol)
        assert endomorphism_dim(w_cp2, z, tol=tol) == 0
        assert koszul_cohomology(w_cp2, z, tol=tol) == [0, 0, 0]
        checked += 1
