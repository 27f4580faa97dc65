import random

import pytest

from app.core.laurent import LaurentPoly
from app.core.quotient import clear_denominators, ideal_membership, laurent_quotient, normal_form
from app.core.scalars import GaussScalar
from app.errors import PreconditionError, UnsupportedError


def z(field, *exponent, coefficient=1):
    return LaurentPoly.monomial(field, exponent, coefficient)


@pytest.fixture
def cp1_relation(field1):
    return z(field1, 1) - z(field1, -1, coefficient=field1.gen("q1"))


def test_cp1_quotient_has_dimension_two(cp1_relation):
    p = laurent_quotient([cp1_relation])
    assert p.finite
    assert p.dimension == 2
    assert len(p.standard_basis()) == 2


def test_normal_form_uses_the_relation(field1, cp1_relation):
    p = laurent_quotient([cp1_relation])
    q = field1.gen("q1")
    assert normal_form(z(field1, 2), p) == LaurentPoly.constant(field1, 1, q)
    assert normal_form(z(field1, 3), p) == normal_form(z(field1, 1, coefficient=q), p)
    assert normal_form(z(field1, -2), p) == LaurentPoly.constant(field1, 1, 1 / GaussScalar(field1, q))


def test_ideal_membership(field1, cp1_relation):
    p = laurent_quotient([cp1_relation])
    assert ideal_membership(cp1_relation * z(field1, 5), p)
    assert not ideal_membership(z(field1, 1), p)
    assert ideal_membership(LaurentPoly(field1, 1), p)


def test_infinite_quotient(field1):
    p = laurent_quotient([z(field1, 1, 0) - z(field1, 0, 1)])
    assert not p.finite
    assert p.dimension is None
    with pytest.raises(UnsupportedError):
        normal_form(z(field1, 1, 0), p)
    with pytest.raises(UnsupportedError):
        p.standard_basis()


def test_unit_ideal_is_zero_dimensional(field1):
    p = laurent_quotient([z(field1, 3, -1)])
    assert p.unit
    assert p.dimension == 0


def test_empty_generator_list():
    with pytest.raises(PreconditionError):
        laurent_quotient([])


def test_gaussian_generators_are_rejected(field1):
    with pytest.raises(UnsupportedError):
        laurent_quotient([z(field1, 1, coefficient=GaussScalar.i(field1))])


def test_reduce_checks_variable_count(field1, cp1_relation):
    p = laurent_quotient([cp1_relation])
    with pytest.raises(PreconditionError):
        p.reduce(z(field1, 1, 1))


def test_clear_denominators(field1):
    f = z(field1, -1, 2) + z(field1, 2, 0)
    assert clear_denominators(f) == z(field1, 0, 2) + z(field1, 3, 0)


def test_relations_are_laurent_polynomials(field1, cp1_relation):
    p = laurent_quotient([cp1_relation])
    assert p.relations()
    for relation in p.relations():
        assert ideal_membership(relation, p)


def cp2_derivatives(field):
    q = field.gen("q1")
    return [
        z(field, 1, 0) - z(field, -1, -1, coefficient=q),
        z(field, 0, 1) - z(field, -1, -1, coefficient=q),
    ]


def test_cp2_normal_forms(field1):
    p = laurent_quotient(cp2_derivatives(field1))
    assert p.dimension == 3
    z1, z2 = z(field1, 1, 0), z(field1, 0, 1)
    assert normal_form(z2, p) == normal_form(z1, p)
    assert ideal_membership(z2 - normal_form(z2, p), p)
    assert normal_form(z(field1, 3, 0), p) == LaurentPoly.constant(field1, 2, field1.gen("q1"))
    assert normal_form(LaurentPoly(field1, 2), p).is_zero()


def _random_poly(rng, field, nvars=2):
    terms = {}
    for _ in range(rng.randint(1, 4)):
        exponent = tuple(rng.randint(-3, 3) for _ in range(nvars))
        terms[exponent] = field.gen("q1") ** rng.randint(-1, 2) * rng.randint(-3, 3)
    return LaurentPoly(field, nvars, terms)


def test_normal_form_is_idempotent_and_linear(field1):
    rng = random.Random(5)
    p = laurent_quotient(cp2_derivatives(field1))
    q = field1.gen("q1")
    for _ in range(30):
        f, g = _random_poly(rng, field1), _random_poly(rng, field1)
        nf = normal_form(f, p)
        assert normal_form(nf, p) == nf
        assert ideal_membership(f - nf, p)
        a, b = rng.randint(-4, 4), q ** rng.randint(-1, 1)
        combined = f.scale(a) + g.scale(b)
        assert normal_form(combined, p) == nf.scale(a) + normal_form(g, p).scale(b)


def test_dimension_ignores_monomial_units(field1):
    rng = random.Random(13)
    q = field1.gen("q1")
    for _ in range(10):
        scaled = []
        for generator in cp2_derivatives(field1):
            exponent = tuple(rng.randint(-3, 3) for _ in range(2))
            coefficient = q ** rng.randint(-2, 2) * rng.choice([-3, -1, 2, 5])
            scaled.append(generator * z(field1, *exponent, coefficient=coefficient))
        assert laurent_quotient(scaled).dimension == 3
