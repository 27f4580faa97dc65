"""
The mirror Landau-Ginzburg model (Y, W) of a toric Fano manifold.
"""

from fractions import Fraction
from typing import Any, Mapping, Sequence

import numpy as np
import sympy
from loguru import logger

from app.core.laurent import LaurentPoly
from app.core.lattice import is_normalized
from app.core.quotient import QuotientPresentation, ideal_membership, laurent_quotient
from app.core.scalars import ParameterField, kahler_field
from app.errors import DomainError, PreconditionError, StructuralError
from app.models import FanPolytope


class Superpotential:
    """W = sum_i q^{m_i} z^{v_i}, keeping the facet monomials Z_i."""

    def __init__(self, polytope: FanPolytope, field: ParameterField, facet_terms: list[LaurentPoly]):
        self.polytope = polytope
        self.field = field
        self.facet_terms = facet_terms
        self.nvars = polytope.dim
        poly = LaurentPoly(field, polytope.dim)
        for term in facet_terms:
            poly = poly + term
        self.poly = poly

    def derivatives(self) -> list[LaurentPoly]:
        return [self.poly.log_derivative(j) for j in range(1, self.nvars + 1)]

    def render(self) -> str:
        return self.poly.render()


def build_superpotential(fp: FanPolytope) -> Superpotential:
    if not is_normalized(fp):
        raise PreconditionError("normalize the polytope first (normalize_basis)")
    field = kahler_field(fp.kahler_params)
    terms = [
        LaurentPoly.monomial(field, facet.normal, field.monomial(facet.q_exponent))
        for facet in fp.facets
    ]
    w = Superpotential(fp, field, terms)
    logger.info(f"Superpotential of {fp.name or 'polytope'}: {w.render()}")
    return w


def facet_monomials(w: Superpotential) -> list[LaurentPoly]:
    return list(w.facet_terms)


class JacobianRing:
    """Jac(W) = Q(q)[z^{+-1}] / <d_1 W, ..., d_n W> with generator images Z_i."""

    def __init__(self, superpotential: Superpotential, presentation: QuotientPresentation):
        self.superpotential = superpotential
        self.presentation = presentation
        self.generator_images = facet_monomials(superpotential)

    @property
    def dimension(self) -> int | None:
        return self.presentation.dimension

    @property
    def finite(self) -> bool:
        return self.presentation.finite

    def linear_relations(self) -> list[LaurentPoly]:
        """sum_i v_i^j Z_i for j = 1..n."""
        relations = []
        for j in range(self.superpotential.nvars):
            relation = LaurentPoly(self.superpotential.field, self.superpotential.nvars)
            for facet, z in zip(self.superpotential.polytope.facets, self.generator_images):
                if facet.normal[j]:
                    relation = relation + z.scale(facet.normal[j])
            relations.append(relation)
        return relations

    def relation_vectors(self) -> list[tuple[list[int], tuple[int, ...]]]:
        """Primitive integer c with sum_i c_i v_i = 0, with the weight c.m = sum_i c_i m_i."""
        fp = self.superpotential.polytope
        normals = sympy.Matrix([list(facet.normal) for facet in fp.facets]).T
        vectors = []
        for vector in normals.nullspace():
            scale = sympy.ilcm(*[entry.q for entry in vector])
            c = [int(entry * scale) for entry in vector]
            if next(e for e in c if e) < 0:
                c = [-e for e in c]
            weight = tuple(
                sum(ci * facet.q_exponent[a] for ci, facet in zip(c, fp.facets))
                for a in range(fp.kahler_params)
            )
            vectors.append((c, weight))
        return vectors

    def multiplicative_relations(self) -> list[tuple[LaurentPoly, LaurentPoly]]:
        """Pairs (prod_{c_i>0} Z_i^{c_i}, q^{c.m} prod_{c_i<0} Z_i^{-c_i})."""
        fp = self.superpotential.polytope
        pairs = []
        for c, weight in self.relation_vectors():
            left = LaurentPoly.constant(self.superpotential.field, fp.dim)
            right = LaurentPoly.constant(self.superpotential.field, fp.dim, self.superpotential.field.monomial(weight))
            for ci, z in zip(c, self.generator_images):
                if ci > 0:
                    left = left * z.power(ci)
                elif ci < 0:
                    right = right * z.power(-ci)
            pairs.append((left, right))
        return pairs

    def symbolic_relations(self) -> list[str]:
        """The multiplicative relations in generator names, e.g. Z1*Z2*Z3 = q1."""
        field = self.superpotential.field
        rendered = []
        for c, weight in self.relation_vectors():
            left = [f"Z{i}" if ci == 1 else f"Z{i}^{ci}" for i, ci in enumerate(c, 1) if ci > 0]
            right = [f"Z{i}" if ci == -1 else f"Z{i}^{-ci}" for i, ci in enumerate(c, 1) if ci < 0]
            q = str(field.to_expr(field.monomial(weight))).replace("**", "^")
            if q != "1" or not right:
                right.insert(0, q)
            rendered.append(f"{'*'.join(left)} = {'*'.join(right)}")
        return rendered

    def check_relations(self) -> bool:
        linear = all(ideal_membership(r, self.presentation) for r in self.linear_relations())
        multiplicative = all(
            ideal_membership(left - right, self.presentation)
            for left, right in self.multiplicative_relations()
        )
        return linear and multiplicative


def jacobian_ring(w: Superpotential) -> JacobianRing:
    presentation = laurent_quotient(w.derivatives())
    ring = JacobianRing(w, presentation)
    if not ring.finite:
        logger.warning("Jacobian ring is infinite dimensional; the input does not behave like a Fano polytope")
    else:
        logger.info(f"Jacobian ring has dimension {ring.dimension}")
    return ring


def numeric_q(field: ParameterField, q: Mapping[str, Any] | None) -> dict[str, Any]:
    """Complete q values for every Kahler parameter, defaulting to 1."""
    values: dict[str, Any] = {name: Fraction(1) for name in field.names[: field.kahler_count]}
    values.update(q or {})
    return values


def mirror_domain_contains(
    fp: FanPolytope | Superpotential, z: Sequence[complex], q: Mapping[str, Any] | None = None
) -> bool:
    """True iff |q^{m_i} z^{v_i}| < 1 for every facet; q may hold floats such as e^{-3}."""
    if isinstance(fp, Superpotential):
        fp = fp.polytope
    z = np.asarray(z, dtype=complex)
    if z.shape != (fp.dim,):
        raise StructuralError(f"expected {fp.dim} coordinates, got {z.shape}")
    if np.any(z == 0):
        raise DomainError("mirror domain membership needs nonzero coordinates")
    values = numeric_q(kahler_field(fp.kahler_params), q)
    for facet in fp.facets:
        weight = np.prod([abs(complex(values[f"q{a}"])) ** m for a, m in enumerate(facet.q_exponent, 1)])
        if weight * np.prod(np.abs(z) ** np.asarray(facet.normal, dtype=float)) >= 1:
            return False
    return True


def hessian_log(w: Superpotential, z: Sequence[complex], q: Mapping[str, Any] | None = None) -> np.ndarray:
    """The matrix (d_j d_k W)(z) of logarithmic derivatives."""
    return w.poly.numeric(numeric_q(w.field, q)).log_hessian(z)
