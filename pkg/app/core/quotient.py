"""
Quotients of the Laurent ring Q(q)[z^{+-1}] by finitely many Laurent polynomials.

The Laurent ring is localized with a single extra variable w and the relation
w*z_1*...*z_n - 1. Reduced Groebner bases are computed with sympy under
grevlex on (z_1, ..., z_n, w).
"""

from __future__ import annotations

from collections import deque
from typing import Sequence

from loguru import logger
from sympy.polys.groebnertools import groebner
from sympy.polys.monomials import monomial_divides
from sympy.polys.orderings import grevlex
from sympy.polys.rings import PolyElement, PolyRing, ring

from app.config import get_settings
from app.core.laurent import Exponent, LaurentPoly, common_field
from app.core.scalars import GaussScalar, ParameterField
from app.errors import PreconditionError, UnsupportedError

MONOMIAL_ORDER = "grevlex(z1..zn, w)"


def _localize(exponent: Exponent) -> tuple[int, ...]:
    """z^v as z^{v + k} w^k with the smallest k >= 0 clearing negative exponents."""
    k = max(0, -min(exponent)) if exponent else 0
    return tuple(e + k for e in exponent) + (k,)


def _delocalize(monomial: Sequence[int]) -> Exponent:
    *zs, k = monomial
    return tuple(e - k for e in zs)


def clear_denominators(f: LaurentPoly) -> LaurentPoly:
    """Multiply by the monomial unit making every exponent non-negative with zero minimum."""
    if f.is_zero():
        return f
    shift = [min(v[j] for v in f.terms) for j in range(f.nvars)]
    return LaurentPoly(
        f.field, f.nvars, {tuple(e - s for e, s in zip(v, shift)): c for v, c in f.terms.items()}
    )


class QuotientPresentation:
    """Reduced Groebner basis and standard monomials of a Laurent quotient ring."""

    def __init__(self, field: ParameterField, nvars: int, generators: list[LaurentPoly]):
        self.settings = get_settings()
        self.field = field
        self.nvars = nvars
        self.generators = generators
        self.order = MONOMIAL_ORDER

        names = ",".join([f"z{j}" for j in range(1, nvars + 1)] + ["w"])
        self.ring: PolyRing
        self.ring, *self.variables = ring(names, field.domain, grevlex)

        polys = [self._to_ring(clear_denominators(g)) for g in generators]
        localization = self.ring.one
        for z in self.variables[:-1]:
            localization *= z
        polys.append(localization * self.variables[-1] - 1)

        logger.info(f"Computing Groebner basis of {len(polys)} polynomials in {nvars + 1} variables")
        self.basis: list[PolyElement] = groebner(polys, self.ring)
        self.leading = [g.LM for g in self.basis]
        logger.info(f"Groebner basis has {len(self.basis)} elements")

        self.unit = any(not any(m) for m in self.leading)
        self.finite = self.unit or all(
            any(m[i] > 0 and not any(m[:i] + m[i + 1:]) for m in self.leading)
            for i in range(nvars + 1)
        )
        self.standard_monomials: list[tuple[int, ...]] | None = (
            self._enumerate_standard() if self.finite else None
        )

    def _to_ring(self, f: LaurentPoly) -> PolyElement:
        if not f.is_real():
            raise UnsupportedError("the Groebner engine works over the real parameter field only")
        terms = {}
        for exponent, coefficient in f.terms.items():
            terms[_localize(exponent)] = self.field.lift(coefficient.re, f.field)
        return self.ring.from_dict(terms)

    def _from_ring(self, p: PolyElement) -> LaurentPoly:
        terms: dict[Exponent, GaussScalar] = {}
        for monomial, coefficient in p.items():
            exponent = _delocalize(monomial)
            value = GaussScalar(self.field, coefficient)
            terms[exponent] = terms[exponent] + value if exponent in terms else value
        return LaurentPoly(self.field, self.nvars, terms)

    def _enumerate_standard(self) -> list[tuple[int, ...]]:
        if self.unit:
            return []
        limit = self.settings.standard_monomial_limit
        start = (0,) * (self.nvars + 1)
        seen = {start}
        queue = deque([start])
        while queue:
            monomial = queue.popleft()
            for i in range(self.nvars + 1):
                successor = monomial[:i] + (monomial[i] + 1,) + monomial[i + 1:]
                if successor in seen or any(monomial_divides(m, successor) for m in self.leading):
                    continue
                seen.add(successor)
                if len(seen) > limit:
                    raise UnsupportedError(f"more than {limit} standard monomials")
                queue.append(successor)
        key = lambda m: (sum(m), tuple(-e for e in reversed(m)))  # noqa: E731
        return sorted(seen, key=key)

    @property
    def dimension(self) -> int | None:
        return None if self.standard_monomials is None else len(self.standard_monomials)

    def reduce(self, f: LaurentPoly) -> LaurentPoly:
        """Remainder of f against the basis, mapped back to Laurent form."""
        if f.nvars != self.nvars:
            raise PreconditionError(f"expected {self.nvars} variables, got {f.nvars}")
        if f.is_zero():
            return LaurentPoly(self.field, self.nvars)
        f = f.lift(common_field(self.field, f.field))
        if f.field != self.field:
            raise PreconditionError(f"{f.field} is not contained in {self.field}")
        return self._from_ring(self._to_ring(f).rem(self.basis))

    def standard_basis(self) -> list[LaurentPoly]:
        if self.standard_monomials is None:
            raise UnsupportedError("the quotient is infinite dimensional")
        return [
            LaurentPoly.monomial(self.field, _delocalize(m)) for m in self.standard_monomials
        ]

    def relations(self) -> list[LaurentPoly]:
        """Basis elements as Laurent relations, dropping those killed by the localization."""
        images = [clear_denominators(self._from_ring(g)) for g in self.basis]
        return [image for image in images if not image.is_zero()]


def laurent_quotient(generators: Sequence[LaurentPoly]) -> QuotientPresentation:
    if not generators:
        raise PreconditionError("laurent_quotient needs at least one generator")
    nvars = generators[0].nvars
    if any(g.nvars != nvars for g in generators):
        raise PreconditionError("generators have different variable counts")
    field = generators[0].field
    for g in generators[1:]:
        field = common_field(field, g.field)
    return QuotientPresentation(field, nvars, [g.lift(field) for g in generators])


def normal_form(f: LaurentPoly, p: QuotientPresentation) -> LaurentPoly:
    if not p.finite:
        raise UnsupportedError("normal forms need a finite dimensional quotient")
    return p.reduce(f)


def ideal_membership(f: LaurentPoly, p: QuotientPresentation) -> bool:
    return p.reduce(f).is_zero()
