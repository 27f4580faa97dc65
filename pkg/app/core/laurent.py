"""
Sparse Laurent polynomials in z_1..z_n over the Gaussian extension of Q(q).

Terms are stored as a dict from exponent tuples to nonzero GaussScalar
coefficients. The same container backs LoopFunction (app.core.loops), where
the product is lattice convolution instead of polynomial multiplication.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Iterable, Iterator, Mapping, Sequence

import numpy as np

from app.core.scalars import GaussScalar, ParameterField, parameter_field
from app.errors import DomainError, PreconditionError, StructuralError

Exponent = tuple[int, ...]


def grevlex_key(exponent: Exponent) -> tuple[int, tuple[int, ...]]:
    """Sort key for graded reverse lexicographic order (larger key = larger monomial)."""
    return sum(exponent), tuple(-e for e in reversed(exponent))


def common_field(a: ParameterField, b: ParameterField) -> ParameterField:
    if a == b:
        return a
    return parameter_field(a.names + tuple(name for name in b.names if name not in a.names))


class LatticeSeries:
    """Finite mapping from Z^n to nonzero GaussScalar coefficients."""

    def __init__(
        self,
        field: ParameterField,
        nvars: int,
        terms: Mapping[Exponent, Any] | None = None,
    ):
        self.field = field
        self.nvars = nvars
        self.terms: dict[Exponent, GaussScalar] = {}
        for exponent, coefficient in (terms or {}).items():
            exponent = tuple(int(e) for e in exponent)
            if len(exponent) != nvars:
                raise StructuralError(f"exponent {exponent} has length {len(exponent)}, expected {nvars}")
            value = GaussScalar.of(field, coefficient)
            if exponent in self.terms:
                value = self.terms[exponent] + value
            if value.is_zero():
                self.terms.pop(exponent, None)
            else:
                self.terms[exponent] = value

    # ---- construction helpers ----

    @classmethod
    def zero(cls, field: ParameterField, nvars: int) -> "LatticeSeries":
        return cls(field, nvars)

    @classmethod
    def monomial(cls, field: ParameterField, exponent: Sequence[int], coefficient: Any = 1) -> "LatticeSeries":
        return cls(field, len(exponent), {tuple(exponent): coefficient})

    @classmethod
    def constant(cls, field: ParameterField, nvars: int, coefficient: Any = 1) -> "LatticeSeries":
        return cls(field, nvars, {(0,) * nvars: coefficient})

    def _like(self, terms: Mapping[Exponent, Any], field: ParameterField | None = None) -> Any:
        return type(self)(field or self.field, self.nvars, terms)

    def lift(self, field: ParameterField) -> Any:
        if field == self.field:
            return self
        return self._like({v: c.lift(field) for v, c in self.terms.items()}, field)

    def _aligned(self, other: "LatticeSeries") -> tuple[Any, Any]:
        if not isinstance(other, LatticeSeries):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.nvars != self.nvars:
            raise StructuralError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
        field = common_field(self.field, other.field)
        return self.lift(field), other.lift(field)

    # ---- inspection ----

    def __iter__(self) -> Iterator[tuple[Exponent, GaussScalar]]:
        return iter(sorted(self.terms.items(), key=lambda item: grevlex_key(item[0]), reverse=True))

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> set[Exponent]:
        return set(self.terms)

    def coefficient(self, exponent: Sequence[int]) -> GaussScalar:
        return self.terms.get(tuple(exponent), GaussScalar(self.field))

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.terms.values())

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, GaussScalar)):
            other = self._like({(0,) * self.nvars: other})
        if not isinstance(other, LatticeSeries) or type(other) is not type(self):
            return NotImplemented
        if other.nvars != self.nvars:
            return False
        left, right = self._aligned(other)
        return left.terms == right.terms

    __hash__ = None  # type: ignore[assignment]

    # ---- linear structure ----

    def __add__(self, other: Any) -> Any:
        if isinstance(other, (int, Fraction, GaussScalar)):
            other = self._like({(0,) * self.nvars: other})
        left, right = self._aligned(other)
        terms: dict[Exponent, Any] = dict(left.terms)
        for exponent, coefficient in right.terms.items():
            terms[exponent] = terms[exponent] + coefficient if exponent in terms else coefficient
        return left._like(terms)

    __radd__ = __add__

    def __neg__(self) -> Any:
        return self._like({v: -c for v, c in self.terms.items()})

    def __sub__(self, other: Any) -> Any:
        return self + (-other)

    def __rsub__(self, other: Any) -> Any:
        return (-self) + other

    def scale(self, scalar: Any) -> Any:
        if isinstance(scalar, GaussScalar):
            field = common_field(self.field, scalar.field)
            scalar = scalar.lift(field)
            return self.lift(field)._like({v: c * scalar for v, c in self.terms.items()}, field)
        return self._like({v: c * scalar for v, c in self.terms.items()})

    def map_coefficients(self, fn: Any) -> Any:
        return self._like({v: fn(c) for v, c in self.terms.items()})

    def q_derivative(self, a: int) -> Any:
        """Term-wise partial derivative in the Kahler parameter q_a."""
        if a < 1 or a > self.field.kahler_count:
            raise PreconditionError(f"parameter index {a} outside 1..{self.field.kahler_count}")
        return self.map_coefficients(lambda c: c.derivative(f"q{a}"))

    def shift_product(self, other: "LatticeSeries") -> Any:
        """Sum over pairs of terms with exponents added and coefficients multiplied."""
        left, right = self._aligned(other)
        terms: dict[Exponent, Any] = {}
        for v, a in left.terms.items():
            for w, b in right.terms.items():
                exponent = tuple(x + y for x, y in zip(v, w))
                product = a * b
                terms[exponent] = terms[exponent] + product if exponent in terms else product
        return left._like(terms)

    def _power(self, k: int) -> Any:
        if k < 0:
            raise PreconditionError(f"negative power {k} of a non-monomial")
        result = self._like({(0,) * self.nvars: 1})
        base = self
        while k:
            if k & 1:
                result = result.shift_product(base)
            base = base.shift_product(base)
            k >>= 1
        return result

    # ---- rendering ----

    def render_terms(self, variable: str = "z") -> list[tuple[str, str]]:
        """(coefficient, monomial) strings in descending grevlex order."""
        rendered = []
        for exponent, coefficient in self:
            factors = []
            for j, e in enumerate(exponent, 1):
                if e == 1:
                    factors.append(f"{variable}{j}")
                elif e:
                    factors.append(f"{variable}{j}^{e}")
            expr = coefficient.to_expr()
            text = str(expr).replace("**", "^")
            if expr.is_Add:
                text = f"({text})"
            rendered.append((text, "*".join(factors)))
        return rendered


def join_terms(parts: Iterable[str]) -> str:
    text = ""
    for part in parts:
        if not text:
            text = part
        elif part.startswith("-"):
            text += f" - {part[1:]}"
        else:
            text += f" + {part}"
    return text or "0"


class LaurentPoly(LatticeSeries):
    """A Laurent polynomial sum_v c_v z^v."""

    def __mul__(self, other: Any) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            return self.shift_product(other)
        if isinstance(other, LatticeSeries):
            raise TypeError("a Laurent polynomial multiplies only Laurent polynomials and scalars")
        return self.scale(other)

    def __rmul__(self, other: Any) -> "LaurentPoly":
        return self.scale(other)

    def multiply(self, other: "LaurentPoly") -> "LaurentPoly":
        return self * other

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def power(self, k: int) -> "LaurentPoly":
        if k < 0:
            if not self.is_monomial():
                raise PreconditionError("only monomials have negative powers")
            (exponent, coefficient), = self.terms.items()
            return LaurentPoly(
                self.field, self.nvars, {tuple(k * e for e in exponent): coefficient ** k}
            )
        return self._power(k)

    __pow__ = power

    def log_derivative(self, j: int) -> "LaurentPoly":
        """The Euler operator z_j d/dz_j; j is 1-based."""
        if j < 1 or j > self.nvars:
            raise PreconditionError(f"axis {j} outside 1..{self.nvars}")
        return LaurentPoly(
            self.field, self.nvars, {v: c * v[j - 1] for v, c in self.terms.items() if v[j - 1]}
        )

    def numeric(self, q: Mapping[str, Any]) -> "NumericLaurent":
        return NumericLaurent.from_poly(self, q)

    def evaluate(self, z: Sequence[complex], q: Mapping[str, Any]) -> complex:
        return self.numeric(q)(z)

    def render(self) -> str:
        parts = []
        for coefficient, monomial in self.render_terms("z"):
            if not monomial:
                parts.append(coefficient)
            elif coefficient == "1":
                parts.append(monomial)
            elif coefficient == "-1":
                parts.append(f"-{monomial}")
            else:
                parts.append(f"{coefficient}*{monomial}")
        return join_terms(parts)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"LaurentPoly({self.render()})"


class NumericLaurent:
    """A Laurent polynomial with coefficients evaluated to complex numbers.

    Evaluation, log-gradient and log-Hessian are vectorised with numpy.
    """

    def __init__(self, exponents: np.ndarray, coefficients: np.ndarray, nvars: int):
        self.exponents = exponents
        self.coefficients = coefficients
        self.nvars = nvars

    @classmethod
    def from_poly(cls, poly: LaurentPoly, q: Mapping[str, Any]) -> "NumericLaurent":
        missing = [
            name for name in poly.field.names[: poly.field.kahler_count] if name not in q
        ]
        if missing:
            raise StructuralError(f"no numeric value given for {', '.join(missing)}")
        items = list(poly)
        exponents = np.array([v for v, _ in items], dtype=int).reshape(len(items), poly.nvars)
        coefficients = np.array([c.evaluate(q) for _, c in items], dtype=complex)
        return cls(exponents, coefficients, poly.nvars)

    def _monomials(self, z: Sequence[complex]) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if z.shape != (self.nvars,):
            raise StructuralError(f"expected {self.nvars} coordinates, got {z.shape}")
        if np.any(z == 0):
            raise DomainError("torus coordinates must be nonzero")
        return self.coefficients * np.prod(z[None, :] ** self.exponents, axis=1)

    def __call__(self, z: Sequence[complex]) -> complex:
        return complex(np.sum(self._monomials(z)))

    def log_gradient(self, z: Sequence[complex]) -> np.ndarray:
        """The vector (z_j dW/dz_j)_j."""
        return self.exponents.T @ self._monomials(z)

    def log_hessian(self, z: Sequence[complex]) -> np.ndarray:
        """The matrix of iterated log derivatives; upper triangle mirrored."""
        terms = self._monomials(z)
        n = self.nvars
        hessian = np.zeros((n, n), dtype=complex)
        for j in range(n):
            for k in range(j, n):
                hessian[j, k] = np.sum(self.exponents[:, j] * self.exponents[:, k] * terms)
                hessian[k, j] = hessian[j, k]
        return hessian
