"""
Exact scalars: the ground field Q(q_1, ..., q_l) and its Gaussian extension.

The field is sympy's rational function domain, so every element is kept as a
reduced numerator/denominator pair. Extra transcendental symbols (``pi`` for
fiber integrals) can be adjoined by name.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Any, Mapping

import sympy
from sympy import QQ

from app.errors import PreconditionError, StructuralError

PI = "pi"


class ParameterField:
    """Exact field of rational functions in named parameters over Q."""

    def __init__(self, names: tuple[str, ...]):
        self.names = tuple(names)
        self.symbols = tuple(sympy.Symbol(name) for name in self.names)
        self.domain = QQ.frac_field(*self.symbols) if self.names else QQ

    def __repr__(self) -> str:
        return f"ParameterField({', '.join(self.names) or 'QQ'})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ParameterField) and other.names == self.names

    def __hash__(self) -> int:
        return hash(self.names)

    @property
    def kahler_count(self) -> int:
        return sum(1 for name in self.names if name != PI)

    def element(self, value: Any) -> Any:
        """Coerce an int, Fraction, string or sympy expression into the field."""
        if isinstance(value, Fraction):
            return self.domain.from_sympy(sympy.Rational(value.numerator, value.denominator))
        if isinstance(value, int):
            return self.domain.convert(value)
        if isinstance(value, str):
            return self.domain.from_sympy(sympy.sympify(value, locals=dict(zip(self.names, self.symbols))))
        if isinstance(value, sympy.Basic):
            return self.domain.from_sympy(value)
        if self.domain.of_type(value):
            return value
        raise StructuralError(f"cannot coerce {value!r} into {self}")

    @property
    def zero(self) -> Any:
        return self.domain.zero

    @property
    def one(self) -> Any:
        return self.domain.one

    def gen(self, name: str) -> Any:
        if name not in self.names:
            raise StructuralError(f"{self} has no parameter named {name}")
        return self.domain.from_sympy(self.symbols[self.names.index(name)])

    def monomial(self, exponents: tuple[int, ...]) -> Any:
        """q_1^{m_1} ... q_l^{m_l}, with negative exponents allowed."""
        value = self.one
        for a, m in enumerate(exponents, 1):
            if m:
                value *= self.gen(f"q{a}") ** m
        return value

    def derivative(self, value: Any, name: str) -> Any:
        if name not in self.names:
            raise PreconditionError(f"{self} has no parameter named {name}")
        generator = self.domain.field.gens[self.names.index(name)]
        return value.diff(generator)

    def to_expr(self, value: Any) -> sympy.Expr:
        return self.domain.to_sympy(value)

    def lift(self, value: Any, source: "ParameterField") -> Any:
        if source == self:
            return value
        return self.domain.from_sympy(source.to_expr(value))

    def evaluate(self, value: Any, values: Mapping[str, complex | float | Fraction]) -> complex:
        expr = self.to_expr(value)
        substitutions = {}
        for name, symbol in zip(self.names, self.symbols):
            if name == PI:
                substitutions[symbol] = sympy.pi
            elif name in values:
                value = values[name]
                if isinstance(value, Fraction):
                    value = sympy.Rational(value.numerator, value.denominator)
                substitutions[symbol] = value
        return complex(expr.subs(substitutions).evalf())


@lru_cache
def parameter_field(names: tuple[str, ...]) -> ParameterField:
    return ParameterField(names)


def kahler_field(kahler_params: int, with_pi: bool = False) -> ParameterField:
    names = tuple(f"q{a}" for a in range(1, kahler_params + 1))
    if with_pi:
        names += (PI,)
    return parameter_field(names)


class GaussScalar:
    """An element re + i*im of the Gaussian extension of a ParameterField."""

    __slots__ = ("field", "re", "im")

    def __init__(self, field: ParameterField, re: Any = 0, im: Any = 0):
        self.field = field
        self.re = field.element(re)
        self.im = field.element(im)

    @classmethod
    def of(cls, field: ParameterField, value: Any) -> "GaussScalar":
        if isinstance(value, GaussScalar):
            if value.field != field:
                return cls(field, field.lift(value.re, value.field), field.lift(value.im, value.field))
            return value
        if isinstance(value, complex):
            return cls(field, Fraction(str(value.real)), Fraction(str(value.imag)))
        return cls(field, value, 0)

    @classmethod
    def i(cls, field: ParameterField) -> "GaussScalar":
        return cls(field, 0, 1)

    def _coerce(self, other: Any) -> "GaussScalar":
        return GaussScalar.of(self.field, other)

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, GaussScalar)):
            other = self._coerce(other)
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __add__(self, other: Any) -> "GaussScalar":
        other = self._coerce(other)
        return GaussScalar(self.field, self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussScalar":
        return GaussScalar(self.field, -self.re, -self.im)

    def __sub__(self, other: Any) -> "GaussScalar":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> "GaussScalar":
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> "GaussScalar":
        other = self._coerce(other)
        return GaussScalar(
            self.field,
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "GaussScalar":
        return GaussScalar(self.field, self.re, -self.im)

    def __truediv__(self, other: Any) -> "GaussScalar":
        other = self._coerce(other)
        norm = other.re * other.re + other.im * other.im
        if not norm:
            raise ZeroDivisionError("division by the zero scalar")
        numerator = self * other.conjugate()
        return GaussScalar(self.field, numerator.re / norm, numerator.im / norm)

    def __rtruediv__(self, other: Any) -> "GaussScalar":
        return self._coerce(other) / self

    def __pow__(self, exponent: int) -> "GaussScalar":
        if exponent < 0:
            return GaussScalar(self.field, 1) / (self ** (-exponent))
        result = GaussScalar(self.field, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def derivative(self, name: str) -> "GaussScalar":
        return GaussScalar(
            self.field,
            self.field.derivative(self.re, name),
            self.field.derivative(self.im, name),
        )

    def lift(self, field: ParameterField) -> "GaussScalar":
        return GaussScalar.of(field, self)

    def to_expr(self) -> sympy.Expr:
        return self.field.to_expr(self.re) + sympy.I * self.field.to_expr(self.im)

    def evaluate(self, values: Mapping[str, complex | float | Fraction]) -> complex:
        value = self.field.evaluate(self.re, values)
        if self.im:
            value += 1j * self.field.evaluate(self.im, values)
        return value

    def render(self) -> str:
        return str(self.to_expr()).replace("**", "^")

    def __repr__(self) -> str:
        return f"GaussScalar({self.render()})"
