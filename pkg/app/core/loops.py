"""
Lattice-graded functions on the loop space LX = X x N.

A LoopFunction {v: c_v} stands for sum_v c_v e^{-<x, v>} delta_v; the
x-dependence is implied by the grading and never stored.
"""

from __future__ import annotations

from math import factorial
from typing import Any

from app.core.laurent import LatticeSeries, LaurentPoly
from app.core.scalars import ParameterField
from app.errors import PreconditionError


class LoopFunction(LatticeSeries):
    """Finitely supported function on LX; the product is lattice convolution."""

    def convolve(self, other: "LoopFunction") -> "LoopFunction":
        if not isinstance(other, LoopFunction):
            raise TypeError("convolution is defined between loop functions")
        return self.shift_product(other)

    def __mul__(self, other: Any) -> "LoopFunction":
        if isinstance(other, LoopFunction):
            return self.convolve(other)
        if isinstance(other, LatticeSeries):
            raise TypeError("a loop function convolves only with loop functions")
        return self.scale(other)

    def __rmul__(self, other: Any) -> "LoopFunction":
        return self.scale(other)

    def convolution_power(self, k: int) -> "LoopFunction":
        return self._power(k)

    def render(self) -> str:
        if not self.terms:
            return "{}"
        parts = []
        for exponent in sorted(self.terms):
            coefficient = str(self.terms[exponent].to_expr()).replace("**", "^")
            parts.append(f"({', '.join(str(e) for e in exponent)}): {coefficient}")
        return "{" + ", ".join(parts) + "}"

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"LoopFunction({self.render()})"


def delta(field: ParameterField, nvars: int) -> LoopFunction:
    """The convolution unit delta_0."""
    return LoopFunction(field, nvars, {(0,) * nvars: 1})


def convolve(f: LoopFunction, g: LoopFunction) -> LoopFunction:
    return f.convolve(g)


def conv_exp(f: LoopFunction, cutoff: int) -> LoopFunction:
    """sum_{k=0}^{cutoff} f^{*k} / k!"""
    if cutoff < 0:
        raise PreconditionError(f"cutoff must be non-negative, got {cutoff}")
    result = delta(f.field, f.nvars)
    power = delta(f.field, f.nvars)
    for k in range(1, cutoff + 1):
        power = power.convolve(f)
        result = result + power.map_coefficients(lambda c, k=k: c / factorial(k))
    return result


def fourier(f: LoopFunction) -> LaurentPoly:
    """Fiberwise Fourier series: delta_v to z^v."""
    return LaurentPoly(f.field, f.nvars, dict(f.terms))


def inverse_fourier(f: LaurentPoly) -> LoopFunction:
    return LoopFunction(f.field, f.nvars, dict(f.terms))
