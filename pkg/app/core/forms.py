"""
Exact exterior algebra on the fiber product X x_B Y.

Generators are dx_1..dx_n (base), dy_1..dy_n (fiber of Y) and du_1..du_n
(fiber of X). Generator g = block * n + (j - 1); a monomial is the ascending
tuple of its generators and the sign lives in the coefficient.

Orientation: T_M (the y-fiber) is oriented by dy_1^...^dy_n and T_N (the
u-fiber) by du_n^...^du_1.
"""

from __future__ import annotations

import cmath
import random
from enum import IntEnum
from fractions import Fraction
from itertools import combinations
from math import factorial
from typing import Any, Iterable, Mapping, Sequence

import sympy

from app.core.laurent import Exponent, LaurentPoly, common_field, join_terms
from app.core.loops import LoopFunction, fourier, inverse_fourier
from app.core.scalars import PI, GaussScalar, ParameterField, kahler_field, parameter_field
from app.errors import DomainError, PreconditionError, StructuralError

Monomial = tuple[int, ...]


class Block(IntEnum):
    DX = 0
    DY = 1
    DU = 2


BLOCK_NAMES = {Block.DX: "dx", Block.DY: "dy", Block.DU: "du"}


def _block_of(generator: int, n: int) -> Block:
    return Block(generator // n)


def _merge_sign(left: Monomial, right: Monomial) -> int:
    """Sign of sorting left + right; 0 if a generator repeats."""
    if set(left) & set(right):
        return 0
    inversions = sum(1 for a in left for b in right if a > b)
    return -1 if inversions % 2 else 1


def with_pi(field: ParameterField) -> ParameterField:
    return field if PI in field.names else parameter_field(field.names + (PI,))


class DifferentialForm:
    """Finite sum of exterior monomials with GaussScalar coefficients."""

    def __init__(self, field: ParameterField, n: int, terms: Mapping[Monomial, Any] | None = None):
        self.field = field
        self.n = n
        self.terms: dict[Monomial, GaussScalar] = {}
        for monomial, coefficient in (terms or {}).items():
            monomial = tuple(monomial)
            if any(g < 0 or g >= 3 * n for g in monomial) or list(monomial) != sorted(set(monomial)):
                raise StructuralError(f"{monomial} is not a canonical exterior monomial for n={n}")
            value = GaussScalar.of(field, coefficient)
            if monomial in self.terms:
                value = self.terms[monomial] + value
            if value.is_zero():
                self.terms.pop(monomial, None)
            else:
                self.terms[monomial] = value

    # ---- construction ----

    @classmethod
    def constant(cls, field: ParameterField, n: int, value: Any = 1) -> "DifferentialForm":
        return cls(field, n, {(): value})

    @classmethod
    def generator(cls, field: ParameterField, n: int, block: Block, j: int) -> "DifferentialForm":
        if j < 1 or j > n:
            raise PreconditionError(f"generator index {j} outside 1..{n}")
        return cls(field, n, {(block * n + j - 1,): 1})

    def lift(self, field: ParameterField) -> "DifferentialForm":
        if field == self.field:
            return self
        return DifferentialForm(field, self.n, {m: c.lift(field) for m, c in self.terms.items()})

    def _aligned(self, other: "DifferentialForm") -> tuple["DifferentialForm", "DifferentialForm"]:
        if other.n != self.n:
            raise StructuralError(f"forms on different dimensions: {self.n} vs {other.n}")
        field = common_field(self.field, other.field)
        return self.lift(field), other.lift(field)

    def settle(self, field: ParameterField) -> "DifferentialForm":
        """Move back to a smaller field when no coefficient needs the extra symbols."""
        extra = {sympy.Symbol(name) for name in self.field.names if name not in field.names}
        for coefficient in self.terms.values():
            if coefficient.to_expr().free_symbols & extra:
                return self
        return DifferentialForm(field, self.n, {m: c.lift(field) for m, c in self.terms.items()})

    # ---- inspection ----

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return {len(m) for m in self.terms}

    def blocks(self) -> set[Block]:
        return {_block_of(g, self.n) for m in self.terms for g in m}

    def coefficient(self, monomial: Monomial) -> GaussScalar:
        return self.terms.get(tuple(monomial), GaussScalar(self.field))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, GaussScalar)):
            other = DifferentialForm.constant(self.field, self.n, other)
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        if other.n != self.n:
            return False
        left, right = self._aligned(other)
        return left.terms == right.terms

    __hash__ = None  # type: ignore[assignment]

    # ---- algebra ----

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        left, right = self._aligned(other)
        terms: dict[Monomial, Any] = dict(left.terms)
        for monomial, coefficient in right.terms.items():
            terms[monomial] = terms[monomial] + coefficient if monomial in terms else coefficient
        return DifferentialForm(left.field, self.n, terms)

    def __neg__(self) -> "DifferentialForm":
        return DifferentialForm(self.field, self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "DifferentialForm") -> "DifferentialForm":
        return self + (-other)

    def scale(self, scalar: Any) -> "DifferentialForm":
        if isinstance(scalar, GaussScalar) and scalar.field != self.field:
            field = common_field(self.field, scalar.field)
            return self.lift(field).scale(scalar.lift(field))
        return DifferentialForm(self.field, self.n, {m: c * scalar for m, c in self.terms.items()})

    def wedge(self, other: "DifferentialForm") -> "DifferentialForm":
        left, right = self._aligned(other)
        terms: dict[Monomial, Any] = {}
        for m, a in left.terms.items():
            for p, b in right.terms.items():
                sign = _merge_sign(m, p)
                if not sign:
                    continue
                monomial = tuple(sorted(m + p))
                product = a * b if sign > 0 else -(a * b)
                terms[monomial] = terms[monomial] + product if monomial in terms else product
        return DifferentialForm(left.field, self.n, terms)

    __xor__ = wedge

    # ---- rendering ----

    def monomial_name(self, monomial: Monomial) -> str:
        return "^".join(
            f"{BLOCK_NAMES[_block_of(g, self.n)]}{g % self.n + 1}" for g in monomial
        )

    def render(self) -> str:
        parts = []
        for monomial in sorted(self.terms, key=lambda m: (len(m), m)):
            expr = self.terms[monomial].to_expr()
            text = str(expr).replace("**", "^")
            if not monomial:
                parts.append(text)
                continue
            if expr.is_Add:
                text = f"({text})"
            parts.append(f"{text} * {self.monomial_name(monomial)}")
        return join_terms(parts)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"DifferentialForm({self.render()})"


def wedge(alpha: DifferentialForm, beta: DifferentialForm) -> DifferentialForm:
    return alpha.wedge(beta)


def wedge_all(forms: Iterable[DifferentialForm], field: ParameterField, n: int) -> DifferentialForm:
    result = DifferentialForm.constant(field, n)
    for form in forms:
        result = result.wedge(form)
    return result


def form_exp(alpha: DifferentialForm) -> DifferentialForm:
    """The finite wedge exponential sum_k alpha^k / k! of an even form."""
    if any(d % 2 for d in alpha.degrees()):
        raise PreconditionError("form_exp needs an even form")
    result = DifferentialForm.constant(alpha.field, alpha.n)
    power = DifferentialForm.constant(alpha.field, alpha.n)
    k = 0
    while True:
        k += 1
        power = power.wedge(alpha)
        if power.is_zero():
            return result
        result = result + power.scale(Fraction(1, factorial(k)))


def fiber_integrate(alpha: DifferentialForm, block: Block) -> DifferentialForm:
    """Integrate over the torus fiber spanned by one block of generators."""
    if block not in (Block.DY, Block.DU):
        raise PreconditionError("only the dy and du fibers can be integrated out")
    n = alpha.n
    field = with_pi(alpha.field)
    fiber = tuple(range(block * n, block * n + n))
    volume = GaussScalar(field, 2 * field.gen(PI)) ** n
    if block == Block.DU and (n * (n - 1) // 2) % 2:
        volume = -volume

    terms: dict[Monomial, Any] = {}
    for monomial, coefficient in alpha.terms.items():
        if not set(fiber) <= set(monomial):
            continue
        rest = tuple(g for g in monomial if g not in fiber)
        moves = sum(1 for b in fiber for r in rest if b < r)
        value = coefficient.lift(field) * volume
        terms[rest] = -value if moves % 2 else value
    return DifferentialForm(field, n, terms)


# ============= Structure forms =============

def _real_field(field: ParameterField | None) -> ParameterField:
    return field or kahler_field(0)


def omega_x(n: int, field: ParameterField | None = None) -> DifferentialForm:
    """Symplectic form sum_j dx_j ^ du_j on X."""
    field = _real_field(field)
    result = DifferentialForm(field, n)
    for j in range(1, n + 1):
        result = result + DifferentialForm.generator(field, n, Block.DX, j).wedge(
            DifferentialForm.generator(field, n, Block.DU, j)
        )
    return result


def holomorphic_volume_y(n: int, field: ParameterField | None = None) -> DifferentialForm:
    """Omega_Y = (dx_1 + i dy_1) ^ ... ^ (dx_n + i dy_n)."""
    field = _real_field(field)
    i = GaussScalar.i(field)
    return wedge_all(
        (
            DifferentialForm.generator(field, n, Block.DX, j)
            + DifferentialForm.generator(field, n, Block.DY, j).scale(i)
            for j in range(1, n + 1)
        ),
        field,
        n,
    )


def dlog_volume_form(n: int, field: ParameterField | None = None) -> DifferentialForm:
    """dz_1/z_1 ^ ... ^ dz_n/z_n for z_j = exp(-x_j - i y_j)."""
    return holomorphic_volume_y(n, field).scale(-1 if n % 2 else 1)


def poincare_curvature(n: int, field: ParameterField | None = None) -> DifferentialForm:
    """F = i sum_j dy_j ^ du_j."""
    field = _real_field(field)
    i = GaussScalar.i(field)
    result = DifferentialForm(field, n)
    for j in range(1, n + 1):
        result = result + DifferentialForm.generator(field, n, Block.DY, j).wedge(
            DifferentialForm.generator(field, n, Block.DU, j)
        )
    return result.scale(i)


class SymmetricMatrix:
    """Exact rational symmetric positive definite matrix phi_jk with its inverse."""

    def __init__(self, entries: Sequence[Sequence[Any]]):
        rows = [[_rational(value) for value in row] for row in entries]
        n = len(rows)
        if n == 0 or any(len(row) != n for row in rows):
            raise StructuralError("phi must be a non-empty square matrix")
        self.matrix = sympy.Matrix(rows)
        if self.matrix != self.matrix.T:
            raise PreconditionError("phi must be symmetric")
        for k in range(1, n + 1):
            if self.matrix[:k, :k].det() <= 0:
                raise PreconditionError(f"phi is not positive definite (leading minor {k})")
        self.inverse = self.matrix.inv()
        self.n = n

    @classmethod
    def identity(cls, n: int) -> "SymmetricMatrix":
        return cls([[int(j == k) for k in range(n)] for j in range(n)])

    @classmethod
    def random(cls, n: int, rng: random.Random, spread: int = 3) -> "SymmetricMatrix":
        """B B^T + I for a random rational B."""
        b = sympy.Matrix(
            n, n, lambda j, k: sympy.Rational(rng.randint(-spread, spread), rng.randint(1, spread))
        )
        return cls((b * b.T + sympy.eye(n)).tolist())

    def entry(self, j: int, k: int) -> Fraction:
        value = self.matrix[j - 1, k - 1]
        return Fraction(int(value.p), int(value.q))

    def inverse_entry(self, j: int, k: int) -> Fraction:
        value = self.inverse[j - 1, k - 1]
        return Fraction(int(value.p), int(value.q))

    def to_json(self) -> list[list[str]]:
        return [[str(self.matrix[j, k]) for k in range(self.n)] for j in range(self.n)]


def _rational(value: Any) -> sympy.Rational:
    if isinstance(value, sympy.Rational):
        return value
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    if isinstance(value, (int, str)):
        return sympy.Rational(value)
    if isinstance(value, float):
        return sympy.Rational(str(value))
    raise StructuralError(f"cannot read {value!r} as a rational matrix entry")


def _dual_coordinate(phi: SymmetricMatrix, field: ParameterField, j: int) -> DifferentialForm:
    """d(dphi/dx_j) = sum_k phi_jk dx_k."""
    result = DifferentialForm(field, phi.n)
    for k in range(1, phi.n + 1):
        result = result + DifferentialForm.generator(field, phi.n, Block.DX, k).scale(phi.entry(j, k))
    return result


def kahler_form_y(phi: SymmetricMatrix, field: ParameterField | None = None) -> DifferentialForm:
    """omega_Y = sum_jk phi_jk dx_k ^ dy_j."""
    field = _real_field(field)
    result = DifferentialForm(field, phi.n)
    for j in range(1, phi.n + 1):
        result = result + _dual_coordinate(phi, field, j).wedge(
            DifferentialForm.generator(field, phi.n, Block.DY, j)
        )
    return result


def holomorphic_volume_x(phi: SymmetricMatrix, field: ParameterField | None = None) -> DifferentialForm:
    """Omega_X, wedged in the fiber orientation order j = n down to 1."""
    field = _real_field(field)
    i = GaussScalar.i(field)
    return wedge_all(
        (
            _dual_coordinate(phi, field, j)
            + DifferentialForm.generator(field, phi.n, Block.DU, j).scale(i)
            for j in range(phi.n, 0, -1)
        ),
        field,
        phi.n,
    )


def action_volume_y(phi: SymmetricMatrix, field: ParameterField | None = None) -> DifferentialForm:
    """Omega_Y written through the dual coordinates: dx_j = sum_k phi^{jk} d(dphi/dx_k)."""
    field = _real_field(field)
    i = GaussScalar.i(field)
    factors = []
    for j in range(1, phi.n + 1):
        dx = DifferentialForm(field, phi.n)
        for k in range(1, phi.n + 1):
            dx = dx + _dual_coordinate(phi, field, k).scale(phi.inverse_entry(j, k))
        factors.append(dx + DifferentialForm.generator(field, phi.n, Block.DY, j).scale(i))
    return wedge_all(factors, field, phi.n)


# ============= Semi-flat transform =============

def _kernel_prefactor(field: ParameterField, n: int, sign: int) -> GaussScalar:
    """(sign * 2 pi i)^{-n}"""
    two_pi_i = GaussScalar(field, 0, 2 * sign * field.gen(PI))
    return two_pi_i ** (-n)


def _kernel_transform(alpha: DifferentialForm, kernel_sign: int, block: Block, prefactor_sign: int) -> DifferentialForm:
    base = alpha.field
    field = with_pi(base)
    alpha = alpha.lift(field)
    kernel = form_exp(poincare_curvature(alpha.n, field).scale(GaussScalar(field, 0, kernel_sign)))
    integral = fiber_integrate(alpha.wedge(kernel), block)
    return integral.scale(_kernel_prefactor(field, alpha.n, prefactor_sign)).settle(base)


def semiflat_fwd(alpha: DifferentialForm) -> DifferentialForm:
    """(2 pi i)^{-n} integral over T_N of alpha ^ exp(iF)."""
    if Block.DY in alpha.blocks():
        raise DomainError("semiflat_fwd takes forms on X (no dy generators)")
    return _kernel_transform(alpha, 1, Block.DU, 1)


def semiflat_inv(alpha: DifferentialForm) -> DifferentialForm:
    """(2 pi i)^{-n} integral over T_M of alpha ^ exp(-iF)."""
    if Block.DU in alpha.blocks():
        raise DomainError("semiflat_inv takes forms on Y (no du generators)")
    return _kernel_transform(alpha, -1, Block.DY, 1)


def exterior_basis(n: int, blocks: tuple[Block, Block], field: ParameterField | None = None) -> list[DifferentialForm]:
    """All 2^{2n} constant-coefficient monomials in two generator blocks."""
    field = _real_field(field)
    generators = sorted(b * n + j for b in blocks for j in range(n))
    return [
        DifferentialForm(field, n, {subset: 1})
        for size in range(len(generators) + 1)
        for subset in combinations(generators, size)
    ]


# ============= Holonomy and lattice-graded forms =============

def holonomy(v: Sequence[int], y: Sequence[float]) -> complex:
    """exp(-i <y, v>)"""
    if len(v) != len(y):
        raise StructuralError(f"lattice vector has length {len(v)}, angles have length {len(y)}")
    return cmath.exp(-1j * sum(a * b for a, b in zip(v, y)))


class GradedForm:
    """Finite mapping v -> alpha_v, standing for sum_v e^{-<x,v>} alpha_v delta_v."""

    def __init__(self, n: int, entries: Mapping[Exponent, DifferentialForm] | None = None):
        self.n = n
        self.entries: dict[Exponent, DifferentialForm] = {}
        for v, form in (entries or {}).items():
            v = tuple(v)
            if len(v) != n or form.n != n:
                raise StructuralError(f"graded entry at {v} does not live in dimension {n}")
            if v in self.entries:
                form = self.entries[v] + form
            if form.is_zero():
                self.entries.pop(v, None)
            else:
                self.entries[v] = form

    @classmethod
    def from_loop(cls, f: LoopFunction, form: DifferentialForm | None = None) -> "GradedForm":
        """f times a fixed form (the constant 1 by default)."""
        if form is None:
            form = DifferentialForm.constant(f.field, f.nvars)
        return cls(f.nvars, {v: form.scale(c) for v, c in f.terms.items()})

    def is_function(self) -> bool:
        return all(form.degrees() <= {0} for form in self.entries.values())

    def to_loop(self) -> LoopFunction:
        if not self.is_function():
            raise PreconditionError("only function-valued graded forms are loop functions")
        field = kahler_field(0)
        for form in self.entries.values():
            field = common_field(field, form.field)
        return LoopFunction(field, self.n, {v: form.coefficient(()) for v, form in self.entries.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedForm):
            return NotImplemented
        return self.n == other.n and self.entries.keys() == other.entries.keys() and all(
            self.entries[v] == other.entries[v] for v in self.entries
        )

    __hash__ = None  # type: ignore[assignment]


class LaurentForm:
    """A form on Y with Laurent polynomial coefficients: monomial -> LaurentPoly."""

    def __init__(self, n: int, terms: Mapping[Monomial, LaurentPoly] | None = None):
        self.n = n
        self.terms: dict[Monomial, LaurentPoly] = {}
        for monomial, poly in (terms or {}).items():
            monomial = tuple(monomial)
            if monomial in self.terms:
                poly = self.terms[monomial] + poly
            if poly.is_zero():
                self.terms.pop(monomial, None)
            else:
                self.terms[monomial] = poly

    @classmethod
    def from_product(cls, poly: LaurentPoly, form: DifferentialForm) -> "LaurentForm":
        return cls(form.n, {m: poly.scale(c) for m, c in form.terms.items()})

    def degrees(self) -> set[Exponent]:
        return {v for poly in self.terms.values() for v in poly.terms}

    def stratum(self, v: Exponent) -> DifferentialForm:
        """The form multiplying z^v."""
        field = kahler_field(0)
        for poly in self.terms.values():
            field = common_field(field, poly.field)
        return DifferentialForm(field, self.n, {m: p.coefficient(v) for m, p in self.terms.items()})

    def is_function(self) -> bool:
        return set(self.terms) <= {()}

    def function(self) -> LaurentPoly:
        if not self.is_function():
            raise PreconditionError("this Laurent form has positive-degree parts")
        if () in self.terms:
            return self.terms[()]
        return LaurentPoly(kahler_field(0), self.n)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentForm):
            return NotImplemented
        return self.n == other.n and self.terms.keys() == other.terms.keys() and all(
            self.terms[m] == other.terms[m] for m in self.terms
        )

    __hash__ = None  # type: ignore[assignment]

    def render(self) -> str:
        parts = []
        for monomial in sorted(self.terms, key=lambda m: (len(m), m)):
            name = DifferentialForm(kahler_field(0), self.n).monomial_name(monomial)
            text = self.terms[monomial].render()
            parts.append(f"({text}) * {name}" if name else f"({text})")
        return " + ".join(parts) or "0"


def toric_kernel(alpha: DifferentialForm) -> DifferentialForm:
    """(-2 pi i)^{-n} integral over T_N of alpha ^ exp(iF)."""
    if Block.DY in alpha.blocks():
        raise DomainError("the toric transform takes forms on X (no dy generators)")
    return _kernel_transform(alpha, 1, Block.DU, -1)


def toric_kernel_inverse(beta: DifferentialForm) -> DifferentialForm:
    """(-2 pi i)^{-n} integral over T_M of beta ^ exp(-iF); inverse of toric_kernel."""
    if Block.DU in beta.blocks():
        raise DomainError("the inverse toric transform takes forms on Y (no du generators)")
    return _kernel_transform(beta, -1, Block.DY, -1)


def toric_syz_fwd(g: GradedForm) -> LaurentForm:
    """Fiberwise Fourier series for functions, degree-resolved kernel transform for forms."""
    if g.is_function():
        return LaurentForm(g.n, {(): fourier(g.to_loop())})
    terms: dict[Monomial, LaurentPoly] = {}
    for v, alpha in g.entries.items():
        image = toric_kernel(alpha)
        for monomial, coefficient in image.terms.items():
            piece = LaurentPoly.monomial(image.field, v, coefficient)
            terms[monomial] = terms[monomial] + piece if monomial in terms else piece
    return LaurentForm(g.n, terms)


def toric_syz_inv(f: LaurentForm) -> GradedForm:
    if f.is_function():
        return GradedForm.from_loop(inverse_fourier(f.function()))
    return GradedForm(f.n, {v: toric_kernel_inverse(f.stratum(v)) for v in f.degrees()})
