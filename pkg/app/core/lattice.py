"""
Lattice and fan geometry of a smooth toric Fano polytope.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from math import gcd
from typing import Iterator, Sequence

import numpy as np
import sympy
from loguru import logger

from app.core.forms import SymmetricMatrix
from app.errors import DomainError, PreconditionError, StructuralError
from app.models import CheckResult, FanPolytope, Facet, MomentPoint, ValidationReport


# ============= Lattice helpers =============

def is_primitive(v: Sequence[int]) -> bool:
    g = 0
    for entry in v:
        g = gcd(g, int(entry))
    return g == 1


def integer_det(vectors: Sequence[Sequence[int]]) -> int:
    """Determinant of the matrix whose columns are the given vectors."""
    return int(sympy.Matrix([list(v) for v in vectors]).T.det())


def unimodular_transform(fp: FanPolytope, matrix: Sequence[Sequence[int]]) -> FanPolytope:
    """Apply an integer matrix with determinant +-1 to every facet normal."""
    a = sympy.Matrix(matrix)
    if a.shape != (fp.dim, fp.dim) or abs(a.det()) != 1:
        raise PreconditionError("the transform must be a unimodular dim x dim integer matrix")
    facets = tuple(
        facet.model_copy(update={"normal": tuple(int(e) for e in a * sympy.Matrix(facet.normal))})
        for facet in fp.facets
    )
    return fp.model_copy(update={"facets": facets})


# ============= Validation =============

def _check_primitive(fp: FanPolytope) -> CheckResult:
    bad = [i for i, facet in enumerate(fp.facets, 1) if not is_primitive(facet.normal)]
    if bad:
        return CheckResult(
            name="primitive",
            passed=False,
            detail=f"facet normals {bad} are not primitive",
            witness={"facets": bad},
        )
    return CheckResult(name="primitive", passed=True, detail="all facet normals are primitive")


def _check_unimodular(fp: FanPolytope) -> CheckResult:
    for cone in fp.maximal_cones:
        det = integer_det(fp.cone_normals(cone))
        if abs(det) != 1:
            return CheckResult(
                name="unimodular",
                passed=False,
                detail=f"cone {list(cone)} has |det| = {abs(det)}",
                witness={"cone": list(cone), "det": det},
            )
    return CheckResult(name="unimodular", passed=True, detail="every maximal cone has |det| = 1")


def _check_complete(fp: FanPolytope) -> CheckResult:
    unused = sorted(set(range(1, fp.num_facets + 1)) - {i for cone in fp.maximal_cones for i in cone})
    if unused:
        return CheckResult(
            name="complete",
            passed=False,
            detail=f"facets {unused} span no maximal cone",
            witness={"facets": unused},
        )

    # Every wall of every cone must be shared by exactly two cones lying on opposite sides
    walls: dict[tuple[int, ...], list[int]] = {}
    for cone in fp.maximal_cones:
        for wall in combinations(sorted(cone), fp.dim - 1):
            (extra,) = set(cone) - set(wall)
            walls.setdefault(wall, []).append(extra)

    for wall, extras in sorted(walls.items()):
        if len(extras) != 2:
            return CheckResult(
                name="complete",
                passed=False,
                detail=f"wall {list(wall)} is shared by {len(extras)} cone(s), expected 2",
                witness={"wall": list(wall), "cones": len(extras)},
            )
        wall_normals = [fp.facets[i - 1].normal for i in wall]
        sides = [integer_det(wall_normals + [fp.facets[e - 1].normal]) for e in extras]
        if sides[0] * sides[1] >= 0:
            return CheckResult(
                name="complete",
                passed=False,
                detail=f"the two cones on wall {list(wall)} lie on the same side",
                witness={"wall": list(wall)},
            )
    return CheckResult(name="complete", passed=True, detail="every wall is shared by two opposite cones")


def _non_fano_cones(fp: FanPolytope) -> list[list[int]]:
    """Cones where the anticanonical support function fails to be strictly convex."""
    bad = []
    for cone in fp.maximal_cones:
        v = sympy.Matrix([list(normal) for normal in fp.cone_normals(cone)])
        m = v.LUsolve(sympy.Matrix([-1] * fp.dim))
        for i, facet in enumerate(fp.facets, 1):
            if i not in cone and (sympy.Matrix([list(facet.normal)]) * m)[0] <= -1:
                bad.append(list(cone))
                break
    return bad


def validate_smooth_fano(fp: FanPolytope) -> ValidationReport:
    """Check primitivity, unimodularity and completeness of the fan.

    Negative q-exponents are reported as warnings, not failures.
    """
    checks = [_check_primitive(fp), _check_unimodular(fp), _check_complete(fp)]
    warnings = []
    negative = [i for i, facet in enumerate(fp.facets, 1) if any(m < 0 for m in facet.q_exponent)]
    if negative:
        warnings.append(f"facets {negative} carry negative q-exponents; the data may not be Fano")
    not_fano = _non_fano_cones(fp) if checks[1].passed else []
    if not_fano:
        warnings.append(f"the anticanonical divisor is not ample on cones {not_fano}; the data is not Fano")

    passed = all(check.passed for check in checks)
    logger.info(f"Validated {fp.name or 'polytope'}: {'pass' if passed else 'fail'}")
    for warning in warnings:
        logger.warning(warning)
    return ValidationReport(polytope=fp.name, passed=passed, checks=checks, warnings=warnings)


def euler_characteristic(fp: FanPolytope) -> int:
    return len(fp.maximal_cones)


# ============= Normalization =============

def is_normalized(fp: FanPolytope) -> bool:
    for j, facet in enumerate(fp.facets[: fp.dim]):
        if facet.normal != tuple(int(k == j) for k in range(fp.dim)) or any(facet.q_exponent):
            return False
    return True


def _choose_cone(fp: FanPolytope) -> tuple[int, ...]:
    unimodular = [c for c in fp.maximal_cones if abs(integer_det(fp.cone_normals(c))) == 1]
    if not unimodular:
        raise PreconditionError("no unimodular maximal cone: the fan is not smooth")
    for cone in unimodular:
        if all(not any(fp.facets[i - 1].q_exponent) for i in cone):
            return cone
    return unimodular[0]


def normalize_basis(fp: FanPolytope) -> FanPolytope:
    """Change basis of N so that facets 1..n are the standard basis with zero q-exponents."""
    if is_normalized(fp):
        return fp
    cone = _choose_cone(fp)
    # Columns of v are the cone normals; its inverse sends them to the standard basis
    v = sympy.Matrix([list(fp.facets[i - 1].normal) for i in cone]).T
    a = v.inv()

    order = list(cone) + [i for i in range(1, fp.num_facets + 1) if i not in cone]
    relabel = {old: new for new, old in enumerate(order, 1)}
    base_exponents = [fp.facets[i - 1].q_exponent for i in cone]
    base_supports = [fp.facets[i - 1].support for i in cone]

    facets = []
    for old in order:
        facet = fp.facets[old - 1]
        normal = tuple(int(e) for e in a * sympy.Matrix(facet.normal))
        exponent = tuple(
            facet.q_exponent[b] - sum(normal[k] * base_exponents[k][b] for k in range(fp.dim))
            for b in range(fp.kahler_params)
        )
        support = None
        if fp.has_supports:
            support = facet.support - sum(
                (normal[k] * base_supports[k] for k in range(fp.dim)), Fraction(0)
            )
        facets.append(Facet(normal=normal, q_exponent=exponent, support=support))

    cones = tuple(tuple(sorted(relabel[i] for i in c)) for c in fp.maximal_cones)
    normalized = FanPolytope(
        dim=fp.dim,
        kahler_params=fp.kahler_params,
        facets=tuple(facets),
        maximal_cones=cones,
        name=fp.name,
    )
    if any(m < 0 for facet in normalized.facets for m in facet.q_exponent):
        logger.warning("Normalization produced negative q-exponents")
    logger.info(f"Normalized {fp.name or 'polytope'} on cone {list(cone)}")
    return normalized


# ============= Moment polytope and the Guillemin potential =============

def support_values(fp: FanPolytope, x: MomentPoint) -> list[Fraction]:
    """l_i(x) = <x, v_i> - lambda_i, required to be positive."""
    if not fp.has_supports:
        raise StructuralError("numeric supports (lambda) are required")
    if len(x.coordinates) != fp.dim:
        raise StructuralError(f"moment point has {len(x.coordinates)} coordinates, dim is {fp.dim}")
    values = [
        sum((Fraction(vj) * xj for vj, xj in zip(facet.normal, x.coordinates)), Fraction(0)) - facet.support
        for facet in fp.facets
    ]
    if any(value <= 0 for value in values):
        raise DomainError(f"{[str(c) for c in x.coordinates]} is not in the interior of the polytope")
    return values


def guillemin_potential(fp: FanPolytope, x: MomentPoint) -> float:
    lengths = np.array([float(value) for value in support_values(fp, x)])
    return float(0.5 * np.sum(lengths * np.log(lengths)))


def legendre_gradient(fp: FanPolytope, x: MomentPoint) -> np.ndarray:
    lengths = np.array([float(value) for value in support_values(fp, x)])
    normals = np.array(fp.normals, dtype=float)
    return 0.5 * normals.T @ (np.log(lengths) + 1.0)


def guillemin_hessian(fp: FanPolytope, x: MomentPoint) -> SymmetricMatrix:
    """phi_jk(x) = 1/2 sum_i v_i^j v_i^k / l_i(x), exactly."""
    lengths = support_values(fp, x)
    n = fp.dim
    entries = [
        [
            sum((Fraction(f.normal[j] * f.normal[k]) / (2 * li) for f, li in zip(fp.facets, lengths)), Fraction(0))
            for k in range(n)
        ]
        for j in range(n)
    ]
    return SymmetricMatrix(entries)


def polytope_vertices(fp: FanPolytope) -> list[tuple[Fraction, ...]]:
    """One vertex per maximal cone: <x, v_i> = lambda_i for i in the cone."""
    if not fp.has_supports:
        raise StructuralError("numeric supports (lambda) are required")
    vertices = []
    for cone in fp.maximal_cones:
        v = sympy.Matrix([list(normal) for normal in fp.cone_normals(cone)])
        rhs = sympy.Matrix([sympy.Rational(str(fp.facets[i - 1].support)) for i in cone])
        solution = v.LUsolve(rhs)
        vertices.append(tuple(Fraction(int(e.p), int(e.q)) for e in solution))
    return vertices


def barycenter(fp: FanPolytope) -> MomentPoint:
    """Average of the vertices, an interior point of the moment polytope."""
    vertices = polytope_vertices(fp)
    return MomentPoint(
        coordinates=tuple(sum(c, Fraction(0)) / len(vertices) for c in zip(*vertices))
    )


def disc_area(fp: FanPolytope, x: MomentPoint, i: int) -> float:
    """Symplectic area 2 pi l_i(x) of the basic Maslov index two disc through the fiber at x."""
    if i < 1 or i > fp.num_facets:
        raise PreconditionError(f"facet index {i} outside 1..{fp.num_facets}")
    return float(2 * np.pi * float(support_values(fp, x)[i - 1]))


def log_map(z: Sequence[complex]) -> np.ndarray:
    """Log(z)_j = log |z_j|."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise DomainError("Log is undefined at a zero coordinate")
    return np.log(np.abs(z))


# ============= Products of projective spaces =============

def _zero_sum_groups(fp: FanPolytope) -> list[frozenset[int]]:
    """Minimal sets of facets whose normals sum to zero."""
    groups: list[frozenset[int]] = []
    for size in range(2, fp.num_facets + 1):
        for subset in combinations(range(1, fp.num_facets + 1), size):
            if any(group <= set(subset) for group in groups):
                continue
            total = [sum(fp.facets[i - 1].normal[k] for i in subset) for k in range(fp.dim)]
            if not any(total):
                groups.append(frozenset(subset))
    return groups


def is_projective_product(fp: FanPolytope, max_facets: int = 16) -> bool:
    """
    True when the fan is a product of projective space fans
    The facets must split into kahler_params zero-sum blocks of corank one, and the
    maximal cones must be exactly the unions of one facet-deleted block per factor.
    """
    if fp.num_facets > max_facets:
        return False
    groups = [
        g for g in _zero_sum_groups(fp)
        if sympy.Matrix([list(fp.facets[i - 1].normal) for i in g]).rank() == len(g) - 1
    ]

    def partitions(remaining: frozenset[int], chosen: tuple[frozenset[int], ...]) -> Iterator[tuple[frozenset[int], ...]]:
        if not remaining:
            if len(chosen) == fp.kahler_params:
                yield chosen
            return
        first = min(remaining)
        for g in groups:
            if first in g and g <= remaining:
                yield from partitions(remaining - g, chosen + (g,))

    cones = {frozenset(cone) for cone in fp.maximal_cones}
    for blocks in partitions(frozenset(range(1, fp.num_facets + 1)), ()):
        product_cones = {
            frozenset().union(*(block - {dropped} for block, dropped in zip(blocks, choice)))
            for choice in product(*blocks)
        }
        if product_cones == cones:
            return True
    return False
