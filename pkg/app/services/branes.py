"""
Point branes: (L_x, flat connection y) on X against skyscrapers O_z on Y.
"""

from itertools import combinations
from math import comb
from typing import Any, Mapping, Optional, Sequence

import numpy as np
from loguru import logger

from app.config import get_settings
from app.core.forms import holonomy
from app.errors import DomainError
from app.models import ABranePoint, BBranePoint, BranePointReport, FanPolytope
from app.services.mirror import Superpotential, hessian_log, numeric_q


def brane_correspondence(a: ABranePoint) -> BBranePoint:
    """z_j = exp(-x_j - i y_j)."""
    x = np.asarray(a.x, dtype=float)
    y = np.asarray(a.y, dtype=float)
    return BBranePoint(z=tuple(np.exp(-x - 1j * y)))


def brane_correspondence_inverse(b: BBranePoint) -> ABranePoint:
    """x = -log|z|, y = -arg z normalized to [0, 2 pi)."""
    z = np.asarray(b.z, dtype=complex)
    if np.any(z == 0):
        raise DomainError("a zero coordinate has no Lagrangian torus fiber")
    y = np.mod(-np.angle(z), 2 * np.pi)
    return ABranePoint(x=tuple(-np.log(np.abs(z))), y=tuple(y))


def floer_m1(w: Superpotential, z: Sequence[complex], q: Optional[Mapping[str, Any]] = None) -> np.ndarray:
    """m_1 on the basis C_j of H^1(L_x): the vector (d_j W(z))_j."""
    return w.poly.numeric(numeric_q(w.field, q)).log_gradient(z)


def floer_m1_from_discs(fp: FanPolytope, a: ABranePoint, q: Optional[Mapping[str, Any]] = None) -> np.ndarray:
    """sum_i v_i^j q^{m_i} e^{-<x, v_i>} hol(v_i, y), one Maslov index two disc per facet."""
    names = [f"q{b}" for b in range(1, fp.kahler_params + 1)]
    values = {name: complex(q[name]) if q and name in q else 1.0 for name in names}
    result = np.zeros(fp.dim, dtype=complex)
    for facet in fp.facets:
        weight = np.prod([values[name] ** m for name, m in zip(names, facet.q_exponent)])
        area_factor = np.exp(-np.dot(a.x, facet.normal))
        result += np.asarray(facet.normal, dtype=float) * weight * area_factor * holonomy(facet.normal, a.y)
    return result


def floer_nontrivial(
    w: Superpotential,
    z: Sequence[complex],
    q: Optional[Mapping[str, Any]] = None,
    tol: Optional[float] = None,
) -> bool:
    tol = tol if tol is not None else get_settings().residual_tolerance
    return bool(np.max(np.abs(floer_m1(w, z, q))) <= tol)


def endomorphism_dim(
    w: Superpotential,
    z: Sequence[complex],
    q: Optional[Mapping[str, Any]] = None,
    tol: Optional[float] = None,
) -> int:
    """dim Lambda^* T_z Y when the brane is nontrivial, else 0."""
    return 2 ** w.nvars if floer_nontrivial(w, z, q, tol) else 0


def _contraction_matrix(g: np.ndarray, k: int) -> np.ndarray:
    """Matrix of iota_g: Lambda^k -> Lambda^{k-1} on the subset bases."""
    n = len(g)
    sources = list(combinations(range(n), k))
    targets = {subset: row for row, subset in enumerate(combinations(range(n), k - 1))}
    matrix = np.zeros((len(targets), len(sources)), dtype=complex)
    for col, subset in enumerate(sources):
        for position, j in enumerate(subset):
            matrix[targets[subset[:position] + subset[position + 1:]], col] += (-1) ** position * g[j]
    return matrix


def koszul_cohomology(
    w: Superpotential,
    z: Sequence[complex],
    q: Optional[Mapping[str, Any]] = None,
    tol: Optional[float] = None,
) -> list[int]:
    """Cohomology dimensions of (Lambda^* C^n, iota_{dW(z)}) in degrees 0..n."""
    tol = tol if tol is not None else get_settings().residual_tolerance
    g = floer_m1(w, z, q)
    n = len(g)
    if np.max(np.abs(g)) <= tol:
        return [comb(n, k) for k in range(n + 1)]

    def rank(k: int) -> int:
        if k < 1 or k > n:
            return 0
        return int(np.linalg.matrix_rank(_contraction_matrix(g, k)))

    return [comb(n, k) - rank(k) - rank(k + 1) for k in range(n + 1)]


def clifford_form(w: Superpotential, z: Sequence[complex], q: Optional[Mapping[str, Any]] = None) -> np.ndarray:
    """Q(C_j, C_k) = d_j d_k W(z)."""
    return hessian_log(w, z, q)


def brane_report(
    w: Superpotential,
    z: np.ndarray,
    q: Optional[Mapping[str, Any]] = None,
    tol: Optional[float] = None,
    digits: int = 12,
) -> BranePointReport:
    form = clifford_form(w, z, q)
    residual = float(np.max(np.abs(floer_m1(w, z, q))))
    nontrivial = floer_nontrivial(w, z, q, tol)
    if nontrivial and abs(np.linalg.det(form)) <= 1e-8:
        logger.warning(f"Clifford form is degenerate at {z}")
    return BranePointReport(
        coordinates=[rounded_pair(c, digits) for c in z],
        residual=round_sig(residual, digits),
        nontrivial=nontrivial,
        endomorphism_dim=endomorphism_dim(w, z, q, tol),
        koszul_cohomology=koszul_cohomology(w, z, q, tol),
        clifford_form=[[rounded_pair(c, digits) for c in row] for row in form],
        clifford_determinant=rounded_pair(complex(np.linalg.det(form)), digits),
    )


def round_sig(value: float, digits: int) -> float:
    """Round to the given number of significant digits."""
    if not np.isfinite(value) or value == 0:
        return float(value)
    return float(f"{value:.{digits}g}")


def rounded_pair(value: complex, digits: int) -> tuple[float, float]:
    """
    (re, im) rounded to significant digits of |value|
    A part below 10^-digits * |value| is rounding noise and becomes 0.
    """
    value = complex(value)
    noise = abs(value) * 10.0 ** (-digits)
    re, im = value.real, value.imag
    return (
        0.0 if abs(re) <= noise else round_sig(re, digits),
        0.0 if abs(im) <= noise else round_sig(im, digits),
    )
