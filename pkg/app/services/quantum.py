"""
Disc-counting generators Psi_i on the loop space and the presentation of QH*.
"""

from loguru import logger

from app.core.lattice import euler_characteristic, is_projective_product
from app.core.laurent import LaurentPoly
from app.core.loops import LoopFunction, conv_exp, fourier
from app.core.quotient import QuotientPresentation, ideal_membership, laurent_quotient
from app.core.scalars import kahler_field
from app.errors import PreconditionError
from app.models import CheckResult, FanPolytope, IsoReport
from app.services.mirror import build_superpotential, jacobian_ring

# Number of Maslov index two holomorphic discs in the class beta_i through a
# generic point of a torus fiber. Toric Fano manifolds have exactly one.
DISC_COUNT = 1


def build_psi(fp: FanPolytope) -> list[LoopFunction]:
    """Psi_i = n_i q^{m_i} delta_{v_i}: discs of class beta_i with boundary v_i."""
    field = kahler_field(fp.kahler_params)
    return [
        LoopFunction.monomial(field, facet.normal, field.monomial(facet.q_exponent) * DISC_COUNT)
        for facet in fp.facets
    ]


def total_psi(fp: FanPolytope) -> LoopFunction:
    psi = build_psi(fp)
    total = LoopFunction(psi[0].field, fp.dim)
    for term in psi:
        total = total + term
    return total


class QhPresentation:
    """Generators Psi_1..Psi_d modulo the linear relations sum_i v_i^j Psi_i."""

    def __init__(self, polytope: FanPolytope, psi: list[LoopFunction]):
        self.polytope = polytope
        self.generators = [f"Psi{i}" for i in range(1, len(psi) + 1)]
        self.psi = psi
        self.linear_relations = []
        for j in range(polytope.dim):
            relation = LoopFunction(psi[0].field, polytope.dim)
            for facet, generator in zip(polytope.facets, psi):
                if facet.normal[j]:
                    relation = relation + generator.scale(facet.normal[j])
            self.linear_relations.append(relation)
        self._realization: QuotientPresentation | None = None

    def symbolic_relations(self) -> list[str]:
        """The relations written in the generator names, e.g. Psi1 - Psi3."""
        rendered = []
        for j in range(self.polytope.dim):
            parts = []
            for name, facet in zip(self.generators, self.polytope.facets):
                c = facet.normal[j]
                if c:
                    parts.append(("" if c > 0 else "-") + (f"{abs(c)}*" if abs(c) != 1 else "") + name)
            text = parts[0]
            for part in parts[1:]:
                text += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
            rendered.append(text)
        return rendered

    def relation_images(self) -> list[LaurentPoly]:
        return [fourier(r) for r in self.linear_relations]

    @property
    def realization(self) -> QuotientPresentation:
        if self._realization is None:
            self._realization = laurent_quotient(self.relation_images())
        return self._realization


def qh_presentation(fp: FanPolytope) -> QhPresentation:
    return QhPresentation(fp, build_psi(fp))


def verify_qh_jac_iso(fp: FanPolytope) -> IsoReport:
    """Compare the QH presentation realized through Fourier series with Jac(W)."""
    qh = qh_presentation(fp)
    w = build_superpotential(fp)
    jac = jacobian_ring(w)
    derivatives = w.derivatives()
    images = qh.relation_images()
    checks = []

    mismatched = [j + 1 for j, (image, d) in enumerate(zip(images, derivatives)) if image != d]
    checks.append(CheckResult(
        name="relation_images",
        passed=not mismatched,
        detail="fourier(r_j) = d_j W for every j" if not mismatched else f"fourier(r_j) != d_j W for j in {mismatched}",
        witness={"axes": mismatched} if mismatched else None,
    ))

    outside_qh = [j + 1 for j, d in enumerate(derivatives) if not ideal_membership(d, qh.realization)]
    outside_jac = [j + 1 for j, image in enumerate(images) if not ideal_membership(image, jac.presentation)]
    checks.append(CheckResult(
        name="mutual_membership",
        passed=not outside_qh and not outside_jac,
        detail="relation ideal and Jacobian ideal contain each other's generators",
        witness={"d_j W outside": outside_qh, "fourier(r_j) outside": outside_jac}
        if outside_qh or outside_jac else None,
    ))

    euler = euler_characteristic(fp)
    checks.append(CheckResult(
        name="dimension",
        passed=jac.dimension == euler,
        detail=f"dim Jac(W) = {jac.dimension}, maximal cones = {euler}",
        witness=None if jac.dimension == euler else {"jacobian": jac.dimension, "cones": euler},
    ))

    generator_mismatch = [
        i + 1 for i, (psi, z) in enumerate(zip(qh.psi, jac.generator_images)) if fourier(psi) != z
    ]
    checks.append(CheckResult(
        name="generator_images",
        passed=not generator_mismatch,
        detail="fourier(Psi_i) = Z_i for every facet",
        witness={"facets": generator_mismatch} if generator_mismatch else None,
    ))

    beyond = not is_projective_product(fp)
    if beyond:
        logger.warning(f"{fp.name or 'polytope'} is not a product of projective spaces; checks go beyond the proven cases")
    passed = all(check.passed for check in checks)
    logger.info(f"QH/Jac comparison for {fp.name or 'polytope'}: {'pass' if passed else 'fail'}")

    standard = jac.presentation.standard_basis() if jac.finite else []
    return IsoReport(
        polytope=fp.name,
        passed=passed,
        jacobian_dimension=jac.dimension,
        euler_characteristic=euler,
        beyond_hypothesis=beyond,
        relations=[r.render() for r in jac.presentation.relations()],
        standard_monomials=[m.render() for m in standard],
        checks=checks,
    )


def phi_derivative_identity_check(fp: FanPolytope, a: int, cutoff: int) -> bool:
    """q_a d/dq_a Exp_K(Psi) = Exp_{K-1}(Psi) * (q_a d/dq_a Psi).

    With normalized data q_a d/dq_a Psi is Psi_{n+a}.
    """
    if a < 1 or a > fp.kahler_params:
        raise PreconditionError(f"parameter index {a} outside 1..{fp.kahler_params}")
    if cutoff < 1:
        raise PreconditionError("the identity compares cutoffs K and K - 1, so K must be at least 1")
    psi = total_psi(fp)
    q_a = psi.field.gen(f"q{a}")
    weighted = psi.q_derivative(a).scale(q_a)
    lhs = conv_exp(psi, cutoff).q_derivative(a).scale(q_a)
    rhs = conv_exp(psi, cutoff - 1).convolve(weighted)
    return lhs == rhs
