from fractions import Fraction
from typing import Callable
from loguru import logger
import numpy as np

from app.config import get_settings
from app.core.lattice import barycenter, guillemin_hessian, normalize_basis, validate_smooth_fano
from app.core.scalars import kahler_field
from app.errors import StructuralError
from app.models import (
    BraneReport,
    CommandRequest,
    CriticalPoint,
    CriticalPointsReport,
    FanPolytope,
    Report,
)
from app.services.branes import brane_report, round_sig, rounded_pair
from app.services.critical_points import CriticalPointSolver
from app.services.mirror import Superpotential, build_superpotential, jacobian_ring, numeric_q
from app.services.polytope_loader import PolytopeLoader
from app.services.quantum import qh_presentation, verify_qh_jac_iso
from app.services.syz_transform import check_toric_transform, default_matrices, semiflat_identity_report

class ValidationFailed(Exception):
    def __init__(self, report: Report):
        super().__init__(report.status)
        self.report = report


def parse_q(request: CommandRequest, fp: FanPolytope) -> dict[str, Fraction]:
    """Numeric Kahler parameters from --q, defaulting to 1."""
    field = kahler_field(fp.kahler_params)
    values = numeric_q(field, None)
    for name, text in request.q.items():
        if name not in values:
            raise StructuralError(f"unknown parameter {name!r}; expected one of {sorted(values)}")
        try:
            value = Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise StructuralError(f"cannot read {name}={text!r} as a number") from e
        if value <= 0:
            raise StructuralError(f"{name} must be positive, got {text}")
        values[name] = value
    return values


def load_polytope(request: CommandRequest) -> FanPolytope:
    loader = PolytopeLoader()
    if request.preset is not None:
        return loader.load_preset(request.preset)
    return loader.load_file(request.file)


def prepare(request: CommandRequest) -> FanPolytope:
    """Load, validate and normalize the requested polytope."""
    fp = load_polytope(request)
    validation = validate_smooth_fano(fp)
    if not validation.passed:
        raise ValidationFailed(Report(
            command=request.command,
            status="fail",
            payload={"validation": validation.model_dump(mode="json")},
        ))
    return normalize_basis(fp)


# ============= Handlers =============

def run_validate(request: CommandRequest) -> Report:
    fp = load_polytope(request)
    report = validate_smooth_fano(fp)
    status = "fail" if not report.passed else ("warn" if report.warnings else "ok")
    return Report(command=request.command, status=status, payload=report.model_dump(mode="json"))


def run_mirror(request: CommandRequest) -> Report:
    fp = prepare(request)
    w = build_superpotential(fp)
    return Report(command=request.command, status="ok", payload={
        "polytope": fp.name,
        "normalized": fp.to_json_dict(),
        "superpotential": w.render(),
        "facet_terms": [term.render() for term in w.facet_terms],
        "log_derivatives": [d.render() for d in w.derivatives()],
    })


def run_jacobian(request: CommandRequest) -> Report:
    fp = prepare(request)
    jac = jacobian_ring(build_superpotential(fp))
    payload = {
        "polytope": fp.name,
        "finite": jac.finite,
        "dimension": jac.dimension,
        "monomial_order": jac.presentation.order,
        "groebner_relations": [r.render() for r in jac.presentation.relations()],
        "standard_monomials": [m.render() for m in jac.presentation.standard_basis()] if jac.finite else [],
        "linear_relations": [r.render() for r in jac.linear_relations()],
        "multiplicative_relations": jac.symbolic_relations(),
    }
    if not jac.finite:
        return Report(command=request.command, status="warn", payload=payload)
    payload["relations_hold"] = jac.check_relations()
    return Report(command=request.command, status="ok" if payload["relations_hold"] else "fail", payload=payload)


def run_qh(request: CommandRequest) -> Report:
    fp = prepare(request)
    qh = qh_presentation(fp)
    realization = qh.realization
    return Report(command=request.command, status="ok", payload={
        "polytope": fp.name,
        "generators": qh.generators,
        "psi": [psi.render() for psi in qh.psi],
        "linear_relations": qh.symbolic_relations(),
        "relation_images": [image.render() for image in qh.relation_images()],
        "dimension": realization.dimension,
        "standard_monomials": [m.render() for m in realization.standard_basis()] if realization.finite else [],
    })


def run_verify_iso(request: CommandRequest) -> Report:
    report = verify_qh_jac_iso(prepare(request))
    return Report(command=request.command, status="ok" if report.passed else "fail", payload=report.model_dump(mode="json"))


def run_syz_check(request: CommandRequest) -> Report:
    report = check_toric_transform(prepare(request), request.cutoff)
    return Report(command=request.command, status="ok" if report.passed else "fail", payload=report.model_dump(mode="json"))


def run_semiflat_check(request: CommandRequest) -> Report:
    fp = prepare(request)
    n = fp.dim
    matrices = default_matrices(n)
    if fp.has_supports:
        matrices.append(guillemin_hessian(fp, barycenter(fp)))
    report = semiflat_identity_report(dims=[n], matrices={n: matrices})
    payload = report.model_dump(mode="json")
    payload["polytope"] = fp.name
    return Report(command=request.command, status="ok" if report.passed else "fail", payload=payload)


def _solve(
    request: CommandRequest, fp: FanPolytope
) -> tuple[Superpotential, dict[str, Fraction], int | None, list[np.ndarray], list[str]]:
    w = build_superpotential(fp)
    q = parse_q(request, fp)
    expected = jacobian_ring(w).dimension
    solver = CriticalPointSolver()
    points = solver.solve(w, q, request.tol, expected)
    return w, q, expected, points, solver.warnings


def run_critical(request: CommandRequest) -> Report:
    fp = prepare(request)
    w, q, expected, points, warnings = _solve(request, fp)
    digits = get_settings().report_digits
    report = CriticalPointsReport(
        polytope=fp.name,
        q={name: float(value) for name, value in q.items()},
        jacobian_dimension=expected,
        count=len(points),
        points=[
            CriticalPoint(
                coordinates=[rounded_pair(c, digits) for c in z],
                residual=round_sig(CriticalPointSolver().residual(w, z, q), digits),
            )
            for z in points
        ],
        warnings=warnings,
    )
    return Report(command=request.command, status="warn" if warnings else "ok", payload=report.model_dump(mode="json"))


def run_clifford(request: CommandRequest) -> Report:
    fp = prepare(request)
    w, q, _, points, warnings = _solve(request, fp)
    report = BraneReport(
        polytope=fp.name,
        q={name: float(value) for name, value in q.items()},
        points=[brane_report(w, z, q, request.tol, get_settings().report_digits) for z in points],
        warnings=warnings,
    )
    return Report(command=request.command, status="warn" if warnings else "ok", payload=report.model_dump(mode="json"))


HANDLERS: dict[str, Callable[[CommandRequest], Report]] = {
    "validate": run_validate,
    "mirror": run_mirror,
    "jacobian": run_jacobian,
    "qh": run_qh,
    "verify-iso": run_verify_iso,
    "syz-check": run_syz_check,
    "semiflat-check": run_semiflat_check,
    "critical": run_critical,
    "clifford": run_clifford,
}


def run(request: CommandRequest) -> Report:
    """Dispatch a request; structural errors propagate to the caller."""
    logger.info(f"Running {request.command} on {request.preset or request.file}")
    try:
        return HANDLERS[request.command](request)
    except ValidationFailed as e:
        logger.warning(f"{request.command}: the polytope failed validation")
        return e.report
