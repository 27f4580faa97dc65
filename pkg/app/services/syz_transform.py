"""
Exact checks of the semi-flat and toric SYZ transformations.
"""

import random
from math import factorial
from typing import Iterable, Optional

from loguru import logger

from app.core.forms import (
    Block,
    DifferentialForm,
    GradedForm,
    LaurentForm,
    SymmetricMatrix,
    action_volume_y,
    dlog_volume_form,
    exterior_basis,
    form_exp,
    holomorphic_volume_x,
    holomorphic_volume_y,
    kahler_form_y,
    omega_x,
    semiflat_fwd,
    semiflat_inv,
    toric_syz_fwd,
    toric_syz_inv,
)
from app.core.laurent import LaurentPoly
from app.core.loops import conv_exp
from app.core.scalars import GaussScalar, kahler_field
from app.models import CheckResult, FanPolytope, SemiflatReport, StratumCheck, SyzReport
from app.services.mirror import build_superpotential
from app.services.quantum import total_psi

RANDOM_SEED = 20240601


def i_times(form: DifferentialForm) -> DifferentialForm:
    return form.scale(GaussScalar.i(form.field))


def exp_i_omega_x(n: int) -> DifferentialForm:
    return form_exp(i_times(omega_x(n)))


def exp_i_omega_y(phi: SymmetricMatrix) -> DifferentialForm:
    return form_exp(i_times(kahler_form_y(phi)))


def default_matrices(n: int, count: int = 5, seed: int = RANDOM_SEED) -> list[SymmetricMatrix]:
    rng = random.Random(seed + n)
    return [SymmetricMatrix.identity(n)] + [SymmetricMatrix.random(n, rng) for _ in range(count)]


def basis_round_trip(n: int) -> list[str]:
    """Basis elements on which inv(fwd) or fwd(inv) is not the identity."""
    failures = []
    for alpha in exterior_basis(n, (Block.DX, Block.DU)):
        if semiflat_inv(semiflat_fwd(alpha)) != alpha:
            failures.append(alpha.render())
    for beta in exterior_basis(n, (Block.DX, Block.DY)):
        if semiflat_fwd(semiflat_inv(beta)) != beta:
            failures.append(beta.render())
    return failures


def _check(name: str, passed: bool, detail: str) -> CheckResult:
    return CheckResult(name=name, passed=passed, detail=detail)


def semiflat_checks(n: int, matrices: Iterable[SymmetricMatrix] = (), round_trip: bool = True) -> list[CheckResult]:
    checks = []
    e_omega_x = exp_i_omega_x(n)
    omega_y = holomorphic_volume_y(n)
    checks.append(_check(f"n={n} fwd(exp(i omega_X)) = Omega_Y", semiflat_fwd(e_omega_x) == omega_y, omega_y.render()))
    checks.append(_check(f"n={n} inv(Omega_Y) = exp(i omega_X)", semiflat_inv(omega_y) == e_omega_x, e_omega_x.render()))

    for index, phi in enumerate(matrices):
        label = f"n={n} phi#{index}"
        omega_x_phi = holomorphic_volume_x(phi)
        e_omega_y = exp_i_omega_y(phi)
        checks.append(_check(f"{label} fwd(Omega_X) = exp(i omega_Y)", semiflat_fwd(omega_x_phi) == e_omega_y, str(phi.to_json())))
        checks.append(_check(f"{label} inv(exp(i omega_Y)) = Omega_X", semiflat_inv(e_omega_y) == omega_x_phi, str(phi.to_json())))
        checks.append(_check(f"{label} phi^-1 phi dx = dx", action_volume_y(phi) == omega_y, "Omega_Y through the dual coordinates"))

    if round_trip:
        failures = basis_round_trip(n)
        checks.append(_check(
            f"n={n} basis round trip",
            not failures,
            f"{4 ** n} basis elements each way" if not failures else f"fails on {failures[:4]}",
        ))
    return checks


def semiflat_identity_report(
    dims: Iterable[int] = (1, 2, 3, 4),
    matrices: Optional[dict[int, list[SymmetricMatrix]]] = None,
    max_matrix_dim: int = 3,
    max_round_trip_dim: int = 3,
) -> SemiflatReport:
    """The four semi-flat identities and the exhaustive round trip for each n."""
    dims = list(dims)
    checks = []
    for n in dims:
        if matrices is not None and n in matrices:
            phis = matrices[n]
        else:
            phis = default_matrices(n) if n <= max_matrix_dim else []
        checks.extend(semiflat_checks(n, phis, round_trip=n <= max_round_trip_dim))
        logger.info(f"Semi-flat identities checked for n={n}")
    passed = all(check.passed for check in checks)
    return SemiflatReport(dims=dims, passed=passed, checks=checks)


def _e_to_w(w: LaurentPoly, cutoff: int) -> LaurentPoly:
    """sum_{k<=K} W^k / k! by Laurent polynomial powers."""
    total = LaurentPoly(w.field, w.nvars)
    power = LaurentPoly.constant(w.field, w.nvars)
    for k in range(cutoff + 1):
        if k:
            power = power * w
        total = total + power.map_coefficients(lambda c, k=k: c / factorial(k))
    return total


def check_toric_transform(fp: FanPolytope, cutoff: int) -> SyzReport:
    """Transform exp(i omega_X) * Exp_K(Psi) and compare with sum_{k<=K} W^k/k! times the volume form."""
    n = fp.dim
    w = build_superpotential(fp)
    psi = total_psi(fp)

    function_image = toric_syz_fwd(GradedForm.from_loop(psi))
    superpotential_identity = function_image.is_function() and function_image.function() == w.poly

    e_omega_x = exp_i_omega_x(n)
    phi = conv_exp(psi, cutoff)
    source = GradedForm.from_loop(phi, e_omega_x)
    actual = toric_syz_fwd(source)
    expected = LaurentForm.from_product(_e_to_w(w.poly, cutoff), dlog_volume_form(n))

    failing = []
    degrees = sorted(actual.degrees() | expected.degrees())
    for v in degrees:
        have, want = actual.stratum(v), expected.stratum(v)
        if have != want:
            failing.append(StratumCheck(direction="forward", degree=v, passed=False, expected=want.render(), actual=have.render()))

    recovered = toric_syz_inv(expected)
    for v in sorted(set(recovered.entries) | set(source.entries)):
        zero = DifferentialForm(kahler_field(fp.kahler_params), n)
        have = recovered.entries.get(v, zero)
        want = source.entries.get(v, zero)
        if have != want:
            failing.append(StratumCheck(direction="inverse", degree=v, passed=False, expected=want.render(), actual=have.render()))

    semiflat_identity = True
    if cutoff == 0:
        semiflat_identity = semiflat_fwd(e_omega_x) == holomorphic_volume_y(n)

    passed = superpotential_identity and semiflat_identity and not failing
    logger.info(
        f"Transform check for {fp.name or 'polytope'} at K={cutoff}: "
        f"{len(degrees)} strata, {len(failing)} failing"
    )
    return SyzReport(
        polytope=fp.name,
        cutoff=cutoff,
        passed=passed,
        superpotential_identity=superpotential_identity,
        semiflat_identity=semiflat_identity,
        strata_checked=len(degrees),
        failing_strata=failing,
    )
