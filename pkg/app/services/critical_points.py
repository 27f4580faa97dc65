from itertools import product
from typing import Any, Mapping, Optional
from loguru import logger
import numpy as np

from app.config import get_settings
from app.core.laurent import NumericLaurent
from app.errors import DomainError
from app.services.mirror import Superpotential, jacobian_ring, numeric_q


def _on_torus(t: np.ndarray) -> Optional[np.ndarray]:
    z = np.exp(t)
    return None if np.any(z == 0) else z


class CriticalPointSolver:
    """Multistart Newton iteration on the log-derivative system d_j W = 0."""

    def __init__(self):
        self.settings = get_settings()
        self.warnings: list[str] = []

    def seeds(self, w: Superpotential, q: Mapping[str, Any], count: int) -> list[np.ndarray]:
        """Tensor grid of scaled roots of unity r * exp(2 pi i k / count)."""
        moduli = [abs(complex(q[name])) ** (1.0 / w.nvars) for name in w.field.names[: w.field.kahler_count]]
        radius = float(np.exp(np.mean(np.log(moduli)))) if moduli else 1.0
        roots = radius * np.exp(2j * np.pi * np.arange(count) / count)
        return [np.array(point) for point in product(roots, repeat=w.nvars)]

    def newton(self, numeric: NumericLaurent, start: np.ndarray) -> Optional[np.ndarray]:
        """Newton in t = log z; returns z, or None when the iteration breaks down or wanders off."""
        t = np.log(start)
        step = np.full(len(t), np.inf)
        for _ in range(self.settings.newton_max_iterations):
            z = np.exp(t)
            try:
                step = np.linalg.solve(numeric.log_hessian(z), numeric.log_gradient(z))
            except (np.linalg.LinAlgError, DomainError):
                # Singular Hessian, or z left the torus through underflow
                return None
            t = t - step
            if not np.all(np.isfinite(t)):
                return None
            if np.max(np.abs(step)) < self.settings.newton_step_tolerance:
                return _on_torus(t)
        # Stalled at rounding level rather than diverging
        if np.max(np.abs(step)) < np.sqrt(self.settings.newton_step_tolerance):
            return _on_torus(t)
        return None

    def _deduplicate(self, points: list[np.ndarray]) -> list[np.ndarray]:
        radius = self.settings.dedup_radius
        # Sort before merging so the kept representative does not depend on seed order
        points = sorted(points, key=lambda z: tuple(np.round(np.concatenate([z.real, z.imag]), 8)))
        unique: list[np.ndarray] = []
        for z in points:
            if all(np.linalg.norm(z - u) > radius * max(1.0, np.linalg.norm(u)) for u in unique):
                unique.append(z)
        return unique

    def solve(
        self,
        w: Superpotential,
        q: Mapping[str, Any] | None = None,
        tol: Optional[float] = None,
        expected: Optional[int] = None,
    ) -> list[np.ndarray]:
        """
        Find the critical points of W at numeric q
        Returns: deduplicated points with residual max_j |d_j W(z)| <= tol
        """
        self.warnings = []
        tol = tol if tol is not None else self.settings.residual_tolerance
        values = numeric_q(w.field, q)
        numeric = w.poly.numeric(values)

        if expected is None:
            expected = jacobian_ring(w).dimension
        count = (expected or 0) + 2
        starts = self.seeds(w, values, count)
        logger.info(f"Running Newton from {len(starts)} starts")

        converged = []
        for start in starts:
            z = self.newton(numeric, start)
            if z is None:
                continue
            if np.max(np.abs(numeric.log_gradient(z))) <= tol:
                converged.append(z)

        points = self._deduplicate(converged)
        logger.info(f"{len(converged)} starts converged to {len(points)} distinct critical points")

        if not points:
            self.warnings.append("no Newton start converged to a critical point")
        elif expected is not None and len(points) != expected:
            self.warnings.append(
                f"found {len(points)} critical points, Jacobian ring has dimension {expected}"
            )
        for warning in self.warnings:
            logger.warning(warning)
        return points

    def residual(self, w: Superpotential, z: np.ndarray, q: Mapping[str, Any] | None = None) -> float:
        return float(np.max(np.abs(w.poly.numeric(numeric_q(w.field, q)).log_gradient(z))))


def critical_points(
    w: Superpotential,
    q: Mapping[str, Any] | None = None,
    tol: Optional[float] = None,
) -> list[np.ndarray]:
    return CriticalPointSolver().solve(w, q, tol)
