from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator
from fractions import Fraction
from typing import Any, Literal, Optional


def _to_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("booleans are not rational numbers")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise ValueError(f"cannot read {value!r} as a rational number")


# ============= Polytope Models =============

class Facet(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True, arbitrary_types_allowed=True)

    normal: tuple[int, ...]
    q_exponent: tuple[int, ...] = ()
    support: Optional[Fraction] = Field(
        default=None,
        alias="lambda",
        description="Numeric support lambda_i of the inequality <x, v_i> >= lambda_i"
    )

    @field_validator("support", mode="before")
    @classmethod
    def _parse_support(cls, value: Any) -> Optional[Fraction]:
        return None if value is None else _to_fraction(value)

    @field_serializer("support")
    def _dump_support(self, value: Optional[Fraction]) -> Optional[str]:
        return None if value is None else str(value)


class FanPolytope(BaseModel):
    """Facet normals, Kahler exponents and maximal cones of a smooth toric Fano manifold.

    Cone entries are 1-based facet indices, as in the polytope JSON format.
    """
    model_config = ConfigDict(frozen=True)

    dim: int = Field(..., ge=1)
    kahler_params: int = Field(..., ge=0)
    facets: tuple[Facet, ...]
    maximal_cones: tuple[tuple[int, ...], ...]
    name: Optional[str] = None

    @model_validator(mode="after")
    def _check_structure(self) -> "FanPolytope":
        d = len(self.facets)
        if d != self.dim + self.kahler_params:
            raise ValueError(
                f"expected dim + kahler_params = {self.dim + self.kahler_params} facets, got {d}"
            )
        for i, facet in enumerate(self.facets, 1):
            if len(facet.normal) != self.dim:
                raise ValueError(f"facet {i}: normal has length {len(facet.normal)}, dim is {self.dim}")
            if len(facet.q_exponent) != self.kahler_params:
                raise ValueError(
                    f"facet {i}: q_exponent has length {len(facet.q_exponent)}, "
                    f"kahler_params is {self.kahler_params}"
                )
        for cone in self.maximal_cones:
            if len(cone) != self.dim:
                raise ValueError(f"cone {list(cone)} does not have {self.dim} rays")
            if len(set(cone)) != len(cone):
                raise ValueError(f"cone {list(cone)} repeats a ray")
            if any(i < 1 or i > d for i in cone):
                raise ValueError(f"cone {list(cone)} refers to a facet outside 1..{d}")
        return self

    @property
    def num_facets(self) -> int:
        return len(self.facets)

    @property
    def normals(self) -> list[tuple[int, ...]]:
        return [facet.normal for facet in self.facets]

    @property
    def has_supports(self) -> bool:
        return all(facet.support is not None for facet in self.facets)

    def cone_normals(self, cone: tuple[int, ...]) -> list[tuple[int, ...]]:
        return [self.facets[i - 1].normal for i in cone]

    def to_json_dict(self) -> dict[str, Any]:
        data = self.model_dump(mode="json", by_alias=True, exclude_none=True)
        for facet in data["facets"]:
            if facet.get("lambda") is None:
                facet.pop("lambda", None)
        return data


class MomentPoint(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    coordinates: tuple[Fraction, ...]

    @field_validator("coordinates", mode="before")
    @classmethod
    def _parse_coordinates(cls, value: Any) -> tuple[Fraction, ...]:
        return tuple(_to_fraction(v) for v in value)


# ============= Brane Models =============

class ABranePoint(BaseModel):
    """A torus fiber L_x with a flat U(1) connection of holonomy angles y."""
    model_config = ConfigDict(frozen=True)

    x: tuple[float, ...]
    y: tuple[float, ...]

    @model_validator(mode="after")
    def _check_lengths(self) -> "ABranePoint":
        if len(self.x) != len(self.y):
            raise ValueError(f"x has length {len(self.x)}, y has length {len(self.y)}")
        return self


class BBranePoint(BaseModel):
    """A skyscraper sheaf at z in the complex torus."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    z: tuple[complex, ...]

    @field_validator("z", mode="before")
    @classmethod
    def _parse_z(cls, value: Any) -> tuple[complex, ...]:
        return tuple(complex(v) for v in value)


# ============= Report Models =============

class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""
    witness: Optional[dict[str, Any]] = None


class ValidationReport(BaseModel):
    polytope: Optional[str] = None
    passed: bool
    checks: list[CheckResult]
    warnings: list[str] = []


class IsoReport(BaseModel):
    polytope: Optional[str] = None
    passed: bool
    jacobian_dimension: Optional[int] = None
    euler_characteristic: int
    beyond_hypothesis: bool = Field(
        default=False,
        description="True when the manifold is not a product of projective spaces"
    )
    relations: list[str] = []
    standard_monomials: list[str] = []
    checks: list[CheckResult]


class StratumCheck(BaseModel):
    direction: Literal["forward", "inverse"]
    degree: tuple[int, ...]
    passed: bool
    expected: str
    actual: str


class SyzReport(BaseModel):
    polytope: Optional[str] = None
    cutoff: int
    passed: bool
    superpotential_identity: bool
    semiflat_identity: bool
    strata_checked: int
    failing_strata: list[StratumCheck] = []


class SemiflatReport(BaseModel):
    dims: list[int]
    passed: bool
    checks: list[CheckResult]


class CriticalPoint(BaseModel):
    coordinates: list[tuple[float, float]]
    residual: float


class CriticalPointsReport(BaseModel):
    polytope: Optional[str] = None
    q: dict[str, float]
    jacobian_dimension: Optional[int] = None
    count: int
    points: list[CriticalPoint]
    warnings: list[str] = []


class BranePointReport(BaseModel):
    coordinates: list[tuple[float, float]]
    residual: float
    nontrivial: bool
    endomorphism_dim: int
    koszul_cohomology: list[int]
    clifford_form: list[list[tuple[float, float]]]
    clifford_determinant: tuple[float, float]


class BraneReport(BaseModel):
    polytope: Optional[str] = None
    q: dict[str, float]
    points: list[BranePointReport]
    warnings: list[str] = []


# ============= Command Models =============

CommandName = Literal[
    "validate", "mirror", "jacobian", "qh", "verify-iso",
    "syz-check", "semiflat-check", "critical", "clifford",
]


class CommandRequest(BaseModel):
    command: CommandName
    preset: Optional[str] = None
    file: Optional[str] = None
    cutoff: int = Field(default=4, ge=0)
    q: dict[str, str] = {}
    tol: float = Field(default=1e-10, gt=0)
    output_format: Literal["json", "text"] = "text"
    out: Optional[str] = None

    @model_validator(mode="after")
    def _one_source(self) -> "CommandRequest":
        if (self.preset is None) == (self.file is None):
            raise ValueError("exactly one of --preset and --file is required")
        return self


class Report(BaseModel):
    command: str
    status: Literal["ok", "fail", "warn"]
    payload: dict[str, Any]
