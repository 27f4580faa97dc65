import pytest

from app.config import get_settings
from app.core.lattice import normalize_basis
from app.core.scalars import kahler_field
from app.models import FanPolytope
from app.services.mirror import build_superpotential
from app.services.polytope_loader import PRESETS, PolytopeLoader


@pytest.fixture(autouse=True)
def _fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture(scope="session")
def loader():
    return PolytopeLoader()


@pytest.fixture(scope="session")
def presets(loader):
    return {name: normalize_basis(loader.load_preset(name)) for name in PRESETS}


@pytest.fixture
def cp1(presets):
    return presets["CP1"]


@pytest.fixture
def cp2(presets):
    return presets["CP2"]


@pytest.fixture
def cp1xcp1(presets):
    return presets["CP1xCP1"]


@pytest.fixture
def field1():
    return kahler_field(1)


@pytest.fixture
def w_cp2(cp2):
    return build_superpotential(cp2)


def polytope(dim, kahler_params, facets, cones, name=None):
    """Build a FanPolytope from (normal, q_exponent) pairs."""
    return FanPolytope.model_validate({
        "name": name,
        "dim": dim,
        "kahler_params": kahler_params,
        "facets": [{"normal": list(n), "q_exponent": list(m)} for n, m in facets],
        "maximal_cones": [list(c) for c in cones],
    })
