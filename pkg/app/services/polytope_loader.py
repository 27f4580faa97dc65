from pydantic import ValidationError
from pathlib import Path
from typing import Any
from loguru import logger
import json

from app.config import get_settings
from app.errors import StructuralError
from app.models import FanPolytope

PRESETS = ("CP1", "CP2", "CP3", "CP1xCP1", "CP1xCP2", "Bl1CP2")


class PolytopeLoader:
    """Reads polytope JSON documents from presets or files."""

    def __init__(self):
        self.settings = get_settings()
        if self.settings.presets_dir:
            self.presets_dir = Path(self.settings.presets_dir)
        else:
            self.presets_dir = Path(__file__).resolve().parent.parent / "data" / "presets"

    def available_presets(self) -> list[str]:
        return sorted(path.stem for path in self.presets_dir.glob("*.json"))

    def parse(self, data: Any, source: str = "<data>") -> FanPolytope:
        """
        Validate a decoded polytope document
        Raises: StructuralError for malformed input
        """
        if not isinstance(data, dict):
            raise StructuralError(f"{source}: expected a JSON object, got {type(data).__name__}")
        try:
            return FanPolytope.model_validate(data)
        except ValidationError as e:
            raise StructuralError(f"{source}: malformed polytope\n{e}") from e

    def load_file(self, file_path: str | Path) -> FanPolytope:
        path = Path(file_path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except OSError as e:
            raise StructuralError(f"cannot read {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise StructuralError(f"{path} is not valid JSON: {e}") from e

        polytope = self.parse(data, str(path))
        if polytope.name is None:
            polytope = polytope.model_copy(update={"name": path.stem})
        logger.info(f"Loaded polytope {polytope.name} from {path}")
        return polytope

    def load_preset(self, name: str) -> FanPolytope:
        path = self.presets_dir / f"{name}.json"
        if not path.is_file():
            raise StructuralError(
                f"unknown preset {name!r}; available: {', '.join(self.available_presets())}"
            )
        return self.load_file(path)
