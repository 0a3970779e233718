"""JSON file formats for clouds, isometry descriptions and reports."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from .isometry import IsometryDesc
from .report import jsonable
from .sets import Cloud
from .spaces import Space, make_space


class InputError(ValueError):
    """Malformed or inconsistent input file."""


class SpaceModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["euclidean", "hyperbolic", "lp"]
    dim: int
    p: Optional[float] = None


class CloudModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    space: SpaceModel
    resolution: float
    points: list[list[float]]

    @field_validator("points")
    @classmethod
    def _nonempty(cls, v):
        if not v:
            raise ValueError("a cloud needs at least one point")
        return v


class IsometryModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["euclidean_rigid", "lorentz", "lp_symmetry"]
    matrix: list[list[float]]
    translation: Optional[list[float]] = None


def _describe(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(x) for x in err["loc"]) or "<root>"
        parts.append(f"field '{loc}': {err['msg']}")
    return "; ".join(parts)


def _load_json(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")


def parse_cloud(text: str, source: str = "<cloud>", space: Space | None = None) -> Cloud:
    """Parse the cloud format; ``space`` overrides the file's space block."""
    try:
        model = CloudModel.model_validate(_load_json(text, source))
    except ValidationError as exc:
        raise InputError(f"{source}: {_describe(exc)}") from None
    try:
        if space is None:
            space = make_space(model.space.kind, model.space.dim, model.space.p)
        return Cloud(space, model.points, model.resolution)
    except ValueError as exc:
        raise InputError(f"{source}: {exc}") from None


def parse_isometry(text: str, source: str = "<isometry>") -> IsometryDesc:
    try:
        model = IsometryModel.model_validate(_load_json(text, source))
    except ValidationError as exc:
        raise InputError(f"{source}: {_describe(exc)}") from None
    try:
        return IsometryDesc(model.kind, model.matrix, model.translation)
    except ValueError as exc:
        raise InputError(f"{source}: {exc}") from None


def read_cloud(path, space: Space | None = None) -> Cloud:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    return parse_cloud(text, str(path), space)


def read_isometry(path) -> IsometryDesc:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    return parse_isometry(text, str(path))


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2) + "\n"


def write_cloud(path, cloud: Cloud):
    Path(path).write_text(dumps(cloud.to_dict()))
