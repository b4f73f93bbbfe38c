"""Loading categories and modules from JSON files or bundled fixtures."""

from __future__ import annotations

import json
import os
from typing import Dict, Optional

from .cdgcore import CdgCategory, CdgError, category_from_dict, opposite, tensor, with_field
from .cdgmod import Module, module_from_dict
from .exactla import Field

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
ENV = "^env"


class LoadError(CdgError):
    """A file is missing or does not parse."""


def fixture_names():
    return sorted(f[:-5] for f in os.listdir(FIXTURES) if f.endswith(".json"))


def locate(ref: str) -> str:
    """A path, or the name of a bundled fixture."""
    if os.path.exists(ref):
        return ref
    cand = os.path.join(FIXTURES, ref if ref.endswith(".json") else ref + ".json")
    if os.path.exists(cand):
        return cand
    raise LoadError(f"no such file or fixture: {ref}")


def read_json(ref: str) -> dict:
    path = locate(ref)
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise LoadError(f"{path}: not valid JSON ({e})") from None


def is_module_data(data: dict) -> bool:
    return "side" in data


class Workspace:
    """Named categories and modules, all over one field."""

    def __init__(self, field: Optional[str] = None):
        self.field = Field.parse(field) if field else None
        self.categories: Dict[str, CdgCategory] = {}
        self.modules: Dict[str, Module] = {}

    def _convert(self, B: CdgCategory) -> CdgCategory:
        if self.field is None:
            self.field = B.F
            return B
        if B.F != self.field:
            if B.F.char != 0:
                raise LoadError(f"cannot move {B.name} from {B.F.name} to {self.field.name}")
            B = with_field(B, self.field)
        return B

    def category(self, ref: str) -> CdgCategory:
        if ref in self.categories:
            return self.categories[ref]
        if ref.endswith(ENV):
            # enveloping category B (x) B^op, for Hochschild coefficients
            B = self.category(ref[: -len(ENV)])
            self.categories[ref] = tensor(B, opposite(B))
            return self.categories[ref]
        data = read_json(ref)
        if is_module_data(data):
            raise LoadError(f"{ref} describes a module, not a category")
        try:
            B = self._convert(category_from_dict(data, name=os.path.basename(ref).removesuffix(".json")))
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, CdgError):
                raise
            raise LoadError(f"{ref}: malformed category ({e})") from None
        self.categories[ref] = B
        return B

    def module(self, ref: str) -> Module:
        if ref in self.modules:
            return self.modules[ref]
        data = read_json(ref)
        if not is_module_data(data):
            raise LoadError(f"{ref} describes a category, not a module")
        if "base" not in data:
            raise LoadError(f"{ref}: module file needs a 'base' entry")
        B = self.category(data["base"])
        try:
            M = module_from_dict(data, B, name=data.get("name", ref))
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, CdgError):
                raise
            raise LoadError(f"{ref}: malformed module ({e})") from None
        self.modules[ref] = M
        return M
