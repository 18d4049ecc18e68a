"""Check reports: named residuals with tolerances, serialized deterministically."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

from kreinlab import __version__


@dataclass
class Check:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)


@dataclass
class CheckReport:
    command: str
    parameters: dict[str, Any] = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    classification: Optional[str] = None
    eigenvalues: Optional[list[complex]] = None
    notes: list[str] = field(default_factory=list)
    tool_version: str = __version__
    extra: dict[str, Any] = field(default_factory=dict)  # additive fields, e.g. sweep rows

    def add(self, name: str, residual: float, tolerance: float) -> Check:
        if any(c.name == name for c in self.checks):
            raise ValueError(f"duplicate check name {name!r}")
        check = Check(name, float(residual), float(tolerance))
        self.checks.append(check)
        return check

    def extend(self, other: "CheckReport") -> None:
        for c in other.checks:
            self.add(c.name, c.residual, c.tolerance)
        self.notes.extend(other.notes)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(c.name == name for c in self.checks)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "tool_version": self.tool_version,
            "command": self.command,
            "parameters": dict(self.parameters),
            "checks": [
                {"name": c.name, "residual": c.residual, "tolerance": c.tolerance, "pass": c.passed}
                for c in self.checks
            ],
            "notes": list(self.notes),
        }
        if self.classification is not None:
            out["classification"] = self.classification
        if self.eigenvalues is not None:
            out["eigenvalues"] = [{"re": complex(z).real, "im": complex(z).imag} for z in self.eigenvalues]
        for k, v in self.extra.items():
            out.setdefault(k, v)
        return out

    def to_json(self) -> str:
        return dumps(self.to_dict())


def format_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return "%.17g" % (x + 0.0)


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON text with sorted keys and every float written as ``%.17g``.

    The standard encoder prints the shortest round-trip repr, which is not
    a fixed format, hence this small writer.
    """
    import json

    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(obj[k], indent, _level + 1)}" for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return dumps(obj.item(), indent, _level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")
