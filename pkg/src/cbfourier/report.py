"""Deterministic JSON run reports."""

from __future__ import annotations

import json
import math
import platform
from dataclasses import asdict, dataclass, field
from importlib import metadata

import numpy as np

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    algebraic_tol: float = 1e-9
    solver_tol: float = 1e-6
    cb_gap_tol: float = 1e-3
    seed: int = 0
    max_group_order: int = 24
    scan_budget: int = 10**6
    sdp_variable_budget: int = 6000
    out: str | None = None

    def __post_init__(self):
        for k in ("algebraic_tol", "solver_tol", "cb_gap_tol"):
            v = getattr(self, k)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{k} must be a positive number, got {v}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.scan_budget <= 0:
            raise ValueError("scan budget must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("out")
        return d


def versions() -> dict:
    from . import __version__

    out = {"python": platform.python_version(), "cbfourier": __version__}
    for pkg in ("numpy", "cvxopt", "matplotlib"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = None
    return out


@dataclass
class Report:
    command: str
    arguments: dict
    config: RunConfig
    assertions: list = field(default_factory=list)
    results: dict = field(default_factory=dict)
    figures: list = field(default_factory=list)

    def check(self, name: str, passed: bool, detail=None) -> bool:
        entry = {"name": name, "passed": bool(passed)}
        if detail is not None:
            entry["detail"] = detail
        self.assertions.append(entry)
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(a["passed"] for a in self.assertions)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "arguments": self.arguments,
            "config": self.config.to_dict(),
            "versions": versions(),
            "passed": self.passed,
            "assertions": self.assertions,
            "results": self.results,
            "figures": self.figures,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(x.real), "im": float(x.imag)}
    return x


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"
