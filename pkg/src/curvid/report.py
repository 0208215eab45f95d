"""Run configuration and the schema-versioned diagnostics report."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import __version__

SCHEMA = "curvid.report/1"
THREADS_ENV = "CURVID_THREADS"


@dataclass
class RunConfig:
    tolerance: float | None = None
    samples: int = 1
    seed: int = 0
    threads: int | None = None
    output: str | None = None
    format: str = "human"

    def __post_init__(self):
        if self.tolerance is not None and not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.format not in ("human", "structured"):
            raise ValueError("format must be 'human' or 'structured'")

    def resolved_threads(self) -> int:
        if self.threads is not None:
            return max(1, self.threads)
        env = os.environ.get(THREADS_ENV, "").strip()
        if env and env != "auto":
            return max(1, int(env))
        return os.cpu_count() or 1

    def tolerance_or(self, default: float) -> float:
        return default if self.tolerance is None else self.tolerance


@dataclass
class CheckRecord:
    name: str
    value: Any
    tolerance: float | None
    passed: bool
    detail: dict[str, Any] = field(default_factory=dict)


def _plain(value):
    """Turn numpy scalars/arrays and non-finite floats into JSON-stable values."""
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if math.isfinite(v) else repr(v)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


@dataclass
class DiagnosticsReport:
    command: str
    config: dict[str, Any]
    checks: list[CheckRecord] = field(default_factory=list)
    info: dict[str, Any] = field(default_factory=dict)
    wall_time: float = 0.0

    def check(self, name: str, value, tolerance: float | None, passed: bool, **detail) -> CheckRecord:
        rec = CheckRecord(name, value, tolerance, bool(passed), detail)
        self.checks.append(rec)
        return rec

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def body_lines(self) -> list[str]:
        """Every line except the wall-time trailer; identical for identical runs."""
        dump = lambda obj: json.dumps(_plain(obj), sort_keys=True, separators=(",", ":"))
        lines = [dump({"schema": SCHEMA, "version": __version__, "command": self.command, "config": self.config})]
        for key in sorted(self.info):
            lines.append(dump({"info": key, "value": self.info[key]}))
        for c in self.checks:
            rec = {"check": c.name, "value": c.value, "tolerance": c.tolerance, "pass": c.passed}
            if c.detail:
                rec["detail"] = c.detail
            lines.append(dump(rec))
        lines.append(dump({"summary": {"checks": len(self.checks), "failed": sum(not c.passed for c in self.checks), "pass": self.passed}}))
        return lines

    def render_structured(self) -> str:
        trailer = json.dumps({"wall_time": round(self.wall_time, 6)})
        return "\n".join(self.body_lines() + [trailer]) + "\n"

    def render_human(self) -> str:
        out = [f"curvid {__version__}  {self.command}"]
        for key in sorted(self.info):
            out.append(f"  {key:<28} {_format(self.info[key])}")
        if self.checks:
            width = max(len(c.name) for c in self.checks)
            out.append("")
            out.append(f"  {'check':<{width}}  {'value':>24}  {'tolerance':>10}  result")
            for c in self.checks:
                tol = "" if c.tolerance is None else f"{c.tolerance:.1e}"
                out.append(f"  {c.name:<{width}}  {_format(c.value):>24}  {tol:>10}  {'PASS' if c.passed else 'FAIL'}")
        failed = sum(not c.passed for c in self.checks)
        out.append("")
        out.append(f"  {len(self.checks) - failed}/{len(self.checks)} checks passed  ({self.wall_time:.2f} s)")
        return "\n".join(out) + "\n"

    def render(self, fmt: str) -> str:
        return self.render_structured() if fmt == "structured" else self.render_human()


def _format(value) -> str:
    value = _plain(value)
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, list) and value and not isinstance(value[0], list):
        return "[" + ", ".join(_format(v) for v in value) + "]"
    return str(value)
