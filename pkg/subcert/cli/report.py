"""
Reports
Deterministic JSON and rich text renderings of command results.
"""

import json
import math
import os
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np
from rich.console import Console
from rich.table import Table

from subcert import __version__
from subcert.config import settings


def clean(value: Any) -> Any:
    """JSON-safe copy: non-finite floats become null, tuples become lists."""
    if isinstance(value, np.ndarray):
        value = value.tolist()
    elif isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, dict):
        return {str(k): clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [clean(v) for v in value]
    if isinstance(value, bool) or value is None or isinstance(value, (str, int)):
        return value
    if isinstance(value, complex):
        return {"re": clean(value.real), "im": clean(value.imag)}
    try:
        number = float(value)
    except (TypeError, ValueError):
        return str(value)
    return number if math.isfinite(number) else None


@dataclass
class Report:
    """One command's result with the context needed to reproduce it."""

    command: str
    arguments: Dict[str, Any]
    payload: Dict[str, Any]
    seed: Optional[int] = None
    exit_code: int = 0
    timings: Optional[Dict[str, float]] = None
    version: str = __version__
    schema_version: int = settings.REPORT_SCHEMA_VERSION

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "schema_version": self.schema_version,
            "tool": settings.TOOL_NAME,
            "version": self.version,
            "command": self.command,
            "arguments": self.arguments,
            "seed": self.seed,
            "exit_code": self.exit_code,
            "result": self.payload,
        }
        if self.timings is not None:
            data["timings"] = self.timings
        return clean(data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def _flatten(data: Any, prefix: str = "", out: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    out = {} if out is None else out
    if isinstance(data, dict):
        for key in sorted(data):
            _flatten(data[key], f"{prefix}.{key}" if prefix else str(key), out)
    elif isinstance(data, list) and data and all(isinstance(v, dict) for v in data):
        for i, item in enumerate(data):
            _flatten(item, f"{prefix}[{i}]", out)
    else:
        out[prefix] = data
    return out


def _short(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, list):
        inner = ", ".join(_short(v) for v in value[:8])
        return f"[{inner}{', …' if len(value) > 8 else ''}]"
    return str(value)


def render_text(report: Report, console: Console) -> None:
    """Key/value table of the flattened result."""
    data = report.to_dict()
    table = Table(title=f"subcert {report.command}", show_header=True, header_style="bold cyan")
    table.add_column("field", style="dim")
    table.add_column("value")
    for key, value in _flatten(data["result"]).items():
        table.add_row(key, _short(value))
    console.print(table)
    status = "green" if report.exit_code == 0 else "yellow"
    console.print(f"[{status}]exit {report.exit_code}[/{status}]  seed={report.seed}  v{report.version}")


def render(report: Report, fmt: str, console: Console) -> str:
    """Text printed to the console, or JSON returned for writing."""
    if fmt == "json":
        return report.to_json()
    with console.capture() as capture:
        render_text(report, console)
    return capture.get()


def write_output(text: str, path: str) -> None:
    """Write atomically (tmp file then os.replace)."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        f.write(text)
    os.replace(tmp, path)
