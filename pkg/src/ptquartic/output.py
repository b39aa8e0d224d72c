"""Deterministic JSON and CSV output.

Floats are written as the shortest decimal that round-trips, capped at 15
significant digits; complex numbers become {"re": .., "im": ..}.
"""

from __future__ import annotations

import dataclasses
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

SIG_DIGITS = 15


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        return "0"
    s = repr(x)
    mant = s.split("e")[0].replace("-", "").replace(".", "").lstrip("0")
    if len(mant) > SIG_DIGITS:
        s = format(x, f".{SIG_DIGITS}g")
    if s.endswith(".0"):
        s = s[:-2]
    return s


def _round(x: float):
    x = float(x)
    if not math.isfinite(x):
        return fmt_float(x)      # JSON has no inf/nan
    return float(fmt_float(x))


def to_jsonable(obj):
    """Plain JSON types with rounded floats, in a fixed order."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _round(obj.real), "im": _round(obj.imag)}
    if isinstance(obj, Fraction):
        return str(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "to_dict"):
            return to_jsonable(obj.to_dict())
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, ensure_ascii=False) + "\n"


def write_json(obj, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def curve_csv(J, branch_id: str, samples) -> str:
    lines = [f"# J={fmt_float(J)} branch={branch_id}"]
    for b, lam in samples:
        lam = complex(lam)
        lines.append(f"{fmt_float(b)},{fmt_float(lam.real)},{fmt_float(lam.imag)}")
    return "\n".join(lines) + "\n"


def write_curve_csv(curve, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(curve_csv(curve.J, curve.branch_id, curve.samples))
    return path


def read_curve_csv(path: Path) -> tuple[dict, list[tuple[float, complex]]]:
    header, rows = {}, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            for part in line[1:].split():
                k, _, v = part.partition("=")
                header[k] = v
        elif line.strip():
            b, re, im = (float(t) for t in line.split(","))
            rows.append((b, complex(re, im)))
    return header, rows
