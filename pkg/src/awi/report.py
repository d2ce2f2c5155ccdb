"""Self-describing CSV output.

Every file starts with ``#``-prefixed header lines carrying the resolved
configuration and the derived rates, followed by a plain comma-separated
table.  Numbers are written in scientific notation with 9 significant
digits so identical inputs give byte-identical files.
"""

from __future__ import annotations

import io
import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .rates import RateSet

ABSENT = "nan"


def fmt(x) -> str:
    """Scientific notation with 9 significant digits; ``nan`` for absent values."""
    if x is None:
        return ABSENT
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        return ABSENT if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return f"{x:.8e}"


def header_lines(sections: Mapping[str, Mapping[str, object]]) -> list[str]:
    out = []
    for title, items in sections.items():
        out.append(f"# [{title}]")
        for key, value in items.items():
            text = value if isinstance(value, str) else fmt(value)
            out.append(f"# {key} = {text}")
    return out


def rates_section(rates: RateSet) -> dict[str, float]:
    return {f"{k} (s^-1)": v for k, v in rates.as_dict().items()}


def render_table(columns: Sequence[str], rows: Iterable[Sequence[object]],
                 sections: Mapping[str, Mapping[str, object]] | None = None) -> str:
    buf = io.StringIO()
    for line in header_lines(sections or {}):
        buf.write(line + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row has {len(row)} fields, expected {len(columns)}")
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def write_table(path: str | Path, columns, rows, sections=None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # newline="" keeps "\n" on every platform
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(render_table(columns, rows, sections))
    return path


def read_table(path: str | Path) -> tuple[dict[str, str], list[str], np.ndarray]:
    """Parse a file written by :func:`write_table`: (header, columns, data)."""
    header, columns, data = {}, None, []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                header[key.strip()] = value.strip()
        elif columns is None:
            columns = line.split(",")
        elif line:
            data.append([float(v) for v in line.split(",")])
    return header, columns or [], np.array(data, dtype=float).reshape(len(data), len(columns or []))
