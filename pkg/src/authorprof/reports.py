"""TSV rendering for reports and predictions.

Reports open with ``# key = value`` lines echoing the resolved run
configuration, followed by a column header and data rows.
"""

from __future__ import annotations

import math
import os
from typing import Any, Iterable, Mapping, Sequence

from .modelfile import write_atomic


def fmt(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "nan" if math.isnan(value) else repr(value)
    return str(value)


def render_tsv(header: Mapping[str, Any], columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    lines = [f"# {k} = {fmt(v)}" for k, v in header.items()]
    lines.append("\t".join(columns))
    for row in rows:
        lines.append("\t".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_report(path: str | os.PathLike, header: Mapping[str, Any], columns: Sequence[str], rows) -> None:
    write_atomic(path, render_tsv(header, columns, rows))


def read_report(path: str | os.PathLike) -> tuple[dict[str, str], list[dict[str, str]]]:
    header: dict[str, str] = {}
    rows = []
    columns = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("# "):
                key, _, value = line[2:].partition(" = ")
                header[key] = value
            elif columns is None:
                columns = line.split("\t")
            elif line:
                rows.append(dict(zip(columns, line.split("\t"))))
    return header, rows


def write_predictions(path: str | os.PathLike, predictions: Mapping[str, str]) -> None:
    write_atomic(path, "".join(f"{i}\t{label}\n" for i, label in predictions.items()))


def read_predictions(path: str | os.PathLike) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected id<TAB>label")
            if parts[0] in out:
                raise ValueError(f"{path}:{lineno}: duplicate id {parts[0]!r}")
            out[parts[0]] = parts[1]
    return out
