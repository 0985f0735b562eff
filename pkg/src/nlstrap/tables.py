"""Deterministic CSV helpers shared by the sweep and verify outputs."""

from __future__ import annotations

import io


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def render_csv(header: list[str], rows: list[list]) -> str:
    out = io.StringIO()
    out.write(",".join(header) + "\r\n")
    for row in rows:
        out.write(",".join(fmt(x) for x in row) + "\r\n")
    return out.getvalue()
