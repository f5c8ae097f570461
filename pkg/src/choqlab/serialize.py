"""Deterministic file formats for profiles, traces, and reports.

Every float is written with 17 significant digits, which round-trips IEEE
doubles exactly, so identical runs produce byte-identical files.  The JSON
emitter is local because json.dumps formats floats through repr and offers
no hook to pin the format; everything else about the output is plain JSON
with two-space indentation and the key order the caller constructed.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import IO, Union

import numpy as np

from .operators import (
    ExpDecay,
    RadialGrid,
    RadialProfile,
    TailModel,
    ZeroTail,
    ZERO_TAIL,
)

__all__ = [
    "format_float",
    "dumps_canonical",
    "write_json",
    "tail_to_dict",
    "tail_from_dict",
    "profile_csv_lines",
    "sidecar_dict",
    "write_profile",
    "read_profile",
]


def format_float(x: float) -> str:
    """17-significant-digit decimal form of a finite double."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    return format(x, ".17g")


def _emit(obj, lines: list, indent: str, level: int) -> None:
    pad = indent * (level + 1)
    if isinstance(obj, dict):
        if not obj:
            lines.append("{}")
            return
        lines.append("{\n")
        for i, (key, val) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise TypeError(f"JSON keys must be strings, got {key!r}")
            lines.append(pad + json.dumps(key) + ": ")
            _emit(val, lines, indent, level + 1)
            lines.append(",\n" if i + 1 < len(obj) else "\n")
        lines.append(indent * level + "}")
    elif isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            lines.append("[]")
            return
        lines.append("[\n")
        for i, val in enumerate(obj):
            lines.append(pad)
            _emit(val, lines, indent, level + 1)
            lines.append(",\n" if i + 1 < len(obj) else "\n")
        lines.append(indent * level + "]")
    elif isinstance(obj, str):
        lines.append(json.dumps(obj))
    elif isinstance(obj, bool) or obj is None:
        lines.append("true" if obj is True else "false" if obj is False
                     else "null")
    elif isinstance(obj, (int, np.integer)):
        lines.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        lines.append(format_float(obj))
    elif isinstance(obj, Fraction):
        lines.append(json.dumps(str(obj)))
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} value {obj!r}")


def dumps_canonical(obj) -> str:
    """JSON text with pinned float formatting; trailing newline included."""
    lines: list = []
    _emit(obj, lines, "  ", 0)
    return "".join(lines) + "\n"


def write_json(path: str, obj) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(dumps_canonical(obj))


# ---------------------------------------------------------------------------
# profiles: CSV values plus a JSON sidecar for the annotations


def tail_to_dict(tail: TailModel) -> dict:
    if isinstance(tail, ZeroTail):
        return {"kind": "zero"}
    return {"kind": "exp", "rate": tail.rate, "power": tail.power}


def tail_from_dict(data: dict) -> TailModel:
    kind = data.get("kind")
    if kind == "zero":
        return ZERO_TAIL
    if kind == "exp":
        return ExpDecay(rate=float(data["rate"]), power=float(data["power"]))
    raise ValueError(f"unknown tail model kind {kind!r}")


def profile_csv_lines(profile: RadialProfile) -> list:
    lines = ["r,value\n"]
    for r, v in zip(profile.grid.nodes, profile.values):
        lines.append(f"{format_float(r)},{format_float(v)}\n")
    return lines


def sidecar_dict(profile: RadialProfile) -> dict:
    return {
        "origin_exponent": float(profile.origin_exponent),
        "tail_model": tail_to_dict(profile.tail),
    }


def _sidecar_path(csv_path: str) -> str:
    return csv_path + ".meta.json"


def write_profile(csv_path: str, profile: RadialProfile) -> str:
    """Write values CSV plus `<csv_path>.meta.json`; returns the sidecar path."""
    with open(csv_path, "w", newline="\n") as fh:
        fh.writelines(profile_csv_lines(profile))
    sidecar = _sidecar_path(csv_path)
    write_json(sidecar, sidecar_dict(profile))
    return sidecar


def read_profile(csv_path: str) -> RadialProfile:
    """Rebuild a profile from CSV + sidecar written by write_profile."""
    with open(csv_path, "r", newline="") as fh:
        header = fh.readline().strip()
        if header != "r,value":
            raise ValueError(f"expected header 'r,value', got {header!r}")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    nodes = np.array([float(r) for r, _ in rows])
    values = np.array([float(v) for _, v in rows])
    decades = math.log10(nodes[-1] / nodes[0])
    ppd = max(1, round((nodes.size - 1) / decades))
    grid = RadialGrid(nodes, ppd)
    with open(_sidecar_path(csv_path)) as fh:
        meta = json.load(fh)
    return RadialProfile(grid, values,
                         origin_exponent=float(meta["origin_exponent"]),
                         tail=tail_from_dict(meta["tail_model"]))
