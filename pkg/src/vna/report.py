"""Rendering of classifications as decorated direct sums or canonical JSON."""

from __future__ import annotations

import os
import unicodedata

from .algmodel import ArakiWoods, Classification, FreeGroupFactor, Param
from .numlat import fmt
from .serialize import classification_to_json, dumps

MACRON = "\u0304"  # combining macron
_CYAN, _YELLOW, _RESET = "\x1b[36m", "\x1b[33m", "\x1b[0m"


def _color_enabled(color):
    if color is None:
        return os.environ.get("VNA_COLOR", "0") == "1"
    return color


def diffuse_text(d) -> str:
    if isinstance(d, ArakiWoods):
        return f"T_{{{d.group}}}[{fmt(d.mass)}]"
    if isinstance(d, FreeGroupFactor):
        if d.param == 1:
            return f"L(ℤ)[{fmt(d.mass)}]"
        t = str(d.param) if isinstance(d.param, Param) else fmt(d.param)
        return f"L(F_{{{t}}})[{fmt(d.mass)}]"
    raise TypeError(f"not a diffuse piece: {d!r}")


def residual_text(r) -> str:
    ws = ",".join(fmt(w) for w in r.weights)
    body = f"ℂ({ws})" if r.size == 1 else f"M{r.size}({ws})"
    p = r.provenance
    if p is None:
        return body
    bar = unicodedata.normalize("NFC", f"{p.block}{MACRON}")
    return f"{body}{{{bar}≤{p.block}∧{p.atom}}}"


def text(c: Classification, color=None) -> str:
    on = _color_enabled(color)
    parts = []
    if c.diffuse is not None:
        s = diffuse_text(c.diffuse)
        parts.append(f"{_CYAN}{s}{_RESET}" if on else s)
    for r in c.residuals:
        s = residual_text(r)
        parts.append(f"{_YELLOW}{s}{_RESET}" if on else s)
    return " ⊕ ".join(parts) if parts else "0"


def emit_report(c: Classification, format: str = "json", color=None) -> str:
    if format == "json":
        return dumps(classification_to_json(c))
    if format == "text":
        return text(c, color) + "\n"
    raise ValueError(f"unknown format {format!r}")
