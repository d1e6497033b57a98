"""Deterministic SVG rendering of charge-plane pictures.

Fixed canvas, fixed scale, fixed fonts, objects drawn in sorted order and
coordinates formatted to two decimals: identical input gives byte-identical
output on every platform.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .charge import ChargeTriple
from .planar import Vec2, is_zero

SIZE = 420
CENTER = SIZE // 2
SCALE = 90  # pixels per charge unit


def _pt(z: Vec2) -> Tuple[float, float]:
    return (CENTER + float(z[0]) * SCALE, CENTER - float(z[1]) * SCALE)


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def render_charges(triple: ChargeTriple,
                   display_names: Optional[Dict[str, str]] = None,
                   path_samples: Optional[Sequence[Sequence[Vec2]]] = None) -> str:
    """One labeled vector per object charge, an origin pillar, optional path."""
    display_names = display_names or {}
    lines: List[str] = []
    lines.append('<?xml version="1.0" encoding="UTF-8"?>')
    lines.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" '
                 f'height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">')
    lines.append(f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="#ffffff"/>')
    lines.append(f'<line x1="0" y1="{CENTER}" x2="{SIZE}" y2="{CENTER}" '
                 f'stroke="#cccccc" stroke-width="1"/>')
    lines.append(f'<line x1="{CENTER}" y1="0" x2="{CENTER}" y2="{SIZE}" '
                 f'stroke="#cccccc" stroke-width="1"/>')
    # the pillar at the origin
    lines.append(f'<circle cx="{CENTER}" cy="{CENTER}" r="5" fill="#222222"/>')
    for obj in sorted(triple.v):
        z = triple.charge_of(obj)
        if is_zero(z):
            continue
        x, y = _pt(z)
        label = display_names.get(obj, obj)
        lines.append(f'<line x1="{CENTER}" y1="{CENTER}" x2="{_fmt(x)}" '
                     f'y2="{_fmt(y)}" stroke="#1f66a3" stroke-width="2"/>')
        lines.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" fill="#1f66a3"/>')
        dx = 8 if z[0] >= 0 else -8 - 9 * len(label)
        lines.append(f'<text x="{_fmt(x + dx)}" y="{_fmt(y - 6)}" '
                     f'font-family="monospace" font-size="13" '
                     f'fill="#333333">{label}</text>')
    if path_samples:
        moving = _moving_components(path_samples)
        for k in moving:
            pts = " ".join(f"{_fmt(_pt(sample[k])[0])},{_fmt(_pt(sample[k])[1])}"
                           for sample in path_samples)
            lines.append(f'<polyline points="{pts}" fill="none" stroke="#a33a1f" '
                         f'stroke-width="1.5" stroke-dasharray="5,4"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _moving_components(samples: Sequence[Sequence[Vec2]]) -> List[int]:
    if not samples:
        return []
    rank = len(samples[0])
    return [k for k in range(rank)
            if any(sample[k] != samples[0][k] for sample in samples)]
