"""Deterministic SVG rendering of tilings.

Output is plain SVG 1.1 text: one polygon per tile inside a single
group whose transform maps world coordinates to the canvas (y flipped),
so parsing the polygons back recovers the geometric vertices.  All
floats are printed with 9 significant digits and iteration orders are
fixed, making identical inputs render byte-identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ArgumentError
from .geometry import vertices
from .substitution import Tiling

CANVAS = 1000.0
MARGIN = 20.0

# fixed fills for size classes, cycled past twelve
PALETTE = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#86bcb6", "#d37295",
)


def _fmt(x: float) -> str:
    s = f"{x:.9g}"
    return "0" if s == "-0" else s


def _fill(tile, rank_of, mode: str) -> str:
    if mode == "size":
        rank = rank_of[tile.placement.size_exp]
        return PALETTE[(rank - 1) % len(PALETTE)]
    if mode == "phi":
        hue = tile.placement.phi / (2.0 * math.pi) * 360.0
        # mirrored tiles at lower saturation so both circles stay visible
        sat = 70 if tile.placement.handedness > 0 else 40
        return f"hsl({_fmt(hue)},{sat}%,55%)"
    raise ArgumentError(f"unknown color mode {mode!r}")


@dataclass(frozen=True)
class _Run:
    """A maximal collinear stretch of tile edges on one line."""

    start: tuple[float, float]
    end: tuple[float, float]
    edge_count: int
    parent_count: int


def _tile_edges(t: Tiling):
    """(p, q, tile) for the three sides of every tile."""
    out = []
    for tile in t.tiles:
        sa, ra, ov, _ = vertices(tile)
        out.append((sa, ra, tile))
        out.append((ra, ov, tile))
        out.append((ov, sa, tile))
    return out


def _cluster(values, tol: float):
    """Group sorted (value, payload) items, splitting at gaps > tol."""
    groups = []
    cur = []
    prev = None
    for val, payload in values:
        if prev is not None and val - prev > tol:
            groups.append(cur)
            cur = []
        cur.append((val, payload))
        prev = val
    if cur:
        groups.append(cur)
    return groups


def fault_runs(t: Tiling) -> list[_Run]:
    """Maximal straight lines made of >= 2 distinct collinear edges from
    non-sibling tiles.

    Edges are grouped by their supporting line (direction mod pi, signed
    offset), merged along the line, and a merged run qualifies only if it
    contains at least two non-coincident edges owned by tiles with
    different parents.  Shared edges between two cousins collapse to one
    distinct segment and drop out; fault lines survive.
    """
    if not t.tiles:
        return []
    scale = t.shape.c * max(t.shape.scale(i, j) for i, j in
                            {tile.placement.size_exp for tile in t.tiles})
    tol = 1e-7 * scale
    lines: dict = {}
    entries = []
    for p, q, tile in _tile_edges(t):
        dx, dy = q[0] - p[0], q[1] - p[1]
        ang = math.atan2(dy, dx) % math.pi
        if ang > math.pi - 1e-12:
            ang = 0.0
        ux, uy = math.cos(ang), math.sin(ang)
        off = p[0] * (-uy) + p[1] * ux  # signed distance of the line
        entries.append((ang, off, p, q, (ux, uy), tile))
    entries.sort(key=lambda e: (e[0], e[1]))
    runs: list[_Run] = []
    for ang_group in _cluster([(e[0], e) for e in entries], 1e-9):
        offs = sorted(((e[1], e) for _, e in ang_group), key=lambda x: x[0])
        for line_group in _cluster(offs, tol):
            segs = []
            for _, (ang, off, p, q, (ux, uy), tile) in line_group:
                t0 = p[0] * ux + p[1] * uy
                t1 = q[0] * ux + q[1] * uy
                if t0 > t1:
                    t0, t1 = t1, t0
                segs.append((t0, t1, tile))
            segs.sort(key=lambda s: (s[0], s[1]))
            # merge touching segments into maximal stretches
            cur = None
            bucket: list = []
            merged = []
            for t0, t1, tile in segs:
                if cur is None or t0 > cur[1] + tol:
                    if cur is not None:
                        merged.append((cur, bucket))
                    cur = [t0, t1]
                    bucket = [(t0, t1, tile)]
                else:
                    cur[1] = max(cur[1], t1)
                    bucket.append((t0, t1, tile))
            if cur is not None:
                merged.append((cur, bucket))
            ux_uy = line_group[0][1][4]
            off = line_group[0][1][1]
            nx, ny = -ux_uy[1], ux_uy[0]
            for (lo, hi), bucket in merged:
                distinct = {(round(t0 / tol), round(t1 / tol))
                            for t0, t1, _ in bucket}
                parents = {tile.parent for _, _, tile in bucket}
                if len(distinct) >= 2 and len(parents) >= 2:
                    start = (nx * off + ux_uy[0] * lo, ny * off + ux_uy[1] * lo)
                    end = (nx * off + ux_uy[0] * hi, ny * off + ux_uy[1] * hi)
                    runs.append(_Run(start=start, end=end,
                                     edge_count=len(distinct),
                                     parent_count=len(parents)))
    return runs


def render_svg(t: Tiling, color: str = "size", faults: bool = False) -> str:
    """Render a tiling to SVG text (deterministic byte-for-byte)."""
    if color not in ("size", "phi"):
        raise ArgumentError(f"unknown color mode {color!r}")
    parts = []
    if not t.tiles:
        parts.append('<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
                     f'width="{_fmt(CANVAS)}" height="{_fmt(CANVAS)}"/>')
        return "\n".join(parts) + "\n"
    pts = [pt for tile in t.tiles for pt in vertices(tile)[:3]]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    span = max(x1 - x0, y1 - y0) or 1.0
    s = (CANVAS - 2 * MARGIN) / span
    tx = MARGIN - x0 * s
    ty = MARGIN + y1 * s  # y axis flips: top of the canvas is max world y
    width = (x1 - x0) * s + 2 * MARGIN
    height = (y1 - y0) * s + 2 * MARGIN
    rank_of = t.class_rank()
    smallest = t.shape.c * min(t.shape.scale(i, j) for i, j in rank_of)
    stroke = 0.04 * smallest
    parts.append('<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
                 f'width="{_fmt(width)}" height="{_fmt(height)}" '
                 f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">')
    parts.append(f'<g transform="translate({_fmt(tx)},{_fmt(ty)}) '
                 f'scale({_fmt(s)},{_fmt(-s)})">')
    for tile in t.tiles:
        sa, ra, ov, _ = vertices(tile)
        path = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in (sa, ra, ov))
        parts.append(f'<polygon points="{path}" fill="{_fill(tile, rank_of, color)}" '
                     f'stroke="#222222" stroke-width="{_fmt(stroke)}"/>')
    if faults:
        parts.append('<g stroke="#d62728" fill="none" '
                     f'stroke-width="{_fmt(3.0 * stroke)}">')
        for run in fault_runs(t):
            parts.append(f'<line x1="{_fmt(run.start[0])}" y1="{_fmt(run.start[1])}" '
                         f'x2="{_fmt(run.end[0])}" y2="{_fmt(run.end[1])}"/>')
        parts.append('</g>')
    parts.append('</g>')
    parts.append('</svg>')
    return "\n".join(parts) + "\n"
