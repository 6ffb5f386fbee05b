"""Five-daughter subdivision, largest-first deflation, and supertile growth.

``T_n`` denotes the tiling of the root triangle after ``n`` deflation
steps, where one step subdivides exactly the tiles of (shared) minimal
size parameter and leaves everything else alone.  An exact integer census
of exponent classes evolves alongside (or instead of) the geometric
tilings; the two agree tile-for-tile and the census scales to millions of
tiles at negligible cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ArgumentError, DomainError, InternalError, ResourceError
from .geometry import (
    Placement,
    Similarity,
    Tile,
    TriangleShape,
    compose,
    shape_from_theta,
    tile_area,
    vertices,
    wrap_angle,
)
from fractions import Fraction

DEFAULT_TILE_CAP = 10_000_000

TILING_FORMAT = "tilelab-tiling/1"

# Distinct size keys closer than this are treated as a bookkeeping bug:
# on the lattice of any desk-scale shape genuinely different (i, j)
# classes are separated by far more.
NEAR_TIE = 1e-9


def subdivide(tile: Tile, first_id: int | None = None) -> list[Tile]:
    """The five daughters of ``tile``, ids assigned consecutively."""
    shape = tile.shape
    if first_id is None:
        first_id = tile.id + 1
    parent_sim = tile.similarity()
    hand = tile.placement.handedness
    i, j = tile.placement.size_exp
    out = []
    for offset, frame in enumerate(shape.daughter_frames()):
        child_phi = wrap_angle(tile.placement.phi + hand * frame.phi(shape.theta))
        placement = Placement(
            handedness=hand * frame.handedness,
            phi=child_phi,
            origin=parent_sim.apply(frame.origin),
            size_exp=(i + frame.exp_delta[0], j + frame.exp_delta[1]),
        )
        out.append(Tile(shape=shape, placement=placement,
                        id=first_id + offset, parent=tile.id))
    return out


class Tiling:
    """An ordered collection of tiles covering one root triangle."""

    def __init__(self, shape: TriangleShape, tiles: list[Tile], generation: int,
                 parent_links: dict[int, int] | None = None, next_id: int | None = None):
        self.shape = shape
        self.tiles = tiles
        self.generation = generation
        self.parent_links = parent_links if parent_links is not None else {}
        self._next_id = next_id if next_id is not None else (
            1 + max((t.id for t in tiles), default=-1))

    def __len__(self) -> int:
        return len(self.tiles)

    # -- size classes -----------------------------------------------------

    def size_keys(self) -> list:
        """Distinct size keys present, sorted big-tile-first."""
        seen = {}
        for t in self.tiles:
            i, j = t.placement.size_exp
            seen.setdefault((i, j), 0)
        keys = sorted({self.shape.size_key(i, j) for (i, j) in seen})
        _assert_separated(keys)
        return keys

    def class_rank(self) -> dict[tuple[int, int], int]:
        """Map exponent pair -> 1-based size class (1 = largest present)."""
        pairs = {t.placement.size_exp for t in self.tiles}
        keyed = sorted((self.shape.size_key(i, j), (i, j)) for (i, j) in pairs)
        ranks: dict[tuple[int, int], int] = {}
        rank = 0
        prev_key = None
        for key, pair in keyed:
            if prev_key is None or key != prev_key:
                rank += 1
                prev_key = key
            ranks[pair] = rank
        return ranks

    def exponent_counts(self) -> dict[tuple[int, int], int]:
        counts: dict[tuple[int, int], int] = {}
        for t in self.tiles:
            pair = t.placement.size_exp
            counts[pair] = counts.get(pair, 0) + 1
        return counts

    # -- integrity checks (used by tests, not on every build) -------------

    def validate_cover(self, samples_per_tile: int = 0) -> None:
        root_area = 0.5 * self.shape.a * self.shape.b
        total = sum(tile_area(t) for t in self.tiles)
        if abs(total - root_area) > 1e-10 * root_area:
            raise InternalError(f"areas sum to {total}, root has {root_area}")
        keys = self.size_keys()
        if keys:
            spread = float(keys[-1] - keys[0])
            if self.shape.rationality is not None:
                spread *= self.shape.lattice_unit
            if spread >= self.shape.mu - 1e-12:
                raise InternalError("size spread exceeds the similarity window")
        if samples_per_tile:
            _check_disjoint(self, samples_per_tile)


def _assert_separated(sorted_keys) -> None:
    # Equal keys are fine (one size class reached by several exponent
    # pairs); what must not happen is two classes separated by rounding.
    for prev, cur in zip(sorted_keys, sorted_keys[1:]):
        if cur != prev and float(cur - prev) < NEAR_TIE:
            raise InternalError(
                f"distinct exponent classes nearly tie in size: {prev} vs {cur}")


def _check_disjoint(tiling: Tiling, samples: int) -> None:
    import numpy as np

    polys = []
    for t in tiling.tiles:
        s, c, o, _ = vertices(t)
        polys.append((s, c, o))
    arr = np.asarray(polys)  # (n, 3, 2)
    n = int(round((math.sqrt(8 * samples + 1) - 1) / 2))
    pts = []
    for ii in range(1, n):
        for jj in range(1, n - ii):
            kk = n - ii - jj
            pts.append((ii / n, jj / n, kk / n))
    bary = np.asarray(pts)
    for idx in range(len(polys)):
        tri = arr[idx]
        cloud = bary @ tri  # interior points of tile idx
        others = np.concatenate([arr[:idx], arr[idx + 1:]])
        if len(others) == 0:
            continue
        if _any_point_strictly_inside(cloud, others):
            raise InternalError(f"tile {idx} overlaps a sibling interior")


def _any_point_strictly_inside(points, triangles) -> bool:
    import numpy as np

    p0 = triangles[:, 0][None, :, :]
    e1 = (triangles[:, 1] - triangles[:, 0])[None, :, :]
    e2 = (triangles[:, 2] - triangles[:, 0])[None, :, :]
    d = points[:, None, :] - p0
    den = e1[..., 0] * e2[..., 1] - e1[..., 1] * e2[..., 0]
    u = (d[..., 0] * e2[..., 1] - d[..., 1] * e2[..., 0]) / den
    v = (e1[..., 0] * d[..., 1] - e1[..., 1] * d[..., 0]) / den
    eps = 1e-9
    inside = (u > eps) & (v > eps) & (u + v < 1.0 - eps)
    return bool(inside.any())


def _min_key_pairs(shape: TriangleShape, pairs) -> set[tuple[int, int]]:
    """Exponent pairs sharing the minimal size key among ``pairs``."""
    keyed = [(shape.size_key(i, j), (i, j)) for (i, j) in pairs]
    keyed.sort(key=lambda kv: kv[0])
    _assert_separated([k for k, _ in keyed])
    min_key = keyed[0][0]
    return {pair for key, pair in keyed if key == min_key}


def deflate(tiling: Tiling, cap: int | None = None) -> Tiling:
    """Subdivide every largest tile; all other tiles pass through."""
    if cap is None:
        cap = DEFAULT_TILE_CAP
    pairs = {t.placement.size_exp for t in tiling.tiles}
    winners = _min_key_pairs(tiling.shape, pairs)
    n_min = sum(1 for t in tiling.tiles if t.placement.size_exp in winners)
    predicted = len(tiling.tiles) + 4 * n_min
    if predicted > cap:
        raise ResourceError(
            f"deflation would produce {predicted} tiles, cap is {cap}")
    new_tiles: list[Tile] = []
    links = dict(tiling.parent_links)
    next_id = tiling._next_id
    for t in tiling.tiles:
        if t.placement.size_exp in winners:
            kids = subdivide(t, first_id=next_id)
            next_id += 5
            for k in kids:
                links[k.id] = t.id
            new_tiles.extend(kids)
        else:
            new_tiles.append(t)
    return Tiling(tiling.shape, new_tiles, tiling.generation + 1,
                  parent_links=links, next_id=next_id)


def root_tiling(shape: TriangleShape) -> Tiling:
    root = Tile(shape=shape,
                placement=Placement(1, 0.0, (0.0, 0.0), (0, 0)),
                id=0, parent=None)
    return Tiling(shape, [root], 0, parent_links={}, next_id=1)


def build_Tn(shape: TriangleShape, n: int, cap: int | None = None) -> Tiling:
    if n < 0:
        raise ArgumentError(f"generation must be non-negative, got {n}")
    t = root_tiling(shape)
    for _ in range(n):
        t = deflate(t, cap=cap)
    return t


# -- exact exponent census ---------------------------------------------------


def census_steps(shape: TriangleShape, n: int):
    """Yield ``(generation, counts, min_pair)`` for generations 0..n.

    ``counts`` maps exponent pairs to exact integer tile counts; it is the
    whole-tiling bookkeeping of :func:`deflate` without any geometry.
    ``min_pair`` is an exponent pair attaining the minimal size key (the
    class about to subdivide), usable as the size cut of the generation.
    """
    counts: dict[tuple[int, int], int] = {(0, 0): 1}
    for gen in range(n + 1):
        winners = _min_key_pairs(shape, counts.keys())
        min_pair = min(winners)
        yield gen, dict(counts), min_pair
        if gen == n:
            break
        nxt: dict[tuple[int, int], int] = {}
        for (i, j), cnt in counts.items():
            if (i, j) in winners:
                nxt[(i + 1, j)] = nxt.get((i + 1, j), 0) + cnt
                nxt[(i, j + 1)] = nxt.get((i, j + 1), 0) + 4 * cnt
            else:
                nxt[(i, j)] = nxt.get((i, j), 0) + cnt
        counts = nxt


def census_counts(shape: TriangleShape, n: int):
    """Exponent counts and size cut of ``T_n`` (exact integers)."""
    for gen, counts, min_pair in census_steps(shape, n):
        if gen == n:
            return counts, min_pair
    raise InternalError("census terminated early")


# -- edge tracing -------------------------------------------------------------


@dataclass(frozen=True)
class TraceSegment:
    tile_id: int
    kind: str          # "H" hypotenuse, "L" long leg, "S" short leg
    sign: int          # +1 if the tile's own edge direction follows the trace
    length: float
    size_class: int    # 1 = largest size present in the tiling
    position: float    # arc-length offset of the segment start


def _root_edge(shape: TriangleShape, edge: str):
    # Directions are fixed: hypotenuse runs small-angle -> opposite vertex,
    # long leg small-angle -> right angle, short leg right angle -> opposite.
    b, a = shape.b, shape.a
    pts = {
        "hypotenuse": ((0.0, 0.0), (b, a)),
        "long": ((0.0, 0.0), (b, 0.0)),
        "short": ((b, 0.0), (b, a)),
    }
    if edge not in pts:
        raise ArgumentError(f"edge must be hypotenuse/long/short, got {edge!r}")
    return pts[edge]


def trace_edge(tiling: Tiling, edge: str,
               root_sim: Similarity | None = None) -> list[TraceSegment]:
    """Tile edges lying along one edge of the root triangle, in order.

    The root edge is directed from its designated start vertex (small-angle
    vertex for hypotenuse and long leg, right-angle vertex for the short
    leg); a segment's sign records whether the owning tile's own edge
    direction agrees with that.
    """
    shape = tiling.shape
    p0, p1 = _root_edge(shape, edge)
    if root_sim is not None:
        p0, p1 = root_sim.apply(p0), root_sim.apply(p1)
    ex, ey = p1[0] - p0[0], p1[1] - p0[1]
    total = math.hypot(ex, ey)
    ux, uy = ex / total, ey / total
    tol = 1e-9 * shape.c
    ranks = tiling.class_rank()

    found = []
    for t in tiling.tiles:
        s, c, o, _ = vertices(t)
        for kind, q0, q1 in (("H", s, o), ("L", s, c), ("S", c, o)):
            d0 = (q0[0] - p0[0], q0[1] - p0[1])
            d1 = (q1[0] - p0[0], q1[1] - p0[1])
            if abs(d0[0] * uy - d0[1] * ux) > tol:
                continue
            if abs(d1[0] * uy - d1[1] * ux) > tol:
                continue
            t0 = d0[0] * ux + d0[1] * uy
            t1 = d1[0] * ux + d1[1] * uy
            if min(t0, t1) < -tol or max(t0, t1) > total + tol:
                continue
            sign = 1 if t1 > t0 else -1
            found.append((min(t0, t1), abs(t1 - t0), t.id, kind, sign,
                          ranks[t.placement.size_exp]))
    found.sort()
    # the segments must partition [0, total]
    cursor = 0.0
    out = []
    for start, length, tile_id, kind, sign, rank in found:
        if abs(start - cursor) > 1e-7 * shape.c:
            raise InternalError(f"edge trace has a gap near offset {cursor}")
        out.append(TraceSegment(tile_id=tile_id, kind=kind, sign=sign,
                                length=length, size_class=rank, position=start))
        cursor = start + length
    if abs(cursor - total) > 1e-7 * shape.c:
        raise InternalError("edge trace does not reach the far vertex")
    return out


# -- supertile chains ---------------------------------------------------------


@dataclass
class SupertileChain:
    shape: TriangleShape
    choices: list[tuple[int, int]]
    orders: list[int]
    levels: list[tuple[Tiling, Similarity]]


def _descendant_pattern(tiling: Tiling, ids: set[int], anchor: Tile):
    """Relative (exponents, pose) multiset of ``ids`` seen from ``anchor``."""
    inv = anchor.similarity().inverse()
    ai, aj = anchor.placement.size_exp
    hand = anchor.placement.handedness
    rows = []
    for t in tiling.tiles:
        if t.id not in ids:
            continue
        i, j = t.placement.size_exp
        rel_phi = wrap_angle(hand * (t.placement.phi - anchor.placement.phi))
        ox, oy = inv.apply(t.placement.origin)
        rows.append((i - ai, j - aj, t.placement.handedness * hand,
                     rel_phi, ox, oy))
    rows.sort()
    return rows


def _pattern_of(tiling: Tiling):
    rows = []
    for t in tiling.tiles:
        i, j = t.placement.size_exp
        rows.append((i, j, t.placement.handedness, t.placement.phi,
                     t.placement.origin[0], t.placement.origin[1]))
    rows.sort()
    return rows


def _patterns_match(rows_a, rows_b, tol: float) -> bool:
    # Greedy matching with tolerance: row counts are small and sorting on
    # noisy floats (or phi near the 0/2pi seam) would be order-unstable.
    if len(rows_a) != len(rows_b):
        return False
    unused = list(rows_b)
    for ra in rows_a:
        for idx, rb in enumerate(unused):
            if ra[:3] != rb[:3]:
                continue
            dphi = abs(ra[3] - rb[3])
            if min(dphi, 2.0 * math.pi - dphi) > tol:
                continue
            if abs(ra[4] - rb[4]) > tol or abs(ra[5] - rb[5]) > tol:
                continue
            unused.pop(idx)
            break
        else:
            return False
    return True


def grow_supertile(shape: TriangleShape, choices: list[tuple[int, int]],
                   cap: int | None = None) -> SupertileChain:
    """Nest supertiles along a list of ``(n_i, tile_index)`` choices.

    Level 1 is ``T_{n_1}`` with the first chosen tile marking where the
    initial triangle sits.  Each later level ``i`` deflates ``T_{n_i}``
    until the chosen tile's descendants reproduce the previous level's
    pattern; the recorded embedding is the chosen tile's similarity.
    """
    chain = SupertileChain(shape, list(choices), [], [])
    if not choices:
        chain.orders.append(0)
        chain.levels.append((build_Tn(shape, 0), Similarity()))
        return chain
    max_extra = 200
    prev_order = None
    for n_i, pos in choices:
        base = build_Tn(shape, n_i, cap=cap)
        if not (0 <= pos < len(base.tiles)):
            raise ArgumentError(f"tile index {pos} out of range for T_{n_i}")
        anchor = base.tiles[pos]
        if prev_order is None:
            chain.orders.append(n_i)
            chain.levels.append((base, anchor.similarity()))
            prev_order = n_i
            continue
        target = _pattern_of(build_Tn(shape, prev_order))
        current = base
        ids = {anchor.id}
        order = n_i
        for _ in range(max_extra):
            rows = _descendant_pattern(current, ids, anchor)
            if _patterns_match(rows, target, 1e-9 * shape.c):
                break
            current = deflate(current, cap=cap)
            order += 1
            ids = ids | {cid for cid, pid in current.parent_links.items()
                         if pid in ids}
        else:
            raise InternalError("supertile search did not converge")
        chain.orders.append(order)
        chain.levels.append((current, anchor.similarity()))
        prev_order = order
    return chain


# -- serialization ------------------------------------------------------------


def tiling_to_json(tiling: Tiling) -> dict:
    tiles = []
    for t in tiling.tiles:
        tiles.append({
            "id": t.id,
            "parent": t.parent,
            "handedness": t.placement.handedness,
            "phi": t.placement.phi,
            "origin": [t.placement.origin[0], t.placement.origin[1]],
            "i": t.placement.size_exp[0],
            "j": t.placement.size_exp[1],
        })
    return {
        "format": TILING_FORMAT,
        "shape": tiling.shape.to_json(),
        "generation": tiling.generation,
        "tiles": tiles,
    }


def tiling_from_json(data: dict) -> Tiling:
    if data.get("format") != TILING_FORMAT:
        raise ArgumentError(f"unsupported tiling format: {data.get('format')!r}")
    sh = data["shape"]
    rationality = None
    if sh.get("rationality"):
        rationality = Fraction(sh["rationality"]["p"], sh["rationality"]["q"])
    shape = shape_from_theta(sh["theta"], sh["c"], rationality=rationality)
    tiles = []
    links = {}
    for row in data["tiles"]:
        placement = Placement(
            handedness=int(row["handedness"]),
            phi=float(row["phi"]),
            origin=(float(row["origin"][0]), float(row["origin"][1])),
            size_exp=(int(row["i"]), int(row["j"])),
        )
        tiles.append(Tile(shape=shape, placement=placement,
                          id=int(row["id"]),
                          parent=None if row["parent"] is None else int(row["parent"])))
        if row["parent"] is not None:
            links[int(row["id"])] = int(row["parent"])
    return Tiling(shape, tiles, int(data["generation"]), parent_links=links)
