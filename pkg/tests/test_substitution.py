import math

import pytest

from tilelab.errors import ArgumentError, ResourceError
from tilelab.geometry import tile_area, vertices
from tilelab.substitution import (build_Tn, census_counts, census_steps,
                                  deflate, grow_supertile, root_tiling,
                                  subdivide, tiling_from_json, tiling_to_json,
                                  trace_edge)


def test_subdivision_preserves_area(five_shapes):
    for shape in five_shapes.values():
        parent = root_tiling(shape).tiles[0]
        daughters = subdivide(parent)
        assert len(daughters) == 5
        total = sum(tile_area(d) for d in daughters)
        assert total == pytest.approx(tile_area(parent), rel=1e-12)


def test_subdivision_orientation_multiset(five_shapes):
    """Each parent spawns {R_t P x2, R_t, R_{t+pi}, R_{t+pi/2} P}."""
    for shape in five_shapes.values():
        th = shape.theta
        daughters = subdivide(root_tiling(shape).tiles[0])
        got = sorted((d.placement.handedness,
                      round(d.placement.phi % (2.0 * math.pi), 9))
                     for d in daughters)
        want = sorted([
            (-1, round(th, 9)),
            (-1, round(th, 9)),
            (1, round(th, 9)),
            (1, round((th + math.pi) % (2.0 * math.pi), 9)),
            (-1, round(th + math.pi / 2.0, 9)),
        ])
        assert got == want


def test_daughters_cover_without_overlap(five_shapes):
    for shape in five_shapes.values():
        build_Tn(shape, 1).validate_cover(samples_per_tile=200)


def test_census_til12(til12):
    t2 = build_Tn(til12, 2)
    assert len(t2) == 9
    assert t2.exponent_counts() == {(0, 1): 4, (1, 1): 4, (2, 0): 1}


def test_census_til2(til2):
    t2 = build_Tn(til2, 2)
    assert len(t2) == 21
    assert t2.exponent_counts() == {(1, 0): 1, (1, 1): 4, (0, 2): 16}


def test_census_pinwheel(pinwheel):
    # every tile subdivides every generation: 5^n tiles
    assert len(build_Tn(pinwheel, 2)) == 25
    assert len(build_Tn(pinwheel, 3)) == 125


def test_census_counts_match_geometry(five_shapes):
    for shape in five_shapes.values():
        for n in (0, 1, 3, 5):
            counts, _ = census_counts(shape, n)
            assert counts == build_Tn(shape, n).exponent_counts()


def test_census_steps_min_pair_is_the_cut(til12):
    for gen, counts, min_pair in census_steps(til12, 6):
        key = til12.size_key(*min_pair)
        assert all(til12.size_key(i, j) >= key for (i, j) in counts)
        assert min_pair in counts


def test_deflate_only_touches_minimal_tiles(til12):
    t2 = build_Tn(til12, 2)
    t3 = deflate(t2)
    cut = min(til12.size_key(*t.placement.size_exp) for t in t2.tiles)
    survivors = {t.id for t in t2.tiles
                 if til12.size_key(*t.placement.size_exp) > cut}
    assert survivors <= {t.id for t in t3.tiles}
    assert len(t3) == len(t2) + 4 * sum(
        1 for t in t2.tiles
        if til12.size_key(*t.placement.size_exp) == cut)


def test_tile_cap(pinwheel):
    with pytest.raises(ResourceError):
        build_Tn(pinwheel, 10, cap=1000)


def test_json_round_trip(til12):
    t = build_Tn(til12, 3)
    back = tiling_from_json(tiling_to_json(t))
    assert len(back) == len(t)
    assert back.generation == t.generation
    for orig, copy in zip(t.tiles, back.tiles):
        assert copy.placement.size_exp == orig.placement.size_exp
        assert copy.placement.handedness == orig.placement.handedness
        for pv, qv in zip(vertices(orig), vertices(copy)):
            assert qv == pytest.approx(pv, abs=1e-12)


def test_trace_edge_covers_the_hypotenuse(til12):
    t = build_Tn(til12, 4)
    segs = trace_edge(t, "hypotenuse")
    assert segs
    # segments tile [0, c] without gaps
    assert segs[0].position == pytest.approx(0.0, abs=1e-9)
    end = segs[-1].position + segs[-1].length
    assert end == pytest.approx(til12.c, rel=1e-12)
    for prev, cur in zip(segs, segs[1:]):
        assert cur.position == pytest.approx(prev.position + prev.length,
                                             abs=1e-9)


def test_trace_edge_rejects_unknown_edge(til12):
    with pytest.raises(ArgumentError):
        trace_edge(build_Tn(til12, 2), "diagonal")


def test_grow_supertile_chain(til12):
    chain = grow_supertile(til12, [(2, 3), (2, 1)])
    assert chain.orders == [2, 4]
    assert len(chain.levels) == 2
    # each level embeds the previous one: the recorded similarity maps the
    # anchor copy of T_{n_i} onto the previous level's pattern
    for (tiling, sim), order in zip(chain.levels, chain.orders):
        assert tiling.generation == order
        assert sim.scale > 0.0


def test_grow_supertile_index_check(til12):
    with pytest.raises(ArgumentError):
        grow_supertile(til12, [(1, 99)])
