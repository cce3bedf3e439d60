"""Instance model: construction, validation, levels, serialization."""

import pytest
from hypothesis import given, settings, strategies as st

from ednr import instance as inst
from ednr.errors import (
    Disconnected,
    DuplicateEdge,
    NegativeValue,
    NotAGrid,
    ParseError,
    RootDemandPresent,
    SelfLoop,
)


class TestUniformGrid:
    def test_single_cell(self):
        g = inst.make_uniform_grid(1, 1)
        assert g.vertex_count == 1
        assert g.edges == ()

    def test_2x2(self):
        g = inst.make_uniform_grid(2, 2)
        assert g.vertex_count == 4
        assert len(g.edges) == 4
        assert g.demands == (0, 1, 1, 1)
        assert all(r == 1 for r in g.resistances)
        assert g.grid_shape == (2, 2)

    def test_3x3_edge_count(self):
        g = inst.make_uniform_grid(3, 3)
        assert g.vertex_count == 9
        assert len(g.edges) == 12

    @pytest.mark.parametrize("n,m", [(1, 5), (2, 7), (4, 4), (3, 8)])
    def test_edge_count_formula(self, n, m):
        g = inst.make_uniform_grid(n, m)
        assert len(g.edges) == n * (m - 1) + m * (n - 1)


class TestMakeGeneral:
    def test_triangle(self):
        g = inst.make_general(
            [(0, 1), (1, 2), (0, 2)],
            root=0,
            demands={1: 1, 2: 1},
            resistances={(0, 1): 1, (1, 2): 1, (0, 2): 1},
        )
        assert g.vertex_count == 3
        assert g.total_demand == 2

    def test_disconnected(self):
        with pytest.raises(Disconnected):
            inst.make_general([(0, 1), (2, 3)], root=0)

    def test_self_loop(self):
        with pytest.raises(SelfLoop):
            inst.make_general([(0, 0)], root=0)

    def test_duplicate_edge(self):
        with pytest.raises(DuplicateEdge):
            inst.make_general([(0, 1), (1, 0)], root=0)

    def test_negative_resistance(self):
        with pytest.raises(NegativeValue):
            inst.make_general([(0, 1)], root=0, resistances={(0, 1): -1})

    def test_negative_demand(self):
        with pytest.raises(NegativeValue):
            inst.make_general([(0, 1)], root=0, demands={1: -2})

    def test_root_demand(self):
        with pytest.raises(RootDemandPresent):
            inst.make_general([(0, 1)], root=0, demands={0: 3})

    def test_grid_shape_mismatch(self):
        with pytest.raises(NotAGrid):
            inst.make_general([(0, 1), (1, 2), (0, 2)], root=0, grid_shape=(1, 3))


class TestLevels:
    def test_2x2_sizes(self):
        lv = inst.levels(inst.make_uniform_grid(2, 2))
        assert lv.sizes == (1, 2, 1)

    def test_3x3_sizes(self):
        lv = inst.levels(inst.make_uniform_grid(3, 3))
        assert lv.sizes == (1, 2, 3, 2, 1)

    def test_7x16_shape(self):
        lv = inst.levels(inst.make_uniform_grid(7, 16))
        sizes = lv.sizes
        assert sizes[:7] == (1, 2, 3, 4, 5, 6, 7)
        assert all(s == 7 for s in sizes[7:16])
        assert sizes[16:] == (6, 5, 4, 3, 2, 1)
        assert sum(sizes) == 112

    @pytest.mark.parametrize("n,m", [(2, 2), (3, 5), (4, 4), (2, 9)])
    def test_size_formula_and_edge_partition(self, n, m):
        g = inst.make_uniform_grid(n, m)
        lv = inst.levels(g)
        for k, size in enumerate(lv.sizes):
            assert size == min(k, n - 1, m - 1, n + m - 2 - k) + 1
        covered = [idx for k_edges in lv.level_edges for idx in k_edges]
        assert sorted(covered) == list(range(len(g.edges)))
        assert lv.level_edges[0] == ()
        for k in range(1, n + m - 1):
            assert lv.level_edges[k], f"no edges at level {k}"

    def test_not_a_grid(self):
        g = inst.make_general([(0, 1), (1, 2), (0, 2)], root=0)
        with pytest.raises(NotAGrid):
            inst.levels(g)


class TestSerialization:
    def test_round_trip_grid(self):
        g = inst.make_uniform_grid(2, 2)
        assert inst.parse(inst.serialize(g)) == g

    def test_round_trip_general(self):
        g = inst.make_general(
            [(0, 1), (1, 2), (0, 2), (2, 3)],
            root=1,
            demands={0: 4, 3: 2},
            resistances={(0, 1): 3, (2, 3): 7},
        )
        assert inst.parse(inst.serialize(g)) == g

    def test_negative_resistance_rejected(self):
        text = '{"vertices": 2, "root": 0, "grid": null, "edges": [[0, 1, -5]], "demands": {}}'
        with pytest.raises(ParseError):
            inst.parse(text)

    def test_missing_field(self):
        with pytest.raises(ParseError, match="edges"):
            inst.parse('{"vertices": 2, "root": 0}')

    def test_bad_json_reports_line(self):
        with pytest.raises(ParseError, match="line"):
            inst.parse("{\n  broken")

    def test_grid_omitted_is_general(self):
        text = '{"vertices": 2, "root": 0, "edges": [[0, 1, 1]], "demands": {"1": 3}}'
        g = inst.parse(text)
        assert g.grid_shape is None
        assert g.demands == (0, 3)

    def test_demands_omitted_default_zero(self):
        text = '{"vertices": 2, "root": 0, "edges": [[0, 1, 1]]}'
        assert inst.parse(text).demands == (0, 0)

    @settings(max_examples=60, derandomize=True, deadline=None)
    @given(st.integers(min_value=2, max_value=12), st.randoms(use_true_random=False))
    def test_round_trip_random(self, count, rng):
        g = inst.random_connected_instance(rng, count, extra_edges=rng.randint(0, 4))
        assert inst.parse(inst.serialize(g)) == g


def test_adjacency_consistent():
    g = inst.make_uniform_grid(3, 4)
    for v in range(g.vertex_count):
        for w, eidx in g.adjacency[v]:
            assert inst.canonical_edge(v, w) == g.edges[eidx]


def test_cell_roundtrip():
    g = inst.make_uniform_grid(3, 5)
    for v in range(g.vertex_count):
        i, j = g.cell_of(v)
        assert g.vertex_at(i, j) == v
