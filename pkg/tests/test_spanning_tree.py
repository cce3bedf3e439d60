"""Tree orientation, exact loss evaluation, profiles, DOT export."""

import random

import pytest

from ednr import instance as inst
from ednr.errors import NotSpanning, ParseError
from ednr.spanning_tree import (
    evaluate,
    export_dot,
    from_edges,
    parse_tree,
    serialize_tree,
    subtree_size_profile,
)

GRID2 = inst.make_uniform_grid(2, 2)
# row-major ids on the 2x2 grid: 0=(0,0) 1=(0,1) 2=(1,0) 3=(1,1)
STAR = [(0, 1), (0, 2), (1, 3)]
PATH = [(0, 1), (1, 3), (2, 3)]


def cut_oracle_loss(instance, tree):
    """Independent recомputation: remove each tree edge, flood-fill the
    root-free side, sum resistance * demand^2."""
    total = 0
    for u, v in tree.edge_set:
        adj = {x: [] for x in range(instance.vertex_count)}
        for a, b in tree.edge_set:
            if (a, b) != (u, v):
                adj[a].append(b)
                adj[b].append(a)
        seen = {instance.root}
        stack = [instance.root]
        while stack:
            x = stack.pop()
            for w in adj[x]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        downstream = sum(
            instance.demands[x] for x in range(instance.vertex_count) if x not in seen
        )
        total += instance.resistance(u, v) * downstream * downstream
    return total


class TestFromEdges:
    def test_star(self):
        tree = from_edges(GRID2, STAR)
        assert tree.parents[1] == 0 and tree.parents[2] == 0 and tree.parents[3] == 1

    def test_three_of_cycle(self):
        tree = from_edges(GRID2, PATH)
        assert tree.edge_set == {(0, 1), (1, 3), (2, 3)}

    def test_four_edges_rejected(self):
        with pytest.raises(NotSpanning):
            from_edges(GRID2, GRID2.edges)

    def test_missing_edge_rejected(self):
        with pytest.raises(NotSpanning):
            from_edges(GRID2, [(0, 1), (0, 2), (0, 3)])  # (0,3) not a grid edge

    def test_disconnected_rejected(self):
        grid = inst.make_uniform_grid(2, 3)
        with pytest.raises(NotSpanning):
            from_edges(grid, [(0, 1), (1, 2), (0, 3), (1, 2)])


class TestEvaluate:
    def test_star_loss_six(self):
        report = evaluate(GRID2, from_edges(GRID2, STAR))
        assert report.total == 6
        assert report.downstream == {(0, 1): 2, (0, 2): 1, (1, 3): 1}

    def test_path_loss_fourteen(self):
        report = evaluate(GRID2, from_edges(GRID2, PATH))
        assert report.total == 14
        assert report.downstream[(0, 1)] == 3

    @pytest.mark.parametrize("m", [2, 3, 5, 8])
    def test_single_row_path(self, m):
        grid = inst.make_uniform_grid(1, m)
        tree = from_edges(grid, grid.edges)
        assert evaluate(grid, tree).total == sum(
            (m - k) ** 2 for k in range(1, m)
        )

    def test_3x3_heuristic_per_level(self):
        from ednr.minmin import minmin_tree

        grid = inst.make_uniform_grid(3, 3)
        report = evaluate(grid, minmin_tree(3, 3))
        assert report.total == 52
        assert report.per_level == (32, 14, 5, 1)

    def test_matches_cut_oracle_on_random_instances(self):
        rng = random.Random(42)
        for _ in range(25):
            g = inst.random_connected_instance(rng, rng.randint(3, 9))
            tree = from_edges(
                g, [g.edges[i] for i in _random_tree_edges(g, rng)]
            )
            assert evaluate(g, tree).total == cut_oracle_loss(g, tree)

    def test_permutation_invariance(self):
        rng = random.Random(9)
        g = inst.random_connected_instance(rng, 7)
        tree_edges = [g.edges[i] for i in _random_tree_edges(g, rng)]
        base = evaluate(g, from_edges(g, tree_edges)).total
        perm = list(range(g.vertex_count))
        rng.shuffle(perm)
        g2 = inst.make_general(
            [(perm[u], perm[v]) for u, v in g.edges],
            root=perm[g.root],
            demands={perm[v]: d for v, d in enumerate(g.demands) if d},
            resistances={
                (perm[u], perm[v]): r for (u, v), r in zip(g.edges, g.resistances)
            },
        )
        relabeled = [(perm[u], perm[v]) for u, v in tree_edges]
        assert evaluate(g2, from_edges(g2, relabeled)).total == base

    def test_zero_resistance_contributes_nothing(self):
        g = inst.make_general(
            [(0, 1), (1, 2)],
            root=0,
            demands={1: 5, 2: 7},
            resistances={(0, 1): 0, (1, 2): 3},
        )
        assert evaluate(g, from_edges(g, g.edges)).total == 3 * 49

    def test_scaling_monotonicity(self):
        rng = random.Random(3)
        for _ in range(10):
            g = inst.random_connected_instance(rng, rng.randint(3, 8))
            tree_edges = [g.edges[i] for i in _random_tree_edges(g, rng)]
            base = evaluate(g, from_edges(g, tree_edges)).total
            doubled_d = inst.make_general(
                g.edges,
                root=g.root,
                demands={v: 2 * d for v, d in enumerate(g.demands) if d},
                resistances={e: r for e, r in zip(g.edges, g.resistances)},
            )
            assert evaluate(doubled_d, from_edges(doubled_d, tree_edges)).total == 4 * base
            doubled_r = inst.make_general(
                g.edges,
                root=g.root,
                demands={v: d for v, d in enumerate(g.demands) if d},
                resistances={e: 2 * r for e, r in zip(g.edges, g.resistances)},
            )
            assert evaluate(doubled_r, from_edges(doubled_r, tree_edges)).total == 2 * base


def _random_tree_edges(instance, rng):
    """Indices of a uniform-ish random spanning tree (randomized Kruskal)."""
    order = list(range(len(instance.edges)))
    rng.shuffle(order)
    parent = list(range(instance.vertex_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen = []
    for idx in order:
        u, v = instance.edges[idx]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            chosen.append(idx)
    return chosen


class TestSubtreeProfile:
    def test_2x2_star(self):
        prof = subtree_size_profile(GRID2, from_edges(GRID2, STAR))
        assert prof.sizes(1) == (1, 2)
        assert prof.sizes(2) == (1,)

    def test_3x3_heuristic(self):
        from ednr.minmin import minmin_tree

        grid = inst.make_uniform_grid(3, 3)
        prof = subtree_size_profile(grid, minmin_tree(3, 3))
        assert prof.sizes(1) == (4, 4)
        assert prof.sizes(2) == (1, 2, 3)

    def test_level_one_sums(self):
        # downward-oriented trees cover every non-root vertex exactly once;
        # trees that hang a shallow vertex below a deeper one count it twice
        from ednr.minmin import minmin_tree

        rng = random.Random(17)
        for n, m in [(2, 2), (3, 4), (4, 4)]:
            grid = inst.make_uniform_grid(n, m)
            prof = subtree_size_profile(grid, minmin_tree(n, m))
            assert sum(prof.sizes(1)) == n * m - 1
            tree = from_edges(grid, [grid.edges[i] for i in _random_tree_edges(grid, rng)])
            assert sum(subtree_size_profile(grid, tree).sizes(1)) >= n * m - 1


class TestDot:
    def test_deterministic(self):
        tree = from_edges(GRID2, STAR)
        assert export_dot(GRID2, tree) == export_dot(GRID2, tree)

    def test_contents(self):
        text = export_dot(GRID2, from_edges(GRID2, STAR))
        assert text.count(" -- ") == 4
        assert text.count("color=red") == 3
        assert 'pos="1,-1!"' in text

    def test_non_grid_has_no_positions(self):
        g = inst.make_general([(0, 1), (1, 2), (0, 2)], root=0)
        assert "pos=" not in export_dot(g)


class TestTreeSerialization:
    def test_round_trip(self):
        tree = from_edges(GRID2, STAR)
        assert parse_tree(serialize_tree(tree), GRID2) == tree

    def test_wrong_root(self):
        tree = from_edges(GRID2, STAR)
        other = inst.make_general([(0, 1), (1, 2), (0, 2)], root=1)
        with pytest.raises(ParseError):
            parse_tree(serialize_tree(tree), other)

    def test_garbage(self):
        with pytest.raises(ParseError):
            parse_tree("[1, 2]", GRID2)
