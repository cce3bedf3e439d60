"""The Min-Min grid heuristic, its structure checks, and baseline heuristics.

The heuristic applies to grids with the root at corner (0, 0).  Beyond grid
distance n-1 (n = min(rows, cols)) it lays one path per row, so the paths
rooted on any level all have different lengths; from there toward the root
it repeatedly gives one level-k vertex two children, chosen so that the two
smallest subtrees of level k+1 merge.  The sorted subtree sizes per level
("profile") follow a pure recurrence and fully determine the loss, so the
embedded tree and the recurrence check each other.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import InvalidShape, MergeInfeasible, ZeroMinDemand
from .instance import Instance, make_grid, make_uniform_grid
from .spanning_tree import (
    LossReport,
    SpanningTree,
    SubtreeProfile,
    evaluate,
)


def minmin_profile(rows: int, cols: int) -> SubtreeProfile:
    """Per-level sorted subtree sizes, computed by recurrence alone.

    Levels deeper than cols-1 hold shrinking path stubs (1, ..., sizes);
    levels n-1 .. cols-1 hold the row paths (cols-k, ..., rows+cols-k-1);
    each shallower level merges the two smallest entries of the level below
    and grows every subtree by its level-k root.
    """
    if rows < 2 or rows > cols:
        raise InvalidShape(f"need 2 <= rows <= cols, got ({rows}, {cols})")
    depth = rows + cols - 2
    by_level: list[tuple[int, ...]] = [()] * (depth + 1)
    for k in range(cols, depth + 1):
        by_level[k] = tuple(range(1, rows + cols - k))
    for k in range(rows - 1, cols):
        by_level[k] = tuple(range(cols - k, rows + cols - k))
    for k in range(rows - 2, 0, -1):
        s = by_level[k + 1]
        merged = sorted([s[0] + s[1] + 1] + [a + 1 for a in s[2:]])
        by_level[k] = tuple(merged)
    return SubtreeProfile(rows=rows, cols=cols, by_level=tuple(by_level[1:]))


def _unfold_merges(profile: SubtreeProfile) -> tuple[dict[int, int], list[int]]:
    """Walk the size recurrence from the root outward, fixing positions.

    Returns the merge position per level (index of the doubled vertex along
    the anti-diagonal) and the resulting bottom arrangement: the subtree
    size sitting at each row of level n-1.  Placing top-down never gets
    stuck, whereas a fixed bottom arrangement can strand the two minima at
    non-adjacent cells.
    """
    n = profile.rows
    seq = list(profile.sizes(1))
    positions: dict[int, int] = {}
    for k in range(1, n - 1):
        child = profile.sizes(k + 1)
        lo1, lo2 = child[0], child[1]
        merged = lo1 + lo2 + 1
        try:
            pos = seq.index(merged)
        except ValueError:  # recurrence violated; cannot happen
            raise MergeInfeasible(f"value {merged} missing at level {k}: {seq}")
        positions[k] = pos
        seq = [v - 1 for v in seq[:pos]] + [lo1, lo2] + [v - 1 for v in seq[pos + 1 :]]
    return positions, seq


def minmin_tree(rows: int, cols: int) -> SpanningTree:
    """Embedded heuristic tree on the rows x cols grid, root at vertex 0.

    Three zones: levels 1..n-2 realize the unfolded merges (each level's
    doubled vertex adopts the two smallest subtrees below); levels n-1 to
    m-1 are straight row paths; the far corner triangle is tiled by
    right/down token paths so that each row path ends with its prescribed
    length.  Wide-side-first construction requires rows <= cols; the
    transposed grid is solved and mapped back otherwise.
    """
    if min(rows, cols) < 2:
        raise InvalidShape(f"grid ({rows}, {cols}) needs both sides >= 2")
    if rows > cols:
        flipped = minmin_tree(cols, rows)
        remap = [0] * (rows * cols)
        for v, p in enumerate(flipped.parents):
            i, j = divmod(v, rows)
            if p >= 0:
                pi, pj = divmod(p, rows)
                remap[j * cols + i] = pj * cols + pi
            else:
                remap[j * cols + i] = -1
        return SpanningTree(root=0, parents=tuple(remap))

    n, m = rows, cols
    parents = [-1] * (n * m)

    def vid(i: int, j: int) -> int:
        return i * m + j

    positions, bottom = _unfold_merges(minmin_profile(n, m))

    # Flat zone: row r runs from its level-(n-1) root to column m-1-r.
    for r in range(n):
        for c in range(n - r, m - r):
            parents[vid(r, c)] = vid(r, c - 1)

    # Corner triangle: one token per row, alive for its extra length; the
    # dying token frees the top cell and everything above it slides down.
    extra = [bottom[r] - (m - n + 1) for r in range(n)]
    token_row = list(range(n))
    last_cell = [vid(r, m - 1 - r) for r in range(n)]
    for t in range(n - 1):
        dying_row = token_row[extra.index(t)]
        for p in range(n):
            if extra[p] > t:
                if token_row[p] < dying_row:
                    token_row[p] += 1
                cell = vid(token_row[p], m - token_row[p] + t)
                parents[cell] = last_cell[p]
                last_cell[p] = cell

    # Merge zone: level k's doubled vertex takes both adjacent children.
    for k in range(n - 2, 0, -1):
        pos = positions[k]
        for row in range(k + 2):
            child = vid(row, k + 1 - row)
            if row <= pos:
                parents[child] = vid(row, k - row)
            else:
                parents[child] = vid(row - 1, k + 1 - row)
    parents[vid(0, 1)] = 0
    parents[vid(1, 0)] = 0
    return SpanningTree(root=0, parents=tuple(parents))


def _grid_frame(instance: Instance):
    from .instance import levels

    if instance.grid_shape is None:
        raise InvalidShape("property checks require a grid instance")
    rows, cols = instance.grid_shape
    return min(rows, cols), max(rows, cols), levels(instance)


def check_property_a(instance: Instance, tree: SpanningTree) -> bool:
    """Levels n-1 .. m-1 root paths of pairwise different lengths.

    Each vertex on those levels must hang from the level above it, its
    subtree must be a path, and the path lengths on one level must be
    pairwise distinct.
    """
    lo, hi, lv = _grid_frame(instance)
    sizes = tree.subtree_sizes()
    for k in range(lo - 1, hi):
        if k < 1:
            continue
        level_sizes = []
        for v in range(instance.vertex_count):
            if lv.level_of[v] != k:
                continue
            p = tree.parents[v]
            if p < 0 or lv.level_of[p] != k - 1:
                return False
            cur = v
            while True:
                kids = tree.children[cur]
                if len(kids) > 1:
                    return False
                if not kids:
                    break
                cur = kids[0]
            level_sizes.append(sizes[v])
        if len(set(level_sizes)) != len(level_sizes):
            return False
    return True


def check_property_b(instance: Instance, tree: SpanningTree) -> bool:
    """Levels 1 .. n-2 have one degree-3 vertex merging the two smallest
    level-(k+1) subtrees; every other vertex on the level has degree 2."""
    lo, _, lv = _grid_frame(instance)
    sizes = tree.subtree_sizes()
    for k in range(1, lo - 1):
        level_vertices = [
            v for v in range(instance.vertex_count) if lv.level_of[v] == k
        ]
        below = sorted(
            sizes[v] for v in range(instance.vertex_count) if lv.level_of[v] == k + 1
        )
        degree3 = []
        for v in level_vertices:
            deg = len(tree.children[v]) + (1 if tree.parents[v] >= 0 else 0)
            if deg == 3:
                degree3.append(v)
            elif deg != 2:
                return False
        if len(degree3) != 1:
            return False
        z = degree3[0]
        kids = tree.children[z]
        if len(kids) != 2:
            return False
        if any(lv.level_of[c] != k + 1 for c in kids):
            return False
        if sorted(sizes[c] for c in kids) != below[:2]:
            return False
    return True


def beta(profile: SubtreeProfile) -> int | None:
    """Deepest level whose largest subtree exceeds twice the short side.

    Absent exactly when the grid is constant-size (rows*cols <= 4n+1).
    """
    n = min(profile.rows, profile.cols)
    for k in range(profile.depth, 0, -1):
        if profile.sizes(k) and profile.sizes(k)[-1] > 2 * n:
            return k
    assert profile.rows * profile.cols <= 4 * n + 1
    return None


def shortest_path_tree(instance: Instance) -> SpanningTree:
    """Tree of minimum-resistance paths from the root.

    Deterministic: vertices settle in (distance, id) order and each vertex
    takes the smallest-id already-settled neighbor on a tight edge.
    """
    count = instance.vertex_count
    adj = instance.adjacency
    res = instance.resistances
    dist = [None] * count
    settle_pos = [-1] * count
    dist[instance.root] = 0
    heap: list[tuple[int, int]] = [(0, instance.root)]
    order: list[int] = []
    while heap:
        d, u = heapq.heappop(heap)
        if settle_pos[u] >= 0:
            continue
        settle_pos[u] = len(order)
        order.append(u)
        for w, eidx in adj[u]:
            nd = d + res[eidx]
            if dist[w] is None or nd < dist[w]:
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    parents = [-1] * count
    for v in order:
        if v == instance.root:
            continue
        best = None
        for w, eidx in adj[v]:
            if settle_pos[w] < settle_pos[v] and dist[w] + res[eidx] == dist[v]:
                if best is None or w < best:
                    best = w
        parents[v] = best
    return SpanningTree(root=instance.root, parents=tuple(parents))


def greedy_balance_tree(instance: Instance) -> SpanningTree:
    """Grow the tree by attaching heavy demands first, cheapest path wins.

    At each step attach the largest-demand frontier vertex along the root
    path that increases the loss least.  Routing big demands before small
    ones balances the load across the root's branches, which makes this a
    strong incumbent wherever shortest paths tie.
    """
    count = instance.vertex_count
    adj = instance.adjacency
    res = instance.resistances
    dem = instance.demands
    parents = [-1] * count
    parent_edge = [-1] * count
    flow = [0] * len(instance.edges)  # demand committed through each tree edge
    in_tree = [False] * count
    in_tree[instance.root] = True

    def marginal(v: int, u: int, eidx: int) -> int:
        d = dem[v]
        cost = res[eidx] * d * d
        w = u
        while parents[w] >= 0:
            e = parent_edge[w]
            c = flow[e]
            cost += res[e] * ((c + d) ** 2 - c * c)
            w = parents[w]
        return cost

    for _ in range(count - 1):
        best = None
        for u in range(count):
            if not in_tree[u]:
                continue
            for v, eidx in adj[u]:
                if in_tree[v]:
                    continue
                # free riders first (they open routes), then heavy demands
                key = (dem[v] > 0, -dem[v], marginal(v, u, eidx), v, u)
                if best is None or key < best:
                    best = key
        _, _, _, v, u = best
        eidx = instance.edge_index[(min(u, v), max(u, v))]
        parents[v] = u
        parent_edge[v] = eidx
        in_tree[v] = True
        d = dem[v]
        flow[eidx] += d
        w = u
        while parents[w] >= 0:
            flow[parent_edge[w]] += d
            w = parents[w]
    return SpanningTree(root=instance.root, parents=tuple(parents))


@dataclass(frozen=True)
class NonUniformReport:
    """Heuristic-tree loss under varying demands, with a scaled certificate.

    ratio_upper multiplies the uniform-demand ratio certificate by the
    square of the demand spread max/min, as an exact rational.
    """

    report: LossReport
    alpha: Fraction
    uniform_ratio_upper: Fraction
    ratio_upper: Fraction
    tree: SpanningTree


def evaluate_nonuniform(
    rows: int, cols: int, demands: Mapping[int, int]
) -> NonUniformReport:
    """Evaluate the uniform-construction heuristic tree under demands.

    Demands must be strictly positive at every non-root vertex; unit
    resistances are assumed.
    """
    from .analysis import ratio_certificate

    tree = minmin_tree(rows, cols)
    count = rows * cols
    dem = {v: int(demands.get(v, 0)) for v in range(1, count)}
    if any(d <= 0 for d in dem.values()):
        raise ZeroMinDemand("every non-root vertex needs a positive demand")
    instance = make_grid(
        rows,
        cols,
        demands=dem,
        resistances={e: 1 for e in make_uniform_grid(rows, cols).edges},
    )
    report = evaluate(instance, tree)
    alpha = Fraction(max(dem.values()), min(dem.values()))
    uniform = ratio_certificate(min(rows, cols), max(rows, cols)).ratio_upper
    return NonUniformReport(
        report=report,
        alpha=alpha,
        uniform_ratio_upper=uniform,
        ratio_upper=alpha * alpha * uniform,
        tree=tree,
    )
