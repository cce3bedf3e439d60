"""Exact optimum computation: exhaustive enumeration and branch-and-bound.

enumerate_all walks every spanning tree (guarded by an exact Kirchhoff
count) and is the ground-truth oracle.  solve_bnb is the workhorse: it
branches on edges in level-major order and prunes with an admissible bound
built from distance cuts.  For each hop distance k, the demand sitting at
distance >= k must cross the cut between distances k-1 and k; committed
flows on already-included edges plus an integer water-fill of the remaining
demand over the surviving cut edges lower-bound the loss there.  All
arithmetic is exact, so Optimal results are bit-reproducible under node
budgets regardless of wall clock.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import TooLarge
from .instance import Instance
from .minmin import greedy_balance_tree, minmin_tree, shortest_path_tree
from .spanning_tree import SpanningTree, evaluate, from_edges

OPTIMAL = "optimal"
BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass(frozen=True)
class SolveResult:
    best_tree: SpanningTree
    best_loss: int
    status: str
    nodes_explored: int
    budget: int | None = None

    def as_dict(self) -> dict:
        return {
            "best_loss": self.best_loss,
            "status": self.status,
            "nodes_explored": self.nodes_explored,
            "budget": self.budget,
            "tree": {
                "root": self.best_tree.root,
                "parent": {
                    str(v): p for v, p in enumerate(self.best_tree.parents) if p >= 0
                },
            },
        }


def spanning_tree_count(instance: Instance) -> int:
    """Exact spanning-tree count via the reduced Laplacian determinant
    (Bareiss fraction-free elimination, integer arithmetic throughout)."""
    n = instance.vertex_count
    if n == 1:
        return 1
    lap = [[0] * n for _ in range(n)]
    for u, v in instance.edges:
        lap[u][u] += 1
        lap[v][v] += 1
        lap[u][v] -= 1
        lap[v][u] -= 1
    r = instance.root
    m = [
        [lap[i][j] for j in range(n) if j != r]
        for i in range(n)
        if i != r
    ]
    size = n - 1
    sign = 1
    prev = 1
    for k in range(size - 1):
        if m[k][k] == 0:
            for row in range(k + 1, size):
                if m[row][k] != 0:
                    m[k], m[row] = m[row], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[size - 1][size - 1]


def _hop_levels(instance: Instance) -> list[int]:
    level = [-1] * instance.vertex_count
    level[instance.root] = 0
    queue = [instance.root]
    for u in queue:
        for w, _ in instance.adjacency[u]:
            if level[w] < 0:
                level[w] = level[u] + 1
                queue.append(w)
    return level


def _loss_of_tree_edges(instance: Instance, chosen: list[int]) -> int:
    """Loss of a spanning tree given by edge indices; one bottom-up pass."""
    count = instance.vertex_count
    adj: list[list[tuple[int, int]]] = [[] for _ in range(count)]
    for eidx in chosen:
        u, v = instance.edges[eidx]
        adj[u].append((v, eidx))
        adj[v].append((u, eidx))
    parent_edge = [-1] * count
    order = [instance.root]
    seen = [False] * count
    seen[instance.root] = True
    for u in order:
        for w, eidx in adj[u]:
            if not seen[w]:
                seen[w] = True
                parent_edge[w] = eidx
                order.append(w)
    below = list(instance.demands)
    total = 0
    res = instance.resistances
    for w in reversed(order):
        eidx = parent_edge[w]
        if eidx >= 0:
            u, v = instance.edges[eidx]
            p = u if w != u else v
            below[p] += below[w]
            total += res[eidx] * below[w] * below[w]
    return total


def enumerate_all(instance: Instance, limit: int = 200_000) -> SolveResult:
    """Visit every spanning tree; exact optimum of small instances.

    Refuses instances whose Kirchhoff count exceeds the limit.
    """
    count = spanning_tree_count(instance)
    if count > limit:
        raise TooLarge(f"{count} spanning trees exceed limit {limit}")
    n = instance.vertex_count
    if n == 1:
        return SolveResult(
            best_tree=SpanningTree(root=instance.root, parents=(-1,)),
            best_loss=0,
            status=OPTIMAL,
            nodes_explored=1,
        )
    edge_count = len(instance.edges)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            x = parent[x]
        return x

    adjacency = instance.adjacency
    status = [0] * edge_count  # 0 available, 2 excluded (1 = chosen)
    chosen: list[int] = []
    best: list = [None, None]  # loss, edges
    trees_seen = 0

    def connected_available() -> bool:
        seen = [False] * n
        seen[0] = True
        stack = [0]
        reached = 1
        while stack:
            u = stack.pop()
            for w, eidx in adjacency[u]:
                if status[eidx] != 2 and not seen[w]:
                    seen[w] = True
                    reached += 1
                    stack.append(w)
        return reached == n

    def recurse(idx: int) -> None:
        nonlocal trees_seen
        if len(chosen) == n - 1:
            trees_seen += 1
            loss = _loss_of_tree_edges(instance, chosen)
            if best[0] is None or loss < best[0]:
                best[0] = loss
                best[1] = list(chosen)
            return
        if idx == edge_count:
            return
        u, v = instance.edges[idx]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            status[idx] = 1
            chosen.append(idx)
            recurse(idx + 1)
            chosen.pop()
            status[idx] = 0
            parent[ru] = ru
        status[idx] = 2
        if connected_available():
            recurse(idx + 1)
        status[idx] = 0

    recurse(0)
    tree = from_edges(instance, [instance.edges[i] for i in best[1]])
    return SolveResult(
        best_tree=tree,
        best_loss=best[0],
        status=OPTIMAL,
        nodes_explored=trees_seen,
    )


def _is_uniform_corner_grid(instance: Instance) -> bool:
    return (
        instance.grid_shape is not None
        and min(instance.grid_shape) >= 2
        and instance.root == 0
        and all(d == 1 for v, d in enumerate(instance.demands) if v != 0)
        and all(r == 1 for r in instance.resistances)
    )


def _seed_trees(instance: Instance) -> list[SpanningTree]:
    seeds = [shortest_path_tree(instance), greedy_balance_tree(instance)]
    if _is_uniform_corner_grid(instance):
        seeds.append(minmin_tree(*instance.grid_shape))
    return seeds


class _Search:
    """Branch-and-bound state with an explicit undo trail."""

    UNDEC, IN, OUT = 0, 1, 2

    def __init__(self, instance: Instance, budget: int | None):
        self.instance = instance
        self.budget = budget
        n = instance.vertex_count
        self.n = n
        self.res = instance.resistances
        self.dem = instance.demands
        self.adjacency = instance.adjacency
        self.level_of = _hop_levels(instance)
        depth = max(self.level_of)

        # Edge cut levels: an edge joining hop k-1 to hop k belongs to cut k;
        # edges inside one level belong to no cut.
        self.cut_of = []
        for u, v in instance.edges:
            lu, lv = self.level_of[u], self.level_of[v]
            self.cut_of.append(max(lu, lv) if lu != lv else -1)

        self.demand_beyond = [0] * (depth + 2)
        heaviest = [0] * (depth + 2)
        width = [0] * (depth + 2)
        for v in range(n):
            lv = self.level_of[v]
            self.demand_beyond[lv] += self.dem[v]
            heaviest[lv] = max(heaviest[lv], self.dem[v])
            width[lv] += 1
        for k in range(depth - 1, -1, -1):
            self.demand_beyond[k] += self.demand_beyond[k + 1]
            heaviest[k] = max(heaviest[k], heaviest[k + 1])
        # cut k separates levels < k from >= k
        self.cut_demand = [
            self.demand_beyond[k] if k <= depth else 0 for k in range(depth + 1)
        ]
        # one tree edge of cut k must carry the heaviest single demand beyond it
        self.cut_heaviest = [heaviest[k] for k in range(depth + 1)]
        # every crossing flow is a sum of vertex demands
        self.grain = max(math.gcd(0, *self.dem), 1)
        self.level_width = width
        # crossing a cut more often than its inner width hangs extra
        # shallow-side vertices below the cut, each adding demand twice
        self.cut_hang_min = [0, 0] + [
            min(self.dem[v] for v in range(n) if self.level_of[v] == k - 1)
            for k in range(2, depth + 1)
        ]

        self.cut_edges: list[list[int]] = [[] for _ in range(depth + 1)]
        for eidx, k in enumerate(self.cut_of):
            if k >= 1:
                self.cut_edges[k].append(eidx)
        self.cut_uniform_r = []
        for k in range(depth + 1):
            rs = {self.res[e] for e in self.cut_edges[k]}
            self.cut_uniform_r.append(rs.pop() if len(rs) == 1 else None)

        # Branch order: level-major, root-first; canonical within a level.
        def order_key(eidx: int):
            u, v = instance.edges[eidx]
            lu, lv = sorted((self.level_of[u], self.level_of[v]))
            return (lv, lu, u, v)

        self.order = sorted(range(len(instance.edges)), key=order_key)

        self.status = [self.UNDEC] * len(instance.edges)
        self.dsu_parent = list(range(n))
        self.dsu_size = [1] * n
        self.adj_in: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        self.rooted = [False] * n
        self.rooted[instance.root] = True
        self.tparent = [-1] * n
        self.tpedge = [-1] * n
        self.flow = [0] * len(instance.edges)
        self.total_committed = 0
        self.uncut_committed = 0

        self.cut_bound: list = [0] * (depth + 1)
        self.cut_memo: list[dict] = [{} for _ in range(depth + 1)]
        self.dirty = set(
            k for k in range(1, depth + 1) if self.cut_demand[k] > 0
        )
        self.bound_total: int | Fraction = 0

        self.in_count = 0
        self.nodes = 0
        self.exhausted = False
        self.best_loss: int | None = None
        self.best_parents: tuple[int, ...] | None = None

    # -- union-find (no path compression: undoable) --------------------

    def find(self, x: int) -> int:
        p = self.dsu_parent
        while p[x] != x:
            x = p[x]
        return x

    # -- bound ----------------------------------------------------------

    def _cut_bound(self, k: int):
        """Admissible minimum loss on the cut-k edges."""
        need = self.cut_demand[k]
        committed: list[int] = []
        committed_loss = 0
        slots0 = 0
        harmonic = None
        res = self.res
        has_zero_r = False
        for e in self.cut_edges[k]:
            st = self.status[e]
            if st == self.OUT:
                continue
            r = res[e]
            if st == self.IN:
                c = self.flow[e]
                committed.append(c)
                committed_loss += r * c * c
            else:
                slots0 += 1
            if r == 0:
                has_zero_r = True
        total_c = sum(committed)
        if has_zero_r:
            return committed_loss
        uniform = self.cut_uniform_r[k]
        if uniform is not None:
            key = (slots0, tuple(committed))
            memo = self.cut_memo[k]
            cached = memo.get(key)
            if cached is None:
                if len(memo) > 300_000:
                    memo.clear()
                cached = self._uniform_cut_bound(k, uniform, committed, slots0, need)
                memo[key] = cached
            return cached
        rest = need - total_c
        if rest <= 0:
            return committed_loss
        # mixed resistances: committed loss plus Cauchy-Schwarz on the rest
        harmonic = Fraction(0)
        any_slot = False
        for e in self.cut_edges[k]:
            if self.status[e] != self.OUT:
                any_slot = True
                harmonic += Fraction(1, res[e])
        if not any_slot or harmonic == 0:
            return _INFEASIBLE
        return committed_loss + Fraction(rest * rest) / harmonic

    def _uniform_cut_bound(
        self, k: int, r: int, committed: list[int], slots0: int, need: int
    ):
        """Exact integer water-fill over a same-resistance cut.

        Minimizes over the number q of crossing edges: committed edges
        always cross; beyond the cut's inner width, every extra crossing
        hangs a distinct shallow-side vertex below the cut, whose demand
        then crosses twice.  Flows are multiples of the demand gcd, and
        one crossing must carry the heaviest single demand beyond the cut.
        """
        g = self.grain
        in_cnt = len(committed)
        slots_total = in_cnt + slots0
        if slots_total == 0:
            return _INFEASIBLE
        width = self.level_width[k]
        hang = self.cut_hang_min[k] if k < len(self.cut_hang_min) else 0
        d_units = self.cut_heaviest[k] // g

        # sorted hard lower bounds: committed flows, the largest raised to
        # the heaviest single demand (applied to a spare slot if none)
        bounds = sorted(c // g for c in committed)
        if bounds:
            if bounds[-1] < d_units:
                bounds[-1] = d_units
        elif d_units > 0:
            bounds = [d_units]
        floor_slots = len(bounds)
        bounds_total = sum(bounds)
        sq_suffix = [0] * (floor_slots + 1)
        for i in range(floor_slots - 1, -1, -1):
            sq_suffix[i] = sq_suffix[i + 1] + bounds[i] * bounds[i]

        def fill(zeros: int, units: int) -> int:
            rest = units - bounds_total
            if rest <= 0:
                return sq_suffix[0]
            if zeros > 0:
                a, prefix, idx = zeros, 0, 0
            elif bounds:
                a, prefix, idx = 1, bounds[0], 1
            else:
                return _INFEASIBLE
            while idx < floor_slots and a * bounds[idx] - prefix <= rest:
                prefix += bounds[idx]
                a += 1
                idx += 1
            base, extra = divmod(prefix + rest, a)
            return sq_suffix[idx] + (a - extra) * base * base + extra * (base + 1) ** 2

        best = None
        q_lo = max(in_cnt, 1)
        rep = min(width, slots_total)
        candidates = [rep] if rep >= q_lo else []
        candidates.extend(range(max(q_lo, width + 1), slots_total + 1))
        for q in candidates:
            over = q - width
            demand = need + 2 * over * hang if over > 0 else need
            sumsq = fill(q - floor_slots, demand // g)
            if best is None or sumsq < best:
                best = sumsq
        return r * g * g * best

    def bound(self):
        for k in self.dirty:
            new = self._cut_bound(k)
            self.bound_total += new - self.cut_bound[k]
            self.cut_bound[k] = new
        self.dirty.clear()
        return self.bound_total + self.uncut_committed

    def _touch_edge(self, eidx: int) -> None:
        k = self.cut_of[eidx]
        if k >= 1 and self.cut_demand[k] > 0:
            self.dirty.add(k)

    # -- mutations with undo -------------------------------------------

    def _set_flow(self, eidx: int, value: int, trail: list) -> None:
        old = self.flow[eidx]
        trail.append((eidx, old))
        r = self.res[eidx]
        delta = r * (value * value - old * old)
        self.total_committed += delta
        if self.cut_of[eidx] == -1:
            self.uncut_committed += delta
        else:
            self._touch_edge(eidx)
        self.flow[eidx] = value

    def include(self, eidx: int):
        """Include edge; returns an undo record (or None if it would cycle)."""
        u, v = self.instance.edges[eidx]
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            return None
        if self.dsu_size[ru] > self.dsu_size[rv] or (
            self.dsu_size[ru] == self.dsu_size[rv] and ru < rv
        ):
            ru, rv = rv, ru
        # ru hangs under rv
        self.dsu_parent[ru] = rv
        self.dsu_size[rv] += self.dsu_size[ru]
        self.adj_in[u].append((v, eidx))
        self.adj_in[v].append((u, eidx))
        self.status[eidx] = self.IN
        self.in_count += 1
        self._touch_edge(eidx)

        flow_trail: list[tuple[int, int]] = []
        attached: list[int] = []
        if self.rooted[u] != self.rooted[v]:
            junction, top = (u, v) if self.rooted[u] else (v, u)
            # orient the newly attached component away from the junction
            self.rooted[top] = True
            self.tparent[top] = junction
            self.tpedge[top] = eidx
            attached.append(top)
            for x in attached:
                for w, we in self.adj_in[x]:
                    if not self.rooted[w]:
                        self.rooted[w] = True
                        self.tparent[w] = x
                        self.tpedge[w] = we
                        attached.append(w)
            below = {x: self.dem[x] for x in attached}
            for x in reversed(attached):
                p = self.tparent[x]
                if p in below:
                    below[p] += below[x]
                self._set_flow(self.tpedge[x], below[x], flow_trail)
            gained = below[top]
            x = junction
            while self.tparent[x] >= 0:
                e = self.tpedge[x]
                self._set_flow(e, self.flow[e] + gained, flow_trail)
                x = self.tparent[x]
        return (eidx, u, v, ru, rv, attached, flow_trail)

    def undo_include(self, rec) -> None:
        eidx, u, v, ru, rv, attached, flow_trail = rec
        for fe, old in reversed(flow_trail):
            cur = self.flow[fe]
            r = self.res[fe]
            delta = r * (old * old - cur * cur)
            self.total_committed += delta
            if self.cut_of[fe] == -1:
                self.uncut_committed += delta
            else:
                self._touch_edge(fe)
            self.flow[fe] = old
        for x in reversed(attached):
            self.rooted[x] = False
            self.tparent[x] = -1
            self.tpedge[x] = -1
        self.in_count -= 1
        self.status[eidx] = self.UNDEC
        self._touch_edge(eidx)
        self.adj_in[v].pop()
        self.adj_in[u].pop()
        self.dsu_size[rv] -= self.dsu_size[ru]
        self.dsu_parent[ru] = ru

    def still_connected_without(self, eidx: int) -> bool:
        """u and v stay connected through non-excluded edges."""
        u, v = self.instance.edges[eidx]
        if self.find(u) == self.find(v):
            return True  # an included path already joins them
        seen = [False] * self.n
        seen[u] = True
        stack = [u]
        status = self.status
        while stack:
            x = stack.pop()
            for w, we in self.adjacency[x]:
                if status[we] != self.OUT and not seen[w]:
                    if w == v:
                        return True
                    seen[w] = True
                    stack.append(w)
        return False

    def record_leaf(self) -> None:
        loss = self.total_committed
        if self.best_loss is None or loss < self.best_loss:
            self.best_loss = loss
            self.best_parents = tuple(self.tparent)

    def run(self, incumbent_loss: int | None) -> None:
        self.best_loss = incumbent_loss
        self.search(0)

    def search(self, pos: int) -> None:
        if self.exhausted:
            return
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            self.exhausted = True
            return
        if self.best_loss is not None and self.bound() >= self.best_loss:
            return
        if self.in_count == self.n - 1:
            self.record_leaf()
            return
        if pos == len(self.order):
            return
        eidx = self.order[pos]
        rec = self.include(eidx)
        if rec is not None:
            self.search(pos + 1)
            self.undo_include(rec)
        self.status[eidx] = self.OUT
        self._touch_edge(eidx)
        if self.still_connected_without(eidx):
            self.search(pos + 1)
        self.status[eidx] = self.UNDEC
        self._touch_edge(eidx)


_INFEASIBLE = 10**60  # sentinel larger than any loss this solver is fed


def solve_bnb(instance: Instance, budget_nodes: int | None = None) -> SolveResult:
    """Branch-and-bound exact solve, seeded by the baseline heuristics.

    Returns Optimal when the search tree is exhausted; otherwise the best
    incumbent with status budget_exhausted.  Node budgets make results
    bit-reproducible.
    """
    if instance.vertex_count == 1:
        return SolveResult(
            best_tree=SpanningTree(root=instance.root, parents=(-1,)),
            best_loss=0,
            status=OPTIMAL,
            nodes_explored=0,
            budget=budget_nodes,
        )
    seeds = _seed_trees(instance)
    seed_losses = [evaluate(instance, t).total for t in seeds]
    best_seed = min(range(len(seeds)), key=lambda i: (seed_losses[i], i))

    search = _Search(instance, budget_nodes)
    search.run(seed_losses[best_seed])

    if search.best_parents is not None:
        tree = SpanningTree(root=instance.root, parents=search.best_parents)
        loss = search.best_loss
    else:
        tree = seeds[best_seed]
        loss = seed_losses[best_seed]
    return SolveResult(
        best_tree=tree,
        best_loss=loss,
        status=BUDGET_EXHAUSTED if search.exhausted else OPTIMAL,
        nodes_explored=search.nodes,
        budget=budget_nodes,
    )


MINMIN_TABLE = {2: 6, 3: 52, 4: 224, 5: 660, 6: 1570, 7: 3246, 8: 6068}
OPTIMAL_TABLE = {2: 6, 3: 52, 4: 224, 5: 660, 6: 1570, 7: 3242, 8: 6040}


@dataclass(frozen=True)
class TableRow:
    size: int
    minmin_loss: int
    optimal_loss: int | None
    status: str
    gap: int | None


def verify_table1(
    exact_limit: int = 5, stretch_budget: int | None = None
) -> list[TableRow]:
    """Square-grid benchmark: heuristic loss vs. proven optimum.

    Sizes up to exact_limit are solved to optimality; larger sizes are
    attempted only when a stretch budget is given.
    """
    from .instance import make_uniform_grid

    rows = []
    for n in range(2, 9):
        instance = make_uniform_grid(n, n)
        mm = evaluate(instance, minmin_tree(n, n)).total
        optimal = None
        status = "skipped"
        if n <= exact_limit:
            result = solve_bnb(instance)
            optimal, status = result.best_loss, result.status
        elif stretch_budget is not None:
            result = solve_bnb(instance, budget_nodes=stretch_budget)
            status = result.status
            if result.status == OPTIMAL:
                optimal = result.best_loss
        gap = mm - optimal if optimal is not None else None
        rows.append(
            TableRow(
                size=n, minmin_loss=mm, optimal_loss=optimal, status=status, gap=gap
            )
        )
    return rows
