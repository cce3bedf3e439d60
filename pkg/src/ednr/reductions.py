"""Hardness-reduction instance generators and witness round-trips.

Two constructive encoders: subset balancing on a height-3 grid (demands
carry the item values, only the two root edges resist), and triple
balancing with 0/1 demands (item chains isolated by huge resistances, one
unit-resistance gate per group).  Witness builders turn a claimed solution
of the source problem into a spanning tree meeting the loss threshold
exactly, and the decoder reads a balancing subset back off a cheap tree.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    NonDivisible,
    NotAPartition,
    RoutingFailed,
    Unbalanced,
    WindowViolated,
)
from .instance import Instance, make_grid
from .spanning_tree import SpanningTree, from_edges


@dataclass(frozen=True)
class PartitionInstance:
    """Positive integers to split into two equal-sum halves."""

    values: tuple[int, ...]

    def __post_init__(self):
        if not self.values or any(a < 1 for a in self.values):
            raise ValueError("values must be positive integers")

    @property
    def total(self) -> int:
        return sum(self.values)


@dataclass(frozen=True)
class ThreePartitionInstance:
    """3g positive integers to split into g equal-sum triples.

    Each value must lie strictly between total/(4g) and total/(2g).
    """

    group_count: int
    values: tuple[int, ...]

    def __post_init__(self):
        if self.group_count < 1 or len(self.values) != 3 * self.group_count:
            raise ValueError("need exactly 3 * group_count values")
        if any(a < 1 for a in self.values):
            raise ValueError("values must be positive integers")

    @property
    def total(self) -> int:
        return sum(self.values)

    def check_window(self) -> None:
        s, g = self.total, self.group_count
        for j, a in enumerate(self.values, start=1):
            if not (4 * g * a > s and 2 * g * a < s):
                raise WindowViolated(
                    f"value #{j} = {a} outside the open window"
                    f" ({Fraction(s, 4 * g)}, {Fraction(s, 2 * g)})"
                )


@dataclass(frozen=True)
class ReductionArtifact:
    """Encoded instance, its yes-iff loss threshold, and witness maps."""

    instance: Instance
    threshold: Fraction | int
    source_map: dict = field(compare=False)
    params: dict = field(default_factory=dict, compare=False)


def encode_partition(problem: PartitionInstance) -> ReductionArtifact:
    """Height-3 grid whose cheap trees are exactly the balancing subsets.

    Item j's value sits as demand on the middle-row vertex of column j;
    only the two edges at the root resist, so a tree's loss is the squared
    demand routed over each, and loss total^2 / 2 is attainable iff the
    items split evenly.
    """
    m = len(problem.values)
    cols = m + 1

    def vid(i: int, j: int) -> int:
        return i * cols + j

    demands = {vid(1, j): a for j, a in enumerate(problem.values, start=1)}
    resistances = {(vid(0, 0), vid(0, 1)): 1, (vid(0, 0), vid(1, 0)): 1}
    instance = make_grid(3, cols, demands=demands, resistances=resistances)
    total = problem.total
    return ReductionArtifact(
        instance=instance,
        threshold=Fraction(total * total, 2),
        source_map={
            "item_vertex": {j: vid(1, j) for j in range(1, m + 1)},
            "vertex_item": {vid(1, j): j for j in range(1, m + 1)},
            "row_edge": (vid(0, 0), vid(0, 1)),
            "column_edge": (vid(0, 0), vid(1, 0)),
        },
    )


def decode_partition(artifact: ReductionArtifact, tree: SpanningTree) -> frozenset[int]:
    """Items whose demand vertex hangs below the horizontal root edge.

    If the tree's loss meets the threshold, the returned subset balances.
    """
    u, v = artifact.source_map["row_edge"]
    if (u, v) not in tree.edge_set:
        return frozenset()
    child = v if tree.parents[v] == u else u
    below = set()
    stack = [child]
    while stack:
        x = stack.pop()
        below.add(x)
        stack.extend(tree.children[x])
    vertex_item = artifact.source_map["vertex_item"]
    return frozenset(item for vid, item in vertex_item.items() if vid in below)


def witness_tree_partition(
    artifact: ReductionArtifact, chosen: Iterable[int]
) -> SpanningTree:
    """The explicit tree routing chosen items over the top root edge and
    the rest over the bottom: loss (sum chosen)^2 + (sum rest)^2."""
    instance = artifact.instance
    cols = instance.grid_shape[1]
    m = cols - 1
    chosen = frozenset(chosen)
    if not chosen <= set(range(1, m + 1)):
        raise NotAPartition(f"subset {sorted(chosen)} not within 1..{m}")

    def vid(i: int, j: int) -> int:
        return i * cols + j

    edges = []
    for j in range(m):
        edges.append((vid(0, j), vid(0, j + 1)))
        edges.append((vid(2, j), vid(2, j + 1)))
    edges.append((vid(0, 0), vid(1, 0)))
    edges.append((vid(1, 0), vid(2, 0)))
    for k in range(1, m + 1):
        if k in chosen:
            edges.append((vid(0, k), vid(1, k)))
        else:
            edges.append((vid(1, k), vid(2, k)))
    return from_edges(instance, edges)


def default_spacing(group_count: int) -> int:
    """Row spacing between consecutive chains; generous fifth power."""
    return group_count**5


def encode_3partition(
    problem: ThreePartitionInstance,
    spacing: int | None = None,
    big_resistance: int | None = None,
) -> ReductionArtifact:
    """Grid with 0/1 demands whose cheap trees are triple balancings.

    Item k becomes a horizontal chain of unit-demand vertices reachable
    only through one free entry edge; g gate edges of resistance 1 connect
    the root spine (column 0) to the rest, every other spine crossing being
    prohibitively expensive.  spacing (default group_count^5) pads rows;
    big_resistance (default (sum values)^3 + 1) stands in for infinity.
    Soundness of the decision threshold is proved only for large spacing;
    small overrides are for structural testing.
    """
    problem.check_window()
    g, values = problem.group_count, problem.values
    total = problem.total
    if total % g:
        raise NonDivisible(f"total {total} not divisible by {g}: trivial NO")
    w = default_spacing(g) if spacing is None else spacing
    if w < 1:
        raise ValueError("spacing must be at least 1")
    rinf = total**3 + 1 if big_resistance is None else big_resistance

    a_max = max(values)
    rows = 3 * g * (w + 1) + w
    cols = 2 + a_max + 2 * w

    def vid(i: int, j: int) -> int:
        return i * cols + j

    demands: dict[int, int] = {}
    resistances: dict[tuple[int, int], int] = {}

    gate_rows = [(3 * i + 2) * (w + 1) for i in range(g)]
    gate_set = set(gate_rows)
    for i in range(rows):
        resistances[(vid(i, 0), vid(i, 1))] = 1 if i in gate_set else rinf

    chain_cells: dict[int, list[int]] = {}
    entry_edges: dict[int, tuple[int, int]] = {}
    entry_col = w + 2
    for k, a in enumerate(values, start=1):
        row = k * (w + 1)
        cells = [vid(row, entry_col + off) for off in range(a)]
        chain_cells[k] = cells
        entry_edges[k] = (vid(row, entry_col - 1), cells[0])
        for off in range(a):
            j = entry_col + off
            demands[vid(row, j)] = 1
            # every edge at a chain vertex is forbidding except the chain
            # horizontals (entry edge included), which stay free
            if row > 0:
                resistances[(vid(row - 1, j), vid(row, j))] = rinf
            if row + 1 < rows:
                resistances[(vid(row, j), vid(row + 1, j))] = rinf
            if off == a - 1 and j + 1 < cols:
                resistances[(vid(row, j), vid(row, j + 1))] = rinf

    instance = make_grid(rows, cols, demands=demands, resistances=resistances)
    share = total // g
    return ReductionArtifact(
        instance=instance,
        threshold=g * share * share,
        source_map={
            "chain_cells": chain_cells,
            "entry_edge": entry_edges,
            "gate_rows": gate_rows,
            "gate_edges": [(vid(i, 0), vid(i, 1)) for i in gate_rows],
        },
        params={"W": w, "R_inf": rinf},
    )


def _zero_adjacency(instance: Instance) -> list[list[int]]:
    """Neighbors over zero-resistance edges, in ascending id order."""
    adj: list[list[int]] = [[] for _ in range(instance.vertex_count)]
    for (u, v), r in zip(instance.edges, instance.resistances):
        if r == 0:
            adj[u].append(v)
            adj[v].append(u)
    for a in adj:
        a.sort()
    return adj


def structure_report(artifact: ReductionArtifact) -> dict:
    """Structural facts about an encoded triple-balancing instance.

    Checks, by flood fill: the sub-infinity edges span everything, the
    zero-resistance edges alone reach no demand from the root, each chain
    has exactly one cheap edge to the outside, and the gate count.
    """
    instance = artifact.instance
    rinf = artifact.params["R_inf"]
    gate_count = sum(1 for r in instance.resistances if r == 1)

    def reach(max_resistance: int) -> set[int]:
        seen = {instance.root}
        stack = [instance.root]
        while stack:
            u = stack.pop()
            for w, eidx in instance.adjacency[u]:
                if instance.resistances[eidx] <= max_resistance and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    sub_inf = reach(rinf - 1)
    fully_reachable = len(sub_inf) == instance.vertex_count
    zero_reach = reach(0)
    demand_untouched = all(
        instance.demands[v] == 0 for v in zero_reach
    )

    chain_entries_unique = True
    for k, cells in artifact.source_map["chain_cells"].items():
        cell_set = set(cells)
        outward_cheap = 0
        for c in cells:
            for w, eidx in instance.adjacency[c]:
                if w not in cell_set and instance.resistances[eidx] < rinf:
                    outward_cheap += 1
        if outward_cheap != 1:
            chain_entries_unique = False
    return {
        "gate_count": gate_count,
        "fully_reachable_below_infinity": fully_reachable,
        "zero_resistance_reaches_no_demand": demand_untouched,
        "one_cheap_entry_per_chain": chain_entries_unique,
    }


class _RegionRouter:
    """Carve the right of the spine into one connected region per group.

    Corridors are found by weighted shortest path: the scarce lobby (left
    of the chains) and cells hugging foreign terminals cost extra, so long
    hauls prefer the roomy area right of the chains and leave access to
    other groups' gates and entries open.  Groups are attempted in the
    given order; callers retry with other orders on failure.
    """

    FREE = -1
    SPINE = -2

    def __init__(
        self,
        artifact: ReductionArtifact,
        groups: Sequence[frozenset[int]],
        order: Sequence[int],
        farthest_first: bool = False,
    ):
        self.instance = artifact.instance
        self.cols = self.instance.grid_shape[1]
        self.groups = groups
        self.order = list(order)
        self.farthest_first = farthest_first
        self.adj0 = _zero_adjacency(self.instance)
        self.owner = [self.FREE] * self.instance.vertex_count
        for v in range(self.instance.vertex_count):
            if v % self.cols == 0:
                self.owner[v] = self.SPINE
        self.terminals: list[list[list[int]]] = []
        src = artifact.source_map
        for i, group in enumerate(groups):
            gate_cell = src["gate_edges"][i][1]
            comps = [[gate_cell]]
            for k in sorted(group):
                entry_out = src["entry_edge"][k][0]
                comps.append([entry_out] + src["chain_cells"][k])
            for comp in comps:
                for cell in comp:
                    self.owner[cell] = i
            self.terminals.append(comps)
        lobby_limit = artifact.params["W"] + 1
        terminal_cells = {
            c for comps in self.terminals for comp in comps for c in comp
        }
        self.cell_cost = [2] * self.instance.vertex_count
        for v in range(self.instance.vertex_count):
            if v % self.cols <= lobby_limit:
                self.cell_cost[v] += 3
        for c in terminal_cells:
            for w in self.adj0[c]:
                self.cell_cost[w] += 4

    def _corridor(self, i: int, connected: set[int]) -> tuple[int, list[int]] | None:
        """Cheapest free corridor from the connected region to another
        component of group i; returns its cost and cells (goal first)."""
        dist = {c: 0 for c in connected}
        prev = {c: c for c in connected}
        heap = [(0, c) for c in sorted(connected)]
        heapq.heapify(heap)
        goal = None
        goal_cost = 0
        while heap:
            d, x = heapq.heappop(heap)
            if d > dist.get(x, d):
                continue
            if self.owner[x] == i and x not in connected:
                goal = x
                goal_cost = d
                break
            for w in self.adj0[x]:
                if self.owner[w] == i and w not in connected:
                    nd = d  # reaching a goal component ends the search
                elif self.owner[w] == self.FREE:
                    nd = d + self.cell_cost[w]
                else:
                    continue
                if w not in dist or nd < dist[w]:
                    dist[w] = nd
                    prev[w] = x
                    heapq.heappush(heap, (nd, w))
        if goal is None:
            return None
        path = [goal]
        x = prev[goal]
        while x not in connected:
            path.append(x)
            x = prev[x]
        return goal_cost, path

    def _others_still_reachable(self, claimed: list[int]) -> bool:
        """Every unfinished group's components still connect over free cells."""
        for gi, comps in enumerate(self.terminals):
            if self.regions[gi] is not None:
                continue
            seen = set(comps[0])
            frontier = list(comps[0])
            while frontier:
                x = frontier.pop()
                for w in self.adj0[x]:
                    if w in seen:
                        continue
                    if self.owner[w] == gi or self.owner[w] == self.FREE:
                        seen.add(w)
                        frontier.append(w)
            for comp in comps[1:]:
                if not any(c in seen for c in comp):
                    return False
        return True

    def _claim(self, i: int, connected: set[int]) -> bool:
        """Claim the cheapest corridor for group i that seals nobody in."""
        claimed = None
        for _ in range(12):
            found = self._corridor(i, connected)
            if found is None:
                break
            _, path = found
            goal, corridor = path[0], path[1:]
            for x in corridor:
                self.owner[x] = i
            if self._others_still_reachable(corridor):
                claimed = (goal, corridor)
                break
            # rip up: this corridor seals someone in; effectively forbid
            # its cells so the next attempt takes a different route
            for x in corridor:
                self.owner[x] = self.FREE
                self.cell_cost[x] += 100_000
        if claimed is None:
            return False
        goal, corridor = claimed
        connected.update(corridor)
        stack = [goal]
        connected.add(goal)
        while stack:
            y = stack.pop()
            for w in self.adj0[y]:
                if self.owner[w] == i and w not in connected:
                    connected.add(w)
                    stack.append(w)
        return True

    def run(self) -> list[set[int]]:
        """Connect every group, globally nearest pending connection first.

        Local hookups claim local corridors before long hauls commit, so
        the long routes wrap around the finished structure instead of
        cutting it apart.
        """
        count = len(self.groups)
        self.regions = [None] * count
        connected = [set(comps[0]) for comps in self.terminals]
        pending = [
            [set(c) for c in comps[1:]] for comps in self.terminals
        ]
        while any(pending):
            ranked = []
            for i in self.order:
                if not pending[i]:
                    continue
                found = self._corridor(i, connected[i])
                if found is not None:
                    ranked.append((found[0], i))
            if not ranked:
                raise RoutingFailed("some group has no corridor to its chains")
            _, i = max(ranked) if self.farthest_first else min(ranked)
            if not self._claim(i, connected[i]):
                raise RoutingFailed(
                    f"group {i}: no corridor leaves every chain reachable"
                )
            pending[i] = [c for c in pending[i] if not c & connected[i]]
            if not pending[i]:
                self.regions[i] = connected[i]
        for i in range(count):
            self.regions[i] = connected[i]
        regions = self.regions
        # sweep remaining free cells onto adjacent regions
        queue = deque(
            v for v in range(self.instance.vertex_count) if self.owner[v] >= 0
        )
        while queue:
            x = queue.popleft()
            for w in self.adj0[x]:
                if self.owner[w] == self.FREE:
                    self.owner[w] = self.owner[x]
                    regions[self.owner[x]].add(w)
                    queue.append(w)
        if any(o == self.FREE for o in self.owner):
            raise RoutingFailed("free cells left unattached")
        return regions


def witness_tree_3partition(
    artifact: ReductionArtifact, groups: Iterable[Iterable[int]]
) -> SpanningTree:
    """Spanning tree realizing the threshold for a claimed triple balancing.

    Routes each group's chains through its own gate edge over free edges
    only, so each gate carries exactly a one-group share of demand.
    """
    instance = artifact.instance
    cols = instance.grid_shape[1]
    rows = instance.vertex_count // cols
    groups = [frozenset(g) for g in groups]
    item_count = len(artifact.source_map["chain_cells"])
    all_items = set(range(1, item_count + 1))
    claimed = [k for g in groups for k in g]
    if len(claimed) != len(set(claimed)) or set(claimed) != all_items:
        raise NotAPartition("groups must partition the item indices exactly")
    if len(groups) != len(artifact.source_map["gate_edges"]):
        raise NotAPartition(
            f"need {len(artifact.source_map['gate_edges'])} groups, got {len(groups)}"
        )
    values = {
        k: len(cells) for k, cells in artifact.source_map["chain_cells"].items()
    }
    share = sum(values.values()) // len(groups)
    for i, g in enumerate(groups):
        if sum(values[k] for k in g) != share:
            raise Unbalanced(f"group {i} sums to {sum(values[k] for k in g)} != {share}")

    count = len(groups)
    orders = [list(range(count)), list(reversed(range(count)))]
    router = None
    failure: RoutingFailed | None = None
    for farthest in (False, True):
        for order in orders:
            candidate = _RegionRouter(artifact, groups, order, farthest_first=farthest)
            try:
                regions = candidate.run()
                router = candidate
                break
            except RoutingFailed as exc:
                failure = exc
        if router is not None:
            break
    if router is None:
        raise failure

    edges: list[tuple[int, int]] = []
    for i in range(rows - 1):
        edges.append((i * cols, (i + 1) * cols))
    adj0 = router.adj0
    for i, region in enumerate(regions):
        gate_u, gate_v = artifact.source_map["gate_edges"][i]
        edges.append((gate_u, gate_v))
        seen = {gate_v}
        queue = deque([gate_v])
        while queue:
            x = queue.popleft()
            for w in adj0[x]:
                if router.owner[w] == i and w not in seen:
                    seen.add(w)
                    edges.append((x, w))
                    queue.append(w)
        if seen != region:
            raise RoutingFailed(f"region {i} is not internally connected")
    return from_edges(instance, edges)
