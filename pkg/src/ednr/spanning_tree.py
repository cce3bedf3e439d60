"""Rooted spanning trees, exact loss evaluation, and subtree size profiles.

A SpanningTree stores, for every non-root vertex, its parent on the unique
path toward the root.  Loss evaluation aggregates downstream demand in one
bottom-up pass: the loss of a tree is the sum over tree edges of
resistance * (total demand hanging below the edge)^2, always computed in
exact integer arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

from .errors import NotAGrid, NotSpanning, ParseError
from .instance import Edge, Instance, canonical_edge, levels


@dataclass(frozen=True)
class SpanningTree:
    """Parent-map representation; parents[root] == -1."""

    root: int
    parents: tuple[int, ...]

    @cached_property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(
            canonical_edge(v, p) for v, p in enumerate(self.parents) if p >= 0
        )

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        kids: list[list[int]] = [[] for _ in self.parents]
        for v, p in enumerate(self.parents):
            if p >= 0:
                kids[p].append(v)
        return tuple(tuple(k) for k in kids)

    def parent_of(self, v: int) -> int | None:
        p = self.parents[v]
        return None if p < 0 else p

    def topological_order(self) -> list[int]:
        """Vertices ordered root-first; every parent precedes its children."""
        order = [self.root]
        for v in order:
            order.extend(self.children[v])
        return order

    def subtree_sizes(self) -> list[int]:
        """Number of vertices in the subtree rooted at each vertex."""
        sizes = [1] * len(self.parents)
        for v in reversed(self.topological_order()):
            p = self.parents[v]
            if p >= 0:
                sizes[p] += sizes[v]
        return sizes


@dataclass(frozen=True)
class LossReport:
    """Exact loss of a tree, with per-level breakdown on grids.

    per_level, present only for grid instances, lists the loss contributed
    by the edges at grid distance k from the root, for k = 1 .. n+m-2
    (per_level[k-1] is the level-k loss).
    """

    total: int
    downstream: dict[Edge, int]
    per_level: tuple[int, ...] | None = None

    def level_loss(self, k: int) -> int:
        if self.per_level is None:
            raise NotAGrid("per-level losses exist only for grid instances")
        return self.per_level[k - 1]


@dataclass(frozen=True)
class SubtreeProfile:
    """Sorted subtree sizes per level of a grid tree.

    by_level[k-1] holds, in ascending order, the sizes of the subtrees
    rooted at the vertices at grid distance k, for k = 1 .. n+m-2.
    """

    rows: int
    cols: int
    by_level: tuple[tuple[int, ...], ...]

    @property
    def depth(self) -> int:
        return self.rows + self.cols - 2

    def sizes(self, k: int) -> tuple[int, ...]:
        return self.by_level[k - 1]

    def items(self) -> Iterator[tuple[int, tuple[int, ...]]]:
        for k, sizes in enumerate(self.by_level, start=1):
            yield k, sizes

    def loss(self) -> int:
        """Sum of squared subtree sizes over all levels.

        For a tree whose every parent sits one level closer to the root
        (as Min-Min trees are), this equals the tree's uniform-demand loss.
        """
        return sum(a * a for sizes in self.by_level for a in sizes)


def from_edges(instance: Instance, edges: Iterable[tuple[int, int]]) -> SpanningTree:
    """Orient an edge set into a rooted tree, or raise NotSpanning."""
    chosen = {canonical_edge(u, v) for u, v in edges}
    if len(chosen) != instance.vertex_count - 1:
        raise NotSpanning(
            f"need {instance.vertex_count - 1} distinct edges, got {len(chosen)}"
        )
    index = instance.edge_index
    for e in chosen:
        if e not in index:
            raise NotSpanning(f"edge {e} does not exist in the instance")

    adj: list[list[int]] = [[] for _ in range(instance.vertex_count)]
    for u, v in chosen:
        adj[u].append(v)
        adj[v].append(u)
    parents = [-1] * instance.vertex_count
    seen = [False] * instance.vertex_count
    seen[instance.root] = True
    stack = [instance.root]
    reached = 1
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                parents[w] = u
                reached += 1
                stack.append(w)
    if reached != instance.vertex_count:
        raise NotSpanning("edge set does not connect all vertices")
    return SpanningTree(root=instance.root, parents=tuple(parents))


def evaluate(instance: Instance, tree: SpanningTree) -> LossReport:
    """Exact loss of the tree on the instance."""
    order = tree.topological_order()
    if len(order) != instance.vertex_count:
        raise NotSpanning("tree does not span the instance")
    below = list(instance.demands)
    for v in reversed(order):
        p = tree.parents[v]
        if p >= 0:
            below[p] += below[v]

    downstream: dict[Edge, int] = {}
    total = 0
    index = instance.edge_index
    for v, p in enumerate(tree.parents):
        if p < 0:
            continue
        e = canonical_edge(v, p)
        downstream[e] = below[v]
        total += instance.resistances[index[e]] * below[v] * below[v]

    per_level = None
    if instance.grid_shape is not None:
        lv = levels(instance)
        acc = [0] * (lv.depth + 1)
        for v, p in enumerate(tree.parents):
            if p < 0:
                continue
            e = canonical_edge(v, p)
            k = max(lv.level_of[e[0]], lv.level_of[e[1]])
            acc[k] += instance.resistances[index[e]] * downstream[e] ** 2
        per_level = tuple(acc[1:])
    return LossReport(total=total, downstream=downstream, per_level=per_level)


def subtree_size_profile(instance: Instance, tree: SpanningTree) -> SubtreeProfile:
    """Sorted subtree sizes grouped by grid level."""
    if instance.grid_shape is None:
        raise NotAGrid("subtree profiles exist only for grid instances")
    rows, cols = instance.grid_shape
    lv = levels(instance)
    sizes = tree.subtree_sizes()
    per: list[list[int]] = [[] for _ in range(lv.depth + 1)]
    for v in range(instance.vertex_count):
        per[lv.level_of[v]].append(sizes[v])
    return SubtreeProfile(
        rows=rows,
        cols=cols,
        by_level=tuple(tuple(sorted(p)) for p in per[1:]),
    )


def export_dot(instance: Instance, tree: SpanningTree | None = None) -> str:
    """Deterministic Graphviz text; tree edges drawn bold red.

    Grid instances get pinned positions (column, -row) so `neato -n` lays
    the drawing out as the grid.
    """
    lines = ["graph network {", "  node [shape=circle fontsize=10];"]
    for v in range(instance.vertex_count):
        attrs = []
        if instance.grid_shape is not None:
            i, j = instance.cell_of(v)
            attrs.append(f'pos="{j},{-i}!"')
        if v == instance.root:
            attrs.append("shape=doublecircle")
        label = f"{v}"
        if instance.demands[v]:
            label += f"\\nd={instance.demands[v]}"
        attrs.append(f'label="{label}"')
        lines.append(f'  {v} [{" ".join(attrs)}];')
    tree_edges = tree.edge_set if tree is not None else frozenset()
    for (u, v), r in zip(instance.edges, instance.resistances):
        attrs = [f'label="{r}"'] if r else []
        if (u, v) in tree_edges:
            attrs += ["color=red", "penwidth=2"]
        suffix = f' [{" ".join(attrs)}]' if attrs else ""
        lines.append(f"  {u} -- {v}{suffix};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def serialize_tree(tree: SpanningTree) -> str:
    doc = {
        "root": tree.root,
        "parent": {str(v): p for v, p in enumerate(tree.parents) if p >= 0},
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def parse_tree(text: str, instance: Instance) -> SpanningTree:
    """Parse the tree schema and validate it against the instance."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict) or "root" not in doc or "parent" not in doc:
        raise ParseError('tree document needs "root" and "parent" fields')
    if doc["root"] != instance.root:
        raise ParseError(f'tree root {doc["root"]} differs from instance root')
    try:
        pairs = [(int(v), int(p)) for v, p in doc["parent"].items()]
    except (ValueError, AttributeError) as exc:
        raise ParseError("parent map must take integer ids to integer ids") from exc
    return from_edges(instance, pairs)
