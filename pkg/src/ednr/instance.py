"""Instance model: rooted graphs with integer demands and resistances.

An Instance is an immutable, validated description of a distribution
network: a connected simple graph, a root vertex, a non-negative integer
demand per non-root vertex and a non-negative integer resistance per edge.
Grid instances additionally carry their (rows, columns) shape; vertices of
an n x m grid are numbered row-major, id = i*m + j for cell (i, j).

All quantities are exact integers.  Loss arithmetic elsewhere relies on
Python's arbitrary-precision ints, so instances produced by the reduction
encoders (whose resistances grow cubically in the total demand) evaluate
without overflow.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .errors import (
    Disconnected,
    DuplicateEdge,
    NegativeValue,
    NotAGrid,
    ParseError,
    RootDemandPresent,
    SelfLoop,
)

Edge = tuple[int, int]


def canonical_edge(u: int, v: int) -> Edge:
    """Unordered edge as an ordered pair (min, max)."""
    return (u, v) if u < v else (v, u)


def grid_edges(rows: int, cols: int) -> list[Edge]:
    """Canonical edge list of the rows x cols grid (row-major ids)."""
    edges: list[Edge] = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                edges.append((v, v + 1))
            if i + 1 < rows:
                edges.append((v, v + cols))
    edges.sort()
    return edges


@dataclass(frozen=True)
class Instance:
    """Validated rooted network.  Construct via make_general / make_grid."""

    vertex_count: int
    root: int
    edges: tuple[Edge, ...]
    resistances: tuple[int, ...]
    demands: tuple[int, ...]
    grid_shape: tuple[int, int] | None = None

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """adjacency[v] = ((neighbor, edge_index), ...)."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.vertex_count)]
        for idx, (u, v) in enumerate(self.edges):
            adj[u].append((v, idx))
            adj[v].append((u, idx))
        return tuple(tuple(a) for a in adj)

    @cached_property
    def total_demand(self) -> int:
        return sum(self.demands)

    def resistance(self, u: int, v: int) -> int:
        return self.resistances[self.edge_index[canonical_edge(u, v)]]

    def cell_of(self, vertex: int) -> tuple[int, int]:
        if self.grid_shape is None:
            raise NotAGrid("instance has no grid shape")
        _, cols = self.grid_shape
        return divmod(vertex, cols)

    def vertex_at(self, i: int, j: int) -> int:
        if self.grid_shape is None:
            raise NotAGrid("instance has no grid shape")
        return i * self.grid_shape[1] + j


@dataclass(frozen=True)
class GridLevels:
    """Anti-diagonal decomposition of a grid instance.

    level_of[v] is the grid distance i + j of vertex v from the corner;
    sizes[k] counts the vertices at distance k; level_edges[k] lists the
    indices of edges joining distance k-1 to distance k (level_edges[0] is
    empty).  Every grid edge belongs to exactly one level.
    """

    level_of: tuple[int, ...]
    sizes: tuple[int, ...]
    level_edges: tuple[tuple[int, ...], ...]

    @property
    def depth(self) -> int:
        """Largest level index, n + m - 2."""
        return len(self.sizes) - 1

    def suffix_count(self, k: int) -> int:
        """Number of vertices at level k or deeper."""
        return sum(self.sizes[k:])


def _check_connected(vertex_count: int, edges: Iterable[Edge]) -> None:
    adj: list[list[int]] = [[] for _ in range(vertex_count)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = [False] * vertex_count
    seen[0] = True
    stack = [0]
    reached = 1
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                reached += 1
                stack.append(w)
    if reached != vertex_count:
        raise Disconnected(f"graph reaches {reached} of {vertex_count} vertices")


def make_general(
    edges: Iterable[tuple[int, int]],
    root: int,
    demands: Mapping[int, int] | None = None,
    resistances: Mapping[tuple[int, int], int] | None = None,
    vertex_count: int | None = None,
    grid_shape: tuple[int, int] | None = None,
) -> Instance:
    """Validate and freeze a general instance.

    Demands and resistances not mentioned default to 0.  vertex_count
    defaults to one past the largest id mentioned by an edge or the root.
    """
    canon: list[Edge] = []
    for u, v in edges:
        if u == v:
            raise SelfLoop(f"edge ({u}, {v}) is a self-loop")
        canon.append(canonical_edge(u, v))
    canon.sort()
    for a, b in zip(canon, canon[1:]):
        if a == b:
            raise DuplicateEdge(f"edge {a} appears more than once")

    ids = [root] + [w for e in canon for w in e]
    if min(ids) < 0:
        raise ParseError("vertex ids must be non-negative")
    count = vertex_count if vertex_count is not None else max(ids) + 1
    if max(ids) >= count:
        raise ParseError(f"vertex id {max(ids)} out of range for {count} vertices")

    res_map = dict(resistances or {})
    res: list[int] = []
    for e in canon:
        r = res_map.get(e)
        if r is None:
            r = res_map.get((e[1], e[0]), 0)
        if r < 0:
            raise NegativeValue(f"resistance of edge {e} is negative")
        res.append(int(r))

    dem = [0] * count
    for v, d in (demands or {}).items():
        v = int(v)
        if v < 0 or v >= count:
            raise ParseError(f"demand vertex {v} out of range")
        if d < 0:
            raise NegativeValue(f"demand of vertex {v} is negative")
        if v == root and d != 0:
            raise RootDemandPresent("the root carries no demand")
        dem[v] = int(d)

    if count > 1:
        _check_connected(count, canon)
    if grid_shape is not None:
        n, m = grid_shape
        if n < 1 or m < 1 or n * m != count:
            raise NotAGrid(f"grid shape {grid_shape} does not match {count} vertices")
        if canon != grid_edges(n, m):
            raise NotAGrid("edge set is not exactly the grid edge set")

    return Instance(
        vertex_count=count,
        root=root,
        edges=tuple(canon),
        resistances=tuple(res),
        demands=tuple(dem),
        grid_shape=grid_shape,
    )


def make_grid(
    rows: int,
    cols: int,
    demands: Mapping[int, int] | None = None,
    resistances: Mapping[tuple[int, int], int] | None = None,
    root: int = 0,
) -> Instance:
    """Grid instance with arbitrary demands/resistances (defaults 0)."""
    if rows < 1 or cols < 1:
        raise NotAGrid(f"grid shape ({rows}, {cols}) invalid")
    return make_general(
        grid_edges(rows, cols),
        root=root,
        demands=demands,
        resistances=resistances,
        vertex_count=rows * cols,
        grid_shape=(rows, cols),
    )


def make_uniform_grid(rows: int, cols: int) -> Instance:
    """Grid with unit demand at every non-root vertex and unit resistances."""
    count = rows * cols
    demands = {v: 1 for v in range(1, count)}
    resistances = {e: 1 for e in grid_edges(rows, cols)}
    return make_grid(rows, cols, demands=demands, resistances=resistances)


def levels(instance: Instance) -> GridLevels:
    """Anti-diagonal levels of a grid instance."""
    if instance.grid_shape is None:
        raise NotAGrid("levels() requires a grid instance")
    n, m = instance.grid_shape
    level_of = tuple((v // m) + (v % m) for v in range(instance.vertex_count))
    depth = n + m - 2
    sizes = [0] * (depth + 1)
    for k in level_of:
        sizes[k] += 1
    per_level: list[list[int]] = [[] for _ in range(depth + 1)]
    for idx, (u, v) in enumerate(instance.edges):
        per_level[max(level_of[u], level_of[v])].append(idx)
    return GridLevels(
        level_of=level_of,
        sizes=tuple(sizes),
        level_edges=tuple(tuple(ix) for ix in per_level),
    )


def serialize(instance: Instance) -> str:
    """Canonical JSON text; parse(serialize(x)) == x."""
    doc = {
        "vertices": instance.vertex_count,
        "root": instance.root,
        "grid": (
            None
            if instance.grid_shape is None
            else {"n": instance.grid_shape[0], "m": instance.grid_shape[1]}
        ),
        "edges": [
            [u, v, r] for (u, v), r in zip(instance.edges, instance.resistances)
        ],
        "demands": {
            str(v): d for v, d in enumerate(instance.demands) if d != 0
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def parse(text: str) -> Instance:
    """Parse the JSON instance schema, with field-level diagnostics."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top-level value must be an object")

    def need(field: str, types: tuple) -> object:
        if field not in doc:
            raise ParseError(f"missing required field '{field}'")
        value = doc[field]
        if not isinstance(value, types):
            raise ParseError(f"field '{field}' has wrong type")
        return value

    count = need("vertices", (int,))
    root = need("root", (int,))
    raw_edges = need("edges", (list,))
    edges: list[Edge] = []
    resistances: dict[Edge, int] = {}
    for pos, item in enumerate(raw_edges):
        if (
            not isinstance(item, list)
            or len(item) != 3
            or not all(isinstance(x, int) for x in item)
        ):
            raise ParseError(f"edges[{pos}]: expected [u, v, resistance] integers")
        u, v, r = item
        if r < 0:
            raise ParseError(f"edges[{pos}]: negative resistance {r}")
        edges.append((u, v))
        resistances[canonical_edge(u, v)] = r

    demands: dict[int, int] = {}
    raw_demands = doc.get("demands", {})
    if not isinstance(raw_demands, dict):
        raise ParseError("field 'demands' must be an object")
    for key, d in raw_demands.items():
        try:
            v = int(key)
        except ValueError:
            raise ParseError(f"demands key '{key}' is not an integer id") from None
        if not isinstance(d, int) or d < 0:
            raise ParseError(f"demands[{key}]: expected a non-negative integer")
        demands[v] = d

    grid = doc.get("grid")
    shape = None
    if grid is not None:
        if (
            not isinstance(grid, dict)
            or not isinstance(grid.get("n"), int)
            or not isinstance(grid.get("m"), int)
        ):
            raise ParseError("field 'grid' must be null or {\"n\": int, \"m\": int}")
        shape = (grid["n"], grid["m"])

    try:
        return make_general(
            edges,
            root=root,
            demands=demands,
            resistances=resistances,
            vertex_count=count,
            grid_shape=shape,
        )
    except ParseError:
        raise
    except Exception as exc:  # validation errors carry their own message
        raise ParseError(str(exc)) from exc


def random_connected_instance(
    rng: random.Random,
    vertex_count: int,
    extra_edges: int = 3,
    max_demand: int = 5,
    max_resistance: int = 3,
) -> Instance:
    """Random connected simple instance: a random tree plus extra edges."""
    edges: set[Edge] = set()
    for v in range(1, vertex_count):
        edges.add(canonical_edge(v, rng.randrange(v)))
    candidates = [
        (u, v)
        for u in range(vertex_count)
        for v in range(u + 1, vertex_count)
        if (u, v) not in edges
    ]
    rng.shuffle(candidates)
    edges.update(candidates[:extra_edges])
    demands = {v: rng.randint(0, max_demand) for v in range(1, vertex_count)}
    resistances = {e: rng.randint(0, max_resistance) for e in edges}
    return make_general(sorted(edges), root=0, demands=demands, resistances=resistances)
