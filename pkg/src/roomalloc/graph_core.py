"""Relation graphs, room assignments and the intra-room link objective."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

NodeId = str


class ValidationError(ValueError):
    """Input that breaks a structural rule (self-loop, unknown node, bad K...)."""


class InfeasibleError(ValidationError):
    """A well-formed request that cannot be satisfied (e.g. more rooms than nodes)."""


class Graph:
    """Undirected, unweighted simple graph over string node ids.

    Nodes are kept in lexicographic order so that every derived quantity is
    independent of insertion order.  ``adj`` holds neighbor *indices* into
    ``nodes``; solvers work on indices, callers on ids.
    """

    __slots__ = ("nodes", "index", "adj", "edge_count")

    def __init__(self, nodes: Iterable[NodeId], edges: Iterable[tuple[NodeId, NodeId]]):
        self.nodes: tuple[NodeId, ...] = tuple(sorted(set(nodes)))
        self.index: dict[NodeId, int] = {v: i for i, v in enumerate(self.nodes)}
        adj: list[set[int]] = [set() for _ in self.nodes]
        for u, v in edges:
            if u == v:
                raise ValidationError(f"self-loop on node {u!r} in pair ({u!r}, {v!r})")
            i, j = self.index[u], self.index[v]
            adj[i].add(j)
            adj[j].add(i)
        self.adj: tuple[frozenset[int], ...] = tuple(frozenset(s) for s in adj)
        self.edge_count: int = sum(len(s) for s in adj) // 2

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, v: object) -> bool:
        return v in self.index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.nodes == other.nodes and self.adj == other.adj

    def __repr__(self) -> str:
        return f"Graph(nodes={len(self.nodes)}, edges={self.edge_count})"

    def neighbors(self, v: NodeId) -> frozenset[NodeId]:
        return frozenset(self.nodes[j] for j in self.adj[self._idx(v)])

    def degree(self, v: NodeId) -> int:
        return len(self.adj[self._idx(v)])

    def edges(self) -> list[tuple[NodeId, NodeId]]:
        """Sorted list of edges, each as ``(u, v)`` with ``u < v``."""
        out = []
        for i, nbrs in enumerate(self.adj):
            for j in sorted(nbrs):
                if j > i:
                    out.append((self.nodes[i], self.nodes[j]))
        return out

    def _idx(self, v: NodeId) -> int:
        try:
            return self.index[v]
        except KeyError:
            raise ValidationError(f"unknown node {v!r}") from None


def build_graph(
    edges: Iterable[tuple[NodeId, NodeId]], isolated: Iterable[NodeId] = ()
) -> Graph:
    edges = list(edges)
    for u, v in edges:
        if u == v:
            raise ValidationError(f"self-loop pair ({u!r}, {v!r})")
    nodes = {x for e in edges for x in e}
    nodes.update(isolated)
    return Graph(nodes, edges)


def capacity_for(node_count: int, K: int) -> int:
    """Uniform room capacity ``ceil(node_count / K)``."""
    if K < 1:
        raise ValidationError(f"room count must be >= 1, got {K}")
    if node_count < 0:
        raise ValidationError(f"node count must be >= 0, got {node_count}")
    return -(-node_count // K)


def check_room_count(node_count: int, K: int) -> None:
    """Reject K outside ``1..node_count`` (K == node_count is allowed)."""
    if K < 1:
        raise ValidationError(f"room count must be >= 1, got {K}")
    if K > node_count:
        raise InfeasibleError(
            f"room count {K} exceeds node count {node_count}; rooms must be fewer than detainees"
        )


@dataclass(frozen=True)
class Assignment:
    """Node -> room map with K rooms (numbered 1..K) of uniform capacity S."""

    room_of: Mapping[NodeId, int]
    K: int
    S: int

    def __post_init__(self) -> None:
        if self.K < 1:
            raise ValidationError(f"room count must be >= 1, got {self.K}")
        if self.S < 1:
            raise ValidationError(f"room capacity must be >= 1, got {self.S}")
        rooms = dict(self.room_of)
        for v, k in rooms.items():
            if not isinstance(k, int) or isinstance(k, bool) or not 1 <= k <= self.K:
                raise ValidationError(f"node {v!r} has room {k!r}, expected 1..{self.K}")
        object.__setattr__(self, "room_of", MappingProxyType(dict(sorted(rooms.items()))))

    @classmethod
    def for_graph(cls, g: Graph, room_of: Mapping[NodeId, int], K: int) -> "Assignment":
        return cls(room_of, K, capacity_for(len(g), K))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Assignment):
            return NotImplemented
        return (self.K, self.S, dict(self.room_of)) == (other.K, other.S, dict(other.room_of))

    def __hash__(self) -> int:
        return hash((self.K, self.S, tuple(self.room_of.items())))

    def room_sizes(self) -> list[int]:
        sizes = [0] * self.K
        for k in self.room_of.values():
            sizes[k - 1] += 1
        return sizes

    def members(self, k: int) -> list[NodeId]:
        return [v for v, r in self.room_of.items() if r == k]

    def moved(self, v: NodeId, k: int) -> "Assignment":
        """Copy of this assignment with ``v`` relocated to room ``k``."""
        if v not in self.room_of:
            raise ValidationError(f"unknown node {v!r}")
        rooms = dict(self.room_of)
        rooms[v] = k
        return Assignment(rooms, self.K, self.S)


@dataclass(frozen=True)
class ObjectiveReport:
    intra_links: int
    inter_links: int
    per_room_links: tuple[int, ...]


@dataclass(frozen=True)
class MoveDelta:
    """Change in intra-room links if ``node`` moved from ``from_room`` to ``to_room``."""

    node: NodeId
    from_room: int
    to_room: int
    delta: int
    feasible: bool


@dataclass(frozen=True)
class Violation:
    kind: str  # "uncovered" | "unknown_node" | "capacity"
    node: Optional[NodeId] = None
    room: Optional[int] = None
    size: Optional[int] = None

    def message(self) -> str:
        if self.kind == "capacity":
            return f"room {self.room} holds {self.size} nodes, above capacity"
        if self.kind == "uncovered":
            return f"node {self.node!r} has no room"
        return f"assignment names node {self.node!r} which is not in the graph"


@dataclass(frozen=True)
class GraphStats:
    node_count: int
    link_count: int
    avg_degree: Optional[Fraction]  # None for the empty graph
    components: int

    def avg_degree_str(self) -> Optional[str]:
        return None if self.avg_degree is None else f"{float(self.avg_degree):.3f}"


def _check_cover(g: Graph, a: Assignment) -> None:
    for v in a.room_of:
        if v not in g.index:
            raise ValidationError(f"assignment references unknown node {v!r}")
    if len(a.room_of) != len(g.nodes):
        missing = [v for v in g.nodes if v not in a.room_of]
        raise ValidationError(f"assignment does not cover nodes {missing[:5]!r}")


def objective(g: Graph, a: Assignment, *, strict: bool = True) -> ObjectiveReport:
    """Count intra-room links, in total and per room.

    With ``strict=False`` unassigned nodes are skipped instead of raising,
    so an incomplete assignment can still be scored for reporting.
    """
    if strict:
        _check_cover(g, a)
    per_room = [0] * a.K
    inter = 0
    for u, v in g.edges():
        ru, rv = a.room_of.get(u), a.room_of.get(v)
        if ru is None or rv is None:
            continue
        if ru == rv:
            per_room[ru - 1] += 1
        else:
            inter += 1
    intra = sum(per_room)
    return ObjectiveReport(intra, inter, tuple(per_room))


def neighbors_in_room(g: Graph, a: Assignment, v: NodeId, k: int) -> int:
    """Number of neighbors of ``v`` currently placed in room ``k``."""
    i = g._idx(v)
    if not 1 <= k <= a.K:
        raise ValidationError(f"room {k} outside 1..{a.K}")
    return sum(1 for j in g.adj[i] if a.room_of.get(g.nodes[j]) == k)


def delta_move(g: Graph, a: Assignment, v: NodeId, k: int) -> MoveDelta:
    if v not in a.room_of:
        raise ValidationError(f"node {v!r} is not assigned")
    r = a.room_of[v]
    if k == r:
        raise ValidationError(f"node {v!r} is already in room {k}; not a move")
    gain = neighbors_in_room(g, a, v, k)
    loss = neighbors_in_room(g, a, v, r)
    size_k = sum(1 for x in a.room_of.values() if x == k)
    return MoveDelta(v, r, k, gain - loss, size_k < a.S)


def validate(g: Graph, a: Assignment) -> list[Violation]:
    out = [Violation("uncovered", node=v) for v in g.nodes if v not in a.room_of]
    out += [Violation("unknown_node", node=v) for v in a.room_of if v not in g.index]
    for k, size in enumerate(a.room_sizes(), start=1):
        if size > a.S:
            out.append(Violation("capacity", room=k, size=size))
    return out


def stats(g: Graph) -> GraphStats:
    n = len(g.nodes)
    if n == 0:
        return GraphStats(0, 0, None, 0)
    seen = [False] * n
    components = 0
    for s in range(n):
        if seen[s]:
            continue
        components += 1
        seen[s] = True
        stack = [s]
        while stack:
            i = stack.pop()
            for j in g.adj[i]:
                if not seen[j]:
                    seen[j] = True
                    stack.append(j)
    return GraphStats(n, g.edge_count, Fraction(2 * g.edge_count, n), components)
