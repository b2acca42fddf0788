"""Room allocation solvers.

``hfa`` places nodes hub-first, each into the non-full room where it has the
fewest neighbors.  ``lga`` improves an existing allocation with a bounded
number of single-node relocations.  ``exact`` is an exhaustive branch and
bound used as a small-instance oracle; ``random_baseline`` stands in for a
manual allocation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .graph_core import (
    Assignment,
    Graph,
    InfeasibleError,
    NodeId,
    ValidationError,
    capacity_for,
    check_room_count,
    objective,
    validate,
)

EXACT_MAX_NODES = 12


class OracleBoundError(InfeasibleError):
    """Instance too large for the exhaustive solver."""


@dataclass(frozen=True)
class SolverConfig:
    K: int
    seed: int = 0
    # Moved nodes may rejoin the LGA candidate queue.  Off by default.
    allow_reentry: bool = False


@dataclass(frozen=True)
class AdjustPlan:
    """Budget of ``m`` relocations.

    With ``stop_on_no_gain`` the run ends at the first step whose best move
    does not lower the objective.  Without it, zero-gain moves are taken too
    (they shift free capacity between rooms); a move that would raise the
    objective always ends the run.
    """

    m: int
    stop_on_no_gain: bool = True

    def __post_init__(self) -> None:
        if self.m < 0:
            raise ValidationError(f"adjustment budget must be >= 0, got {self.m}")


@dataclass(frozen=True)
class MoveRecord:
    node: NodeId
    from_room: Optional[int]  # None for an initial HFA placement
    to_room: int
    delta: int

    def to_dict(self) -> dict:
        return {
            "node": self.node,
            "from_room": self.from_room,
            "to_room": self.to_room,
            "delta": self.delta,
        }


@dataclass(frozen=True)
class CurvePoint:
    adjustments_done: int
    objective: int


@dataclass(frozen=True)
class SolveResult:
    assignment: Assignment
    moves: tuple[MoveRecord, ...]
    stopped_early: bool = False


def hfa(g: Graph, cfg: SolverConfig) -> SolveResult:
    """Hub first assignment.

    Nodes are visited by descending degree (ties by node id).  Each goes to
    a room with remaining capacity minimising its neighbor count there; ties
    between rooms are broken with ``random.Random(cfg.seed)``.  Full rooms are
    simply excluded, which is the same as giving them a cost above any
    achievable count.

    Room choice costs O(deg) expected rather than O(K): when some open room
    has no neighbor of the node the minimum is zero, and such a room is found
    by rejection sampling over the open rooms.
    """
    n = len(g)
    check_room_count(n, cfg.K)
    K, S = cfg.K, capacity_for(n, cfg.K)
    rng = random.Random(cfg.seed)
    order = sorted(range(n), key=lambda i: (-len(g.adj[i]), g.nodes[i]))
    room = [-1] * n
    size = [0] * K
    # open rooms in a swap-remove list so that removal and uniform sampling are O(1)
    open_rooms = list(range(K))
    pos = list(range(K))
    moves = []
    for i in order:
        count: dict[int, int] = {}
        for j in g.adj[i]:
            r = room[j]
            if r >= 0 and size[r] < S:
                count[r] = count.get(r, 0) + 1
        free = len(open_rooms) - len(count)
        if free > 0:
            # some open room holds no neighbor: pick uniformly among those
            best = 0
            if 4 * free >= len(open_rooms):
                k = open_rooms[rng.randrange(len(open_rooms))]
                while k in count:
                    k = open_rooms[rng.randrange(len(open_rooms))]
            else:
                k = rng.choice(sorted(r for r in open_rooms if r not in count))
        else:
            best = min(count.values())
            ties = sorted(r for r, c in count.items() if c == best)
            k = ties[0] if len(ties) == 1 else rng.choice(ties)
        room[i] = k
        size[k] += 1
        if size[k] >= S:
            last = open_rooms.pop()
            if last != k:
                open_rooms[pos[k]] = last
                pos[last] = pos[k]
        moves.append(MoveRecord(g.nodes[i], None, k + 1, best))
    rooms = {g.nodes[i]: room[i] + 1 for i in range(n)}
    return SolveResult(Assignment(rooms, K, S), tuple(moves))


class _RoomState:
    """Mutable index-based view of an assignment with incremental bookkeeping."""

    def __init__(self, g: Graph, a: Assignment):
        self.g = g
        self.K, self.S = a.K, a.S
        self.room = [a.room_of[v] - 1 for v in g.nodes]
        self.size = [0] * a.K
        for r in self.room:
            self.size[r] += 1
        self.intra = [
            sum(1 for j in g.adj[i] if self.room[j] == self.room[i]) for i in range(len(g))
        ]
        self.f = sum(self.intra) // 2
        self.open_rooms = {k for k in range(a.K) if self.size[k] < a.S}

    def _open_counts(self, i: int) -> dict[int, int]:
        r = self.room[i]
        count: dict[int, int] = {}
        for j in self.g.adj[i]:
            rj = self.room[j]
            if rj != r and rj in self.open_rooms:
                count[rj] = count.get(rj, 0) + 1
        return count

    def best_move(self, i: int) -> tuple[Optional[int], int]:
        """Minimum relocation delta for node ``i`` and how many rooms achieve it.

        Costs O(deg) rather than O(open rooms): rooms without neighbors of
        ``i`` are counted, not listed.
        """
        count = self._open_counts(i)
        targets = len(self.open_rooms) - (self.room[i] in self.open_rooms)
        if targets == 0:
            return None, 0
        empty = targets - len(count)
        if empty:
            return -self.intra[i], empty
        low = min(count.values())
        return low - self.intra[i], sum(1 for c in count.values() if c == low)

    def rooms_for(self, i: int, delta: int) -> list[int]:
        """Open rooms (sorted) where moving ``i`` changes the objective by ``delta``."""
        count = self._open_counts(i)
        want = delta + self.intra[i]
        r = self.room[i]
        return [k for k in sorted(self.open_rooms) if k != r and count.get(k, 0) == want]

    def move(self, i: int, k: int) -> None:
        r = self.room[i]
        for j in self.g.adj[i]:
            rj = self.room[j]
            if rj == r:
                self.intra[j] -= 1
                self.intra[i] -= 1
                self.f -= 1
            elif rj == k:
                self.intra[j] += 1
                self.intra[i] += 1
                self.f += 1
        self.room[i] = k
        self.size[r] -= 1
        self.size[k] += 1
        self.open_rooms.add(r)
        if self.size[k] >= self.S:
            self.open_rooms.discard(k)

    def assignment(self) -> Assignment:
        return Assignment(
            {v: self.room[i] + 1 for i, v in enumerate(self.g.nodes)}, self.K, self.S
        )


def _check_start(g: Graph, start: Assignment) -> None:
    problems = validate(g, start)
    if problems:
        detail = "; ".join(p.message() for p in problems[:5])
        raise ValidationError(f"start assignment is invalid: {detail}")


def lga(g: Graph, start: Assignment, plan: AdjustPlan, cfg: SolverConfig) -> SolveResult:
    """Local greedy assignment: at most ``plan.m`` single-node relocations.

    A queue holds the ``m`` nodes with the most intra-room links.  Each step
    moves the queue member whose best feasible relocation lowers the
    objective the most, drops it from the queue and refills the queue with
    the highest intra-link node not yet queued (and, unless
    ``cfg.allow_reentry``, not yet moved).
    """
    _check_start(g, start)
    if plan.m == 0:
        return SolveResult(start, ())
    rng = random.Random(cfg.seed)
    st = _RoomState(g, start)
    n = len(g)
    rank = lambda i: (-st.intra[i], g.nodes[i])  # noqa: E731
    queue = sorted(range(n), key=rank)[: plan.m]
    in_queue = [False] * n
    for i in queue:
        in_queue[i] = True
    moved = [False] * n
    moves = []
    stopped = False
    for _ in range(plan.m):
        best = None
        cands: list[tuple[int, int]] = []  # (node, number of tied rooms)
        for i in queue:
            d, ties = st.best_move(i)
            if d is None:
                continue
            if best is None or d < best:
                best, cands = d, [(i, ties)]
            elif d == best:
                cands.append((i, ties))
        if best is None or best > 0 or (plan.stop_on_no_gain and best == 0):
            stopped = True
            break
        # uniform over all tied (node, room) pairs
        pick = rng.randrange(sum(t for _, t in cands)) if len(cands) > 1 or cands[0][1] > 1 else 0
        for i, ties in cands:
            if pick < ties:
                break
            pick -= ties
        k = st.rooms_for(i, best)[pick]
        r = st.room[i]
        before = st.f
        st.move(i, k)
        moves.append(MoveRecord(g.nodes[i], r + 1, k + 1, st.f - before))
        queue.remove(i)
        in_queue[i] = False
        moved[i] = True
        refill = None
        for j in range(n):
            if in_queue[j] or (moved[j] and not cfg.allow_reentry):
                continue
            if refill is None or rank(j) < rank(refill):
                refill = j
        if refill is not None:
            queue.append(refill)
            in_queue[refill] = True
    return SolveResult(st.assignment(), tuple(moves), stopped)


def curve(
    g: Graph,
    start: Assignment,
    m_max: int,
    cfg: SolverConfig,
    stop_on_no_gain: bool = True,
) -> list[CurvePoint]:
    """Objective after each LGA move of a single run with budget ``m_max``."""
    f0 = objective(g, start).intra_links
    res = lga(g, start, AdjustPlan(m_max, stop_on_no_gain), cfg)
    points = [CurvePoint(0, f0)]
    f = f0
    for t, mv in enumerate(res.moves, start=1):
        f += mv.delta
        points.append(CurvePoint(t, f))
    return points


def random_baseline(g: Graph, K: int, seed: int) -> Assignment:
    """Random capacity-feasible assignment.

    Shuffles the ``K * S`` room slots and hands the first ``|V|`` of them to
    the nodes, so every feasible room-size profile can occur.
    """
    n = len(g)
    if n == 0:
        if K < 1:
            raise ValidationError(f"room count must be >= 1, got {K}")
        return Assignment({}, K, 1)
    check_room_count(n, K)
    S = capacity_for(n, K)
    rng = random.Random(seed)
    slots = [k for k in range(1, K + 1) for _ in range(S)]
    rng.shuffle(slots)
    return Assignment(dict(zip(g.nodes, slots)), K, S)


def exact(g: Graph, K: int, max_nodes: int = EXACT_MAX_NODES) -> tuple[Assignment, int]:
    """Globally optimal assignment by depth-first branch and bound.

    Nodes are placed in id order; a node may join an already opened room or
    open the next one, so each room's smallest id increases with its index.
    This removes the K! relabelings of every partition.
    """
    n = len(g)
    if n > max_nodes:
        raise OracleBoundError(f"exact solver is limited to {max_nodes} nodes, graph has {n}")
    check_room_count(n, K)
    S = capacity_for(n, K)
    adj = g.adj
    room = [-1] * n
    size = [0] * K
    best_f = g.edge_count + 1
    best_room: list[int] = []

    def place(i: int, opened: int, f: int) -> None:
        nonlocal best_f, best_room
        if f >= best_f:
            return
        if i == n:
            best_f, best_room = f, room[:]
            return
        for k in range(min(opened + 1, K)):
            if size[k] >= S:
                continue
            add = sum(1 for j in adj[i] if room[j] == k)
            room[i] = k
            size[k] += 1
            place(i + 1, max(opened, k + 1), f + add)
            size[k] -= 1
            room[i] = -1

    place(0, 0, 0)
    rooms = {g.nodes[i]: best_room[i] + 1 for i in range(n)}
    return Assignment(rooms, K, S), best_f
