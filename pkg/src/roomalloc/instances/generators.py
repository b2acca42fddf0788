"""Synthetic relation networks: planted partitions and preferential attachment."""

from __future__ import annotations

import random

from ..graph_core import Graph, ValidationError, build_graph


def node_ids(n: int) -> list[str]:
    """Zero-padded ids so lexicographic order matches creation order."""
    width = len(str(max(n - 1, 0)))
    return [f"v{i:0{width}d}" for i in range(n)]


def block_sizes(n: int, k: int) -> list[int]:
    q, r = divmod(n, k)
    return [q + 1 if b < r else q for b in range(k)]


def gen_planted(n: int, K_true: int, p_in: float, p_out: float, seed: int) -> Graph:
    """Planted partition graph with ``K_true`` near-equal contiguous blocks."""
    if n < 0:
        raise ValidationError(f"n must be >= 0, got {n}")
    if K_true < 1:
        raise ValidationError(f"K_true must be >= 1, got {K_true}")
    if not 0.0 <= p_out <= p_in <= 1.0:
        raise ValidationError(f"need 0 <= p_out <= p_in <= 1, got p_in={p_in}, p_out={p_out}")
    rng = random.Random(seed)
    ids = node_ids(n)
    block = []
    for b, size in enumerate(block_sizes(n, K_true)):
        block.extend([b] * size)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            p = p_in if block[i] == block[j] else p_out
            if rng.random() < p:
                edges.append((ids[i], ids[j]))
    return build_graph(edges, ids)


def gen_scale_free(n: int, attach: int, seed: int) -> Graph:
    """Preferential attachment graph.

    Starts from a clique on ``attach + 1`` nodes; each later node links to
    ``attach`` distinct existing nodes picked with probability proportional
    to degree.  The result is connected.
    """
    if not 1 <= attach < n:
        raise ValidationError(f"need 1 <= attach < n, got attach={attach}, n={n}")
    rng = random.Random(seed)
    ids = node_ids(n)
    edges = [(ids[i], ids[j]) for i in range(attach + 1) for j in range(i + 1, attach + 1)]
    # each node appears once per incident edge
    pool = [i for i in range(attach + 1) for _ in range(attach)]
    for new in range(attach + 1, n):
        targets: set[int] = set()
        while len(targets) < attach:
            targets.add(rng.choice(pool))
        for t in sorted(targets):
            edges.append((ids[t], ids[new]))
            pool.extend((t, new))
    return build_graph(edges, ids)
