"""Planted-partition parameters matched to the published network sizes.

Each preset has the node count and mean degree of one of the four detention
networks.  Blocks are near-cliques (``p_in`` close to 1, like groups sharing
a case or crime type) and as large as the target degree allows, so the block
count is the smallest one whose blocks fit.  The cross-block probability is
then solved from the expected mean degree::

    E[<k>] = sum_b size_b * ((size_b - 1) * p_in + (n - size_b) * p_out) / n

Run ``python -m roomalloc.instances.calibration`` to print the table.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..graph_core import ValidationError
from .generators import block_sizes

DEFAULT_P_IN = 0.99


@dataclass(frozen=True)
class NetworkTarget:
    name: str
    nodes: int
    links: int
    avg_degree: float
    components: int
    rooms: int


TABLE_I = {
    t.name: t
    for t in (
        NetworkTarget("AM", 903, 48719, 107.904, 2, 44),
        NetworkTarget("AF", 190, 2119, 22.305, 3, 16),
        NetworkTarget("BM", 680, 25697, 75.579, 10, 34),
        NetworkTarget("BF", 273, 4182, 30.637, 16, 17),
    )
}


@dataclass(frozen=True)
class PlantedParams:
    n: int
    K_true: int
    p_in: float
    p_out: float


def expected_degree(n: int, k_true: int, p_in: float, p_out: float) -> float:
    sizes = block_sizes(n, k_true)
    within = sum(b * (b - 1) for b in sizes)
    across = sum(b * (n - b) for b in sizes)
    return (within * p_in + across * p_out) / n


def calibrate(n: int, k_true: int, target_degree: float, p_in: float = DEFAULT_P_IN) -> PlantedParams:
    """Solve ``p_out`` so the expected mean degree equals ``target_degree``."""
    sizes = block_sizes(n, k_true)
    within = sum(b * (b - 1) for b in sizes) / n
    across = sum(b * (n - b) for b in sizes) / n
    if across == 0:
        raise ValidationError("a single block has no cross-block pairs to calibrate")
    p_out = (target_degree - within * p_in) / across
    if not 0.0 <= p_out <= p_in:
        raise ValidationError(
            f"target degree {target_degree} unreachable with p_in={p_in} (p_out={p_out:.4f})"
        )
    return PlantedParams(n, k_true, p_in, p_out)


def blocks_for(n: int, target_degree: float, p_in: float = DEFAULT_P_IN) -> int:
    """Fewest near-equal blocks whose within-block degree stays below the target."""
    largest = int(target_degree / p_in) + 1
    k = -(-n // largest)
    while k < n and max(block_sizes(n, k)) - 1 >= target_degree / p_in:
        k += 1
    return k


def preset(name: str, p_in: float = DEFAULT_P_IN) -> PlantedParams:
    try:
        t = TABLE_I[name.upper()]
    except KeyError:
        raise ValidationError(f"unknown preset {name!r}; choose from {sorted(TABLE_I)}") from None
    return calibrate(t.nodes, blocks_for(t.nodes, t.avg_degree, p_in), t.avg_degree, p_in)


def main() -> None:
    print("name      n  K_true   p_in     p_out   E<k>  target")
    for name, t in TABLE_I.items():
        p = preset(name)
        e = expected_degree(p.n, p.K_true, p.p_in, p.p_out)
        print(f"{name:4} {p.n:6d} {p.K_true:7d} {p.p_in:6.3f} {p.p_out:9.5f} {e:6.2f} {t.avg_degree:7.3f}")


if __name__ == "__main__":
    main()
