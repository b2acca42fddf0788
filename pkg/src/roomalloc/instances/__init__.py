from .calibration import TABLE_I, PlantedParams, calibrate, expected_degree, preset
from .generators import gen_planted, gen_scale_free, node_ids
from .records import (
    DetaineeRecord,
    Gender,
    Network,
    NetworkBundle,
    RelationEdge,
    RelationKind,
    build_networks,
    extract_relations,
    kind_counts,
    manual_rooms,
    parse_records,
)

__all__ = [
    "TABLE_I",
    "PlantedParams",
    "calibrate",
    "expected_degree",
    "preset",
    "gen_planted",
    "gen_scale_free",
    "node_ids",
    "DetaineeRecord",
    "Gender",
    "Network",
    "NetworkBundle",
    "RelationEdge",
    "RelationKind",
    "build_networks",
    "extract_relations",
    "kind_counts",
    "manual_rooms",
    "parse_records",
]
