"""Detainee record ingestion, relation extraction and per-gender networks."""

from __future__ import annotations

import csv
import enum
import io
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Optional, Union

from ..graph_core import Graph, ValidationError, build_graph

log = logging.getLogger(__name__)

CSV_HEADER = ("id", "room", "gender", "case_number", "crime_type", "birth_place", "ties")
MISSING = ""


class Gender(str, enum.Enum):
    M = "M"
    F = "F"


class RelationKind(str, enum.Enum):
    JOINT_CRIME = "JointCrime"
    FELLOW_TOWNSMEN = "FellowTownsmen"
    SAME_CRIME_TYPE = "SameCrimeType"
    DECLARED_TIE = "DeclaredTie"


# record attribute -> relation it induces when two records share a value
FIELD_KINDS = (
    ("case_number", RelationKind.JOINT_CRIME),
    ("birth_place", RelationKind.FELLOW_TOWNSMEN),
    ("crime_type", RelationKind.SAME_CRIME_TYPE),
)


@dataclass(frozen=True)
class DetaineeRecord:
    id: str
    gender: Gender
    room: Optional[str] = None
    case_number: str = MISSING
    crime_type: str = MISSING
    birth_place: str = MISSING
    ties: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.id in self.ties:
            raise ValidationError(f"record {self.id!r} lists itself as a tie")


@dataclass(frozen=True)
class RelationEdge:
    endpoints: tuple[str, str]  # sorted
    kinds: frozenset[RelationKind]


@dataclass(frozen=True)
class Network:
    graph: Graph
    roster: tuple[str, ...]


@dataclass(frozen=True)
class NetworkBundle:
    male: Network
    female: Network
    source: str = ""
    kind_counts: dict[str, int] = field(default_factory=dict)

    def network(self, gender: Gender) -> Network:
        return self.male if gender is Gender.M else self.female


def parse_records(
    source: Union[str, Path, io.TextIOBase, Iterable[str]], name: Optional[str] = None
) -> list[DetaineeRecord]:
    """Read the record CSV.

    Ties to unknown ids and self-ties are dropped with a warning.  Duplicate
    ids and malformed rows raise :class:`ValidationError`.
    """
    if isinstance(source, (str, Path)):
        name = name or str(source)
        with open(source, encoding="utf-8", newline="") as fh:
            return _parse(fh, name)
    return _parse(source, name or "<records>")


def _parse(fh: Iterable[str], name: str) -> list[DetaineeRecord]:
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None:
        return []
    header = [h.strip() for h in header]
    if tuple(header) != CSV_HEADER:
        raise ValidationError(f"{name}:1: expected header {','.join(CSV_HEADER)}")
    rows = []
    seen: dict[str, int] = {}
    for row in reader:
        lineno = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(CSV_HEADER):
            raise ValidationError(
                f"{name}:{lineno}: expected {len(CSV_HEADER)} fields, got {len(row)}"
            )
        rid, room, gender, case, crime, birth, ties = (c.strip() for c in row)
        if not rid:
            raise ValidationError(f"{name}:{lineno}: empty id")
        if gender not in Gender.__members__:
            raise ValidationError(f"{name}:{lineno}: gender must be M or F, got {gender!r}")
        if rid in seen:
            raise ValidationError(
                f"{name}:{lineno}: duplicate id {rid!r} (first seen on line {seen[rid]})"
            )
        seen[rid] = lineno
        tie_ids = [t.strip() for t in ties.split(";") if t.strip()]
        rows.append((lineno, rid, room or None, Gender(gender), case, crime, birth, tie_ids))

    records = []
    for lineno, rid, room, gender, case, crime, birth, tie_ids in rows:
        kept = set()
        for t in tie_ids:
            if t == rid:
                log.warning("%s:%d: record %r lists itself as a tie; dropped", name, lineno, rid)
            elif t not in seen:
                log.warning("%s:%d: tie %r of record %r is unknown; dropped", name, lineno, t, rid)
            else:
                kept.add(t)
        records.append(
            DetaineeRecord(rid, gender, room, case, crime, birth, frozenset(kept))
        )
    return records


def extract_relations(records: Iterable[DetaineeRecord]) -> list[RelationEdge]:
    """All same-gender pairs related by at least one predicate, sorted by endpoints.

    Shared attribute values form cliques, so pairs are generated per value
    group rather than over all record pairs.
    """
    records = list(records)
    by_id = {r.id: r for r in records}
    kinds: dict[tuple[str, str], set[RelationKind]] = defaultdict(set)

    for attr, kind in FIELD_KINDS:
        groups: dict[tuple[Gender, str], list[str]] = defaultdict(list)
        for r in records:
            value = getattr(r, attr)
            if value != MISSING:
                groups[(r.gender, value)].append(r.id)
        for ids in groups.values():
            for a, b in combinations(sorted(ids), 2):
                kinds[(a, b)].add(kind)

    for r in records:
        for t in r.ties:
            other = by_id.get(t)
            if other is None:
                continue
            if other.gender is not r.gender:
                log.debug("tie %s-%s crosses genders; ignored", r.id, t)
                continue
            kinds[tuple(sorted((r.id, t)))].add(RelationKind.DECLARED_TIE)

    return [RelationEdge(pair, frozenset(ks)) for pair, ks in sorted(kinds.items())]


def kind_counts(edges: Iterable[RelationEdge]) -> dict[str, int]:
    counts = Counter({k.value: 0 for k in RelationKind})
    for e in edges:
        for k in e.kinds:
            counts[k.value] += 1
    return dict(sorted(counts.items()))


def build_networks(
    records: Iterable[DetaineeRecord], edges: Iterable[RelationEdge], source: str = ""
) -> NetworkBundle:
    """Split records by gender and build one graph per gender."""
    records = list(records)
    edges = list(edges)
    gender_of = {r.id: r.gender for r in records}
    split: dict[Gender, list[tuple[str, str]]] = {Gender.M: [], Gender.F: []}
    for e in edges:
        a, b = e.endpoints
        ga, gb = gender_of.get(a), gender_of.get(b)
        if ga is None or gb is None:
            raise ValidationError(f"relation {a!r}-{b!r} references an unknown record")
        if ga is not gb:
            raise ValidationError(f"relation {a!r}-{b!r} crosses the gender partition")
        split[ga].append((a, b))

    def network(gender: Gender) -> Network:
        roster = tuple(sorted(r.id for r in records if r.gender is gender))
        return Network(build_graph(split[gender], roster), roster)

    return NetworkBundle(network(Gender.M), network(Gender.F), source, kind_counts(edges))


def manual_rooms(records: Iterable[DetaineeRecord], gender: Gender) -> dict[str, str]:
    """Recorded room labels for one gender (records without a room are skipped)."""
    return {r.id: r.room for r in records if r.gender is gender and r.room is not None}
