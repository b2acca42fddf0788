"""Readers and writers for edge lists, assignment JSON, DOT and GraphML."""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Iterable, TextIO, Union

from .graph_core import Assignment, Graph, NodeId, ValidationError, build_graph

PathLike = Union[str, Path]

NODE_DIRECTIVE = "node"
GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"


def parse_edgelist(lines: Iterable[str], source: str = "<edges>") -> Graph:
    """Parse ``id1<TAB>id2`` lines; ``node<TAB>id`` declares a (possibly isolated) node."""
    edges: list[tuple[NodeId, NodeId]] = []
    isolated: list[NodeId] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ValidationError(f"{source}:{lineno}: expected two tab-separated fields")
        a, b = parts
        if a == NODE_DIRECTIVE:
            isolated.append(b)
        elif a == b:
            raise ValidationError(f"{source}:{lineno}: self-loop pair ({a!r}, {b!r})")
        else:
            edges.append((a, b))
    return build_graph(edges, isolated)


def read_edgelist(path: PathLike) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edgelist(fh, source=str(path))


def format_edgelist(g: Graph) -> str:
    for v in g.nodes:
        if v == NODE_DIRECTIVE or "\t" in v or "\n" in v or not v:
            raise ValidationError(f"node id {v!r} cannot be written to an edge list")
    lines = [f"{u}\t{v}" for u, v in g.edges()]
    lines += [f"{NODE_DIRECTIVE}\t{v}" for i, v in enumerate(g.nodes) if not g.adj[i]]
    return "".join(line + "\n" for line in lines)


def write_edgelist(g: Graph, path: PathLike) -> None:
    Path(path).write_text(format_edgelist(g), encoding="utf-8")


def assignment_to_json(a: Assignment) -> str:
    doc = {"K": a.K, "S": a.S, "rooms": dict(a.room_of)}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def assignment_from_json(text: str) -> Assignment:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"assignment is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or not {"K", "S", "rooms"} <= doc.keys():
        raise ValidationError('assignment JSON needs keys "K", "S" and "rooms"')
    if not isinstance(doc["rooms"], dict):
        raise ValidationError('"rooms" must be an object mapping node id to room')
    return Assignment(doc["rooms"], doc["K"], doc["S"])


def read_assignment(path: PathLike) -> Assignment:
    return assignment_from_json(Path(path).read_text(encoding="utf-8"))


def write_assignment(a: Assignment, path: PathLike) -> None:
    Path(path).write_text(assignment_to_json(a), encoding="utf-8")


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: Graph, a: Assignment) -> str:
    """DOT document; every node carries ``room`` and a per-room ``color_index``."""
    used = sorted({a.room_of[v] for v in g.nodes if v in a.room_of})
    color_index = {k: i for i, k in enumerate(used)}
    out = ["graph rooms {", "  node [style=filled];"]
    for v in g.nodes:
        k = a.room_of.get(v)
        if k is None:
            out.append(f"  {_dot_quote(v)};")
            continue
        ci = color_index[k]
        hue = ci / max(len(used), 1)
        out.append(
            f'  {_dot_quote(v)} [room={k}, color_index={ci}, fillcolor="{hue:.3f} 0.450 0.950"];'
        )
    for u, v in g.edges():
        out.append(f"  {_dot_quote(u)} -- {_dot_quote(v)};")
    out.append("}")
    return "\n".join(out) + "\n"


def to_graphml(g: Graph, a: Assignment) -> str:
    ET.register_namespace("", GRAPHML_NS)
    root = ET.Element(f"{{{GRAPHML_NS}}}graphml")
    key = ET.SubElement(root, f"{{{GRAPHML_NS}}}key")
    key.set("id", "room")
    key.set("for", "node")
    key.set("attr.name", "room")
    key.set("attr.type", "int")
    graph = ET.SubElement(root, f"{{{GRAPHML_NS}}}graph")
    graph.set("edgedefault", "undirected")
    for v in g.nodes:
        node = ET.SubElement(graph, f"{{{GRAPHML_NS}}}node")
        node.set("id", v)
        if v in a.room_of:
            data = ET.SubElement(node, f"{{{GRAPHML_NS}}}data")
            data.set("key", "room")
            data.text = str(a.room_of[v])
    for u, v in g.edges():
        edge = ET.SubElement(graph, f"{{{GRAPHML_NS}}}edge")
        edge.set("source", u)
        edge.set("target", v)
    ET.indent(root)
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"


def from_graphml(text: str) -> tuple[Graph, dict[NodeId, int]]:
    """Read a GraphML document back into a graph and its ``room`` node attribute."""
    root = ET.fromstring(text)
    ns = {"g": GRAPHML_NS}
    room_keys = {
        k.get("id")
        for k in root.findall("g:key", ns)
        if k.get("attr.name") == "room" and k.get("for") in ("node", None)
    }
    graph = root.find("g:graph", ns)
    if graph is None:
        raise ValidationError("GraphML document has no <graph> element")
    nodes: list[NodeId] = []
    rooms: dict[NodeId, int] = {}
    for node in graph.findall("g:node", ns):
        v = node.get("id")
        nodes.append(v)
        for data in node.findall("g:data", ns):
            if data.get("key") in room_keys:
                rooms[v] = int(data.text)
    edges = [(e.get("source"), e.get("target")) for e in graph.findall("g:edge", ns)]
    return build_graph(edges, nodes), rooms


def dump_json(obj: object, fh: TextIO) -> None:
    json.dump(obj, fh, indent=2, sort_keys=True)
    fh.write("\n")
