"""``roomalloc`` command line.

Exit codes: 0 success, 1 input error, 2 infeasible request, 3 the evaluated
assignment violates a hard constraint.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import secrets
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .formats import (
    assignment_to_json,
    format_edgelist,
    from_graphml,
    read_assignment,
    read_edgelist,
    to_dot,
    to_graphml,
)
from .graph_core import (
    Assignment,
    Graph,
    InfeasibleError,
    ValidationError,
    capacity_for,
    check_room_count,
    objective,
    stats,
    validate,
)
from .instances import (
    Gender,
    build_networks,
    extract_relations,
    gen_planted,
    gen_scale_free,
    manual_rooms,
    parse_records,
    preset,
)
from .solvers import AdjustPlan, SolverConfig, curve, exact, hfa, lga, random_baseline

log = logging.getLogger("roomalloc")

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_VIOLATIONS = 0, 1, 2, 3


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = (
        datetime.fromtimestamp(int(epoch), timezone.utc)
        if epoch
        else datetime.now(timezone.utc)
    )
    return when.strftime("%Y-%m-%dT%H:%M:%SZ")


def _json(obj: object) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _stats_dict(g: Graph) -> dict:
    s = stats(g)
    return {
        "nodes": s.node_count,
        "links": s.link_count,
        "avg_degree": s.avg_degree_str(),
        "components": s.components,
    }


def _objective_dict(g: Graph, a: Assignment, strict: bool = True) -> dict:
    rep = objective(g, a, strict=strict)
    return {
        "intra_links": rep.intra_links,
        "inter_links": rep.inter_links,
        "per_room_links": list(rep.per_room_links),
    }


def read_graph(path: str) -> Graph:
    if path.endswith(".graphml"):
        g, _ = from_graphml(Path(path).read_text(encoding="utf-8"))
        return g
    return read_edgelist(path)


def load_assignment(g: Graph, path: str) -> Assignment:
    a = read_assignment(path)
    check_room_count(len(g), a.K)
    expected = capacity_for(len(g), a.K)
    if a.S != expected:
        raise ValidationError(
            f"{path}: S={a.S} but {len(g)} nodes in {a.K} rooms require S={expected}"
        )
    return a


class _Run:
    """Collects output files and writes them together with a manifest."""

    def __init__(self, command: str, inputs: Sequence[str]):
        self.command = command
        self.started = _timestamp()
        self.inputs = {p: _sha256(Path(p).read_bytes()) for p in inputs}
        self.params: dict = {}
        self.files: dict[str, str] = {}

    def add(self, name: str, text: str) -> None:
        self.files[name] = text

    def write(self, out_dir: str) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in self.files.items():
            (out / name).write_text(text, encoding="utf-8")
        manifest = {
            "command": self.command,
            "version": __version__,
            "inputs": self.inputs,
            **self.params,
            "started_at": self.started,
            "finished_at": _timestamp(),
            "outputs": {n: _sha256(t.encode("utf-8")) for n, t in sorted(self.files.items())},
        }
        (out / "manifest.json").write_text(_json(manifest), encoding="utf-8")


def _seed(args: argparse.Namespace) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(32)
        log.info("no --seed given; drew %d", args.seed)
    return args.seed


def cmd_extract(args: argparse.Namespace) -> int:
    records = parse_records(args.records)
    relations = extract_relations(records)
    bundle = build_networks(records, relations, source=Path(args.records).name)
    run = _Run("extract", [args.records])
    report = {
        "source": bundle.source,
        "records": len(records),
        "relations": len(relations),
        "kind_counts": bundle.kind_counts,
        "networks": {},
    }
    for gender, label in ((Gender.M, "male"), (Gender.F, "female")):
        net = bundle.network(gender)
        run.add(f"{label}.edges", format_edgelist(net.graph))
        report["networks"][label] = _stats_dict(net.graph)
        rooms = manual_rooms(records, gender)
        if net.roster and len(rooms) == len(net.roster):
            labels = sorted(set(rooms.values()))
            index = {lab: k for k, lab in enumerate(labels, start=1)}
            K = len(labels)
            a = Assignment({v: index[r] for v, r in rooms.items()}, K, capacity_for(len(rooms), K))
            run.add(f"{label}.manual.json", assignment_to_json(a))
            report["networks"][label]["manual"] = {
                "rooms": {str(k): lab for lab, k in index.items()},
                "intra_links": objective(net.graph, a).intra_links,
                "violations": len(validate(net.graph, a)),
            }
    run.add("report.json", _json(report))
    run.write(args.out)
    print(_json(report), end="")
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    seed = _seed(args)
    if args.model == "planted":
        if args.preset:
            p = preset(args.preset)
            n, k_true, p_in, p_out = p.n, p.K_true, p.p_in, p.p_out
        else:
            missing = [f for f in ("n", "k_true", "p_in", "p_out") if getattr(args, f) is None]
            if missing:
                raise ValidationError(f"planted model needs --preset or {missing}")
            n, k_true, p_in, p_out = args.n, args.k_true, args.p_in, args.p_out
        g = gen_planted(n, k_true, p_in, p_out, seed)
    else:
        if args.n is None or args.attach is None:
            raise ValidationError("scalefree model needs --n and --attach")
        g = gen_scale_free(args.n, args.attach, seed)
    text = format_edgelist(g)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    print(_json(_stats_dict(g)), end="", file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def cmd_allocate(args: argparse.Namespace) -> int:
    g = read_graph(args.graph)
    check_room_count(len(g), args.rooms)
    run = _Run("allocate", [args.graph])
    run.params = {"method": args.method, "K": args.rooms, "S": capacity_for(len(g), args.rooms)}
    moves = []
    if args.method == "hfa":
        res = hfa(g, SolverConfig(args.rooms, _seed(args)))
        a, moves = res.assignment, [m.to_dict() for m in res.moves]
        run.params["seed"] = args.seed
    elif args.method == "random":
        a = random_baseline(g, args.rooms, _seed(args))
        run.params["seed"] = args.seed
    else:
        a, _ = exact(g, args.rooms)
    report = {"objective": _objective_dict(g, a), "stats": _stats_dict(g)}
    run.add("assignment.json", assignment_to_json(a))
    run.add("moves.json", _json(moves))
    run.add("report.json", _json(report))
    run.write(args.out)
    print(f"f={report['objective']['intra_links']}")
    return EXIT_OK


def _checked_start(g: Graph, path: str) -> Optional[Assignment]:
    a = load_assignment(g, path)
    problems = validate(g, a)
    if problems:
        for p in problems:
            print(f"violation: {p.message()}", file=sys.stderr)
        return None
    return a


def cmd_adjust(args: argparse.Namespace) -> int:
    g = read_graph(args.graph)
    start = _checked_start(g, args.assignment)
    if start is None:
        return EXIT_INPUT
    seed = _seed(args)
    plan = AdjustPlan(args.m, stop_on_no_gain=not args.keep_going)
    res = lga(g, start, plan, SolverConfig(start.K, seed, allow_reentry=args.allow_reentry))
    before = objective(g, start).intra_links
    after = objective(g, res.assignment).intra_links
    report = {"before": before, "after": after, "moves": len(res.moves)}
    if res.stopped_early:
        report["note"] = "no improving feasible move"
    run = _Run("adjust", [args.graph, args.assignment])
    run.params = {
        "K": start.K,
        "S": start.S,
        "seed": seed,
        "m": args.m,
        "stop_on_no_gain": plan.stop_on_no_gain,
        "allow_reentry": args.allow_reentry,
    }
    run.add("assignment.json", assignment_to_json(res.assignment))
    run.add("moves.json", _json([m.to_dict() for m in res.moves]))
    run.add("report.json", _json(report))
    run.write(args.out)
    print(f"f: {before} -> {after} ({len(res.moves)} moves)")
    if res.stopped_early:
        print("note: no improving feasible move")
    return EXIT_OK


def cmd_curve(args: argparse.Namespace) -> int:
    g = read_graph(args.graph)
    start = _checked_start(g, args.assignment)
    if start is None:
        return EXIT_INPUT
    cfg = SolverConfig(start.K, _seed(args), allow_reentry=args.allow_reentry)
    points = curve(g, start, args.m_max, cfg, stop_on_no_gain=not args.keep_going)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["adjustments", "intra_links"])
    for p in points:
        w.writerow([p.adjustments_done, p.objective])
    if args.out:
        Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    g = read_graph(args.graph)
    a = load_assignment(g, args.assignment)
    problems = validate(g, a)
    report = {
        "objective": _objective_dict(g, a, strict=False),
        "stats": _stats_dict(g),
        "K": a.K,
        "S": a.S,
        "violations": [p.message() for p in problems],
    }
    print(_json(report), end="")
    for p in problems:
        print(f"violation: {p.message()}", file=sys.stderr)
    return EXIT_VIOLATIONS if problems else EXIT_OK


def cmd_export(args: argparse.Namespace) -> int:
    g = read_graph(args.graph)
    a = read_assignment(args.assignment)
    text = to_dot(g, a) if args.format == "dot" else to_graphml(g, a)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roomalloc", description="Assign nodes to capacity-bounded rooms, minimizing links inside rooms."
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="build male/female relation networks from a record CSV")
    p.add_argument("records")
    p.add_argument("-o", "--out", default=".", help="output directory")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("generate", help="write a synthetic edge list")
    p.add_argument("--model", choices=["planted", "scalefree"], required=True)
    p.add_argument("--preset", help="planted parameters calibrated to AM, AF, BM or BF")
    p.add_argument("--n", type=int)
    p.add_argument("--k-true", type=int)
    p.add_argument("--p-in", type=float)
    p.add_argument("--p-out", type=float)
    p.add_argument("--attach", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--out", help="edge-list file (default stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("allocate", help="allocate every node from scratch")
    p.add_argument("graph")
    p.add_argument("--rooms", "-K", type=int, required=True)
    p.add_argument("--method", choices=["hfa", "exact", "random"], default="hfa")
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--out", default=".", help="output directory")
    p.set_defaults(func=cmd_allocate)

    for name, func, help_ in (
        ("adjust", cmd_adjust, "relocate at most m nodes of an existing assignment"),
        ("curve", cmd_curve, "objective after each relocation, as CSV"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("graph")
        p.add_argument("assignment")
        if name == "adjust":
            p.add_argument("--m", type=int, required=True, help="adjustment budget")
            p.add_argument("-o", "--out", default=".", help="output directory")
        else:
            p.add_argument("--m-max", type=int, required=True)
            p.add_argument("-o", "--out", help="CSV file (default stdout)")
        p.add_argument("--seed", type=int)
        p.add_argument(
            "--keep-going", action="store_true", help="also make zero-gain moves instead of stopping"
        )
        p.add_argument("--allow-reentry", action="store_true", help="moved nodes may be queued again")
        p.set_defaults(func=func)

    p = sub.add_parser("eval", help="score an assignment and check its constraints")
    p.add_argument("graph")
    p.add_argument("assignment")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("export", help="write the graph with room attributes")
    p.add_argument("graph")
    p.add_argument("assignment")
    p.add_argument("--format", required=True, help="dot or graphml")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if args.command == "export" and args.format not in ("dot", "graphml"):
        print(f"error: unknown format {args.format!r}; use dot or graphml", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, OSError, csv.Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
