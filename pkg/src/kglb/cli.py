"""Command-line front door: a thin client over the core package.

Workflow is snapshot-centric: ``ingest`` once, then point every other
command at the snapshot.  The requested artifact is the only thing written
to stdout; diagnostics go to stderr, and failures exit 1 with one
machine-readable JSON error line on stderr (2 for usage errors).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bench as bench_mod
from . import persistence
from .errors import KglbError
from .graph_store import IngestManifest, ingest
from .ontology import build_ontology, emit_dot, louvain, partition_assign
from .query_engine import HopQuery, configured_hop_cap, n_hop


def _info(msg: str) -> None:
    print(msg, file=sys.stderr)


def _write_json(path: str, doc) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cmd_ingest(args) -> int:
    manifest = IngestManifest.load(args.manifest)
    graph = ingest(manifest)
    persistence.save_file(graph, args.out)
    _info(f"ingested {graph.node_count} nodes, {graph.edge_count} edges -> {args.out}")
    return 0


def _cmd_query(args) -> int:
    graph = persistence.load_file(args.graph)
    with open(args.query, encoding="utf-8") as fh:
        query = HopQuery.from_dict(json.load(fh))
    result = n_hop(graph, query, hop_cap=configured_hop_cap())
    if args.json:
        json.dump(result.to_dict(graph), sys.stdout)
        sys.stdout.write("\n")
    else:
        for path in result.to_keys(graph):
            print(" -> ".join(path))
        if result.truncated:
            _info("result truncated at max_paths")
    return 0


def _cmd_ontology(args) -> int:
    graph = persistence.load_file(args.graph)
    text = emit_dot(build_ontology(graph))
    if args.dot == "-":
        sys.stdout.write(text)
    else:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(text)
        _info(f"ontology written to {args.dot}")
    return 0


def _cmd_cluster(args) -> int:
    graph = persistence.load_file(args.graph)
    clusters = louvain(build_ontology(graph), seed=args.seed)
    doc = {
        "clusters": clusters.cluster_of,
        "cluster_count": clusters.cluster_count,
        "modularity": clusters.modularity,
        "seed": args.seed,
    }
    if args.json:
        _write_json(args.json, doc)
        _info(f"cluster assignment written to {args.json}")
    else:
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    return 0


def _cmd_partition(args) -> int:
    graph = persistence.load_file(args.graph)
    clusters = louvain(build_ontology(graph), seed=args.seed)
    result = partition_assign(graph, clusters, args.k)
    _write_json(args.report, result.report)
    _info(f"cut report written to {args.report}")
    return 0


def _cmd_dump(args) -> int:
    graph = persistence.load_file(args.graph)
    persistence.save_file(graph, args.out)
    _info(f"snapshot rewritten to {args.out}")
    return 0


def _cmd_load(args) -> int:
    graph = persistence.load_file(args.graph)
    _info(
        f"snapshot ok: {graph.node_count} nodes, {graph.edge_count} edges, "
        f"{len(graph.dictionary)} labels"
    )
    return 0


def _cmd_bench(args) -> int:
    report = bench_mod.run_bench_file(args.spec, args.report)
    _info(f"bench report written to {args.report}")
    return 0 if report["correctness"] == "ok" else 1


def _cmd_stats(args) -> int:
    graph = persistence.load_file(args.graph)
    json.dump(graph.stats(), sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kglb", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build a snapshot from a manifest of delimited files")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("query", help="run an n-hop label query against a snapshot")
    p.add_argument("--graph", required=True)
    p.add_argument("--query", required=True, help="JSON query document")
    p.add_argument("--json", action="store_true", help="emit the result as JSON")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("ontology", help="emit the label ontology as DOT")
    p.add_argument("--graph", required=True)
    p.add_argument("--dot", required=True, help="output path, or - for stdout")
    p.set_defaults(func=_cmd_ontology)

    p = sub.add_parser("cluster", help="Louvain-cluster the label ontology")
    p.add_argument("--graph", required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--json", help="write the assignment to this path")
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("partition", help="assign entities to partitions by label cluster")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--report", required=True)
    p.set_defaults(func=_cmd_partition)

    p = sub.add_parser("dump", help="load a snapshot and rewrite it byte-identically")
    p.add_argument("--graph", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_dump)

    p = sub.add_parser("load", help="load a snapshot and verify it parses")
    p.add_argument("--graph", required=True)
    p.set_defaults(func=_cmd_load)

    p = sub.add_parser("bench", help="generate a synthetic graph and compare stores")
    p.add_argument("--spec", required=True)
    p.add_argument("--report", required=True)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("stats", help="print snapshot statistics as JSON")
    p.add_argument("--graph", required=True)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KglbError as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}),
              file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
