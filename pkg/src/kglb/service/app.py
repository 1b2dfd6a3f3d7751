"""FastAPI application: named in-memory graphs, one writer at a time.

Graphs live in a process-local registry keyed by name.  Ingest/load replace a
graph atomically under a lock; queries and reports run against whatever
snapshot is currently registered, matching the core concurrency contract
(reads are safe between mutations).
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from .. import __version__, persistence
from ..errors import KglbError, UnknownEntity, UnknownLabelId, UnknownTuple
from ..graph_store import Graph, IngestManifest, ingest
from ..ontology import build_ontology, emit_dot, louvain, partition_assign
from ..query_engine import configured_hop_cap, n_hop
from . import schemas

_NOT_FOUND_ERRORS = (UnknownEntity, UnknownTuple, UnknownLabelId)


def create_app() -> FastAPI:
    app = FastAPI(title="kglb", version=__version__)
    graphs: dict[str, Graph] = {}
    lock = threading.Lock()

    def get_graph(name: str) -> Graph:
        graph = graphs.get(name)
        if graph is None:
            raise HTTPException(status_code=404, detail=f"no graph named {name!r}")
        return graph

    @app.exception_handler(KglbError)
    def _kglb_error(_request: Request, exc: KglbError) -> JSONResponse:
        status = 404 if isinstance(exc, _NOT_FOUND_ERRORS) else 400
        return JSONResponse(
            status_code=status,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.exception_handler(OSError)
    def _os_error(_request: Request, exc: OSError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "hop_cap": configured_hop_cap()}

    @app.get("/graphs", response_model=list[schemas.GraphSummary])
    def list_graphs() -> list[schemas.GraphSummary]:
        return [
            schemas.GraphSummary(
                name=name, nodes=g.node_count, edges=g.edge_count,
                labels=len(g.dictionary),
            )
            for name, g in sorted(graphs.items())
        ]

    @app.post("/graphs/{name}/ingest", response_model=schemas.GraphSummary)
    def ingest_graph(name: str, req: schemas.IngestRequest) -> schemas.GraphSummary:
        base = Path(req.base_dir) if req.base_dir else Path(".")
        manifest = IngestManifest.from_dict(req.manifest, base_dir=base)
        graph = ingest(manifest)
        with lock:
            graphs[name] = graph
        return schemas.GraphSummary(
            name=name, nodes=graph.node_count, edges=graph.edge_count,
            labels=len(graph.dictionary),
        )

    @app.post("/graphs/{name}/load", response_model=schemas.GraphSummary)
    def load_graph(name: str, req: schemas.SnapshotPathRequest) -> schemas.GraphSummary:
        graph = persistence.load_file(req.path)
        with lock:
            graphs[name] = graph
        return schemas.GraphSummary(
            name=name, nodes=graph.node_count, edges=graph.edge_count,
            labels=len(graph.dictionary),
        )

    @app.post("/graphs/{name}/dump")
    def dump_graph(name: str, req: schemas.SnapshotPathRequest) -> dict:
        graph = get_graph(name)
        persistence.save_file(graph, req.path)
        return {"path": req.path, "bytes": Path(req.path).stat().st_size}

    @app.delete("/graphs/{name}")
    def drop_graph(name: str) -> dict:
        with lock:
            if name not in graphs:
                raise HTTPException(status_code=404, detail=f"no graph named {name!r}")
            del graphs[name]
        return {"dropped": name}

    @app.post("/graphs/{name}/query", response_model=schemas.QueryResponse)
    def query_graph(name: str, req: schemas.QueryRequest) -> schemas.QueryResponse:
        graph = get_graph(name)
        result = n_hop(graph, req.to_core(), hop_cap=configured_hop_cap())
        return schemas.QueryResponse(paths=result.to_keys(graph), truncated=result.truncated)

    @app.get("/graphs/{name}/ontology.dot", response_class=PlainTextResponse)
    def ontology_dot(name: str) -> str:
        return emit_dot(build_ontology(get_graph(name)))

    @app.post("/graphs/{name}/cluster", response_model=schemas.ClusterResponse)
    def cluster_graph(name: str, req: schemas.ClusterRequest) -> schemas.ClusterResponse:
        graph = get_graph(name)
        clusters = louvain(build_ontology(graph), seed=req.seed)
        return schemas.ClusterResponse(
            clusters=clusters.cluster_of,
            cluster_count=clusters.cluster_count,
            modularity=clusters.modularity,
            seed=req.seed,
        )

    @app.post("/graphs/{name}/partition", response_model=schemas.PartitionResponse)
    def partition_graph(name: str, req: schemas.PartitionRequest) -> schemas.PartitionResponse:
        graph = get_graph(name)
        clusters = louvain(build_ontology(graph), seed=req.seed)
        result = partition_assign(graph, clusters, req.k)
        return schemas.PartitionResponse(**result.report)

    @app.get("/graphs/{name}/stats", response_model=schemas.StatsResponse)
    def graph_stats(name: str) -> schemas.StatsResponse:
        return schemas.StatsResponse(**get_graph(name).stats())

    return app
