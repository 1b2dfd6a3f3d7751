"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, model_validator

from ..errors import InvalidQuery
from ..query_engine import HopQuery, LabelPredicate


class Predicate(BaseModel):
    """Exactly one of ``all`` / ``any`` must be set."""

    all: list[str] | None = None
    any: list[str] | None = None

    @model_validator(mode="after")
    def _exactly_one(self) -> "Predicate":
        if (self.all is None) == (self.any is None):
            raise ValueError("predicate needs exactly one of 'all' or 'any'")
        return self

    def to_core(self) -> LabelPredicate:
        if self.all is not None:
            return LabelPredicate(mode="all", labels=list(self.all))
        return LabelPredicate(mode="any", labels=list(self.any or []))


class QueryRequest(BaseModel):
    source: str | int
    max_hops: int = Field(ge=0)
    target_criteria: Predicate
    edge_filter: Predicate | None = None
    direction: Literal["out", "in", "both"] = "out"
    max_paths: int = Field(default=100, ge=1)

    def to_core(self) -> HopQuery:
        edge_filter = None
        if self.edge_filter is not None:
            edge_filter = self.edge_filter.to_core()
            if edge_filter.mode != "any":
                raise InvalidQuery("edge_filter supports ANY-of only")
        return HopQuery(
            source=self.source,
            max_hops=self.max_hops,
            target_criteria=self.target_criteria.to_core(),
            edge_filter=edge_filter,
            direction=self.direction,
            max_paths=self.max_paths,
        )


class QueryResponse(BaseModel):
    paths: list[list[str]]
    truncated: bool


class IngestRequest(BaseModel):
    manifest: dict
    base_dir: str | None = None


class SnapshotPathRequest(BaseModel):
    path: str


class GraphSummary(BaseModel):
    name: str
    nodes: int
    edges: int
    labels: int


class StatsResponse(BaseModel):
    nodes: int
    edges: int
    labels: int
    node_tuples_live: int
    node_tuples_maxid: int
    node_recycle_depth: int
    edge_tuples_live: int
    edge_tuples_maxid: int
    edge_recycle_depth: int
    memory: dict


class ClusterRequest(BaseModel):
    seed: int = 42


class ClusterResponse(BaseModel):
    clusters: dict[str, int]
    cluster_count: int
    modularity: float
    seed: int


class PartitionRequest(BaseModel):
    k: int = Field(ge=1)
    seed: int = 42


class PartitionResponse(BaseModel):
    partition_count: int
    node_counts: list[int]
    cut_edges: int


class ErrorResponse(BaseModel):
    error: str
    detail: str
