"""Label-filtered N-hop path search over an immutable graph snapshot.

A hop query walks out from a known source and returns every simple path (no
repeated node) of at most ``max_hops`` edges whose terminal node satisfies
the target label criteria, optionally restricted to edges carrying one of the
filter labels.  Results are emitted in lexicographic node-id-sequence order
and capped at ``max_paths``.

Label predicates are evaluated against tuple ids, never by scanning
entities: the candidate tuple set is derived once from the registry, and a
node or edge matches iff its tuple id is in that set.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterator

from .errors import InvalidQuery, UnknownEntity
from .graph_store import Graph
from .label_store import LabelStore

DEFAULT_HOP_CAP = 10


def configured_hop_cap() -> int:
    """Hop ceiling for accepted queries; KGLB_MAX_HOPS overrides the default."""
    raw = os.environ.get("KGLB_MAX_HOPS")
    if raw is None:
        return DEFAULT_HOP_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise InvalidQuery(f"KGLB_MAX_HOPS must be an integer, got {raw!r}") from exc
    if cap < 0:
        raise InvalidQuery("KGLB_MAX_HOPS must be >= 0")
    return cap


@dataclass
class LabelPredicate:
    """ALL-of or ANY-of over label strings."""
    mode: str  # "all" | "any"
    labels: list[str]

    @classmethod
    def from_dict(cls, doc: dict) -> "LabelPredicate":
        if not isinstance(doc, dict) or len(doc) != 1:
            raise InvalidQuery(f"predicate must be {{'all': [...]}} or {{'any': [...]}}, got {doc!r}")
        mode, labels = next(iter(doc.items()))
        if mode not in ("all", "any") or not isinstance(labels, list) or not labels:
            raise InvalidQuery(f"bad predicate {doc!r}")
        return cls(mode=mode, labels=[str(s) for s in labels])

    def to_dict(self) -> dict:
        return {self.mode: list(self.labels)}


@dataclass
class HopQuery:
    source: str | int
    max_hops: int
    target_criteria: LabelPredicate
    edge_filter: LabelPredicate | None = None
    direction: str = "out"  # "out" | "in" | "both"
    max_paths: int = 100

    @classmethod
    def from_dict(cls, doc: dict) -> "HopQuery":
        try:
            source = doc["source"]
            max_hops = int(doc["max_hops"])
            criteria = LabelPredicate.from_dict(doc["target_criteria"])
        except KeyError as exc:
            raise InvalidQuery(f"query missing required field {exc}") from exc
        direction = doc.get("direction", "out")
        if direction not in ("out", "in", "both"):
            raise InvalidQuery(f"bad direction {direction!r}")
        edge_filter = None
        if doc.get("edge_filter") is not None:
            edge_filter = LabelPredicate.from_dict(doc["edge_filter"])
            if edge_filter.mode != "any":
                raise InvalidQuery("edge_filter supports ANY-of only")
        return cls(
            source=source,
            max_hops=max_hops,
            target_criteria=criteria,
            edge_filter=edge_filter,
            direction=direction,
            max_paths=int(doc.get("max_paths", 100)),
        )


@dataclass
class PathResult:
    paths: list[list[int]] = field(default_factory=list)
    truncated: bool = False

    def to_keys(self, g: Graph) -> list[list[str]]:
        return [[g.node_key(v) for v in path] for path in self.paths]

    def to_dict(self, g: Graph) -> dict:
        return {"paths": self.to_keys(g), "truncated": self.truncated}


def _allowed_tuples(store: LabelStore, predicate: LabelPredicate) -> set[int]:
    """Tuple ids whose label sets satisfy the predicate; unknown labels match nothing."""
    registry = store.registry
    ids = [store.dict.id_of(s) for s in predicate.labels]
    if predicate.mode == "all":
        if any(i is None for i in ids):
            return set()
        allowed = set(registry.tuples_with_label(ids[0]))
        for label_id in ids[1:]:
            allowed &= set(registry.tuples_with_label(label_id))
            if not allowed:
                break
        return allowed
    allowed = set()
    for label_id in ids:
        if label_id is not None:
            allowed.update(registry.tuples_with_label(label_id))
    return allowed


def match_nodes(g: Graph, predicate: LabelPredicate) -> Iterator[int]:
    """Nodes satisfying the predicate, via ring walks only (no entity scan)."""
    store = g.node_labels
    ids = [store.dict.id_of(s) for s in predicate.labels]
    if predicate.mode == "all":
        if any(i is None for i in ids):
            return iter(())
        return store.entities_with_all([i for i in ids if i is not None])

    def unioned() -> Iterator[int]:
        seen: set[int] = set()
        for label_id in ids:
            if label_id is None:
                continue
            for e in store.entities_with_label(label_id):
                if e not in seen:
                    seen.add(e)
                    yield e

    return unioned()


def n_hop(g: Graph, q: HopQuery, hop_cap: int | None = None) -> PathResult:
    """All simple paths from the source to criteria-matching nodes.

    Deterministic: paths come out in lexicographic node-id order, the
    lexicographically first ``max_paths`` of them when truncating.
    """
    cap = configured_hop_cap() if hop_cap is None else hop_cap
    if q.max_hops < 0:
        raise InvalidQuery("max_hops must be >= 0")
    if q.max_hops > cap:
        raise InvalidQuery(f"max_hops {q.max_hops} exceeds the configured cap {cap}")
    if q.max_paths < 1:
        raise InvalidQuery("max_paths must be >= 1")

    if isinstance(q.source, int) and not isinstance(q.source, bool):
        source = q.source
        if not 0 <= source < g.node_count:
            raise UnknownEntity(f"source node {source} out of range")
    else:
        resolved = g.node_id(str(q.source))
        if resolved is None:
            raise UnknownEntity(f"unknown source node key {q.source!r}")
        source = resolved

    target_tuples = _allowed_tuples(g.node_labels, q.target_criteria)
    edge_tuples = (
        _allowed_tuples(g.edge_labels, q.edge_filter)
        if q.edge_filter is not None else None
    )

    node_dls = g.node_labels.dls
    edge_dls = g.edge_labels.dls
    result = PathResult()
    path = [source]
    on_path = {source}

    def next_nodes(v: int) -> list[int]:
        out = set()
        for edge_id, other in g.incident_edges(v, q.direction):
            if other in on_path:
                continue
            if edge_tuples is not None and edge_dls.tuple_of(edge_id) not in edge_tuples:
                continue
            out.add(other)
        return sorted(out)

    def visit(v: int, depth: int) -> bool:
        """Depth-first; returns False when the path cap stops the search."""
        if node_dls.tuple_of(v) in target_tuples:
            if len(result.paths) >= q.max_paths:
                result.truncated = True
                return False
            result.paths.append(list(path))
        if depth == q.max_hops:
            return True
        for u in next_nodes(v):
            path.append(u)
            on_path.add(u)
            alive = visit(u, depth + 1)
            path.pop()
            on_path.discard(u)
            if not alive:
                return False
        return True

    visit(source, 0)
    return result
