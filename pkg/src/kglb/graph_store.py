"""Directed multigraph topology, delimited-file ingestion, and the two label stores.

Nodes and edges are dense 0-based ordinals.  Node keys (external strings)
deduplicate across all node files and edge endpoint columns; endpoints
auto-create nodes on first sight.  Adjacency is materialized lazily as
offset-indexed neighbor lists (one per direction) and invalidated by any
topology mutation.

Ingestion is driven by a JSON manifest naming files, delimiters, and which
columns become keys, endpoints, and labels.  A label column in ``value`` mode
attaches the cell string directly; ``keyed`` mode additionally interns the
column header as a key label and groups the cell label under it.  All labels
from one row are attached as a single set, so an entity's first row costs one
tuple intern instead of one per label.
"""

from __future__ import annotations

import csv
import json
from array import array
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from .dictionary import LabelDict
from .errors import CapacityExceeded, ManifestError, ParseError, UnknownEntity
from .label_store import LabelStore

MAX_ENTITY_ID = 2**63 - 1


class Graph:
    def __init__(self, node_count: int = 0, with_names: bool = True):
        self.dictionary = LabelDict()
        self._names: list[str] | None = [] if with_names else None
        self._key_to_id: dict[str, int] | None = {} if with_names else None
        self._node_count = 0
        self._src = array("q")
        self._dst = array("q")
        self.node_labels = LabelStore(self.dictionary, 0)
        self.edge_labels = LabelStore(self.dictionary, 0)
        self._csr: dict[str, tuple] = {}
        if node_count:
            self.resize_nodes(node_count)

    # -- topology -----------------------------------------------------------

    @property
    def node_count(self) -> int:
        return self._node_count

    @property
    def edge_count(self) -> int:
        return len(self._src)

    @property
    def has_names(self) -> bool:
        return self._names is not None

    def add_node(self, key: str | None = None) -> int:
        if self._node_count >= MAX_ENTITY_ID:
            raise CapacityExceeded("node id space exhausted")
        node_id = self._node_count
        if self._names is not None:
            if key is None:
                key = str(node_id)
            if key in self._key_to_id:
                raise ValueError(f"duplicate node key {key!r}")
            self._names.append(key)
            self._key_to_id[key] = node_id
        self._node_count += 1
        self.node_labels.grow(self._node_count)
        self._csr.clear()
        return node_id

    def ensure_node(self, key: str) -> int:
        """Node id for this key, creating the node on first sight."""
        if self._key_to_id is None:
            raise ValueError("graph was built without node names")
        existing = self._key_to_id.get(key)
        if existing is not None:
            return existing
        return self.add_node(key)

    def resize_nodes(self, new_capacity: int) -> None:
        """Grow the node class to at least ``new_capacity`` dense ids."""
        if new_capacity > MAX_ENTITY_ID:
            raise CapacityExceeded("node id space exhausted")
        while self._node_count < new_capacity:
            if self._names is not None:
                self.add_node()
            else:
                self._node_count = new_capacity
        self.node_labels.grow(self._node_count)
        self._csr.clear()

    def append_edge(self, source: int, target: int) -> int:
        """Append a directed edge; grows the node class for unseen endpoints."""
        if source < 0 or target < 0:
            raise UnknownEntity(f"negative endpoint ({source}, {target})")
        if len(self._src) >= MAX_ENTITY_ID:
            raise CapacityExceeded("edge id space exhausted")
        needed = max(source, target) + 1
        if needed > self._node_count:
            self.resize_nodes(needed)
        edge_id = len(self._src)
        self._src.append(source)
        self._dst.append(target)
        self.edge_labels.grow(edge_id + 1)
        self._csr.clear()
        return edge_id

    def bulk_append_edges(self, src, dst) -> None:
        """Append whole endpoint arrays at once (synthetic-generator path)."""
        import numpy as np

        src = np.ascontiguousarray(src, dtype=np.int64)
        dst = np.ascontiguousarray(dst, dtype=np.int64)
        if len(src) != len(dst):
            raise ValueError("src and dst must have equal length")
        if len(src) and (
            min(src.min(), dst.min()) < 0
            or max(src.max(), dst.max()) >= self._node_count
        ):
            raise UnknownEntity("edge endpoint out of range")
        self._src.frombytes(src.tobytes())
        self._dst.frombytes(dst.tobytes())
        self.edge_labels.grow(len(self._src))
        self._csr.clear()

    def edge_endpoints(self, edge_id: int) -> tuple[int, int]:
        if not 0 <= edge_id < len(self._src):
            raise UnknownEntity(f"edge {edge_id} out of range")
        return self._src[edge_id], self._dst[edge_id]

    def edge_arrays(self) -> tuple[array, array]:
        return self._src, self._dst

    def node_key(self, node_id: int) -> str:
        if not 0 <= node_id < self._node_count:
            raise UnknownEntity(f"node {node_id} out of range")
        return self._names[node_id] if self._names is not None else str(node_id)

    def node_id(self, key: str) -> int | None:
        if self._key_to_id is None:
            return None
        return self._key_to_id.get(key)

    # -- adjacency ----------------------------------------------------------------

    def _csr_for(self, direction: str):
        cached = self._csr.get(direction)
        if cached is not None:
            return cached
        import numpy as np

        key_arr = self._src if direction == "out" else self._dst
        if len(key_arr) == 0:
            indptr = np.zeros(self._node_count + 1, dtype=np.int64)
            order = np.empty(0, dtype=np.int64)
        else:
            keys = np.frombuffer(key_arr, dtype=np.int64)
            order = np.argsort(keys, kind="stable")
            counts = np.bincount(keys, minlength=self._node_count)
            indptr = np.zeros(self._node_count + 1, dtype=np.int64)
            np.cumsum(counts, out=indptr[1:])
        self._csr[direction] = (indptr, order)
        return indptr, order

    def _check_node(self, v: int) -> None:
        if not 0 <= v < self._node_count:
            raise UnknownEntity(f"node {v} out of range [0, {self._node_count})")

    def out_neighbors(self, v: int) -> list[int]:
        """Targets of v's out-edges, in edge insertion order."""
        self._check_node(v)
        indptr, order = self._csr_for("out")
        return [self._dst[e] for e in order[indptr[v]:indptr[v + 1]]]

    def in_neighbors(self, v: int) -> list[int]:
        """Sources of v's in-edges, in edge insertion order."""
        self._check_node(v)
        indptr, order = self._csr_for("in")
        return [self._src[e] for e in order[indptr[v]:indptr[v + 1]]]

    def incident_edges(self, v: int, direction: str) -> Iterator[tuple[int, int]]:
        """(edge_id, other_endpoint) pairs for the given direction(s)."""
        self._check_node(v)
        if direction in ("out", "both"):
            indptr, order = self._csr_for("out")
            for e in order[indptr[v]:indptr[v + 1]]:
                yield int(e), self._dst[e]
        if direction in ("in", "both"):
            indptr, order = self._csr_for("in")
            for e in order[indptr[v]:indptr[v + 1]]:
                yield int(e), self._src[e]

    # -- reporting -------------------------------------------------------------------

    def memory_report(self) -> dict:
        node_report = self.node_labels.memory_report()
        edge_report = self.edge_labels.memory_report()
        dictionary = node_report["dictionary"]
        report = {
            "dictionary": dictionary,
            "node_labels": {k: v for k, v in node_report.items()
                            if not k.startswith("dictionary")},
            "edge_labels": {k: v for k, v in edge_report.items()
                            if not k.startswith("dictionary")},
            "edge_array": 16 * len(self._src),
        }
        report["total"] = (
            dictionary
            + report["node_labels"]["dls_slots"] + report["node_labels"]["dls_head"]
            + report["node_labels"]["registry"]
            + report["edge_labels"]["dls_slots"] + report["edge_labels"]["dls_head"]
            + report["edge_labels"]["registry"]
            + report["edge_array"]
        )
        return report

    def stats(self) -> dict:
        return {
            "nodes": self._node_count,
            "edges": len(self._src),
            "labels": len(self.dictionary),
            "node_tuples_live": self.node_labels.registry.live_count,
            "node_tuples_maxid": self.node_labels.registry.maxid,
            "node_recycle_depth": self.node_labels.registry.recycle_depth,
            "edge_tuples_live": self.edge_labels.registry.live_count,
            "edge_tuples_maxid": self.edge_labels.registry.maxid,
            "edge_recycle_depth": self.edge_labels.registry.recycle_depth,
            "memory": self.memory_report(),
        }


# -- ingestion ------------------------------------------------------------------


@dataclass
class LabelColumn:
    column: str
    mode: str = "value"  # "value" | "keyed"


@dataclass
class NodeFileSpec:
    path: Path
    key_column: str
    label_columns: list[LabelColumn] = field(default_factory=list)
    delimiter: str = ","


@dataclass
class EdgeFileSpec:
    path: Path
    source_column: str
    target_column: str
    label_columns: list[LabelColumn] = field(default_factory=list)
    delimiter: str = ","


@dataclass
class IngestManifest:
    node_files: list[NodeFileSpec] = field(default_factory=list)
    edge_files: list[EdgeFileSpec] = field(default_factory=list)
    label_seed: list[str] = field(default_factory=list)

    @classmethod
    def from_dict(cls, doc: dict, base_dir: Path | None = None) -> "IngestManifest":
        base = base_dir or Path(".")

        def columns(raw) -> list[LabelColumn]:
            out = []
            for c in raw or []:
                mode = c.get("mode", "value")
                if mode not in ("value", "keyed"):
                    raise ManifestError(f"unknown label column mode {mode!r}")
                out.append(LabelColumn(column=c["column"], mode=mode))
            return out

        try:
            node_files = [
                NodeFileSpec(
                    path=base / nf["path"],
                    key_column=nf["key_column"],
                    label_columns=columns(nf.get("label_columns")),
                    delimiter=nf.get("delimiter", ","),
                )
                for nf in doc.get("node_files", [])
            ]
            edge_files = [
                EdgeFileSpec(
                    path=base / ef["path"],
                    source_column=ef["source_column"],
                    target_column=ef["target_column"],
                    label_columns=columns(ef.get("label_columns")),
                    delimiter=ef.get("delimiter", ","),
                )
                for ef in doc.get("edge_files", [])
            ]
        except KeyError as exc:
            raise ManifestError(f"manifest missing required field {exc}") from exc
        return cls(node_files=node_files, edge_files=edge_files,
                   label_seed=list(doc.get("label_seed", [])))

    @classmethod
    def load(cls, path: str | Path) -> "IngestManifest":
        path = Path(path)
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        return cls.from_dict(doc, base_dir=path.parent)


def _rows(path: Path, delimiter: str, needed: list[str]) -> Iterator[tuple[int, dict]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        header = next(reader, None)
        if header is None:
            raise ParseError(f"{path}: empty file, header expected", str(path), 1)
        missing = [c for c in needed if c not in header]
        if missing:
            raise ManifestError(f"{path}: columns {missing} not in header {header}")
        width = len(header)
        for line_no, row in enumerate(reader, start=2):
            if len(row) != width:
                raise ParseError(
                    f"{path}:{line_no}: expected {width} fields, got {len(row)}",
                    str(path), line_no,
                )
            yield line_no, dict(zip(header, row))


def _row_label_ids(graph: Graph, row: dict, label_columns: list[LabelColumn]) -> list[int]:
    ids = []
    for lc in label_columns:
        cell = row[lc.column]
        if not cell:
            continue
        if lc.mode == "keyed":
            key_id = graph.dictionary.intern(lc.column)
            value_id = graph.dictionary.intern(cell)
            graph.dictionary.group_add(key_id, value_id)
            ids.append(value_id)
        else:
            ids.append(graph.dictionary.intern(cell))
    return ids


def ingest(manifest: IngestManifest) -> Graph:
    """Build a graph from the manifest's delimited files."""
    graph = Graph(with_names=True)
    for label in manifest.label_seed:
        graph.dictionary.intern(label)

    for nf in manifest.node_files:
        needed = [nf.key_column] + [lc.column for lc in nf.label_columns]
        for _line, row in _rows(nf.path, nf.delimiter, needed):
            entity = graph.ensure_node(row[nf.key_column])
            ids = _row_label_ids(graph, row, nf.label_columns)
            if ids:
                graph.node_labels.attach_set(entity, ids)

    for ef in manifest.edge_files:
        needed = [ef.source_column, ef.target_column] + [lc.column for lc in ef.label_columns]
        for _line, row in _rows(ef.path, ef.delimiter, needed):
            source = graph.ensure_node(row[ef.source_column])
            target = graph.ensure_node(row[ef.target_column])
            edge_id = graph.append_edge(source, target)
            ids = _row_label_ids(graph, row, ef.label_columns)
            if ids:
                graph.edge_labels.attach_set(edge_id, ids)

    return graph
