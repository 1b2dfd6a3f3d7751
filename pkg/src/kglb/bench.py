"""Synthetic graph generation and comparison against a conventional multimap store.

The baseline is the textbook layout this package replaces: a hash multimap
label -> entity set next to a hash map entity -> label set.  It doubles as
the correctness oracle, so any divergence during a comparison run is a hard
error, not a report footnote.  Memory is compared through deterministic
counted bytes (container capacities at fixed slot widths); process RSS is
reported informationally only.
"""

from __future__ import annotations

import json
import resource
import time
from dataclasses import dataclass, field
from typing import Sequence

from .errors import CorrectnessFailure, SpecError
from .graph_store import Graph

_POOL_SIZE = 256  # distinct label combinations sampled per set-size


@dataclass
class LabelCountDist:
    """Labels-per-entity distribution: every entity gets ``fixed`` labels, or
    a zipf(``zipf``) draw clipped to [1, ``max``]."""
    fixed: int | None = None
    zipf: float | None = None
    max: int = 8

    @classmethod
    def from_dict(cls, doc) -> "LabelCountDist":
        if isinstance(doc, int):
            return cls(fixed=doc)
        if "fixed" in doc:
            return cls(fixed=int(doc["fixed"]))
        if "zipf" in doc:
            return cls(zipf=float(doc["zipf"]), max=int(doc.get("max", 8)))
        raise SpecError(f"bad labels-per-entity distribution {doc!r}")

    def to_dict(self) -> dict:
        if self.fixed is not None:
            return {"fixed": self.fixed}
        return {"zipf": self.zipf, "max": self.max}

    def validate(self, universe: int, what: str) -> None:
        if self.fixed is not None:
            if self.fixed < 0:
                raise SpecError(f"{what}: fixed label count must be >= 0")
            if self.fixed > universe:
                raise SpecError(f"{what}: fixed count {self.fixed} exceeds universe {universe}")
        elif self.zipf is not None:
            if self.zipf <= 1.0:
                raise SpecError(f"{what}: zipf exponent must be > 1")
            if self.max < 1:
                raise SpecError(f"{what}: zipf max must be >= 1")
        else:
            raise SpecError(f"{what}: distribution must set fixed or zipf")


@dataclass
class SyntheticSpec:
    node_count: int
    edge_count: int
    node_label_count: int = 16
    edge_label_count: int = 34
    labels_per_node: LabelCountDist = field(default_factory=lambda: LabelCountDist(fixed=2))
    labels_per_edge: LabelCountDist = field(default_factory=lambda: LabelCountDist(fixed=1))
    seed: int = 0

    @classmethod
    def from_dict(cls, doc: dict) -> "SyntheticSpec":
        try:
            return cls(
                node_count=int(doc["node_count"]),
                edge_count=int(doc["edge_count"]),
                node_label_count=int(doc.get("node_label_count", 16)),
                edge_label_count=int(doc.get("edge_label_count", 34)),
                labels_per_node=LabelCountDist.from_dict(doc.get("labels_per_node", 2)),
                labels_per_edge=LabelCountDist.from_dict(doc.get("labels_per_edge", 1)),
                seed=int(doc.get("seed", 0)),
            )
        except KeyError as exc:
            raise SpecError(f"spec missing required field {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "node_count": self.node_count,
            "edge_count": self.edge_count,
            "node_label_count": self.node_label_count,
            "edge_label_count": self.edge_label_count,
            "labels_per_node": self.labels_per_node.to_dict(),
            "labels_per_edge": self.labels_per_edge.to_dict(),
            "seed": self.seed,
        }

    def validate(self) -> None:
        if self.node_count < 0 or self.edge_count < 0:
            raise SpecError("node_count and edge_count must be >= 0")
        if self.edge_count > 0 and self.node_count == 0:
            raise SpecError("edges require at least one node")
        if self.node_label_count < 0 or self.edge_label_count < 0:
            raise SpecError("label universe sizes must be >= 0")
        if self.node_label_count:
            self.labels_per_node.validate(self.node_label_count, "labels_per_node")
        if self.edge_label_count:
            self.labels_per_edge.validate(self.edge_label_count, "labels_per_edge")


def _draw_counts(rng, dist: LabelCountDist, n: int, universe: int):
    import numpy as np

    if universe == 0 or n == 0:
        return np.zeros(n, dtype=np.int64)
    if dist.fixed is not None:
        return np.full(n, dist.fixed, dtype=np.int64)
    cap = min(dist.max, universe)
    return np.minimum(rng.zipf(dist.zipf, size=n), cap).astype(np.int64)


def _assign_tuples(rng, store, label_ids: Sequence[int], counts) -> None:
    """Intern a sampled pool of label combinations per set size and assign one
    tuple id to every entity, then install the rings in bulk."""
    import numpy as np

    n = len(counts)
    assignments = np.zeros(n, dtype=np.int64)
    for size in np.unique(counts):
        size = int(size)
        if size == 0:
            continue
        where = np.nonzero(counts == size)[0]
        pool: list[int] = []
        seen: set[tuple[int, ...]] = set()
        for _ in range(min(_POOL_SIZE, max(1, 4 * len(where)))):
            pick = tuple(sorted(rng.choice(len(label_ids), size=size, replace=False).tolist()))
            if pick in seen:
                continue
            seen.add(pick)
            pool.append(store.registry.intern_label_set([label_ids[i] for i in pick]))
        choice = rng.integers(0, len(pool), size=len(where))
        assignments[where] = np.asarray(pool, dtype=np.int64)[choice]
    store.bulk_attach(assignments)
    # combinations sampled but never assigned would linger with refcount 0
    for t in list(store.registry.live_tuples()):
        if store.registry.refcount_of(t) == 0:
            store.registry.acquire(t)
            store.registry.release(t)


def generate(spec: SyntheticSpec) -> Graph:
    """Deterministic synthetic graph: same spec and seed, same snapshot bytes."""
    import numpy as np

    spec.validate()
    rng = np.random.default_rng(spec.seed)
    g = Graph(node_count=spec.node_count, with_names=False)

    if spec.edge_count:
        src = rng.integers(0, spec.node_count, size=spec.edge_count, dtype=np.int64)
        dst = rng.integers(0, spec.node_count, size=spec.edge_count, dtype=np.int64)
        g.bulk_append_edges(src, dst)

    node_label_ids = [g.dictionary.intern(f"NL{i}") for i in range(spec.node_label_count)]
    edge_label_ids = [g.dictionary.intern(f"EL{i}") for i in range(spec.edge_label_count)]
    if node_label_ids:
        counts = _draw_counts(rng, spec.labels_per_node, spec.node_count, len(node_label_ids))
        _assign_tuples(rng, g.node_labels, node_label_ids, counts)
    if edge_label_ids and spec.edge_count:
        counts = _draw_counts(rng, spec.labels_per_edge, spec.edge_count, len(edge_label_ids))
        _assign_tuples(rng, g.edge_labels, edge_label_ids, counts)
    return g


# -- baseline ----------------------------------------------------------------


class BaselineStore:
    """Conventional key-value layout: label -> set of entities, entity -> set
    of labels.  Used both as the comparison subject and as the oracle."""

    def __init__(self):
        self.by_label: dict[str, set[int]] = {}
        self.by_entity: dict[int, set[str]] = {}

    def add_label(self, entity: int, label: str) -> None:
        self.by_label.setdefault(label, set()).add(entity)
        self.by_entity.setdefault(entity, set()).add(label)

    def remove_label(self, entity: int, label: str) -> None:
        labels = self.by_entity.get(entity)
        if labels is None or label not in labels:
            return
        labels.discard(label)
        if not labels:
            del self.by_entity[entity]
        holders = self.by_label[label]
        holders.discard(entity)
        if not holders:
            del self.by_label[label]

    def labels_of(self, entity: int) -> set[str]:
        return set(self.by_entity.get(entity, ()))

    def entities_with_label(self, label: str) -> set[int]:
        return set(self.by_label.get(label, ()))

    def entities_with_all(self, labels: Sequence[str]) -> set[int]:
        sets = [self.by_label.get(s, set()) for s in labels]
        if not sets:
            return set()
        out = set(min(sets, key=len))
        for s in sets:
            out &= s
        return out

    def counted_bytes(self) -> int:
        """Deterministic model: 24 bytes per hash entry plus 8 per member."""
        total = 0
        for label, members in self.by_label.items():
            total += 24 + len(label.encode("utf-8")) + 8 * len(members)
        for _entity, labels in self.by_entity.items():
            total += 24 + sum(8 + len(s.encode("utf-8")) for s in labels)
        return total


# -- comparison -------------------------------------------------------------------


@dataclass
class OpsScript:
    add_ops: int = 0
    remove_ops: int = 0
    label_queries: int = 100
    all_queries: int = 50
    seed: int = 1

    @classmethod
    def from_dict(cls, doc: dict) -> "OpsScript":
        return cls(
            add_ops=int(doc.get("add_ops", 0)),
            remove_ops=int(doc.get("remove_ops", 0)),
            label_queries=int(doc.get("label_queries", 100)),
            all_queries=int(doc.get("all_queries", 50)),
            seed=int(doc.get("seed", 1)),
        )

    def to_dict(self) -> dict:
        return {
            "add_ops": self.add_ops,
            "remove_ops": self.remove_ops,
            "label_queries": self.label_queries,
            "all_queries": self.all_queries,
            "seed": self.seed,
        }


def _baseline_from_graph(g: Graph) -> BaselineStore:
    base = BaselineStore()
    store = g.node_labels
    registry = store.registry
    for t in registry.live_tuples():
        labels = [g.dictionary.resolve(i) for i in registry.labels_of_tuple(t)]
        for e in store.entities_with_tuple(t):
            for s in labels:
                base.add_label(e, s)
    return base


def compare(spec: SyntheticSpec, ops: OpsScript) -> dict:
    """Run one identical workload on both stores; divergence is a hard error."""
    import numpy as np

    g = generate(spec)
    base = _baseline_from_graph(g)
    store = g.node_labels
    rng = np.random.default_rng(ops.seed)
    labels = [f"NL{i}" for i in range(spec.node_label_count)]
    if not labels or not spec.node_count:
        raise SpecError("comparison needs nodes and a node label universe")

    def random_entity() -> int:
        return int(rng.integers(0, spec.node_count))

    def random_label() -> str:
        return labels[int(rng.integers(0, len(labels)))]

    for _ in range(ops.add_ops):
        e, s = random_entity(), random_label()
        store.add_label(e, s)
        base.add_label(e, s)
    for _ in range(ops.remove_ops):
        e, s = random_entity(), random_label()
        store.remove_label(e, s)
        base.remove_label(e, s)

    timings = {"label_store": {}, "baseline": {}}

    label_query_args = [random_label() for _ in range(ops.label_queries)]
    t0 = time.perf_counter()
    mine_label = [
        frozenset(store.entities_with_label(store.dict.id_of(s) or 0))
        for s in label_query_args
    ]
    timings["label_store"]["label_queries_s"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    base_label = [frozenset(base.entities_with_label(s)) for s in label_query_args]
    timings["baseline"]["label_queries_s"] = time.perf_counter() - t0
    for s, got, want in zip(label_query_args, mine_label, base_label):
        if got != want:
            raise CorrectnessFailure(
                f"entities_with_label({s!r}) diverged: "
                f"{len(got)} vs {len(want)} entities"
            )

    all_query_args = [
        sorted({random_label(), random_label()}) for _ in range(ops.all_queries)
    ]
    t0 = time.perf_counter()
    mine_all = [
        frozenset(store.entities_with_all([store.dict.id_of(s) for s in arg]))
        if all(store.dict.id_of(s) is not None for s in arg) else frozenset()
        for arg in all_query_args
    ]
    timings["label_store"]["all_queries_s"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    base_all = [frozenset(base.entities_with_all(arg)) for arg in all_query_args]
    timings["baseline"]["all_queries_s"] = time.perf_counter() - t0
    for arg, got, want in zip(all_query_args, mine_all, base_all):
        if got != want:
            raise CorrectnessFailure(f"entities_with_all({arg}) diverged")

    report = {
        "spec": spec.to_dict(),
        "ops": ops.to_dict(),
        "correctness": "ok",
        "label_store": {
            "counted_bytes": store.memory_report(),
            "timings": timings["label_store"],
        },
        "baseline": {
            "counted_bytes": base.counted_bytes(),
            "timings": timings["baseline"],
        },
        "rss_max_kb": resource.getrusage(resource.RUSAGE_SELF).ru_maxrss,
    }
    return report


def run_bench_file(spec_path: str, report_path: str | None = None) -> dict:
    """CLI entry: spec file holds {"graph": SyntheticSpec, "ops": OpsScript}."""
    with open(spec_path, encoding="utf-8") as fh:
        doc = json.load(fh)
    spec = SyntheticSpec.from_dict(doc.get("graph", doc))
    ops = OpsScript.from_dict(doc.get("ops", {}))
    report = compare(spec, ops)
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return report
