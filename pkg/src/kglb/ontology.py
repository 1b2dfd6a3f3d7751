"""Label-ontology extraction, DOT emission, clustering, and partition assignment.

The ontology is a small graph over node-label signatures: every graph edge
contributes one count to the bucket (source signature, target signature, edge
signature).  Emitted DOT annotates each bucket with its share of all graph
edges.  Clustering the (symmetrized) ontology with Louvain yields a label ->
cluster map usable as a partitioning criterion for the underlying graph.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import EmptyGraph
from .graph_store import Graph


def node_signature(labels: Iterable[str]) -> str:
    """Canonical colon-joined signature; unlabeled entities map to ""."""
    return ":".join(sorted(labels, key=lambda s: (s.casefold(), s)))


@dataclass
class OntologyGraph:
    nodes: list[str] = field(default_factory=list)
    edges: dict[tuple[str, str, str], int] = field(default_factory=dict)
    total_edges: int = 0


@dataclass
class ClusterAssignment:
    cluster_of: dict[str, int]
    modularity: float

    @property
    def cluster_count(self) -> int:
        return len(set(self.cluster_of.values()))


def build_ontology(g: Graph) -> OntologyGraph:
    """One pass over the edges; nodes are all distinct node-label signatures."""
    node_sig: dict[int, str] = {0: ""}
    node_reg = g.node_labels.registry
    for t in node_reg.live_tuples():
        node_sig[t] = node_signature(
            g.dictionary.resolve(i) for i in node_reg.labels_of_tuple(t)
        )
    edge_sig: dict[int, str] = {0: ""}
    edge_reg = g.edge_labels.registry
    for t in edge_reg.live_tuples():
        edge_sig[t] = node_signature(
            g.dictionary.resolve(i) for i in edge_reg.labels_of_tuple(t)
        )

    sigs = set(node_sig[t] for t in node_reg.live_tuples())
    labeled = sum(node_reg.refcount_of(t) for t in node_reg.live_tuples())
    if labeled < g.node_count:
        sigs.add("")

    buckets: dict[tuple[str, str, str], int] = {}
    src, dst = g.edge_arrays()
    node_tuples = g.node_labels.dls
    edge_tuples = g.edge_labels.dls
    for e in range(g.edge_count):
        key = (
            node_sig[node_tuples.tuple_of(src[e])],
            node_sig[node_tuples.tuple_of(dst[e])],
            edge_sig[edge_tuples.tuple_of(e)],
        )
        buckets[key] = buckets.get(key, 0) + 1

    return OntologyGraph(nodes=sorted(sigs), edges=buckets, total_edges=g.edge_count)


# -- DOT emission ------------------------------------------------------------


def _quote(s: str) -> str:
    return '"%s"' % s.replace("\\", "\\\\").replace('"', '\\"')


def _pct_one_decimal(count: int, total: int) -> str:
    # half-up rounding to one decimal, in exact integer arithmetic
    tenths = (2 * count * 1000 + total) // (2 * total)
    return f"{tenths // 10}.{tenths % 10}"


def emit_dot(o: OntologyGraph) -> str:
    """Deterministic DOT digraph; edge labels carry the edge signature and
    its percentage of all graph edges."""
    header = (
        f"// label ontology: {len(o.nodes)} node signatures, "
        f"{len(o.edges)} edge buckets, {o.total_edges} graph edges"
    )
    if not o.nodes and not o.edges:
        return header + "\ndigraph G { }\n"
    lines = [header, "digraph G {"]
    for sig in sorted(o.nodes):
        lines.append(f"  {_quote(sig)};")
    for (src, dst, esig), count in sorted(o.edges.items()):
        pct = _pct_one_decimal(count, o.total_edges)
        label = f"{esig} {pct}%" if esig else f"{pct}%"
        lines.append(f"  {_quote(src)} -> {_quote(dst)} [label={_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- clustering -----------------------------------------------------------------


def _symmetric_weights(o: OntologyGraph) -> dict[str, dict[str, float]]:
    """Undirected weights; self-loop weight doubled (adjacency-matrix convention)."""
    adj: dict[str, dict[str, float]] = {sig: {} for sig in o.nodes}
    for (src, dst, _esig), count in o.edges.items():
        adj.setdefault(src, {})
        adj.setdefault(dst, {})
        if src == dst:
            adj[src][src] = adj[src].get(src, 0.0) + 2.0 * count
        else:
            adj[src][dst] = adj[src].get(dst, 0.0) + float(count)
            adj[dst][src] = adj[dst].get(src, 0.0) + float(count)
    return adj


def modularity(o: OntologyGraph, cluster_of: Mapping[str, int]) -> float:
    """Newman modularity of a signature partition over the symmetrized ontology."""
    adj = _symmetric_weights(o)
    names = sorted(adj)
    strength = {u: sum(adj[u].values()) for u in names}
    two_m = sum(strength.values())
    if two_m == 0:
        return 0.0
    q = 0.0
    for u in names:
        for v, w in adj[u].items():
            if cluster_of[u] == cluster_of[v]:
                q += w / two_m
    for c in set(cluster_of[u] for u in names):
        tot = sum(strength[u] for u in names if cluster_of[u] == c)
        q -= (tot / two_m) ** 2
    return q


def louvain(o: OntologyGraph, seed: int = 0) -> ClusterAssignment:
    """Two-phase Louvain over the symmetrized ontology weights.

    Node visit order is shuffled by a generator seeded with ``seed``; the
    result is deterministic for a fixed seed.
    """
    if not o.nodes:
        raise EmptyGraph("cannot cluster an empty ontology")
    names = sorted(set(o.nodes) | {s for (a, b, _e) in o.edges for s in (a, b)})
    index = {sig: i for i, sig in enumerate(names)}
    adj_by_name = _symmetric_weights(o)
    n = len(names)
    adj: list[dict[int, float]] = [
        {index[v]: w for v, w in adj_by_name[u].items()} for u in names
    ]

    rng = random.Random(seed)
    membership = list(range(n))  # original node -> current community label

    while True:
        moved_any, local = _local_phase(adj, rng)
        membership = [local[membership[i]] for i in range(n)]
        if not moved_any:
            break
        adj = _aggregate(adj, local)

    # dense cluster ids, numbered by first appearance over the sorted names
    remap: dict[int, int] = {}
    cluster_of: dict[str, int] = {}
    for i, sig in enumerate(names):
        c = membership[i]
        if c not in remap:
            remap[c] = len(remap)
        cluster_of[sig] = remap[c]
    return ClusterAssignment(cluster_of=cluster_of, modularity=modularity(o, cluster_of))


def _local_phase(adj: list[dict[int, float]], rng: random.Random) -> tuple[bool, list[int]]:
    """Greedy modularity moves until a fixpoint; returns (any move made,
    node -> dense community index)."""
    n = len(adj)
    strength = [sum(neigh.values()) for neigh in adj]
    two_m = sum(strength)
    community = list(range(n))
    sigma_tot = list(strength)

    moved_any = False
    if two_m > 0:
        order = list(range(n))
        while True:
            rng.shuffle(order)
            moves = 0
            for i in order:
                c_old = community[i]
                # weights from i into each neighboring community (self-loop excluded)
                into: dict[int, float] = {}
                for j, w in adj[i].items():
                    if j != i:
                        into[community[j]] = into.get(community[j], 0.0) + w
                sigma_tot[c_old] -= strength[i]
                best_c = c_old
                best_gain = into.get(c_old, 0.0) - sigma_tot[c_old] * strength[i] / two_m
                for c in sorted(into):
                    if c == c_old:
                        continue
                    gain = into[c] - sigma_tot[c] * strength[i] / two_m
                    if gain > best_gain + 1e-12:
                        best_gain = gain
                        best_c = c
                sigma_tot[best_c] += strength[i]
                community[i] = best_c
                if best_c != c_old:
                    moves += 1
                    moved_any = True
            if moves == 0:
                break

    dense: dict[int, int] = {}
    for i in range(n):
        if community[i] not in dense:
            dense[community[i]] = len(dense)
    return moved_any, [dense[community[i]] for i in range(n)]


def _aggregate(adj: list[dict[int, float]], local: list[int]) -> list[dict[int, float]]:
    size = max(local) + 1
    out: list[dict[int, float]] = [{} for _ in range(size)]
    for i, neigh in enumerate(adj):
        ci = local[i]
        for j, w in neigh.items():
            cj = local[j]
            out[ci][cj] = out[ci].get(cj, 0.0) + w
    return out


# -- partition assignment ------------------------------------------------------


@dataclass
class PartitionResult:
    node_partition: list[int]
    edge_partition: list[int]
    report: dict


def partition_assign(g: Graph, clusters: ClusterAssignment, k: int) -> PartitionResult:
    """Place nodes by their signature's cluster (mod k); edges follow their source.

    Unlabeled or unclustered nodes are spread by id mod k.  The report counts
    edges whose endpoints land in different partitions.
    """
    if k < 1:
        raise ValueError("partition count must be >= 1")
    node_reg = g.node_labels.registry
    sig_of_tuple = {
        t: node_signature(g.dictionary.resolve(i) for i in node_reg.labels_of_tuple(t))
        for t in node_reg.live_tuples()
    }
    part_of_tuple = {
        t: clusters.cluster_of[sig] % k
        for t, sig in sig_of_tuple.items()
        if sig in clusters.cluster_of
    }

    dls = g.node_labels.dls
    node_partition = [0] * g.node_count
    for v in range(g.node_count):
        t = dls.tuple_of(v)
        node_partition[v] = part_of_tuple.get(t, v % k) if t else v % k

    src, dst = g.edge_arrays()
    edge_partition = [0] * g.edge_count
    cut = 0
    for e in range(g.edge_count):
        edge_partition[e] = node_partition[src[e]]
        if node_partition[src[e]] != node_partition[dst[e]]:
            cut += 1

    counts = [0] * k
    for p in node_partition:
        counts[p] += 1
    report = {"partition_count": k, "node_counts": counts, "cut_edges": cut}
    return PartitionResult(node_partition=node_partition,
                           edge_partition=edge_partition, report=report)
