"""kglb: a property-graph label store built on tuple-indexed label sets.

Each entity (node or edge) holds exactly one tuple id naming its full label
set, and entities sharing a tuple are chained through an in-place linked
list of two fixed slots per entity.  On top of that sit label-filtered
queries, automatic label-ontology extraction with Louvain clustering,
binary snapshots, ingestion from delimited files, and a benchmark harness
against a conventional multimap baseline.
"""

from .bench import BaselineStore, OpsScript, SyntheticSpec, compare, generate
from .dictionary import GroupRings, LabelDict
from .errors import KglbError
from .graph_store import Graph, IngestManifest, ingest
from .label_store import LabelStore, SingleDls
from .ontology import (
    ClusterAssignment,
    OntologyGraph,
    PartitionResult,
    build_ontology,
    emit_dot,
    louvain,
    modularity,
    node_signature,
    partition_assign,
)
from .persistence import dump, load, load_file, save_file
from .query_engine import HopQuery, LabelPredicate, PathResult, match_nodes, n_hop
from .tuple_registry import TupleRegistry

__version__ = "0.1.0"

__all__ = [
    "BaselineStore",
    "ClusterAssignment",
    "Graph",
    "GroupRings",
    "HopQuery",
    "IngestManifest",
    "KglbError",
    "LabelDict",
    "LabelPredicate",
    "LabelStore",
    "OntologyGraph",
    "OpsScript",
    "PartitionResult",
    "PathResult",
    "SingleDls",
    "SyntheticSpec",
    "TupleRegistry",
    "build_ontology",
    "compare",
    "dump",
    "emit_dot",
    "generate",
    "ingest",
    "load",
    "load_file",
    "louvain",
    "match_nodes",
    "modularity",
    "n_hop",
    "node_signature",
    "partition_assign",
    "save_file",
]
