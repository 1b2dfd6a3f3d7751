import random

import pytest

from helpers import enumerate_simple_paths
from kglb.errors import InvalidQuery, UnknownEntity
from kglb.graph_store import Graph
from kglb.query_engine import (
    HopQuery,
    LabelPredicate,
    configured_hop_cap,
    match_nodes,
    n_hop,
)


def any_of(*labels) -> LabelPredicate:
    return LabelPredicate(mode="any", labels=list(labels))


def all_of(*labels) -> LabelPredicate:
    return LabelPredicate(mode="all", labels=list(labels))


def test_zero_hops_matching_source_yields_single_path(wiki_graph):
    q = HopQuery(source="Tom", max_hops=0, target_criteria=any_of("chess"))
    result = n_hop(wiki_graph, q)
    assert result.to_keys(wiki_graph) == [["Tom"]]
    assert not result.truncated


def test_zero_hops_non_matching_source_yields_nothing(wiki_graph):
    q = HopQuery(source="Tom", max_hops=0, target_criteria=any_of("dance"))
    assert n_hop(wiki_graph, q).paths == []


def test_wiki_three_hop_matches_exhaustive_enumeration(wiki_graph):
    g = wiki_graph
    adjacency: dict[int, set[int]] = {}
    src, dst = g.edge_arrays()
    for e in range(g.edge_count):
        adjacency.setdefault(src[e], set()).add(dst[e])
    dance = {v for v in range(g.node_count) if "dance" in g.node_labels.labels_of(v)}
    expected = enumerate_simple_paths(adjacency, g.node_id("Tom"), 3, lambda v: v in dance)
    q = HopQuery(source="Tom", max_hops=3, target_criteria=any_of("dance"), max_paths=1000)
    assert n_hop(g, q).paths == sorted(expected)


def test_match_nodes_any_equals_label_ring(wiki_graph):
    g = wiki_graph
    male = g.dictionary.id_of("MALE")
    assert set(match_nodes(g, any_of("MALE"))) == set(g.node_labels.entities_with_label(male))


def test_match_nodes_all_on_wiki(wiki_graph):
    g = wiki_graph
    got = {g.node_key(v) for v in match_nodes(g, all_of("chess", "MALE"))}
    assert got == {"Tom", "Alex"}


def test_match_nodes_unknown_label_matches_nothing(wiki_graph):
    assert list(match_nodes(wiki_graph, any_of("no-such"))) == []
    assert list(match_nodes(wiki_graph, all_of("chess", "no-such"))) == []


def test_match_nodes_never_scans_unlabeled_entities():
    g = Graph(node_count=10_000, with_names=False)
    for v in range(20):
        g.node_labels.add_label(v, "rare")
    g.node_labels.ring_steps = 0
    got = list(match_nodes(g, any_of("rare")))
    assert len(got) == 20
    assert g.node_labels.ring_steps == 20  # touched only the ring, not 10k entities


def test_match_nodes_any_deduplicates():
    g = Graph(node_count=3, with_names=False)
    g.node_labels.attach_set(0, [g.dictionary.intern("a"), g.dictionary.intern("b")])
    got = list(match_nodes(g, any_of("a", "b")))
    assert got == [0]


def _random_graph(seed: int, n: int, m: int):
    rng = random.Random(seed)
    g = Graph(node_count=n, with_names=False)
    adjacency: dict[int, set[int]] = {}
    radjacency: dict[int, set[int]] = {}
    for _ in range(m):
        s, t = rng.randrange(n), rng.randrange(n)
        g.append_edge(s, t)
        adjacency.setdefault(s, set()).add(t)
        radjacency.setdefault(t, set()).add(s)
    labeled: dict[int, set[str]] = {}
    for v in range(n):
        labels = set(rng.sample(["p", "q", "r"], rng.randint(0, 2)))
        for s in labels:
            g.node_labels.add_label(v, s)
        labeled[v] = labels
    return g, adjacency, radjacency, labeled


@pytest.mark.parametrize("seed", [1, 2, 3, 4, 5])
def test_random_graphs_match_oracle_up_to_three_hops(seed):
    g, adjacency, radjacency, labeled = _random_graph(seed, 150, 900)
    rng = random.Random(seed * 31)
    for _ in range(5):
        source = rng.randrange(150)
        hops = rng.randint(0, 3)
        target = rng.choice(["p", "q", "r"])
        direction = rng.choice(["out", "in", "both"])
        if direction == "out":
            adj = adjacency
        elif direction == "in":
            adj = radjacency
        else:
            adj = {
                v: adjacency.get(v, set()) | radjacency.get(v, set())
                for v in range(150)
            }
        expected = sorted(enumerate_simple_paths(
            adj, source, hops, lambda v: target in labeled[v]))
        q = HopQuery(source=source, max_hops=hops, direction=direction,
                     target_criteria=any_of(target), max_paths=len(expected) + 10)
        got = n_hop(g, q)
        assert got.paths == expected
        assert not got.truncated


def test_paths_come_out_in_lexicographic_order(wiki_graph):
    q = HopQuery(source="Tom", max_hops=3, target_criteria=any_of("MALE", "FEMALE"),
                 max_paths=1000)
    paths = n_hop(wiki_graph, q).paths
    assert paths == sorted(paths)


def test_truncation_keeps_lexicographically_first_paths(wiki_graph):
    q_all = HopQuery(source="Tom", max_hops=3,
                     target_criteria=any_of("MALE", "FEMALE"), max_paths=1000)
    full = n_hop(wiki_graph, q_all)
    assert not full.truncated
    q_cut = HopQuery(source="Tom", max_hops=3,
                     target_criteria=any_of("MALE", "FEMALE"), max_paths=2)
    cut = n_hop(wiki_graph, q_cut)
    assert cut.truncated
    assert cut.paths == full.paths[:2]


def test_edge_filter_restricts_traversal(wiki_graph):
    g = wiki_graph
    # Tom -knows-> Alex -knows-> Mary; Mary->Susan is "likes" so blocked
    q = HopQuery(source="Tom", max_hops=3, target_criteria=any_of("FEMALE"),
                 edge_filter=any_of("knows"))
    got = n_hop(g, q).to_keys(g)
    assert got == [["Tom", "Alex", "Mary"]]


def test_every_returned_path_is_edge_valid(wiki_graph):
    g = wiki_graph
    raw_edges = set()
    src, dst = g.edge_arrays()
    for e in range(g.edge_count):
        raw_edges.add((src[e], dst[e]))
    q = HopQuery(source="Tom", max_hops=3, target_criteria=any_of("MALE", "FEMALE"),
                 max_paths=100)
    for path in n_hop(g, q).paths:
        assert len(path) == len(set(path))  # simple
        for a, b in zip(path, path[1:]):
            assert (a, b) in raw_edges


def test_source_forms():
    g = Graph(node_count=2, with_names=False)
    g.node_labels.add_label(1, "z")
    g.append_edge(0, 1)
    q = HopQuery(source=0, max_hops=1, target_criteria=any_of("z"))
    assert n_hop(g, q).paths == [[0, 1]]
    with pytest.raises(UnknownEntity):
        n_hop(g, HopQuery(source=9, max_hops=1, target_criteria=any_of("z")))


def test_unknown_source_key_rejected(wiki_graph):
    with pytest.raises(UnknownEntity):
        n_hop(wiki_graph, HopQuery(source="Nobody", max_hops=1,
                                   target_criteria=any_of("chess")))


def test_hop_cap_enforced(wiki_graph):
    q = HopQuery(source="Tom", max_hops=11, target_criteria=any_of("chess"))
    with pytest.raises(InvalidQuery):
        n_hop(wiki_graph, q)
    assert n_hop(wiki_graph, HopQuery(source="Tom", max_hops=10,
                                      target_criteria=any_of("chess"))).paths


def test_env_overrides_hop_cap(wiki_graph, monkeypatch):
    monkeypatch.setenv("KGLB_MAX_HOPS", "12")
    assert configured_hop_cap() == 12
    q = HopQuery(source="Tom", max_hops=12, target_criteria=any_of("chess"))
    assert n_hop(wiki_graph, q).paths
    monkeypatch.setenv("KGLB_MAX_HOPS", "2")
    with pytest.raises(InvalidQuery):
        n_hop(wiki_graph, HopQuery(source="Tom", max_hops=3,
                                   target_criteria=any_of("chess")))


def test_query_document_parsing():
    q = HopQuery.from_dict({
        "source": "Tom", "max_hops": 3,
        "target_criteria": {"any": ["dance"]},
        "edge_filter": {"any": ["knows"]},
        "direction": "both", "max_paths": 5,
    })
    assert q.direction == "both"
    assert q.edge_filter.labels == ["knows"]
    for bad in [
        {"source": "x", "max_hops": 1, "target_criteria": {}},
        {"source": "x", "max_hops": 1, "target_criteria": {"some": ["a"]}},
        {"source": "x", "max_hops": 1, "target_criteria": {"all": ["a"], "any": ["b"]}},
        {"source": "x", "target_criteria": {"any": ["a"]}},
        {"source": "x", "max_hops": 1, "target_criteria": {"any": ["a"]}, "direction": "up"},
        {"source": "x", "max_hops": 1, "target_criteria": {"any": ["a"]},
         "edge_filter": {"all": ["r"]}},
    ]:
        with pytest.raises(InvalidQuery):
            HopQuery.from_dict(bad)
