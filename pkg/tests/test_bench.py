import json

import pytest

from kglb.bench import (
    BaselineStore,
    LabelCountDist,
    OpsScript,
    SyntheticSpec,
    compare,
    generate,
    run_bench_file,
)
from kglb.errors import CorrectnessFailure, SpecError
from kglb.persistence import dump


def small_spec(**overrides) -> SyntheticSpec:
    base = dict(node_count=500, edge_count=1500, node_label_count=16,
                edge_label_count=34, seed=7)
    base.update(overrides)
    return SyntheticSpec(**base)


def test_generation_is_deterministic_byte_identical():
    spec = small_spec()
    assert dump(generate(spec)) == dump(generate(spec))
    other = dump(generate(small_spec(seed=8)))
    assert other != dump(generate(spec))


def test_zero_edges_gives_nodes_only():
    g = generate(small_spec(edge_count=0))
    assert g.node_count == 500
    assert g.edge_count == 0


def test_expero_shape_counts():
    g = generate(small_spec(node_count=2000, edge_count=3000))
    node_labels = set()
    for t in g.node_labels.registry.live_tuples():
        node_labels.update(g.node_labels.registry.labels_of_tuple(t))
    edge_labels = set()
    for t in g.edge_labels.registry.live_tuples():
        edge_labels.update(g.edge_labels.registry.labels_of_tuple(t))
    # 16 node / 34 edge label universes, shaped after the billion-scale dataset
    assert len(node_labels) <= 16
    assert len(edge_labels) <= 34
    assert len(node_labels) >= 10
    for v in range(0, 2000, 97):
        assert len(g.node_labels.labels_of(v)) == 2


def test_fixed_distribution_attaches_exact_count():
    g = generate(small_spec(labels_per_node=LabelCountDist(fixed=3)))
    for v in range(0, 500, 41):
        assert len(g.node_labels.labels_of(v)) == 3


def test_zipf_distribution_within_bounds():
    g = generate(small_spec(labels_per_node=LabelCountDist(zipf=2.0, max=4)))
    sizes = {len(g.node_labels.labels_of(v)) for v in range(500)}
    assert sizes <= {1, 2, 3, 4}
    assert 1 in sizes


def test_no_live_tuple_has_zero_refcount_after_generation():
    g = generate(small_spec())
    for store in (g.node_labels, g.edge_labels):
        for t in store.registry.live_tuples():
            assert store.registry.refcount_of(t) >= 1


def test_spec_errors():
    with pytest.raises(SpecError):
        generate(small_spec(node_count=-1))
    with pytest.raises(SpecError):
        generate(SyntheticSpec(node_count=0, edge_count=5))
    with pytest.raises(SpecError):
        generate(small_spec(labels_per_node=LabelCountDist(fixed=99)))
    with pytest.raises(SpecError):
        generate(small_spec(labels_per_node=LabelCountDist(zipf=0.5)))


def test_generated_store_agrees_with_baseline_everywhere():
    g = generate(small_spec(node_count=300, edge_count=600))
    base = BaselineStore()
    for v in range(300):
        for s in g.node_labels.labels_of(v):
            base.add_label(v, s)
    for i in range(16):
        label = f"NL{i}"
        label_id = g.dictionary.id_of(label)
        mine = set(g.node_labels.entities_with_label(label_id)) if label_id else set()
        assert mine == base.entities_with_label(label)


def test_compare_tiny_workload_emits_report():
    report = compare(small_spec(node_count=200, edge_count=100),
                     OpsScript(add_ops=300, remove_ops=150, label_queries=40,
                               all_queries=20, seed=3))
    assert report["correctness"] == "ok"
    assert report["label_store"]["counted_bytes"]["dls_slots"] == 2 * 200 * 8
    assert report["baseline"]["counted_bytes"] > 0
    assert "label_queries_s" in report["label_store"]["timings"]
    assert report["rss_max_kb"] > 0


def test_compare_divergence_is_hard_error(monkeypatch):
    def corrupt(self, label):
        return {424242}

    monkeypatch.setattr(BaselineStore, "entities_with_label", corrupt)
    with pytest.raises(CorrectnessFailure):
        compare(small_spec(node_count=50, edge_count=0),
                OpsScript(label_queries=5, all_queries=0))


def test_run_bench_file_writes_report(tmp_path):
    spec_path = tmp_path / "spec.json"
    report_path = tmp_path / "report.json"
    spec_path.write_text(json.dumps({
        "graph": {"node_count": 100, "edge_count": 50, "seed": 1},
        "ops": {"label_queries": 10, "all_queries": 5},
    }))
    report = run_bench_file(str(spec_path), str(report_path))
    assert report["correctness"] == "ok"
    on_disk = json.loads(report_path.read_text())
    assert on_disk["spec"]["node_count"] == 100


def test_baseline_store_roundtrip_ops():
    base = BaselineStore()
    base.add_label(1, "a")
    base.add_label(1, "b")
    base.add_label(2, "a")
    assert base.labels_of(1) == {"a", "b"}
    assert base.entities_with_label("a") == {1, 2}
    assert base.entities_with_all(["a", "b"]) == {1}
    base.remove_label(1, "a")
    assert base.entities_with_label("a") == {2}
    base.remove_label(1, "zzz")  # absent: no-op
    assert base.labels_of(1) == {"b"}
