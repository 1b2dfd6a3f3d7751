"""Naive reference implementations used as oracles across the test suite.

Everything here is deliberately dumb: plain dicts of sets and linear scans.
The oracles never touch the structures they are checking.
"""

from __future__ import annotations

import random


class LabelOracle:
    """Mapping-of-sets twin for a LabelStore."""

    def __init__(self):
        self.by_entity: dict[int, set[str]] = {}
        self.by_label: dict[str, set[int]] = {}

    def add(self, entity: int, label: str) -> None:
        self.by_entity.setdefault(entity, set()).add(label)
        self.by_label.setdefault(label, set()).add(entity)

    def remove(self, entity: int, label: str) -> None:
        self.by_entity.get(entity, set()).discard(label)
        self.by_label.get(label, set()).discard(entity)

    def labels_of(self, entity: int) -> set[str]:
        return set(self.by_entity.get(entity, ()))

    def entities_with(self, label: str) -> set[int]:
        return set(self.by_label.get(label, ()))

    def entities_with_all(self, labels) -> set[int]:
        sets = [self.entities_with(s) for s in labels]
        out = sets[0]
        for s in sets[1:]:
            out &= s
        return out


class NaiveRegistry:
    """Reference tuple-id allocator: LIFO free list, ids from 1."""

    def __init__(self):
        self.by_set: dict[tuple, int] = {}
        self.by_id: dict[int, tuple] = {}
        self.refcount: dict[int, int] = {}
        self.free: list[int] = []
        self.maxid = 0

    def intern(self, pair: tuple) -> int:
        if pair in self.by_set:
            return self.by_set[pair]
        if self.free:
            t = self.free.pop()
        else:
            self.maxid += 1
            t = self.maxid
        self.by_set[pair] = t
        self.by_id[t] = pair
        self.refcount[t] = 0
        return t

    def acquire(self, t: int) -> None:
        self.refcount[t] += 1

    def release(self, t: int) -> bool:
        self.refcount[t] -= 1
        if self.refcount[t]:
            return False
        pair = self.by_id.pop(t)
        del self.by_set[pair]
        del self.refcount[t]
        self.free.append(t)
        return True

    def tuples_with_label(self, label_id: int) -> list[int]:
        return sorted(t for t, pair in self.by_id.items() if label_id in pair)


def drive_random_workload(store, oracle: LabelOracle, rng: random.Random,
                          ops: int, entities: int, labels: list[str]) -> None:
    """Apply the same random add/remove stream to a store and its oracle."""
    for _ in range(ops):
        entity = rng.randrange(entities)
        label = rng.choice(labels)
        if rng.random() < 0.6:
            store.add_label(entity, label)
            oracle.add(entity, label)
        else:
            store.remove_label(entity, label)
            oracle.remove(entity, label)


def assert_store_matches_oracle(store, oracle: LabelOracle,
                                entities: int, labels: list[str]) -> None:
    for entity in range(entities):
        assert store.labels_of(entity) == oracle.labels_of(entity), entity
    for label in labels:
        label_id = store.dict.id_of(label)
        got = set(store.entities_with_label(label_id)) if label_id else set()
        assert got == oracle.entities_with(label), label


def enumerate_simple_paths(adjacency: dict[int, set[int]], source: int,
                           max_hops: int, target_ok) -> list[list[int]]:
    """Exhaustive simple-path enumeration over an explicit adjacency map."""
    found: list[list[int]] = []
    path = [source]
    on_path = {source}

    def walk(v: int, depth: int) -> None:
        if target_ok(v):
            found.append(list(path))
        if depth == max_hops:
            return
        for u in sorted(adjacency.get(v, ())):
            if u in on_path:
                continue
            path.append(u)
            on_path.add(u)
            walk(u, depth + 1)
            path.pop()
            on_path.discard(u)

    walk(source, 0)
    return found


def set_partitions(items: list):
    """All set partitions (restricted-growth strings); Bell(8) = 4140."""
    n = len(items)
    if n == 0:
        yield []
        return
    rgs = [0] * n

    def emit():
        blocks: dict[int, list] = {}
        for i, b in enumerate(rgs):
            blocks.setdefault(b, []).append(items[i])
        yield list(blocks.values())

    def rec(i: int, max_b: int):
        if i == n:
            yield from emit()
            return
        for b in range(max_b + 2):
            rgs[i] = b
            yield from rec(i + 1, max(max_b, b))

    yield from rec(1, 0)
