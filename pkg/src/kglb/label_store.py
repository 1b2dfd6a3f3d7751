"""Entity <-> label-set association via one fixed vector of two slots per entity.

Every entity holds exactly one tuple id (0 = unlabeled) plus a link to the
next entity sharing that tuple, so the association storage is exactly
``2 * capacity`` integer slots no matter how many labels any entity carries.
Per tuple there is one cached head entity; walking the links from the head
enumerates the tuple's membership ring in reverse insertion order.

Relabeling an entity moves it between rings: the new set is interned first,
the entity is unlinked from the old ring and pushed onto the new head, and
the old tuple is released (recycling its id when this was the last holder).
"""

from __future__ import annotations

from array import array
from bisect import bisect_left
from typing import Iterable, Iterator, Sequence

from .dictionary import LabelDict
from .errors import InvalidLabel, InvalidQuery, UnknownEntity, UnknownTuple
from .tuple_registry import TupleRegistry

# End-of-ring / empty-head marker. Any non-negative value is a valid entity
# id, so the sentinel must sit outside the id range and stay stable when the
# store grows.
TERMINATOR = -1


class SingleDls:
    """The two dense arrays behind the association.

    ``slots`` interleaves (tuple_of, next) per entity: slots[2e] is the tuple
    id entity e belongs to, slots[2e+1] the next entity in the same ring.
    ``head`` maps tuple id -> cached entry entity of its ring; slot 0 (the
    unlabeled sentinel tuple) stays permanently empty.
    """

    def __init__(self, capacity: int):
        self._capacity = capacity
        self._slots = array("q", [0, TERMINATOR]) * capacity
        self._head = array("q", [TERMINATOR])

    @property
    def capacity(self) -> int:
        return self._capacity

    @property
    def slot_count(self) -> int:
        return len(self._slots)

    @property
    def head_count(self) -> int:
        return len(self._head)

    def tuple_of(self, e: int) -> int:
        return self._slots[2 * e]

    def next_of(self, e: int) -> int:
        return self._slots[2 * e + 1]

    def head(self, t: int) -> int:
        return self._head[t] if t < len(self._head) else TERMINATOR

    def _ensure_head(self, t: int) -> None:
        if t >= len(self._head):
            grow = max(2 * len(self._head), t + 1)
            self._head.extend(array("q", [TERMINATOR]) * (grow - len(self._head)))

    def link(self, e: int, t: int) -> None:
        """Push entity e onto tuple t's ring (front insertion)."""
        self._ensure_head(t)
        self._slots[2 * e] = t
        self._slots[2 * e + 1] = self._head[t]
        self._head[t] = e

    def unlink(self, e: int) -> None:
        """Remove e from its current ring; predecessor scan stays inside the ring."""
        t = self._slots[2 * e]
        nxt = self._slots[2 * e + 1]
        cur = self._head[t]
        if cur == e:
            self._head[t] = nxt
        else:
            while self._slots[2 * cur + 1] != e:
                cur = self._slots[2 * cur + 1]
            self._slots[2 * cur + 1] = nxt
        self._slots[2 * e] = 0
        self._slots[2 * e + 1] = TERMINATOR

    def grow(self, new_capacity: int) -> None:
        if new_capacity <= self._capacity:
            return
        self._slots.extend(array("q", [0, TERMINATOR]) * (new_capacity - self._capacity))
        self._capacity = new_capacity

    def ring(self, t: int) -> Iterator[int]:
        cur = self.head(t)
        while cur != TERMINATOR:
            yield cur
            cur = self._slots[2 * cur + 1]


class LabelStore:
    """Label association for one entity class (nodes or edges).

    Single-writer: mutations invalidate outstanding entity streams, which is
    enforced through a generation counter checked on every yield.
    ``ring_steps`` counts entities touched by ring walks, for the
    no-full-scan property checks.
    """

    def __init__(self, label_dict: LabelDict, capacity: int,
                 registry: TupleRegistry | None = None):
        self._dict = label_dict
        self._registry = registry if registry is not None else TupleRegistry()
        self._dls = SingleDls(capacity)
        self._generation = 0
        self.ring_steps = 0

    @property
    def dict(self) -> LabelDict:
        return self._dict

    @property
    def registry(self) -> TupleRegistry:
        return self._registry

    @property
    def dls(self) -> SingleDls:
        return self._dls

    @property
    def capacity(self) -> int:
        return self._dls.capacity

    @property
    def generation(self) -> int:
        return self._generation

    def _check_entity(self, entity: int) -> None:
        if not 0 <= entity < self._dls.capacity:
            raise UnknownEntity(
                f"entity {entity} out of range [0, {self._dls.capacity})"
            )

    # -- mutation ------------------------------------------------------------

    def add_label(self, entity: int, label: str) -> int:
        """Attach one label; returns the entity's tuple id afterwards.

        A label already present is a no-op with zero structural change.
        """
        self._check_entity(entity)
        label_id = self._dict.intern(label)
        old_index = self._dls.tuple_of(entity)
        if old_index == 0:
            pair_index = self._registry.intern_label_set((label_id,))
        else:
            existing = self._registry.labels_of_tuple(old_index)
            i = bisect_left(existing, label_id)
            if i < len(existing) and existing[i] == label_id:
                return old_index
            pair_index = self._registry.intern_label_set(
                existing[:i] + (label_id,) + existing[i:]
            )
        self._relink(entity, old_index, pair_index)
        return pair_index

    def remove_label(self, entity: int, label: str) -> int:
        """Detach one label; a label the entity does not carry is a no-op."""
        self._check_entity(entity)
        if not label:
            raise InvalidLabel("empty label string")
        label_id = self._dict.id_of(label)
        old_index = self._dls.tuple_of(entity)
        if label_id is None or old_index == 0:
            return old_index
        existing = self._registry.labels_of_tuple(old_index)
        i = bisect_left(existing, label_id)
        if i >= len(existing) or existing[i] != label_id:
            return old_index
        reduced = existing[:i] + existing[i + 1:]
        if not reduced:
            self._generation += 1
            self._dls.unlink(entity)
            self._registry.release(old_index)
            return 0
        pair_index = self._registry.intern_label_set(reduced)
        self._relink(entity, old_index, pair_index)
        return pair_index

    def attach_set(self, entity: int, label_ids: Iterable[int]) -> int:
        """Attach a whole label-id set in one step (single intern, single link).

        Merges with any labels the entity already carries.
        """
        self._check_entity(entity)
        ids = sorted(set(label_ids))
        old_index = self._dls.tuple_of(entity)
        if not ids:
            return old_index
        if old_index != 0:
            merged = sorted(set(self._registry.labels_of_tuple(old_index)) | set(ids))
            if tuple(merged) == self._registry.labels_of_tuple(old_index):
                return old_index
            pair_index = self._registry.intern_label_set(merged)
        else:
            pair_index = self._registry.intern_label_set(ids)
        self._relink(entity, old_index, pair_index)
        return pair_index

    def _relink(self, entity: int, old_index: int, new_index: int) -> None:
        self._generation += 1
        if old_index:
            self._dls.unlink(entity)
        self._dls.link(entity, new_index)
        self._registry.acquire(new_index)
        if old_index:
            self._registry.release(old_index)

    def grow(self, new_capacity: int) -> None:
        self._generation += 1
        self._dls.grow(new_capacity)

    # -- lookups ------------------------------------------------------------------

    def tuple_of(self, entity: int) -> int:
        self._check_entity(entity)
        return self._dls.tuple_of(entity)

    def label_ids_of(self, entity: int) -> tuple[int, ...]:
        self._check_entity(entity)
        return self._registry.labels_of_tuple(self._dls.tuple_of(entity))

    def labels_of(self, entity: int) -> set[str]:
        return {self._dict.resolve(i) for i in self.label_ids_of(entity)}

    def entities_with_tuple(self, t: int) -> Iterator[int]:
        if not self._registry.is_live(t):
            raise UnknownTuple(f"tuple {t} is not live")
        return self._guarded_rings([t])

    def entities_with_label(self, label_id: int) -> Iterator[int]:
        return self._guarded_rings(self._registry.tuples_with_label(label_id))

    def entities_with_all(self, label_ids: Sequence[int]) -> Iterator[int]:
        """Entities whose tuple contains every queried label."""
        ids = list(label_ids)
        if not ids:
            raise InvalidQuery("entities_with_all requires a non-empty label set")
        candidate = self._registry.tuples_with_label(ids[0])
        for label_id in ids[1:]:
            other = self._registry.tuples_with_label(label_id)
            candidate = _intersect_sorted(candidate, other)
            if not candidate:
                break
        return self._guarded_rings(candidate)

    def _guarded_rings(self, tuple_ids: Sequence[int]) -> Iterator[int]:
        generation = self._generation
        for t in tuple_ids:
            cur = self._dls.head(t)
            while cur != TERMINATOR:
                if self._generation != generation:
                    raise RuntimeError("entity stream invalidated by a mutation")
                self.ring_steps += 1
                yield cur
                cur = self._dls.next_of(cur)

    # -- memory ------------------------------------------------------------------

    def memory_report(self) -> dict:
        """Counted bytes per structure (8-byte integer slots, deterministic)."""
        registry = self._registry.counted_bytes()
        dictionary = self._dict.counted_bytes()
        report = {
            "capacity": self._dls.capacity,
            "dls_slots": 8 * self._dls.slot_count,
            "dls_head": 8 * self._dls.head_count,
            "registry": sum(registry.values()),
            "registry_detail": registry,
            "dictionary": sum(dictionary.values()),
            "dictionary_detail": dictionary,
        }
        report["total"] = (
            report["dls_slots"] + report["dls_head"]
            + report["registry"] + report["dictionary"]
        )
        return report

    # -- bulk loading ---------------------------------------------------------------

    def bulk_attach(self, assignments) -> None:
        """Vectorized equivalent of linking entity 0..N-1 each to its tuple id.

        ``assignments``: one already-interned tuple id per entity (0 keeps the
        entity unlabeled), length == capacity, on a store with no prior links.
        Produces bit-identical state to the sequential path; only worthwhile at
        benchmark scale.
        """
        import numpy as np

        t_of = np.asarray(assignments, dtype=np.int64)
        if len(t_of) != self._dls.capacity:
            raise ValueError("assignments length must equal capacity")
        if any(self._dls.tuple_of(e) != 0 for e in range(min(self._dls.capacity, 64))):
            raise ValueError("bulk_attach requires a fresh store")

        order = np.argsort(t_of, kind="stable")
        sorted_t = t_of[order]
        nxt_sorted = np.concatenate(
            ([TERMINATOR], np.where(sorted_t[1:] == sorted_t[:-1], order[:-1], TERMINATOR))
        )
        nxt = np.empty(len(t_of), dtype=np.int64)
        nxt[order] = nxt_sorted
        nxt[t_of == 0] = TERMINATOR

        slots = np.empty(2 * len(t_of), dtype=np.int64)
        slots[0::2] = t_of
        slots[1::2] = nxt
        new_slots = array("q")
        new_slots.frombytes(slots.tobytes())
        self._dls._slots = new_slots

        last = np.concatenate((sorted_t[1:] != sorted_t[:-1], [True]))
        for t, e in zip(sorted_t[last].tolist(), order[last].tolist()):
            if t != 0:
                self._dls._ensure_head(t)
                self._dls._head[t] = e

        live, counts = np.unique(sorted_t[sorted_t > 0], return_counts=True)
        for t, n in zip(live.tolist(), counts.tolist()):
            self._registry.acquire(t, n)
        self._generation += 1


def _intersect_sorted(a: list[int], b: list[int]) -> list[int]:
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            out.append(a[i])
            i += 1
            j += 1
        elif a[i] < b[j]:
            i += 1
        else:
            j += 1
    return out
