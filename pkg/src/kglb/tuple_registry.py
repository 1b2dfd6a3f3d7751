"""Interning of sorted label-id sets as dense tuple ids, with id recycling.

A tuple id names one distinct set of label ids.  Id 0 is reserved for
"unlabeled" and never issued.  Freed ids go on a LIFO recycle stack and are
reused before the high-water id grows, which keeps every dense array here
bounded by the peak number of simultaneously live tuples rather than by the
total number of label combinations ever seen.

Reference counts track how many entities currently hold each tuple; the last
release frees the id.  Mutation is single-writer (serialized by the owning
label store); reads are safe between mutations.
"""

from __future__ import annotations

from bisect import bisect_left, insort
from typing import Iterator, Sequence

from .errors import InvalidLabelSet, RefcountUnderflow, UnknownTuple


class TupleRegistry:
    def __init__(self):
        self._labels2index: dict[tuple[int, ...], int] = {}
        # dense, tuple-id indexed, grown by doubling; None = unissued or freed
        self._index2labels: list[tuple[int, ...] | None] = [None]
        self._refcount: list[int] = [0]
        # label-id indexed, sorted lists of live tuple ids; slots only grow
        self._label2indices: list[list[int]] = []
        self._recycle: list[int] = []
        self._maxid = 0
        self._live = 0
        self._peak_live = 0

    # -- issuing ------------------------------------------------------------

    def intern_label_set(self, newpair: Sequence[int]) -> int:
        """Return the tuple id for this sorted label-id set, issuing one if new.

        New ids come from the top of the recycle stack when available,
        otherwise maxid+1.  The candidate id is read before the existence
        check and only committed when the set is genuinely new.
        """
        pair = tuple(newpair)
        if not pair:
            raise InvalidLabelSet("label set must be non-empty")
        if any(a >= b for a, b in zip(pair, pair[1:])) or pair[0] <= 0:
            raise InvalidLabelSet(f"label set must be strictly sorted positive ids: {pair}")

        next_index = self._recycle[-1] if self._recycle else self._maxid + 1
        existing = self._labels2index.get(pair)
        if existing is not None:
            return existing

        pair_index = next_index
        if self._recycle:
            self._recycle.pop()
        else:
            self._maxid += 1
        self._labels2index[pair] = pair_index

        while len(self._label2indices) <= pair[-1]:
            self._label2indices.append([])
        for label_id in pair:
            insort(self._label2indices[label_id], pair_index)

        if pair_index >= len(self._index2labels):
            grow = max(2 * len(self._index2labels), pair_index + 1)
            self._index2labels.extend([None] * (grow - len(self._index2labels)))
            self._refcount.extend([0] * (grow - len(self._refcount)))
        self._index2labels[pair_index] = pair
        self._refcount[pair_index] = 0

        self._live += 1
        if self._live > self._peak_live:
            self._peak_live = self._live
        return pair_index

    # -- reference counting ---------------------------------------------------

    def acquire(self, t: int, count: int = 1) -> None:
        if not self.is_live(t):
            raise UnknownTuple(f"tuple {t} is not live")
        self._refcount[t] += count

    def release(self, t: int) -> bool:
        """Drop one reference; frees and recycles the id at zero.

        Returns True when this release freed the tuple.
        """
        if not self.is_live(t) or self._refcount[t] < 1:
            raise RefcountUnderflow(f"release of tuple {t} with no live references")
        self._refcount[t] -= 1
        if self._refcount[t] > 0:
            return False
        pair = self._index2labels[t]
        del self._labels2index[pair]
        self._index2labels[t] = None
        for label_id in pair:
            bucket = self._label2indices[label_id]
            del bucket[bisect_left(bucket, t)]
        self._recycle.append(t)
        self._live -= 1
        return True

    # -- lookups ---------------------------------------------------------------

    def is_live(self, t: int) -> bool:
        return 0 < t < len(self._index2labels) and self._index2labels[t] is not None

    def labels_of_tuple(self, t: int) -> tuple[int, ...]:
        if t == 0:
            return ()
        if not self.is_live(t):
            raise UnknownTuple(f"tuple {t} is not live")
        return self._index2labels[t]

    def tuples_with_label(self, label_id: int) -> list[int]:
        if 0 <= label_id < len(self._label2indices):
            return list(self._label2indices[label_id])
        return []

    def refcount_of(self, t: int) -> int:
        if not self.is_live(t):
            raise UnknownTuple(f"tuple {t} is not live")
        return self._refcount[t]

    def find(self, pair: Sequence[int]) -> int | None:
        """Tuple id of an exact set, without interning."""
        return self._labels2index.get(tuple(pair))

    def live_tuples(self) -> Iterator[int]:
        for t in range(1, self._maxid + 1):
            if self._index2labels[t] is not None:
                yield t

    # -- stats -------------------------------------------------------------------

    @property
    def maxid(self) -> int:
        return self._maxid

    @property
    def live_count(self) -> int:
        return self._live

    @property
    def peak_live(self) -> int:
        """High-water mark of simultaneously live tuples, sampled at intern time."""
        return self._peak_live

    @property
    def recycle_depth(self) -> int:
        return len(self._recycle)

    def counted_bytes(self) -> dict[str, int]:
        """Deterministic accounting with 8-byte integer slots: dense array
        capacities, member lists, 24 bytes per hash entry plus its key."""
        member_bytes = sum(
            8 * len(p) for p in self._index2labels if p is not None
        )
        return {
            "index2labels": 8 * len(self._index2labels) + member_bytes,
            "refcount": 8 * len(self._refcount),
            "label2indices": 8 * len(self._label2indices)
            + sum(8 * len(b) for b in self._label2indices),
            "labels2index": sum(24 + 8 * len(p) for p in self._labels2index),
            "recycle": 8 * len(self._recycle),
        }

    # -- persistence hooks ----------------------------------------------------

    def canonical_state(self) -> tuple[int, list[int], list[tuple[int, ...] | None], list[int]]:
        """(maxid, recycle stack, index2labels[0..maxid], refcount[0..maxid])."""
        top = self._maxid + 1
        return (
            self._maxid,
            list(self._recycle),
            list(self._index2labels[:top]),
            list(self._refcount[:top]),
        )

    @classmethod
    def from_canonical_state(
        cls,
        maxid: int,
        recycle: list[int],
        index2labels: list[tuple[int, ...] | None],
        refcount: list[int],
    ) -> "TupleRegistry":
        reg = cls()
        reg._maxid = maxid
        reg._recycle = list(recycle)
        reg._index2labels = list(index2labels)
        reg._refcount = list(refcount)
        for t, pair in enumerate(index2labels):
            if pair is None:
                continue
            reg._labels2index[pair] = t
            while len(reg._label2indices) <= pair[-1]:
                reg._label2indices.append([])
            for label_id in pair:
                insort(reg._label2indices[label_id], t)
            reg._live += 1
        reg._peak_live = reg._live
        return reg
