"""Bidirectional label string <-> integer encoding plus key/value grouping rings.

Label ids are dense integers starting at 1; id 0 is the reserved "no label"
sentinel and is never assigned.  Key labels (e.g. a column name acting as a
category) and value labels share the single id space, so every label string is
globally unique.  A key label can own a ring of value labels, stored in-place
in dense arrays indexed by label id.
"""

from __future__ import annotations

from array import array

from .errors import AlreadyGrouped, InvalidLabel, UnknownLabelId


class GroupRings:
    """In-place singly linked rings grouping value labels under key labels.

    Three dense arrays, all indexed by label id and sized to the dictionary's
    id space: ``ring[v]`` is the next value label in v's group (0 terminates),
    ``key_of[v]`` is the key label owning v (0 = ungrouped), ``head[k]`` is
    the first value label of key k's ring (0 = no values).  A value label
    belongs to at most one key; insertion is push-front and there is no
    removal.
    """

    def __init__(self, label_dict: "LabelDict"):
        self._dict = label_dict
        self._ring = array("q", [0])
        self._key_of = array("q", [0])
        self._head = array("q", [0])

    def _grow(self) -> None:
        need = self._dict.next_id - len(self._ring)
        if need > 0:
            pad = array("q", [0]) * need
            self._ring.extend(pad)
            self._key_of.extend(pad)
            self._head.extend(pad)

    def _check_assigned(self, label_id: int) -> None:
        if not self._dict.is_assigned(label_id):
            raise UnknownLabelId(f"label id {label_id} was never assigned")

    def add(self, key: int, value: int) -> None:
        """Push ``value`` onto ``key``'s ring; re-adding the same pair is a no-op."""
        self._check_assigned(key)
        self._check_assigned(value)
        self._grow()
        owner = self._key_of[value]
        if owner == key:
            return
        if owner != 0:
            raise AlreadyGrouped(
                f"label {value} already grouped under key {owner}, not {key}"
            )
        self._ring[value] = self._head[key]
        self._head[key] = value
        self._key_of[value] = key

    def values_of(self, key: int) -> set[int]:
        """All value labels grouped under ``key`` (empty set if none)."""
        self._check_assigned(key)
        self._grow()
        out: set[int] = set()
        cur = self._head[key]
        while cur != 0:
            out.add(cur)
            cur = self._ring[cur]
        return out

    def key_of(self, value: int) -> int:
        """Owning key of ``value``, or 0 when ungrouped."""
        self._check_assigned(value)
        self._grow()
        return self._key_of[value]

    def grouped_pairs(self) -> list[tuple[int, int]]:
        """All (key, value) associations, by value id order."""
        self._grow()
        return [(k, v) for v, k in enumerate(self._key_of) if k != 0]

    def counted_bytes(self) -> int:
        """Deterministic byte count: three 8-byte slots per id-space entry."""
        self._grow()
        return 3 * 8 * len(self._ring)


class LabelDict:
    """Append-only string interner with perfect round-trip.

    ``intern`` assigns ids in first-come order, so a figure-exact numbering is
    reproduced only by seeding in that order.  Matching is case-sensitive and
    byte-exact; ids are never recycled.
    """

    def __init__(self):
        self._strings: list[str] = [""]  # slot 0 reserved, never resolvable
        self._lookup: dict[str, int] = {}
        self.groups = GroupRings(self)

    @property
    def next_id(self) -> int:
        return len(self._strings)

    def __len__(self) -> int:
        return len(self._lookup)

    def intern(self, label: str) -> int:
        if not label:
            raise InvalidLabel("empty label string")
        existing = self._lookup.get(label)
        if existing is not None:
            return existing
        new_id = len(self._strings)
        self._strings.append(label)
        self._lookup[label] = new_id
        return new_id

    def resolve(self, label_id: int) -> str:
        if not self.is_assigned(label_id):
            raise UnknownLabelId(f"label id {label_id} was never assigned")
        return self._strings[label_id]

    def id_of(self, label: str) -> int | None:
        """Lookup without interning; None when the string was never seen."""
        return self._lookup.get(label)

    def is_assigned(self, label_id: int) -> bool:
        return 1 <= label_id < len(self._strings)

    def assigned_ids(self) -> range:
        return range(1, len(self._strings))

    def group_add(self, key: int, value: int) -> None:
        self.groups.add(key, value)

    def values_of(self, key: int) -> set[int]:
        return self.groups.values_of(key)

    def counted_bytes(self) -> dict[str, int]:
        """Deterministic accounting: utf-8 payload + 8-byte length prefix per
        string, 16 bytes per lookup entry, plus the group ring arrays."""
        strings = sum(8 + len(s.encode("utf-8")) for s in self._strings[1:])
        return {
            "strings": strings,
            "lookup": 16 * len(self._lookup),
            "group_rings": self.groups.counted_bytes(),
        }
