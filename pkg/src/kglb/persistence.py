"""Byte-exact binary snapshots of a graph and its label structures.

Layout: 7-byte header (magic ``KGLB``, format version u16, endianness tag u8,
little-endian only), then sections of {section id u16, payload length u64,
payload}.  All integers are little-endian; strings are u64-length-prefixed
UTF-8.  Section order and content are canonical, so the same in-memory state
always dumps to the same bytes and ``dump(load(b)) == b``.  Unknown trailing
section ids are skipped with a warning so newer writers stay readable.
"""

from __future__ import annotations

import struct
import sys
import warnings
from array import array
from pathlib import Path
from typing import Sequence

from .errors import CorruptSnapshot, NotASnapshot, UnsupportedVersion
from .graph_store import Graph
from .label_store import LabelStore, SingleDls
from .tuple_registry import TupleRegistry

MAGIC = b"KGLB"
VERSION = 1
LITTLE_ENDIAN_TAG = 1

SEC_DICTIONARY = 1
SEC_GROUP_RINGS = 2
SEC_NODE_REGISTRY = 3
SEC_EDGE_REGISTRY = 4
SEC_NODE_DLS = 5
SEC_EDGE_DLS = 6
SEC_NODE_KEYS = 7
SEC_EDGE_ARRAY = 8

_KNOWN_SECTIONS = (
    SEC_DICTIONARY, SEC_GROUP_RINGS, SEC_NODE_REGISTRY, SEC_EDGE_REGISTRY,
    SEC_NODE_DLS, SEC_EDGE_DLS, SEC_NODE_KEYS, SEC_EDGE_ARRAY,
)


def _i64_bytes(values: Sequence[int]) -> bytes:
    arr = values if isinstance(values, array) else array("q", values)
    if sys.byteorder != "little":
        arr = array("q", arr)
        arr.byteswap()
    return arr.tobytes()


class _Writer:
    def __init__(self):
        self._chunks: list[bytes] = []

    def u16(self, v: int) -> None:
        self._chunks.append(struct.pack("<H", v))

    def u8(self, v: int) -> None:
        self._chunks.append(struct.pack("<B", v))

    def u64(self, v: int) -> None:
        self._chunks.append(struct.pack("<Q", v))

    def i64s(self, values: Sequence[int]) -> None:
        self._chunks.append(_i64_bytes(values))

    def string(self, s: str) -> None:
        raw = s.encode("utf-8")
        self.u64(len(raw))
        self._chunks.append(raw)

    def raw(self, b: bytes) -> None:
        self._chunks.append(b)

    def getvalue(self) -> bytes:
        return b"".join(self._chunks)


class _Reader:
    def __init__(self, data: bytes, section_id: int = -1):
        self._data = data
        self._pos = 0
        self._section = section_id

    def _take(self, n: int) -> bytes:
        if self._pos + n > len(self._data):
            raise CorruptSnapshot(
                f"section {self._section}: truncated ({n} bytes past end)",
                self._section,
            )
        out = self._data[self._pos:self._pos + n]
        self._pos += n
        return out

    def u16(self) -> int:
        return struct.unpack("<H", self._take(2))[0]

    def u8(self) -> int:
        return struct.unpack("<B", self._take(1))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self._take(8))[0]

    def i64s(self, count: int) -> array:
        arr = array("q")
        arr.frombytes(self._take(8 * count))
        if sys.byteorder != "little":
            arr.byteswap()
        return arr

    def string(self) -> str:
        return self._take(self.u64()).decode("utf-8")

    def at_end(self) -> bool:
        return self._pos >= len(self._data)


# -- section payloads -------------------------------------------------------


def _dictionary_payload(g: Graph) -> bytes:
    w = _Writer()
    ids = g.dictionary.assigned_ids()
    w.u64(len(ids))
    for i in ids:
        w.string(g.dictionary.resolve(i))
    return w.getvalue()


def _group_rings_payload(g: Graph) -> bytes:
    rings = g.dictionary.groups
    rings._grow()
    w = _Writer()
    w.u64(len(rings._ring))
    w.i64s(rings._ring)
    w.i64s(rings._key_of)
    w.i64s(rings._head)
    return w.getvalue()


def _registry_payload(reg: TupleRegistry) -> bytes:
    maxid, recycle, index2labels, refcount = reg.canonical_state()
    w = _Writer()
    w.u64(maxid)
    w.u64(len(recycle))
    w.i64s(recycle)
    w.i64s(refcount)
    for t in range(1, maxid + 1):
        pair = index2labels[t]
        if pair is None:
            w.u64(0)
        else:
            w.u64(len(pair))
            w.i64s(pair)
    return w.getvalue()


def _read_registry(r: _Reader) -> TupleRegistry:
    maxid = r.u64()
    recycle = list(r.i64s(r.u64()))
    refcount = list(r.i64s(maxid + 1))
    index2labels: list[tuple[int, ...] | None] = [None]
    for _t in range(1, maxid + 1):
        n = r.u64()
        index2labels.append(tuple(r.i64s(n)) if n else None)
    return TupleRegistry.from_canonical_state(maxid, recycle, index2labels, refcount)


def _dls_payload(store: LabelStore) -> bytes:
    dls = store.dls
    maxid = store.registry.maxid
    w = _Writer()
    w.u64(dls.capacity)
    w.i64s(dls._slots)
    w.u64(maxid + 1)
    w.i64s([dls.head(t) for t in range(maxid + 1)])
    return w.getvalue()


def _read_dls(r: _Reader) -> SingleDls:
    capacity = r.u64()
    slots = r.i64s(2 * capacity)
    head = r.i64s(r.u64())
    dls = SingleDls(0)
    dls._capacity = capacity
    dls._slots = slots
    dls._head = head
    return dls


def _node_keys_payload(g: Graph) -> bytes:
    w = _Writer()
    if not g.has_names:
        w.u8(0)
        return w.getvalue()
    w.u8(1)
    w.u64(g.node_count)
    for v in range(g.node_count):
        w.string(g.node_key(v))
    return w.getvalue()


def _edge_array_payload(g: Graph) -> bytes:
    src, dst = g.edge_arrays()
    w = _Writer()
    w.u64(len(src))
    w.i64s(src)
    w.i64s(dst)
    return w.getvalue()


# -- public API ----------------------------------------------------------------


def dump(g: Graph) -> bytes:
    """Serialize the graph; requires a quiescent store (no writer active)."""
    w = _Writer()
    w.raw(MAGIC)
    w.u16(VERSION)
    w.u8(LITTLE_ENDIAN_TAG)
    sections = [
        (SEC_DICTIONARY, _dictionary_payload(g)),
        (SEC_GROUP_RINGS, _group_rings_payload(g)),
        (SEC_NODE_REGISTRY, _registry_payload(g.node_labels.registry)),
        (SEC_EDGE_REGISTRY, _registry_payload(g.edge_labels.registry)),
        (SEC_NODE_DLS, _dls_payload(g.node_labels)),
        (SEC_EDGE_DLS, _dls_payload(g.edge_labels)),
        (SEC_NODE_KEYS, _node_keys_payload(g)),
        (SEC_EDGE_ARRAY, _edge_array_payload(g)),
    ]
    for section_id, payload in sections:
        w.u16(section_id)
        w.u64(len(payload))
        w.raw(payload)
    return w.getvalue()


def load(data: bytes) -> Graph:
    """Rebuild a graph from snapshot bytes."""
    if len(data) < 4 or data[:4] != MAGIC:
        raise NotASnapshot("missing KGLB magic")
    head = _Reader(data)
    head._take(4)
    version = head.u16()
    if version != VERSION:
        raise UnsupportedVersion(f"snapshot format version {version} not supported")
    endian = head.u8()
    if endian != LITTLE_ENDIAN_TAG:
        raise UnsupportedVersion(f"unsupported endianness tag {endian}")

    payloads: dict[int, bytes] = {}
    pos = head._pos
    while pos < len(data):
        if pos + 10 > len(data):
            raise CorruptSnapshot("truncated section header")
        section_id, length = struct.unpack_from("<HQ", data, pos)
        pos += 10
        if pos + length > len(data):
            raise CorruptSnapshot(
                f"section {section_id}: payload runs past end of snapshot",
                section_id,
            )
        if section_id in _KNOWN_SECTIONS:
            payloads[section_id] = data[pos:pos + length]
        else:
            warnings.warn(f"skipping unknown snapshot section {section_id}")
        pos += length

    missing = [s for s in _KNOWN_SECTIONS if s not in payloads]
    if missing:
        raise CorruptSnapshot(f"missing sections {missing}")

    # dictionary + rings
    r = _Reader(payloads[SEC_DICTIONARY], SEC_DICTIONARY)
    strings = [r.string() for _ in range(r.u64())]

    r = _Reader(payloads[SEC_NODE_KEYS], SEC_NODE_KEYS)
    has_names = bool(r.u8())
    names = [r.string() for _ in range(r.u64())] if has_names else None

    g = Graph(with_names=has_names)
    for s in strings:
        g.dictionary.intern(s)

    r = _Reader(payloads[SEC_GROUP_RINGS], SEC_GROUP_RINGS)
    n = r.u64()
    rings = g.dictionary.groups
    rings._ring = r.i64s(n)
    rings._key_of = r.i64s(n)
    rings._head = r.i64s(n)

    node_registry = _read_registry(_Reader(payloads[SEC_NODE_REGISTRY], SEC_NODE_REGISTRY))
    edge_registry = _read_registry(_Reader(payloads[SEC_EDGE_REGISTRY], SEC_EDGE_REGISTRY))
    node_dls = _read_dls(_Reader(payloads[SEC_NODE_DLS], SEC_NODE_DLS))
    edge_dls = _read_dls(_Reader(payloads[SEC_EDGE_DLS], SEC_EDGE_DLS))

    r = _Reader(payloads[SEC_EDGE_ARRAY], SEC_EDGE_ARRAY)
    edge_count = r.u64()
    src = r.i64s(edge_count)
    dst = r.i64s(edge_count)

    g.node_labels = LabelStore(g.dictionary, 0, node_registry)
    g.node_labels._dls = node_dls
    g.edge_labels = LabelStore(g.dictionary, 0, edge_registry)
    g.edge_labels._dls = edge_dls
    g._node_count = node_dls.capacity
    g._src = src
    g._dst = dst
    if has_names:
        if len(names) != g._node_count:
            raise CorruptSnapshot(
                f"node keys count {len(names)} != node capacity {g._node_count}",
                SEC_NODE_KEYS,
            )
        g._names = names
        g._key_to_id = {k: i for i, k in enumerate(names)}
    if edge_dls.capacity != edge_count:
        raise CorruptSnapshot(
            f"edge DLS capacity {edge_dls.capacity} != edge count {edge_count}",
            SEC_EDGE_DLS,
        )
    return g


def save_file(g: Graph, path: str | Path) -> None:
    Path(path).write_bytes(dump(g))


def load_file(path: str | Path) -> Graph:
    return load(Path(path).read_bytes())
