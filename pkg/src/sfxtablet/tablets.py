"""An in-process, Bigtable-style sorted row store split into tablets.

Each symbol position of the subject becomes one row holding the suffix that
starts there, truncated to ``L`` symbols.  Two row-key layouts are offered:

``position_keyed``
    key = 8-byte big-endian start position.  Row order is text order, so a
    pattern query must look at every row (:func:`filter_scan`).
``suffix_keyed``
    key = truncated suffix bytes followed by the 8-byte big-endian position.
    Byte order of keys is suffix order with position tie-break, i.e. the
    tablets together hold a truncated suffix array and a pattern query is a
    single key-range scan (:func:`prefix_scan`).

Tablets are contiguous key ranges; the first tablet's range is open at the
bottom and the last is open at the top, so the ranges partition the key
space.  Stores never change after construction, so scans may run from any
number of threads.
"""

from __future__ import annotations

import bisect
import enum
import os
import struct
import time
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .errors import (BadThreshold, CorruptFile, EmptyText, PatternTooLong,
                     VersionMismatch, WrongLayout)
from .genome import Sequence

DEFAULT_TRUNCATION = 1000
DEFAULT_SPLIT_THRESHOLD = 100_000
POS_BYTES = 8


class Layout(enum.IntEnum):
    POSITION_KEYED = 0
    SUFFIX_KEYED = 1

    @classmethod
    def parse(cls, value: "str | Layout") -> "Layout":
        if isinstance(value, Layout):
            return value
        name = value.strip().lower().replace("-", "_")
        aliases = {"position": "position_keyed", "suffix": "suffix_keyed"}
        return cls[aliases.get(name, name).upper()]

    @property
    def label(self) -> str:
        return self.name.lower()


def encode_position(position: int) -> bytes:
    return position.to_bytes(POS_BYTES, "big")


def successor(prefix: bytes) -> Optional[bytes]:
    """Smallest byte string greater than every string starting with ``prefix``.

    Returns None (open upper end) when no such string exists, e.g. for an
    empty or all-0xFF prefix.
    """
    buf = bytearray(prefix)
    while buf:
        if buf[-1] < 0xFF:
            buf[-1] += 1
            return bytes(buf)
        buf.pop()
    return None


@dataclass(frozen=True)
class SuffixRow:
    key: bytes
    position: int
    suffix_text: str


@dataclass(frozen=True)
class TabletDescriptor:
    tablet_id: int
    start_key: Optional[bytes]  # None = unbounded below
    end_key: Optional[bytes]    # None = unbounded above, exclusive otherwise
    row_count: int

    def contains(self, key: bytes) -> bool:
        if self.start_key is not None and key < self.start_key:
            return False
        return self.end_key is None or key < self.end_key


@dataclass(frozen=True)
class Tablet:
    """One sorted run.  ``texts`` is None for suffix-keyed tablets: the
    suffix text is the key minus its 8-byte position tail."""

    keys: tuple[bytes, ...]
    positions: tuple[int, ...]
    texts: Optional[tuple[bytes, ...]] = None

    def __len__(self) -> int:
        return len(self.keys)

    def text(self, i: int) -> bytes:
        if self.texts is None:
            return self.keys[i][:-POS_BYTES]
        return self.texts[i]

    def slice(self, lo: int, hi: int) -> "Tablet":
        texts = None if self.texts is None else self.texts[lo:hi]
        return Tablet(self.keys[lo:hi], self.positions[lo:hi], texts)


@dataclass(frozen=True)
class TabletStore:
    layout: Layout
    truncation: int
    tablets: tuple[Tablet, ...]
    subject_length: int
    split_threshold: int = field(default=DEFAULT_SPLIT_THRESHOLD, compare=False)

    @property
    def row_count(self) -> int:
        return sum(len(t) for t in self.tablets)

    @property
    def tablet_count(self) -> int:
        return len(self.tablets)

    def descriptors(self) -> list[TabletDescriptor]:
        out = []
        last = len(self.tablets) - 1
        for i, t in enumerate(self.tablets):
            start = None if i == 0 else t.keys[0]
            end = None if i == last else self.tablets[i + 1].keys[0]
            out.append(TabletDescriptor(i, start, end, len(t)))
        return out

    def rows(self) -> Iterator[SuffixRow]:
        for t in self.tablets:
            for i, key in enumerate(t.keys):
                yield SuffixRow(key, t.positions[i], t.text(i).decode("ascii"))

    def locate(self, key: bytes) -> int:
        """Index of the tablet whose key range holds ``key``."""
        starts = self._starts
        return max(bisect.bisect_right(starts, key) - 1, 0)

    @property
    def _starts(self) -> list[bytes]:
        cached = self.__dict__.get("_start_keys")
        if cached is None:
            cached = [t.keys[0] for t in self.tablets]
            object.__setattr__(self, "_start_keys", cached)
        return cached


@dataclass(frozen=True)
class ScanResult:
    outcome: int
    positions: tuple[int, ...]
    rows_examined: int
    tablets_visited: int
    reply_nanos: int

    @property
    def reply_ms_clamped(self) -> int:
        return clamp_ms(self.reply_nanos)


def clamp_ms(nanos: int) -> int:
    """Whole milliseconds, rounded down, never below 1."""
    return max(1, nanos // 1_000_000)


# -- ingest and splitting -------------------------------------------------------

def _split_bounds(lo: int, hi: int, threshold: int, out: list[tuple[int, int]]) -> None:
    if hi - lo <= threshold:
        out.append((lo, hi))
        return
    mid = (lo + hi) // 2
    _split_bounds(lo, mid, threshold, out)
    _split_bounds(mid, hi, threshold, out)


def _split_tablet(tablet: Tablet, threshold: int) -> list[Tablet]:
    if len(tablet) <= threshold:
        return [tablet]
    bounds: list[tuple[int, int]] = []
    _split_bounds(0, len(tablet), threshold, bounds)
    return [tablet.slice(lo, hi) for lo, hi in bounds]


def split_policy(store: TabletStore, split_threshold: Optional[int] = None) -> TabletStore:
    """Halve every tablet above the threshold until all fit.

    Splits happen at the middle row, as a tablet server would; the result is
    a fixed point, so applying the policy again changes nothing.
    """
    threshold = store.split_threshold if split_threshold is None else split_threshold
    if threshold < 1:
        raise BadThreshold(threshold)
    tablets: list[Tablet] = []
    for t in store.tablets:
        tablets.extend(_split_tablet(t, threshold))
    return TabletStore(store.layout, store.truncation, tuple(tablets),
                       store.subject_length, threshold)


def _store_bytes(text: Sequence) -> bytes:
    if not text.alphabet.codepoint_ordered:
        raise ValueError(
            f"alphabet {text.alphabet.name!r} is not in byte order; row keys would not collate"
        )
    return text.text.encode("ascii")


def ingest(text: Sequence, layout: "Layout | str" = Layout.SUFFIX_KEYED,
           truncation: int = DEFAULT_TRUNCATION,
           split_threshold: int = DEFAULT_SPLIT_THRESHOLD) -> TabletStore:
    """Turn every suffix of ``text`` into one row and shard the rows."""
    layout = Layout.parse(layout)
    n = len(text)
    if n == 0:
        raise EmptyText()
    if truncation < 1:
        raise ValueError(f"truncation must be >= 1, got {truncation}")
    if split_threshold < 1:
        raise BadThreshold(split_threshold)
    tb = _store_bytes(text)
    L = truncation
    if layout is Layout.SUFFIX_KEYED:
        keys = sorted(tb[p:p + L] + encode_position(p) for p in range(n))
        positions = tuple(int.from_bytes(k[-POS_BYTES:], "big") for k in keys)
        whole = Tablet(tuple(keys), positions)
    else:
        keys = tuple(encode_position(p) for p in range(n))
        texts = tuple(tb[p:p + L] for p in range(n))
        whole = Tablet(keys, tuple(range(n)), texts)
    return split_policy(TabletStore(layout, L, (whole,), n, split_threshold))


# -- scans -----------------------------------------------------------------------

def _pattern_bytes(store: TabletStore, pattern: "Sequence | str") -> bytes:
    text = pattern.text if isinstance(pattern, Sequence) else str(pattern).upper()
    if len(text) > store.truncation:
        raise PatternTooLong(len(text), store.truncation)
    return text.encode("ascii")


def prefix_scan(store: TabletStore, pattern: "Sequence | str") -> ScanResult:
    """Range scan over ``[pattern, successor(pattern))`` on a suffix-keyed store."""
    if store.layout is not Layout.SUFFIX_KEYED:
        raise WrongLayout("prefix_scan needs a suffix_keyed store")
    lo = _pattern_bytes(store, pattern)
    hi = successor(lo)
    start = time.perf_counter_ns()
    tablets = store.tablets
    positions: list[int] = []
    visited = 0
    t_idx = store.locate(lo)
    while t_idx < len(tablets):
        tablet = tablets[t_idx]
        if hi is not None and tablet.keys[0] >= hi:
            break
        visited += 1
        a = bisect.bisect_left(tablet.keys, lo)
        b = len(tablet.keys) if hi is None else bisect.bisect_left(tablet.keys, hi, a)
        positions.extend(tablet.positions[a:b])
        if b < len(tablet.keys):
            break
        t_idx += 1
    elapsed = time.perf_counter_ns() - start
    rows = len(positions)
    if not lo:
        positions.append(store.subject_length)
    positions.sort()
    return ScanResult(int(bool(positions)), tuple(positions), rows, visited, elapsed)


def filter_scan(store: TabletStore, pattern: "Sequence | str") -> ScanResult:
    """Full pass over every row of a position-keyed store."""
    if store.layout is not Layout.POSITION_KEYED:
        raise WrongLayout("filter_scan needs a position_keyed store")
    pb = _pattern_bytes(store, pattern)
    start = time.perf_counter_ns()
    positions: list[int] = []
    rows = 0
    for tablet in store.tablets:
        rows += len(tablet)
        pos = tablet.positions
        positions.extend(pos[i] for i, t in enumerate(tablet.texts) if t.startswith(pb))
    elapsed = time.perf_counter_ns() - start
    if not pb:
        positions.append(store.subject_length)
    return ScanResult(int(bool(positions)), tuple(positions), rows, len(store.tablets), elapsed)


def scan(store: TabletStore, pattern: "Sequence | str") -> ScanResult:
    """Pick the scan that fits the store's layout."""
    if store.layout is Layout.SUFFIX_KEYED:
        return prefix_scan(store, pattern)
    return filter_scan(store, pattern)


# -- persistence -----------------------------------------------------------------
#
# header: magic(8) layout(u8) L(u32) subject_length(u64) tablet_count(u32)
# tablet: row_count(u32) then rows [key_len u16][key][position u64][text_len u16][text]
# footer: total_rows(u64) xor_checksum(u8)
# All integers little-endian; keys are raw bytes.

MAGIC = b"SFXTBL01"
_MAGIC_STEM = b"SFXTBL"
_HEADER = struct.Struct("<8sBIQI")
_U16 = struct.Struct("<H")
_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")
_FOOTER = struct.Struct("<QB")


def _xor(data) -> int:
    if not len(data):
        return 0
    return int(np.bitwise_xor.reduce(np.frombuffer(data, dtype=np.uint8)))


def dumps(store: TabletStore) -> bytes:
    if store.truncation > 0xFFFF - POS_BYTES:
        raise ValueError(f"truncation {store.truncation} too large for the 16-bit length fields")
    out = bytearray(_HEADER.pack(MAGIC, int(store.layout), store.truncation,
                                 store.subject_length, len(store.tablets)))
    total = 0
    for tablet in store.tablets:
        out += _U32.pack(len(tablet))
        for i, key in enumerate(tablet.keys):
            text = tablet.text(i)
            out += _U16.pack(len(key))
            out += key
            out += _U64.pack(tablet.positions[i])
            out += _U16.pack(len(text))
            out += text
        total += len(tablet)
    out += _U64.pack(total)
    out.append(_xor(out))
    return bytes(out)


def persist(store: TabletStore, path) -> None:
    data = dumps(store)
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def loads(data: bytes, split_threshold: Optional[int] = None) -> TabletStore:
    """Parse a store file image.

    The file does not record the split threshold; unless given, it is taken
    as the largest tablet's row count.
    """
    if data[:8] != MAGIC:
        if data[:6] == _MAGIC_STEM and len(data) >= 8:
            raise VersionMismatch(f"unsupported store version {data[6:8]!r}")
        raise CorruptFile("bad magic")
    if len(data) < _HEADER.size + _FOOTER.size:
        raise CorruptFile("file shorter than header and footer")
    if _xor(data[:-1]) != data[-1]:
        raise CorruptFile("checksum mismatch")
    _, layout_b, L, n, tablet_count = _HEADER.unpack_from(data, 0)
    try:
        layout = Layout(layout_b)
    except ValueError:
        raise CorruptFile(f"unknown layout byte {layout_b}") from None
    body_end = len(data) - _FOOTER.size
    off = _HEADER.size
    tablets = []
    total = 0
    try:
        for _ in range(tablet_count):
            (row_count,) = _U32.unpack_from(data, off)
            off += 4
            keys, positions, texts = [], [], []
            for _ in range(row_count):
                (klen,) = _U16.unpack_from(data, off)
                off += 2
                key = data[off:off + klen]
                off += klen
                (pos,) = _U64.unpack_from(data, off)
                off += 8
                (tlen,) = _U16.unpack_from(data, off)
                off += 2
                text = data[off:off + tlen]
                off += tlen
                if off > body_end:
                    raise CorruptFile("row data runs into the footer")
                keys.append(key)
                positions.append(pos)
                texts.append(text)
            if row_count == 0:
                raise CorruptFile("empty tablet")
            total += row_count
            tablets.append((keys, positions, texts))
    except struct.error:
        raise CorruptFile("unexpected end of data") from None
    if off != body_end:
        raise CorruptFile(f"{body_end - off} stray bytes before footer")
    (declared,) = _U64.unpack_from(data, body_end)
    if declared != total or total != n:
        raise CorruptFile(f"row count mismatch: footer {declared}, rows {total}, subject {n}")

    built = []
    prev = None
    for keys, positions, texts in tablets:
        for key, pos, text in zip(keys, positions, texts):
            if prev is not None and key <= prev:
                raise CorruptFile("row keys out of order")
            prev = key
            if len(text) > L:
                raise CorruptFile("suffix text longer than truncation")
            expected = text + encode_position(pos) if layout is Layout.SUFFIX_KEYED else encode_position(pos)
            if key != expected:
                raise CorruptFile(f"row key does not match layout at position {pos}")
        if layout is Layout.SUFFIX_KEYED:
            built.append(Tablet(tuple(keys), tuple(positions)))
        else:
            built.append(Tablet(tuple(keys), tuple(positions), tuple(texts)))
    threshold = split_threshold or max(len(t) for t in built)
    return TabletStore(layout, L, tuple(built), n, threshold)


def load(path, split_threshold: Optional[int] = None) -> TabletStore:
    if not os.fspath(path):
        raise FileNotFoundError("empty store path")
    with open(path, "rb") as fh:
        data = fh.read()
    return loads(data, split_threshold)
