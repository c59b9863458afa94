"""Alphabets, validated sequences, FASTA ingestion and 2-bit nucleotide packing.

A :class:`Sequence` is an immutable string over an :class:`Alphabet`.  The
alphabet's listing order *is* the collation order used by every sorting
operation in the package; :meth:`Sequence.collation_bytes` turns a sequence
into a byte string whose plain byte order agrees with that collation.

The packed form stores four symbols per byte with the DNA codes
``T=00, G=01, C=10, A=11``, first symbol in the two most significant bits.
Note that the code order (T<G<C<A) is the *reverse* of collation order
(A<C<G<T): nothing may sort by packed codes.
"""

from __future__ import annotations

import enum
import string
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from .errors import BadRange, EmptySequence, NotPackable, RejectedSymbol


@dataclass(frozen=True)
class Alphabet:
    name: str
    symbols: tuple[str, ...]
    _rank: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        symbols = tuple(self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if len(symbols) < 2:
            raise ValueError("an alphabet needs at least 2 symbols")
        if any(len(s) != 1 for s in symbols):
            raise ValueError("alphabet symbols must be single characters")
        if len(set(symbols)) != len(symbols):
            raise ValueError("alphabet symbols must be distinct")
        object.__setattr__(self, "_rank", {s: i for i, s in enumerate(symbols)})

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, char: str) -> bool:
        return char in self._rank

    def rank(self, char: str) -> int:
        return self._rank[char]

    @property
    def codepoint_ordered(self) -> bool:
        """True when listing order equals the characters' code point order."""
        return list(self.symbols) == sorted(self.symbols)


DNA = Alphabet("dna", ("A", "C", "G", "T"))
BINARY = Alphabet("binary", ("A", "B"))
LATIN = Alphabet("latin", tuple(string.ascii_uppercase))

ALPHABETS = {a.name: a for a in (DNA, BINARY, LATIN)}


@dataclass(frozen=True)
class Sequence:
    """Validated text over an alphabet; also used for patterns."""

    text: str
    alphabet: Alphabet = DNA

    def __post_init__(self):
        allowed = self.alphabet._rank
        for i, ch in enumerate(self.text):
            if ch not in allowed:
                raise RejectedSymbol(i, ch)

    def __len__(self) -> int:
        return len(self.text)

    @property
    def length(self) -> int:
        return len(self.text)

    def __str__(self) -> str:
        return self.text

    def collation_bytes(self) -> bytes:
        """Bytes whose byte order equals the alphabet collation order."""
        if self.alphabet.codepoint_ordered and self.text.isascii():
            return self.text.encode("ascii")
        return bytes(self.alphabet.rank(ch) for ch in self.text)

    def collation_key(self) -> tuple[int, ...]:
        return tuple(self.alphabet.rank(ch) for ch in self.text)


class Policy(enum.Enum):
    REJECT = "reject"
    STRIP = "strip"
    SUBSTITUTE = "substitute"


@dataclass(frozen=True)
class UnknownSymbolPolicy:
    """How to treat characters outside the alphabet.

    ``substitute`` replaces each unknown character by ``replacement``.
    """

    kind: Policy = Policy.STRIP
    replacement: str | None = None

    def __post_init__(self):
        if self.kind is Policy.SUBSTITUTE and not self.replacement:
            raise ValueError("substitute policy needs a replacement symbol")

    @classmethod
    def parse(cls, value: "str | UnknownSymbolPolicy") -> "UnknownSymbolPolicy":
        """Accept ``reject``, ``strip`` or ``substitute:X``."""
        if isinstance(value, UnknownSymbolPolicy):
            return value
        kind, _, repl = value.partition(":")
        return cls(Policy(kind.lower()), repl or None)


REJECT = UnknownSymbolPolicy(Policy.REJECT)
STRIP = UnknownSymbolPolicy(Policy.STRIP)


def substitute(symbol: str) -> UnknownSymbolPolicy:
    return UnknownSymbolPolicy(Policy.SUBSTITUTE, symbol)


def _clean(raw: str, alphabet: Alphabet, policy: UnknownSymbolPolicy, offset: int = 0) -> str:
    text = "".join(raw.split()).upper()
    allowed = alphabet._rank
    if all(ch in allowed for ch in text):
        return text
    if policy.kind is Policy.REJECT:
        for i, ch in enumerate(text):
            if ch not in allowed:
                raise RejectedSymbol(offset + i, ch)
    if policy.kind is Policy.STRIP:
        return "".join(ch for ch in text if ch in allowed)
    repl = policy.replacement.upper()
    if repl not in allowed:
        raise ValueError(f"replacement symbol {repl!r} is not in the alphabet")
    return "".join(ch if ch in allowed else repl for ch in text)


def normalize_and_validate(raw: str, alphabet: Alphabet = DNA,
                           policy: "UnknownSymbolPolicy | str" = STRIP) -> Sequence:
    """Uppercase ``raw``, drop whitespace and apply the unknown-symbol policy.

    >>> normalize_and_validate("acgt\\n").text
    'ACGT'
    """
    text = _clean(raw, alphabet, UnknownSymbolPolicy.parse(policy))
    if not text:
        raise EmptySequence()
    return Sequence(text, alphabet)


def read_fasta(stream: Iterable[str] | TextIO, alphabet: Alphabet = DNA,
               policy: "UnknownSymbolPolicy | str" = STRIP) -> Sequence:
    """Concatenate every sequence line of a FASTA (or headerless raw) source.

    Header lines start with ``>``; all records are joined in file order.
    Positions reported by ``RejectedSymbol`` are offsets into the
    concatenated sequence.
    """
    if isinstance(stream, str):
        stream = stream.splitlines()
    policy = UnknownSymbolPolicy.parse(policy)
    chunks: list[str] = []
    total = 0
    for line in stream:
        if line.startswith(">") or line.startswith(";"):
            continue
        part = _clean(line, alphabet, policy, offset=total)
        chunks.append(part)
        total += len(part)
    text = "".join(chunks)
    if not text:
        raise EmptySequence()
    return Sequence(text, alphabet)


# -- 2-bit packing -----------------------------------------------------------

DNA_CODES = {"T": 0b00, "G": 0b01, "C": 0b10, "A": 0b11}


@dataclass(frozen=True)
class PackedSequence:
    codes: bytes
    length: int
    mapping: tuple[tuple[str, int], ...] = tuple(DNA_CODES.items())

    def __post_init__(self):
        if len(self.codes) != packed_size(self.length):
            raise ValueError(
                f"{len(self.codes)} bytes cannot hold exactly {self.length} symbols"
            )


def packed_size(length: int) -> int:
    """Bytes needed for ``length`` symbols at 2 bits each."""
    return (length + 3) // 4


def _code_table(mapping: dict[str, int]) -> np.ndarray:
    table = np.full(256, 255, dtype=np.uint8)
    for sym, code in mapping.items():
        table[ord(sym)] = code
    return table


_PACK_TABLE = _code_table(DNA_CODES)


def pack(s: Sequence) -> PackedSequence:
    if len(s.alphabet) > 4:
        raise NotPackable(f"alphabet {s.alphabet.name!r} has {len(s.alphabet)} symbols (max 4)")
    if any(sym not in DNA_CODES for sym in s.alphabet.symbols):
        raise NotPackable(f"alphabet {s.alphabet.name!r} has no 2-bit code mapping")
    n = len(s)
    raw = np.frombuffer(s.text.encode("ascii"), dtype=np.uint8)
    codes = _PACK_TABLE[raw]
    pad = (-n) % 4
    if pad:
        codes = np.concatenate([codes, np.zeros(pad, dtype=np.uint8)])
    quads = codes.reshape(-1, 4)
    packed = (quads[:, 0] << 6) | (quads[:, 1] << 4) | (quads[:, 2] << 2) | quads[:, 3]
    return PackedSequence(packed.astype(np.uint8).tobytes(), n)


def unpack(p: PackedSequence) -> Sequence:
    decode = np.zeros(4, dtype=np.uint8)
    for sym, code in p.mapping:
        decode[code] = ord(sym)
    data = np.frombuffer(p.codes, dtype=np.uint8)
    quads = np.stack([(data >> 6) & 3, (data >> 4) & 3, (data >> 2) & 3, data & 3], axis=1)
    text = decode[quads.reshape(-1)[: p.length]].tobytes().decode("ascii")
    return Sequence(text, DNA)


# -- random patterns ---------------------------------------------------------

def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 generator for ``seed``; ``stream`` selects an independent substream.

    ``make_rng(seed, user)`` gives each benchmark worker its own replayable
    stream regardless of thread scheduling.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=stream)))


def random_pattern(rng: np.random.Generator, min_len: int = 1, max_len: int = 100,
                   alphabet: Alphabet = DNA) -> Sequence:
    """Uniform length in ``[min_len, max_len]``, uniform i.i.d. symbols."""
    if min_len < 1 or min_len > max_len:
        raise BadRange(f"need 1 <= min_len <= max_len, got [{min_len}, {max_len}]")
    length = int(rng.integers(min_len, max_len, endpoint=True))
    idx = rng.integers(0, len(alphabet), size=length)
    return Sequence("".join(alphabet.symbols[i] for i in idx), alphabet)


def random_sequence(rng: np.random.Generator, length: int, alphabet: Alphabet = DNA) -> Sequence:
    """Synthetic subject text; stands in for real chromosome data."""
    lut = np.frombuffer("".join(alphabet.symbols).encode("ascii"), dtype=np.uint8)
    text = lut[rng.integers(0, len(alphabet), size=length)].tobytes().decode("ascii")
    return Sequence(text, alphabet)
