"""Brute-force substring search and a suffix array with first-letter buckets.

The brute-force routines are the correctness oracle for everything else and
are instrumented to count character comparisons exactly as the classic
sliding-window loop performs them.

Suffix arrays compare suffixes under the alphabet's collation with no
end-of-text sentinel: a suffix that is a proper prefix of another sorts
first.  An optional truncation depth ``L`` limits every suffix comparison to
its first ``L`` symbols; suffixes that are equal up to ``L`` are ordered by
ascending start position.

Empty patterns match everywhere: ``found`` is true, the first position is 0
and ``all_positions`` is ``0..n`` inclusive (``n + 1`` occurrences).
"""

from __future__ import annotations

import bisect
import functools
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import EmptyText, PatternTooLong
from .genome import Sequence


@dataclass(frozen=True)
class SearchOutcome:
    found: bool
    first_position: Optional[int]
    all_positions: tuple[int, ...]
    occurrence_count: int
    comparisons: int
    # Whole-suffix comparisons (binary search probes plus the bucket lookup).
    probes: int = 0

    @classmethod
    def from_positions(cls, positions, comparisons: int, probes: int = 0) -> "SearchOutcome":
        positions = tuple(sorted(positions))
        return cls(
            found=bool(positions),
            first_position=positions[0] if positions else None,
            all_positions=positions,
            occurrence_count=len(positions),
            comparisons=comparisons,
            probes=probes,
        )


def _check_alphabets(pattern: Sequence, subject: Sequence) -> None:
    if pattern.alphabet != subject.alphabet:
        raise ValueError(
            f"pattern alphabet {pattern.alphabet.name!r} differs from "
            f"subject alphabet {subject.alphabet.name!r}"
        )


# -- brute force --------------------------------------------------------------

def brute_force_first(pattern: Sequence, subject: Sequence) -> tuple[Optional[int], int]:
    """Return ``(position, comparisons)``; position is None when absent.

    Every alignment ``0 <= i <= n - m`` is tried, so a match ending at the
    last symbol of the subject is found.
    """
    _check_alphabets(pattern, subject)
    s, p = subject.text, pattern.text
    n, m = len(s), len(p)
    comparisons = 0
    for i in range(n - m + 1):
        j = 0
        while j < m:
            comparisons += 1
            if s[i + j] != p[j]:
                break
            j += 1
        if j == m:
            return i, comparisons
    return None, comparisons


def brute_force_all(pattern: Sequence, subject: Sequence) -> SearchOutcome:
    """All occurrences by sliding comparison; comparisons <= k(N-k+1)."""
    _check_alphabets(pattern, subject)
    s, p = subject.text, pattern.text
    n, m = len(s), len(p)
    comparisons = 0
    hits = []
    for i in range(n - m + 1):
        j = 0
        while j < m:
            comparisons += 1
            if s[i + j] != p[j]:
                break
            j += 1
        if j == m:
            hits.append(i)
    return SearchOutcome.from_positions(hits, comparisons)


def comparison_bound(k: int, n: int) -> int:
    return k * max(n - k + 1, 0)


# -- construction ---------------------------------------------------------------

def _cmp_suffixes(tb: bytes, depth: int, i: int, j: int) -> int:
    n = len(tb)
    li = min(depth, n - i)
    lj = min(depth, n - j)
    off, step = 0, 32
    while True:
        a = tb[i + off:i + min(off + step, li)]
        b = tb[j + off:j + min(off + step, lj)]
        if a != b:
            return -1 if a < b else 1
        off += step
        if off >= li or off >= lj:
            if li != lj:
                return -1 if li < lj else 1
            return -1 if i < j else (1 if i > j else 0)
        step *= 2


def _sort_build(tb: bytes, depth: int) -> list[int]:
    key = functools.cmp_to_key(functools.partial(_cmp_suffixes, tb, depth))
    return sorted(range(len(tb)), key=key)


def _dense_rank(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    idx = np.lexsort((second, first))
    f, s = first[idx], second[idx]
    new_group = np.empty(len(idx), dtype=bool)
    new_group[0] = True
    new_group[1:] = (f[1:] != f[:-1]) | (s[1:] != s[:-1])
    rank = np.empty(len(idx), dtype=np.int64)
    rank[idx] = np.cumsum(new_group)
    return rank


def _shifted(rank: np.ndarray, shift: int) -> np.ndarray:
    out = np.zeros_like(rank)
    if shift < len(rank):
        out[: len(rank) - shift] = rank[shift:]
    return out


def _doubling_build(tb: bytes, depth: int) -> list[int]:
    """Prefix doubling; ranks of the first ``h`` symbols, 0 past the end."""
    n = len(tb)
    target = min(depth, n)
    codes = np.frombuffer(tb, dtype=np.uint8).astype(np.int64)
    rank = _dense_rank(codes, np.zeros(n, dtype=np.int64))
    h = 1
    while 2 * h <= target and rank.max() < n:
        rank = _dense_rank(rank, _shifted(rank, h))
        h *= 2
    if h < target and rank.max() < n:
        # Two overlapping windows of width h cover exactly `target` symbols.
        rank = _dense_rank(rank, _shifted(rank, target - h))
    return np.lexsort((np.arange(n), rank)).tolist()


BUILDERS = {"sort": _sort_build, "doubling": _doubling_build}


@dataclass(frozen=True)
class LetterBuckets:
    """Half-open order-index range per alphabet symbol, in collation order."""

    ranges: tuple[tuple[str, int, int], ...]

    def __getitem__(self, symbol: str) -> tuple[int, int]:
        for sym, lo, hi in self.ranges:
            if sym == symbol:
                return lo, hi
        raise KeyError(symbol)

    def as_dict(self) -> dict[str, tuple[int, int]]:
        return {sym: (lo, hi) for sym, lo, hi in self.ranges}


@dataclass(frozen=True)
class SuffixArray:
    text: Sequence
    order: tuple[int, ...]
    truncation: Optional[int] = None
    _tb: bytes = field(default=b"", repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.order)

    @property
    def depth(self) -> int:
        return self.truncation if self.truncation is not None else self.n

    def suffix(self, rank: int) -> str:
        """Truncated suffix at order index ``rank``."""
        p = self.order[rank]
        return self.text.text[p:p + self.depth]

    def suffixes(self) -> list[str]:
        return [self.suffix(r) for r in range(self.n)]

    @functools.cached_property
    def buckets(self) -> LetterBuckets:
        return build_letter_buckets(self)


def build_suffix_array(text: Sequence, truncation: Optional[int] = None,
                       method: str = "sort") -> SuffixArray:
    """Sort all start positions of ``text`` by their (truncated) suffixes.

    ``method="sort"`` is a comparison sort over positions; ``"doubling"`` is
    the prefix-doubling alternative and yields the identical order.
    """
    if len(text) == 0:
        raise EmptyText()
    if truncation is not None and truncation < 1:
        raise ValueError(f"truncation depth must be >= 1, got {truncation}")
    tb = text.collation_bytes()
    depth = truncation if truncation is not None else len(tb)
    order = BUILDERS[method](tb, depth)
    return SuffixArray(text, tuple(order), truncation, tb)


def build_letter_buckets(sa: SuffixArray) -> LetterBuckets:
    tb = sa._tb or sa.text.collation_bytes()
    firsts = [tb[p] for p in sa.order]
    alphabet = sa.text.alphabet
    ranges = []
    for sym in alphabet.symbols:
        code = Sequence(sym, alphabet).collation_bytes()[0]
        lo = bisect.bisect_left(firsts, code)
        hi = bisect.bisect_right(firsts, code, lo)
        ranges.append((sym, lo, hi))
    return LetterBuckets(tuple(ranges))


# -- search -------------------------------------------------------------------

class _Probe:
    """Counts whole-suffix probes and the character comparisons inside them."""

    def __init__(self, sa: SuffixArray, pattern: bytes):
        self.tb = sa._tb or sa.text.collation_bytes()
        self.order = sa.order
        self.pattern = pattern
        self.k = len(pattern)
        self.probes = 0
        self.chars = 0

    def head(self, rank: int) -> bytes:
        self.probes += 1
        p = self.order[rank]
        head = self.tb[p:p + self.k]
        common = len(os.path.commonprefix([head, self.pattern]))
        self.chars += common + (1 if common < min(len(head), self.k) else 0)
        return head


def _prepare(sa: SuffixArray, pattern: Sequence) -> bytes:
    if pattern.alphabet != sa.text.alphabet:
        raise ValueError("pattern and suffix array use different alphabets")
    if sa.truncation is not None and len(pattern) > sa.truncation:
        raise PatternTooLong(len(pattern), sa.truncation)
    return pattern.collation_bytes()


def _lower(probe: _Probe, lo: int, hi: int) -> int:
    while lo < hi:
        mid = (lo + hi) // 2
        if probe.head(mid) < probe.pattern:
            lo = mid + 1
        else:
            hi = mid
    return lo


def _upper(probe: _Probe, lo: int, hi: int) -> int:
    while lo < hi:
        mid = (lo + hi) // 2
        if probe.head(mid) <= probe.pattern:
            lo = mid + 1
        else:
            hi = mid
    return lo


def sa_lower_bound(sa: SuffixArray, pattern: Sequence) -> int:
    """First order index whose suffix is >= ``pattern``."""
    return _lower(_Probe(sa, _prepare(sa, pattern)), 0, sa.n)


def sa_upper_bound(sa: SuffixArray, pattern: Sequence) -> int:
    """First order index past every suffix that starts with ``pattern``."""
    return _upper(_Probe(sa, _prepare(sa, pattern)), 0, sa.n)


def sa_range(sa: SuffixArray, pattern: Sequence, use_buckets: bool = False):
    """Return ``(lower, upper, probe)`` for the match range of ``pattern``."""
    probe = _Probe(sa, _prepare(sa, pattern))
    lo, hi = 0, sa.n
    if use_buckets and len(pattern):
        lo, hi = sa.buckets[pattern.text[0]]
        probe.probes += 1  # first-letter stage
        probe.chars += 1
    lower = _lower(probe, lo, hi)
    upper = _upper(probe, lower, hi)
    return lower, upper, probe


def sa_search(sa: SuffixArray, pattern: Sequence, use_buckets: bool = False) -> SearchOutcome:
    if len(pattern) == 0:
        _prepare(sa, pattern)
        return SearchOutcome.from_positions(range(sa.n + 1), 0, 0)
    lower, upper, probe = sa_range(sa, pattern, use_buckets)
    return SearchOutcome.from_positions(sa.order[lower:upper], probe.chars, probe.probes)


def probe_bound(width: int) -> int:
    """Maximum probes for the two binary searches over ``width`` entries."""
    if width <= 0:
        return 0
    return 2 * (width.bit_length())  # bit_length(w) == floor(log2 w) + 1
