"""Suffix-array pattern matching over a sharded, sorted row store."""

from .genome import (BINARY, DNA, LATIN, Alphabet, PackedSequence, Sequence,
                     normalize_and_validate, pack, random_pattern, read_fasta, unpack)
from .suffix_index import (SearchOutcome, SuffixArray, brute_force_all, brute_force_first,
                           build_letter_buckets, build_suffix_array, sa_search)
from .tablets import Layout, TabletStore, filter_scan, ingest, load, persist, prefix_scan

__all__ = [
    "BINARY", "DNA", "LATIN", "Alphabet", "PackedSequence", "Sequence",
    "normalize_and_validate", "pack", "random_pattern", "read_fasta", "unpack",
    "SearchOutcome", "SuffixArray", "brute_force_all", "brute_force_first",
    "build_letter_buckets", "build_suffix_array", "sa_search",
    "Layout", "TabletStore", "filter_scan", "ingest", "load", "persist", "prefix_scan",
]
__version__ = "0.1.0"
