import io

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sfxtablet.errors import BadRange, EmptySequence, NotPackable, RejectedSymbol
from sfxtablet.genome import (BINARY, DNA, LATIN, REJECT, STRIP, Alphabet, PackedSequence,
                              Sequence, make_rng, normalize_and_validate, pack, packed_size,
                              random_pattern, read_fasta, substitute, unpack)

dna_text = st.text(alphabet="ACGT", max_size=300)


class TestAlphabet:
    def test_dna_order(self):
        assert DNA.symbols == ("A", "C", "G", "T")
        assert DNA.codepoint_ordered

    @pytest.mark.parametrize("symbols", [("A",), ("A", "A"), ("AB", "C")])
    def test_invalid(self, symbols):
        with pytest.raises(ValueError):
            Alphabet("bad", symbols)

    def test_custom_collation(self):
        rev = Alphabet("rev", ("T", "G", "C", "A"))
        assert not rev.codepoint_ordered
        assert Sequence("TA", rev).collation_bytes() < Sequence("AT", rev).collation_bytes()


class TestNormalize:
    def test_case_and_whitespace(self):
        assert normalize_and_validate("acgt\n", DNA, REJECT).text == "ACGT"

    def test_strip(self):
        assert normalize_and_validate("ACGNT", DNA, STRIP).text == "ACGT"

    def test_reject(self):
        with pytest.raises(RejectedSymbol) as exc:
            normalize_and_validate("ACGNT", DNA, REJECT)
        assert (exc.value.position, exc.value.char) == (3, "N")

    def test_substitute(self):
        assert normalize_and_validate("ACNNT", DNA, substitute("a")).text == "ACAAT"
        assert normalize_and_validate("ACNT", DNA, "substitute:G").text == "ACGT"

    @pytest.mark.parametrize("raw", ["", "  \n", "NNNN"])
    def test_empty(self, raw):
        with pytest.raises(EmptySequence):
            normalize_and_validate(raw, DNA, STRIP)

    def test_sequence_rejects_foreign_symbols(self):
        with pytest.raises(RejectedSymbol):
            Sequence("ACGU")


class TestFasta:
    def test_single_record(self):
        assert read_fasta(io.StringIO(">chr1\nACGT\nACGT\n")).text == "ACGTACGT"

    def test_multi_record(self):
        assert read_fasta(">a\nAC\n>b\nGT\n").text == "ACGT"

    def test_headerless(self):
        assert read_fasta("ACGT").text == "ACGT"

    def test_header_only_is_empty(self):
        with pytest.raises(EmptySequence):
            read_fasta(">only\n")

    def test_reject_reports_global_offset(self):
        with pytest.raises(RejectedSymbol) as exc:
            read_fasta(">x\nACGT\nACNT\n", DNA, REJECT)
        assert exc.value.position == 6


class TestPacking:
    def test_tgca_single_byte(self):
        # T=00 G=01 C=10 A=11, first symbol in the high bits
        p = pack(Sequence("TGCA"))
        assert p.codes == bytes([0b00011011]) == b"\x1b"
        assert p.length == 4

    def test_empty(self):
        p = pack(Sequence(""))
        assert p.codes == b"" and p.length == 0

    def test_unpack_1b(self):
        assert unpack(PackedSequence(b"\x1b", 4)).text == "TGCA"

    def test_padding(self):
        p = pack(Sequence("ACGTA"))
        assert len(p.codes) == 2
        assert p.codes[1] & 0b00111111 == 0
        assert unpack(p).text == "ACGTA"

    def test_roundtrip_acgt(self):
        assert unpack(pack(Sequence("ACGT"))).text == "ACGT"

    def test_not_packable(self):
        with pytest.raises(NotPackable):
            pack(Sequence("HELLO", LATIN))

    def test_size_law_exhaustive(self):
        rng = make_rng(3)
        for n in range(1001):
            s = Sequence("".join(rng.choice(list("ACGT"), size=n)))
            assert len(pack(s).codes) == packed_size(n) == -(-n // 4)

    def test_human_genome_scale(self):
        assert packed_size(3_200_000_000) == 800_000_000

    def test_code_order_is_not_collation(self):
        words = ["A", "T"]
        by_codes = sorted(words, key=lambda w: pack(Sequence(w)).codes)
        by_symbols = sorted(words, key=lambda w: Sequence(w).collation_bytes())
        assert by_symbols == ["A", "T"]
        assert by_codes == ["T", "A"]

    @given(dna_text)
    def test_roundtrip_property(self, text):
        assert unpack(pack(Sequence(text))).text == text

    def test_bad_packed_length(self):
        with pytest.raises(ValueError):
            PackedSequence(b"\x00\x00", 4)


class TestRandomPattern:
    def test_length_one(self):
        p = random_pattern(make_rng(5), 1, 1, DNA)
        assert len(p) == 1 and p.text in "ACGT"

    def test_determinism(self):
        r1, r2 = make_rng(11), make_rng(11)
        assert [random_pattern(r1).text for _ in range(50)] == [random_pattern(r2).text for _ in range(50)]

    def test_substreams_differ(self):
        assert random_pattern(make_rng(1, 0), 50, 50).text != random_pattern(make_rng(1, 1), 50, 50).text

    def test_uniform_lengths(self):
        rng = make_rng(2024)
        lengths = [len(random_pattern(rng, 1, 100)) for _ in range(10_000)]
        assert min(lengths) >= 1 and max(lengths) <= 100
        assert 45 <= np.mean(lengths) <= 55

    @pytest.mark.parametrize("lo,hi", [(0, 5), (6, 5)])
    def test_bad_range(self, lo, hi):
        with pytest.raises(BadRange):
            random_pattern(make_rng(0), lo, hi)

    def test_binary_alphabet(self):
        p = random_pattern(make_rng(0), 20, 20, BINARY)
        assert set(p.text) <= {"A", "B"}


@given(st.text(alphabet="ACGT", max_size=12), st.text(alphabet="ACGT", max_size=12))
def test_collation_matches_alphabetical(a, b):
    ka, kb = Sequence(a).collation_key(), Sequence(b).collation_key()
    assert (ka < kb) == (a < b)
    assert (ka == kb) == (a == b)
