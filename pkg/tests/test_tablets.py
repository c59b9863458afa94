import struct

import pytest
from hypothesis import given, settings, strategies as st

from sfxtablet.errors import (BadThreshold, CorruptFile, EmptyText, PatternTooLong,
                              VersionMismatch, WrongLayout)
from sfxtablet.genome import BINARY, DNA, Sequence, make_rng, random_sequence
from sfxtablet.suffix_index import brute_force_all, build_suffix_array, sa_search
from sfxtablet.tablets import (MAGIC, Layout, dumps, encode_position, filter_scan, ingest,
                               load, loads, persist, prefix_scan, split_policy, successor)


def check_partition(store):
    descs = store.descriptors()
    assert descs[0].start_key is None and descs[-1].end_key is None
    for a, b in zip(descs, descs[1:]):
        assert a.end_key == b.start_key
    prev = None
    for d, tablet in zip(descs, store.tablets):
        assert len(tablet) <= store.split_threshold
        for key in tablet.keys:
            assert d.contains(key)
            assert sum(x.contains(key) for x in descs) == 1
            assert prev is None or prev < key
            prev = key
    assert store.row_count == store.subject_length


class TestIngest:
    def test_acgt_suffix_keyed(self):
        s = ingest(Sequence("ACGT"), Layout.SUFFIX_KEYED, 1000, 2)
        assert s.row_count == 4 and s.tablet_count == 2
        assert [k[:-8] for k in s.tablets[0].keys] == [b"ACGT", b"CGT"]
        check_partition(s)

    def test_acgt_position_keyed(self):
        s = ingest(Sequence("ACGT"), "position_keyed", 1000, 10)
        keys = [k for t in s.tablets for k in t.keys]
        assert keys == [p.to_bytes(8, "big") for p in range(4)]
        assert [r.position for r in s.rows()] == [0, 1, 2, 3]

    def test_row_shape(self):
        text = "ACTACTGACTGCTGTGTGGGTTATCTACTAG"
        s = ingest(Sequence(text), "position_keyed", 29, 100)
        row = next(r for r in s.rows() if r.position == 1)
        assert row.key == encode_position(1)
        assert row.suffix_text == "CTACTGACTGCTGTGTGGGTTATCTACTA"

    def test_errors(self):
        with pytest.raises(EmptyText):
            ingest(Sequence(""))
        with pytest.raises(BadThreshold):
            ingest(Sequence("ACGT"), split_threshold=0)

    def test_truncation_row_law(self):
        text = random_sequence(make_rng(1), 500)
        for layout in Layout:
            s = ingest(text, layout, 7, 50)
            for row in s.rows():
                assert len(row.suffix_text) == min(7, 500 - row.position)
                assert row.suffix_text == text.text[row.position:row.position + 7]

    def test_suffix_keyed_order_is_truncated_suffix_array(self):
        text = Sequence("AAAAACAAAAAC")
        s = ingest(text, "suffix_keyed", 3, 4)
        sa = build_suffix_array(text, truncation=3)
        assert [r.position for r in s.rows()] == list(sa.order)


class TestSplit:
    def test_pigeonhole(self):
        s = ingest(random_sequence(make_rng(0), 10), "suffix_keyed", 10, 4)
        sizes = [len(t) for t in s.tablets]
        assert sum(sizes) == 10 and max(sizes) <= 4

    def test_single_tablet(self):
        assert ingest(random_sequence(make_rng(0), 10), split_threshold=10).tablet_count == 1

    def test_idempotent(self):
        s = ingest(random_sequence(make_rng(0), 1000), split_threshold=7)
        again = split_policy(s)
        assert again == s and again.tablet_count == s.tablet_count

    def test_resplit_tighter(self):
        s = ingest(random_sequence(make_rng(0), 1000), split_threshold=500)
        t = split_policy(s, 30)
        check_partition(t)
        assert [r.key for r in t.rows()] == [r.key for r in s.rows()]

    @settings(max_examples=30)
    @given(st.integers(1, 3000), st.integers(1, 400), st.sampled_from(list(Layout)))
    def test_partition_property(self, n, threshold, layout):
        check_partition(ingest(random_sequence(make_rng(n), n), layout, 12, threshold))


class TestScans:
    def test_prefix_cg(self):
        r = prefix_scan(ingest(Sequence("ACGT")), Sequence("CG"))
        assert (r.outcome, r.positions) == (1, (1,))
        assert r.tablets_visited >= 1

    def test_prefix_absent(self):
        r = prefix_scan(ingest(Sequence("ACGT")), Sequence("TT"))
        assert (r.outcome, r.positions) == (0, ())

    def test_filter_cg(self):
        r = filter_scan(ingest(Sequence("ACGT"), "position_keyed"), Sequence("CG"))
        assert (r.outcome, r.positions, r.rows_examined) == (1, (1,), 4)

    def test_filter_all_a(self):
        r = filter_scan(ingest(Sequence("AAAA"), "position_keyed", 2), Sequence("A"))
        assert r.positions == (0, 1, 2, 3)

    def test_clamp(self):
        for layout, fn in [("suffix_keyed", prefix_scan), ("position_keyed", filter_scan)]:
            r = fn(ingest(Sequence("ACGT"), layout), Sequence("A"))
            assert r.reply_ms_clamped >= 1

    def test_wrong_layout(self):
        with pytest.raises(WrongLayout):
            prefix_scan(ingest(Sequence("ACGT"), "position_keyed"), Sequence("A"))
        with pytest.raises(WrongLayout):
            filter_scan(ingest(Sequence("ACGT"), "suffix_keyed"), Sequence("A"))

    def test_too_long(self):
        s = ingest(Sequence("ACGTACGT"), "suffix_keyed", 3)
        with pytest.raises(PatternTooLong):
            prefix_scan(s, Sequence("ACGT"))

    def test_across_tablets(self):
        s = ingest(Sequence("A" * 50), "suffix_keyed", 5, 3)
        r = prefix_scan(s, Sequence("AA"))
        assert r.positions == tuple(range(49))
        assert r.tablets_visited == s.tablet_count
        assert r.rows_examined == 49

    def test_empty_pattern(self):
        s = ingest(Sequence("ACG"))
        assert prefix_scan(s, Sequence("")).positions == (0, 1, 2, 3)

    def test_successor(self):
        assert successor(b"AC") == b"AD"
        assert successor(b"A\xff") == b"B"
        assert successor(b"\xff\xff") is None
        assert successor(b"") is None

    def test_cross_oracle_equivalence(self):
        rng = make_rng(42)
        for _ in range(200):
            n = int(rng.integers(1, 300))
            alphabet = DNA if rng.random() < 0.5 else BINARY
            text = random_sequence(rng, n, alphabet)
            k = int(rng.integers(1, 8))
            pat = Sequence("".join(alphabet.symbols[i] for i in rng.integers(0, len(alphabet), size=k)),
                           alphabet)
            L = int(rng.integers(k, 20))
            thr = int(rng.integers(1, 50))
            ps = prefix_scan(ingest(text, "suffix_keyed", L, thr), pat)
            fs = filter_scan(ingest(text, "position_keyed", L, thr), pat)
            sa = sa_search(build_suffix_array(text, L), pat)
            assert ps.outcome == fs.outcome == int(sa.found)
            assert ps.positions == fs.positions == sa.all_positions == brute_force_all(pat, text).all_positions

    def test_work_asymmetry_small(self):
        text = random_sequence(make_rng(5), 10_000)
        pat = Sequence(text.text[1234:1254])
        ps = prefix_scan(ingest(text, "suffix_keyed", 32, 1000), pat)
        fs = filter_scan(ingest(text, "position_keyed", 32, 1000), pat)
        assert ps.positions == fs.positions
        assert len(ps.positions) <= 10
        assert ps.rows_examined == len(ps.positions)
        assert fs.rows_examined == 10_000

    def test_non_byte_ordered_alphabet_rejected(self):
        from sfxtablet.genome import Alphabet
        with pytest.raises(ValueError):
            ingest(Sequence("TGCA", Alphabet("rev", ("T", "G", "C", "A"))))


class TestPersistence:
    @pytest.mark.parametrize("layout", list(Layout))
    def test_roundtrip(self, tmp_path, layout):
        s = ingest(random_sequence(make_rng(3), 700), layout, 25, 64)
        path = tmp_path / "s.sfx"
        persist(s, path)
        back = load(path, split_threshold=64)
        assert back == s
        assert back.split_threshold == 64
        assert list(back.rows()) == list(s.rows())

    def test_header_layout(self):
        s = ingest(Sequence("ACGT"), "suffix_keyed", 10, 3)
        data = dumps(s)
        magic, layout, L, n, tablets = struct.unpack_from("<8sBIQI", data)
        assert (magic, layout, L, n, tablets) == (MAGIC, 1, 10, 4, 2)
        total, = struct.unpack_from("<Q", data, len(data) - 9)
        assert total == 4
        x = 0
        for b in data[:-1]:
            x ^= b
        assert data[-1] == x

    def test_threshold_default_inferred(self):
        s = ingest(random_sequence(make_rng(3), 100), split_threshold=30)
        assert loads(dumps(s)).split_threshold == max(len(t) for t in s.tablets)

    def test_truncated_file(self):
        data = dumps(ingest(Sequence("ACGTAC")))
        for cut in range(len(data)):
            with pytest.raises((CorruptFile, VersionMismatch)):
                loads(data[:cut])

    def test_flipped_byte(self):
        data = bytearray(dumps(ingest(Sequence("ACGTAC"))))
        data[30] ^= 0x01
        with pytest.raises(CorruptFile):
            loads(bytes(data))

    def test_consistent_tamper_detected(self):
        # rewrite a row key and fix the checksum: the layout check still fires
        data = bytearray(dumps(ingest(Sequence("ACGT"), "suffix_keyed", 10, 10)))
        off = 25 + 4 + 2
        data[off] = ord("T")
        data[-1] = 0
        x = 0
        for b in data[:-1]:
            x ^= b
        data[-1] = x
        with pytest.raises(CorruptFile):
            loads(bytes(data))

    def test_version(self):
        data = bytearray(dumps(ingest(Sequence("ACGT"))))
        data[6:8] = b"02"
        with pytest.raises(VersionMismatch):
            loads(bytes(data))

    def test_bad_magic(self):
        with pytest.raises(CorruptFile):
            loads(b"NOTASTORE" * 10)

    def test_empty_path(self):
        with pytest.raises(OSError):
            load("")

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load(tmp_path / "nope.sfx")
