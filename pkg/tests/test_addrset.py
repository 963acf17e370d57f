from __future__ import annotations

import io

import pytest
from hypothesis import given
from hypothesis import strategies as st

from v6scout.addrset import (
    AddressParseError,
    Anonymizer,
    AnonymizerCapacityError,
    Dataset,
    DatasetError,
    format_address,
    load_dataset,
    parse_address,
    stratified_sample,
)

nybble_strings = st.text(alphabet="0123456789abcdef", min_size=32, max_size=32)


class TestParse:
    def test_compressed(self):
        assert parse_address("2001:db8::1") == "2001" + "0db8" + "0" * 23 + "1"

    def test_all_zeros(self):
        assert parse_address("::") == "0" * 32

    def test_embedded_dotted_quad(self):
        assert parse_address("2001:db8::192.0.2.1").endswith("c0000201")

    def test_uppercase_accepted_lowercase_emitted(self):
        assert parse_address("2001:DB8::A") == parse_address("2001:db8::a")

    def test_invalid_hex_digit(self):
        with pytest.raises(AddressParseError, match="zz"):
            parse_address("2001:zz::1")

    def test_zone_identifier_rejected(self):
        with pytest.raises(AddressParseError, match="zone"):
            parse_address("fe80::1%eth0")

    def test_port_suffix_rejected(self):
        with pytest.raises(AddressParseError):
            parse_address("[2001:db8::1]:443")

    def test_empty_rejected(self):
        with pytest.raises(AddressParseError):
            parse_address("   ")

    @given(nybble_strings)
    def test_parse_format_roundtrip(self, nyb):
        assert parse_address(format_address(nyb)) == nyb

    @given(nybble_strings)
    def test_format_parse_identity_on_expanded_text(self, nyb):
        text = format_address(nyb)
        assert format_address(parse_address(text)) == text


class TestLoadDataset:
    def test_dedup(self):
        lines = ["2001:db8::1", "2001:db8::2", "2001:db8::1", "::", "2001:db8::3"]
        d, stats = load_dataset(lines)
        assert len(d) == 4
        assert stats.lines_read == 5
        assert stats.duplicates == 1
        assert stats.rejected == 0

    def test_empty_file(self):
        d, stats = load_dataset(io.StringIO(""))
        assert len(d) == 0
        with pytest.raises(DatasetError):
            d.require_nonempty()

    def test_comments_and_blanks_ignored(self):
        d, stats = load_dataset(["# hello", "", "2001:db8::1", "  "])
        assert len(d) == 1
        assert stats.lines_read == 1

    def test_fig4_file_all_unique(self, fig4_dataset):
        lines = [format_address(a) for a in fig4_dataset.addresses]
        d, _ = load_dataset(lines)
        assert len(d) == 5

    def test_skip_policy_counts(self):
        d, stats = load_dataset(["2001:db8::1", "bogus", "2001:db8::2"])
        assert len(d) == 2
        assert stats.rejected == 1

    def test_fail_fast_names_line(self):
        with pytest.raises(DatasetError, match="line 2"):
            load_dataset(["2001:db8::1", "bogus"], on_error="fail")

    def test_prefix_width_truncates_and_dedups(self):
        d, _ = load_dataset(["2001:db8::1", "2001:db8::2"], width=16)
        assert len(d) == 1
        assert d.addresses[0] == "20010db800000000"


class TestStratifiedSample:
    def _dataset(self, strata: dict[str, int]) -> Dataset:
        addrs = []
        for prefix, size in strata.items():
            for i in range(size):
                addrs.append(prefix + format(i, "024x"))
        return Dataset.from_iterable(addrs)

    def test_cap_binds(self):
        d = self._dataset({"20010db8": 500, "20014860": 500})
        out = stratified_sample(d, 8, 100, seed=1)
        assert len(out) == 200
        counts = {}
        for a in out.addresses:
            counts[a[:8]] = counts.get(a[:8], 0) + 1
        assert counts == {"20010db8": 100, "20014860": 100}

    def test_cap_slack_keeps_all(self):
        d = self._dataset({"20010db8": 30})
        assert len(stratified_sample(d, 8, 1000, seed=1)) == 30

    def test_deterministic(self):
        d = self._dataset({"20010db8": 500, "20014860": 300})
        a = stratified_sample(d, 8, 50, seed=42)
        b = stratified_sample(d, 8, 50, seed=42)
        assert a.addresses == b.addresses

    @given(st.integers(1, 8), st.integers(1, 40), st.data())
    def test_subset_and_per_stratum_counts(self, prefix_nybbles, k, data):
        addrs = data.draw(
            st.lists(nybble_strings, min_size=1, max_size=60, unique=True)
        )
        d = Dataset.from_iterable(addrs)
        out = stratified_sample(d, prefix_nybbles, k, seed=0)
        assert set(out.addresses) <= set(d.addresses)
        strata: dict[str, int] = {}
        for a in d.addresses:
            strata[a[:prefix_nybbles]] = strata.get(a[:prefix_nybbles], 0) + 1
        picked: dict[str, int] = {}
        for a in out.addresses:
            picked[a[:prefix_nybbles]] = picked.get(a[:prefix_nybbles], 0) + 1
        for key, size in strata.items():
            assert picked.get(key, 0) == min(k, size)


class TestAnonymizer:
    def test_first_prefix_becomes_documentation(self):
        session = Anonymizer()
        out = session.anonymize(parse_address("2001:4860:4860::8888"))
        assert out.startswith("20010db8")
        assert out[8:] == parse_address("2001:4860:4860::8888")[8:]

    def test_second_prefix_increments_first_nybble(self):
        session = Anonymizer()
        session.anonymize(parse_address("2001:4860::1"))
        out = session.anonymize(parse_address("2a03:2880::1"))
        assert out.startswith("30010db8")

    def test_same_prefix_maps_identically(self):
        session = Anonymizer()
        a = session.anonymize(parse_address("2001:4860::1"))
        b = session.anonymize(parse_address("2001:4860::2"))
        assert a[:8] == b[:8]

    def test_injective_until_capacity(self):
        session = Anonymizer()
        seen = set()
        for i in range(14):
            out = session.anonymize(format(i, "08x") + "0" * 24)
            assert out[:8] not in seen
            seen.add(out[:8])
        with pytest.raises(AnonymizerCapacityError):
            session.anonymize(format(99, "08x") + "0" * 24)

    def test_embedded_ipv4_first_byte_rewritten(self):
        session = Anonymizer()
        nyb = parse_address("2001:db8::192.0.2.1")
        out = session.anonymize(nyb, embedded_ipv4=True)
        assert out[24:26] == "7f"
        assert out[26:] == nyb[26:]
        assert out[8:24] == nyb[8:24]
