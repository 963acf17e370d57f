"""IPv6 address-set handling: parsing, loading, sampling, anonymization.

Addresses are carried around as *nybble strings*: exactly 32 lowercase hex
characters, most significant first, no separators. A /64 prefix uses the
same representation truncated to its first 16 characters. This fixed-width
form is what every analysis stage consumes.
"""

from __future__ import annotations

import ipaddress
import random
from collections.abc import Iterable
from dataclasses import dataclass

FULL_WIDTH = 32
PREFIX_WIDTH = 16

_HEX = "0123456789abcdef"


class AddressParseError(ValueError):
    """Raised for text that is not a plain RFC-4291 IPv6 literal."""


class DatasetError(ValueError):
    """Raised for dataset-level problems (empty input, bad line, ...)."""


class AnonymizerCapacityError(RuntimeError):
    """Raised when an anonymizer session runs out of replacement prefixes."""


def parse_address(text: str) -> str:
    """Parse an IPv6 literal into its 32-nybble string.

    Accepts full, ``::``-compressed, and embedded dotted-quad forms, upper
    or lower case. Zone identifiers (``%eth0``) and anything else beyond a
    bare literal are rejected rather than stripped.

    Args:
        text: candidate IPv6 literal.

    Returns:
        32 lowercase hex characters, most significant nybble first.

    Raises:
        AddressParseError: if the literal is malformed; the message names
            the offending token.
    """
    candidate = text.strip()
    if not candidate:
        raise AddressParseError("empty address literal")
    if "%" in candidate:
        raise AddressParseError(
            f"zone identifier not allowed in {candidate!r} (strip it upstream)"
        )
    try:
        value = int(ipaddress.IPv6Address(candidate))
    except (ipaddress.AddressValueError, ValueError) as exc:
        raise AddressParseError(f"invalid IPv6 literal {candidate!r}: {exc}") from None
    return format(value, "032x")


def format_address(nybbles: str) -> str:
    """Render a 32-nybble string as the fully expanded colon form."""
    check_nybbles(nybbles, FULL_WIDTH)
    return ":".join(nybbles[i : i + 4] for i in range(0, FULL_WIDTH, 4))


def format_prefix(nybbles: str) -> str:
    """Render a 16-nybble string (or the top half of a full address) as ``x:x:x:x::/64``."""
    check_nybbles(nybbles[:PREFIX_WIDTH], PREFIX_WIDTH)
    head = nybbles[:PREFIX_WIDTH]
    return ":".join(head[i : i + 4] for i in range(0, PREFIX_WIDTH, 4)) + "::/64"


def check_nybbles(nybbles: str, width: int) -> None:
    """Validate a nybble string of the given width; raises AddressParseError."""
    if len(nybbles) != width or any(c not in _HEX for c in nybbles):
        raise AddressParseError(
            f"expected {width} lowercase hex characters, got {nybbles!r}"
        )


@dataclass(frozen=True)
class Dataset:
    """A deduplicated set of addresses, in first-seen order.

    ``width`` is 32 for whole addresses and 16 when only the top 64 bits
    (the /64 prefix) are being analyzed.
    """

    addresses: tuple[str, ...]
    width: int = FULL_WIDTH
    label: str = ""

    def __post_init__(self) -> None:
        for a in self.addresses:
            check_nybbles(a, self.width)

    def __len__(self) -> int:
        return len(self.addresses)

    def require_nonempty(self) -> None:
        if not self.addresses:
            raise DatasetError(f"dataset {self.label!r} is empty")

    @staticmethod
    def from_iterable(
        addrs: Iterable[str], width: int = FULL_WIDTH, label: str = ""
    ) -> "Dataset":
        """Build a dataset, dropping exact duplicates but keeping order."""
        return Dataset(tuple(dict.fromkeys(addrs)), width=width, label=label)


@dataclass(frozen=True)
class LoadStats:
    """Line accounting for one load_dataset call."""

    lines_read: int
    kept: int
    duplicates: int
    rejected: int


def load_dataset(
    lines: Iterable[str],
    *,
    label: str = "",
    width: int = FULL_WIDTH,
    on_error: str = "skip",
) -> tuple[Dataset, LoadStats]:
    """Read one IPv6 literal per line into a deduplicated Dataset.

    Blank lines and ``#`` comment lines are ignored. With ``width=16`` each
    address is truncated to its /64 prefix before deduplication.

    Args:
        lines: any iterable of text lines (an open file works).
        label: free-text tag stored on the Dataset.
        width: 32 for full addresses, 16 for prefix-only analysis.
        on_error: ``"skip"`` counts malformed lines and moves on;
            ``"fail"`` aborts on the first one.

    Returns:
        (dataset, stats) where stats reports read/kept/duplicate/rejected
        line counts.

    Raises:
        DatasetError: in fail-fast mode, for the first malformed line
            (the message carries the 1-based line number).
        ValueError: for an unknown ``on_error`` policy or width.
    """
    if on_error not in ("skip", "fail"):
        raise ValueError(f"unknown error policy {on_error!r}")
    if width not in (FULL_WIDTH, PREFIX_WIDTH):
        raise ValueError(f"width must be {FULL_WIDTH} or {PREFIX_WIDTH}")

    seen: dict[str, None] = {}
    read = duplicates = rejected = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        read += 1
        try:
            nyb = parse_address(line)[:width]
        except AddressParseError as exc:
            if on_error == "fail":
                raise DatasetError(f"line {lineno}: {exc}") from None
            rejected += 1
            continue
        if nyb in seen:
            duplicates += 1
        else:
            seen[nyb] = None
    dataset = Dataset(tuple(seen), width=width, label=label)
    return dataset, LoadStats(read, len(dataset), duplicates, rejected)


def stratified_sample(
    d: Dataset, prefix_nybbles: int, k: int, seed: int = 0
) -> Dataset:
    """Sample up to ``k`` addresses from every distinct prefix stratum.

    Addresses are grouped by their first ``prefix_nybbles`` nybbles and
    min(k, stratum size) are drawn uniformly without replacement from each
    group. Deterministic for a fixed seed.
    """
    if not 1 <= prefix_nybbles <= d.width:
        raise ValueError(f"prefix_nybbles must be in [1, {d.width}]")
    if k < 1:
        raise ValueError("k must be >= 1")
    strata: dict[str, list[str]] = {}
    for a in d.addresses:
        strata.setdefault(a[:prefix_nybbles], []).append(a)
    rng = random.Random(seed)
    picked: list[str] = []
    for key in sorted(strata):
        members = strata[key]
        if len(members) <= k:
            picked.extend(members)
        else:
            picked.extend(rng.sample(members, k))
    return Dataset.from_iterable(sorted(picked), width=d.width, label=d.label)


class Anonymizer:
    """Session-scoped rewriting of /32 prefixes onto the documentation prefix.

    The first distinct /32 seen becomes ``2001:0db8``, the second
    ``3001:0db8``, and so on (first nybble incremented per distinct
    original prefix). Nybbles 9-32 pass through untouched unless the caller
    flags the low bits as an embedded IPv4 address, in which case the
    embedded first byte (nybbles 25-26, the RFC-4291 v4-embedded layout)
    is rewritten into 127.0.0.0/8.
    """

    def __init__(self) -> None:
        self._replacement: dict[str, str] = {}

    def anonymize(self, nybbles: str, embedded_ipv4: bool = False) -> str:
        check_nybbles(nybbles, FULL_WIDTH)
        original = nybbles[:8]
        prefix = self._replacement.get(original)
        if prefix is None:
            index = len(self._replacement)
            if index >= 14:  # first nybble runs 2..f
                raise AnonymizerCapacityError(
                    "more than 14 distinct /32 prefixes in one session"
                )
            prefix = _HEX[2 + index] + "0010db8"
            self._replacement[original] = prefix
        tail = nybbles[8:]
        if embedded_ipv4:
            tail = tail[:16] + "7f" + tail[18:]
        return prefix + tail
