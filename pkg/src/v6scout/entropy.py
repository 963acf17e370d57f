"""Per-nybble entropy profile and aggregate count ratios.

For each nybble position the empirical Shannon entropy of the hex values
at that position, normalized by log 16 so that 0 means constant and 1
means uniform over all sixteen values. The total entropy is the sum over
positions. The aggregate count ratio (ACR) at position i compares the
number of distinct i-nybble prefixes with the number of distinct
(i-1)-nybble prefixes: acr[i] = log16(A_i / A_{i-1}), which is 0 when a
position adds no prefix discrimination and 1 when it splits every prefix
sixteen ways.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .addrset import Dataset

_LOG16 = math.log(16)

# hex character -> value lookup for fast matrix building
_LUT = np.zeros(128, dtype=np.uint8)
for _i, _c in enumerate("0123456789abcdef"):
    _LUT[ord(_c)] = _i


@dataclass(frozen=True)
class EntropyProfile:
    """Normalized per-position entropies and ACR values for one dataset."""

    entropies: tuple[float, ...]
    acr: tuple[float, ...]
    total_entropy: float
    n: int

    @property
    def width(self) -> int:
        return len(self.entropies)


def nybble_matrix(d: Dataset) -> np.ndarray:
    """Dataset as a (n, width) uint8 matrix of nybble values."""
    d.require_nonempty()
    flat = np.frombuffer("".join(d.addresses).encode("ascii"), dtype=np.uint8)
    return _LUT[flat].reshape(len(d), d.width)


def nybble_entropy_profile(d: Dataset) -> EntropyProfile:
    """Compute the full entropy/ACR profile of a non-empty dataset."""
    matrix = nybble_matrix(d)
    n = matrix.shape[0]
    entropies = []
    for col in range(d.width):
        counts = np.bincount(matrix[:, col], minlength=16)
        counts = counts[counts > 0]
        if counts.size == 1:
            entropies.append(0.0)  # exact zero for constant positions
            continue
        p = counts / n
        entropies.append(float(-(p * np.log(p)).sum() / _LOG16))
    acr = aggregate_count_ratios(d)
    return EntropyProfile(
        entropies=tuple(entropies),
        acr=acr,
        total_entropy=float(sum(entropies)),
        n=n,
    )


def aggregate_count_ratios(d: Dataset) -> tuple[float, ...]:
    """ACR values for positions 1..width, from distinct-prefix counts."""
    matrix = nybble_matrix(d)
    n, width = matrix.shape
    # Sort rows lexicographically; the first column where a row differs
    # from its predecessor tells which prefix lengths it is new at.
    order = np.lexsort(matrix.T[::-1])
    srt = matrix[order]
    if n == 1:
        first_diff = np.zeros(0, dtype=np.int64)
    else:
        neq = srt[1:] != srt[:-1]
        any_neq = neq.any(axis=1)
        first_diff = np.where(any_neq, neq.argmax(axis=1), width)
    # A[i] = number of distinct i-nybble prefixes; A[0] = 1
    new_at = np.bincount(first_diff, minlength=width + 1)[:width]
    distinct = 1 + np.cumsum(new_at)  # distinct[i-1] == A_i
    ratios = []
    prev = 1
    for i in range(width):
        cur = int(distinct[i])
        ratios.append(math.log(cur / prev) / _LOG16)
        prev = cur
    return tuple(ratios)
