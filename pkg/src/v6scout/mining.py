"""Per-segment value mining: popular exact values, dense ranges, code vectors.

For each segment the training addresses are projected down to that
segment's integer values and a small ordered code set is built in up to
four passes:

  (a) frequency outliers        -> exact-value codes
  (b) DBSCAN on the value line  -> dense ranges
  (c) DBSCAN on the histogram   -> flat-ish, mostly-continuous ranges
  (d) closing                   -> whatever is left, as exact values if
                                   few occurrences remain, else one range

Each pass removes the occurrences it covered; if 0.1% or less of the
original occurrences remain after a pass, the remaining mining passes are
skipped (closing still runs so that every training value has a matching
code). Code frequencies are occurrences covered at insertion time over
the original projection size, so they sum to 1.
"""

from __future__ import annotations

import statistics
from bisect import bisect_left, bisect_right
from collections import Counter
from dataclasses import dataclass, field
from math import ceil
from typing import Callable, Sequence

from .addrset import Dataset
from .segmentation import Segment, Segmentation

ORIGIN_OUTLIER = "outlier"
ORIGIN_DENSE_RANGE = "dense-range"
ORIGIN_UNIFORM_RANGE = "uniform-range"
ORIGIN_CLOSING = "closing"

KIND_EXACT = "exact-value"
KIND_RANGE = "range"


class OutOfDictionaryError(LookupError):
    """An address carries a segment value no code covers."""

    def __init__(self, label: str, value: int, width: int):
        self.label = label
        self.value = value
        super().__init__(
            f"segment {label}: value {value:0{width}x} matches no code"
        )


@dataclass(frozen=True)
class SegmentCode:
    """One element of a segment's code set.

    Exact-value codes have lo == hi; range codes have lo < hi (inclusive).
    """

    id: str
    kind: str
    lo: int
    hi: int
    freq: float
    origin: str

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"{self.id}: lo {self.lo} > hi {self.hi}")
        if self.kind == KIND_EXACT and self.lo != self.hi:
            raise ValueError(f"{self.id}: exact code with lo != hi")
        if self.kind == KIND_RANGE and self.lo == self.hi:
            raise ValueError(f"{self.id}: range code with lo == hi")

    def matches(self, value: int) -> bool:
        return self.lo <= value <= self.hi

    def display(self, width: int) -> str:
        if self.kind == KIND_EXACT:
            return f"{self.lo:0{width}x}"
        return f"{self.lo:0{width}x}-{self.hi:0{width}x}"


@dataclass
class SegmentDictionary:
    """Ordered code set of one segment; insertion order is match order."""

    segment: Segment
    codes: tuple[SegmentCode, ...]
    _decode_cache: dict[int, list[tuple[int, int]]] = field(
        default_factory=dict, repr=False, compare=False
    )

    def match(self, value: int) -> SegmentCode:
        for code in self.codes:
            if code.matches(value):
                return code
        raise OutOfDictionaryError(self.segment.label, value, self.segment.width)

    def code_index(self, code_id: str) -> int:
        for i, code in enumerate(self.codes):
            if code.id == code_id:
                return i
        raise KeyError(code_id)

    def decode_intervals(self, index: int) -> list[tuple[int, int]]:
        """Value intervals a decode of codes[index] may draw from.

        The code's own [lo, hi] minus everything claimed by earlier codes,
        so that decoding and first-match re-encoding agree.
        """
        cached = self._decode_cache.get(index)
        if cached is None:
            intervals = [(self.codes[index].lo, self.codes[index].hi)]
            for earlier in self.codes[:index]:
                intervals = _subtract_interval(intervals, earlier.lo, earlier.hi)
            cached = self._decode_cache[index] = intervals
        return cached


@dataclass(frozen=True)
class CodedAddress:
    """An address rewritten as one code id per segment."""

    ids: tuple[str, ...]


@dataclass(frozen=True)
class MiningParams:
    """Knobs for the mining passes; defaults are what the tests pin."""

    top_k: int = 10
    stop_fraction: float = 0.001
    # pass (b): dense ranges on the raw value multiset
    value_eps_divisor: int = 4096  # eps = max(1, segment_space // divisor)
    value_min_pts_floor: int = 8
    value_min_pts_fraction: float = 0.005
    # pass (c): ranges on the (value, count) histogram
    hist_value_gap_divisor: int = 1024
    hist_count_tolerance: float = 0.5  # |dcount| <= tol * median(count)
    hist_min_pts: int = 4
    hist_min_fill: float = 0.5  # distinct values / range width
    hist_max_cv: float = 0.5  # std/mean of member counts
    closing_exact_max: int = 10


def _subtract_interval(
    intervals: list[tuple[int, int]], lo: int, hi: int
) -> list[tuple[int, int]]:
    out: list[tuple[int, int]] = []
    for a, b in intervals:
        if hi < a or lo > b:
            out.append((a, b))
            continue
        if a < lo:
            out.append((a, lo - 1))
        if hi < b:
            out.append((hi + 1, b))
    return out


def _quartile(sorted_values: Sequence[int], q: float) -> int:
    # Order-statistic quartile (lower interpolation): index floor(q * (n-1)).
    return sorted_values[int(q * (len(sorted_values) - 1))]


def find_frequency_outliers(values: Sequence[int]) -> list[tuple[int, int]]:
    """Distinct values whose occurrence count exceeds Q3 + 1.5*IQR.

    Quartiles are taken over the per-distinct-value counts. Returns at
    most the top 10 (value, count) pairs, most frequent first.
    """
    if not values:
        raise ValueError("empty value multiset")
    counts = Counter(values)
    ordered = sorted(counts.values())
    q3 = _quartile(ordered, 0.75)
    iqr = q3 - _quartile(ordered, 0.25)
    cutoff = q3 + 1.5 * iqr
    hits = [(v, c) for v, c in counts.items() if c > cutoff]
    hits.sort(key=lambda vc: (-vc[1], vc[0]))
    return hits[:10]


def dbscan(
    points: Sequence,
    eps: float,
    min_pts: int,
    distance: Callable | None = None,
) -> list[list]:
    """Density-based clustering with standard DBSCAN semantics.

    A point is core when at least ``min_pts`` points (itself included) lie
    within ``eps`` of it; clusters are the maximal density-connected sets;
    everything else is noise (simply absent from the result). Determinism
    comes from processing points in their given order, so callers should
    pre-sort ascending.

    ``distance=None`` selects absolute numeric difference and an
    O(n log n) sorted-window implementation; any callable metric falls
    back to the generic O(n^2) neighbourhood scan.
    """
    if min_pts < 1 or eps <= 0:
        raise ValueError("need eps > 0 and min_pts >= 1")
    if not points:
        return []
    if distance is None:
        return _dbscan_line(points, eps, min_pts)
    return _dbscan_generic(points, eps, min_pts, distance)


def _dbscan_line(points: Sequence, eps: float, min_pts: int) -> list[list]:
    values = sorted(points)
    distinct: list = []
    counts: list[int] = []
    for v in values:
        if distinct and distinct[-1] == v:
            counts[-1] += 1
        else:
            distinct.append(v)
            counts.append(1)
    prefix = [0]
    for c in counts:
        prefix.append(prefix[-1] + c)

    def occupancy(lo_val, hi_val) -> int:
        lo = bisect_left(distinct, lo_val)
        hi = bisect_right(distinct, hi_val)
        return prefix[hi] - prefix[lo]

    core = [
        occupancy(v - eps, v + eps) >= min_pts for v in distinct
    ]
    core_idx = [i for i, flag in enumerate(core) if flag]
    # Consecutive core values at most eps apart are density-connected;
    # non-core (border) values join but never bridge runs of cores.
    runs: list[tuple[int, int]] = []
    for i in core_idx:
        if runs and distinct[i] - distinct[runs[-1][1]] <= eps:
            runs[-1] = (runs[-1][0], i)
        else:
            runs.append((i, i))
    assigned = [False] * len(distinct)
    clusters: list[list] = []
    for first, last in runs:
        lo = bisect_left(distinct, distinct[first] - eps)
        hi = bisect_right(distinct, distinct[last] + eps) - 1
        members: list = []
        for k in range(lo, hi + 1):
            if not assigned[k]:
                assigned[k] = True
                members.extend([distinct[k]] * counts[k])
        clusters.append(members)
    return clusters


def _dbscan_generic(
    points: Sequence, eps: float, min_pts: int, distance: Callable
) -> list[list]:
    n = len(points)
    neighbours = [
        [j for j in range(n) if distance(points[i], points[j]) <= eps]
        for i in range(n)
    ]
    core = [len(nb) >= min_pts for nb in neighbours]
    cluster_of = [-1] * n
    n_clusters = 0
    for i in range(n):
        if not core[i] or cluster_of[i] != -1:
            continue
        cid = n_clusters
        n_clusters += 1
        queue = [i]
        cluster_of[i] = cid
        while queue:
            p = queue.pop()
            if not core[p]:
                continue
            for q in neighbours[p]:
                if cluster_of[q] == -1:
                    cluster_of[q] = cid
                    if core[q]:
                        queue.append(q)
    clusters: list[list] = [[] for _ in range(n_clusters)]
    for i, cid in enumerate(cluster_of):
        if cid != -1:
            clusters[cid].append(points[i])
    return clusters


def segment_values(d: Dataset, seg: Segment) -> list[int]:
    """Project every address onto one segment's integer value."""
    d.require_nonempty()
    return [seg.values_of(a) for a in d.addresses]


def mine_segment(
    d: Dataset, seg: Segment, params: MiningParams = MiningParams()
) -> SegmentDictionary:
    """Build the ordered code set for one segment of the training data."""
    values = segment_values(d, seg)
    total = len(values)
    space = 16**seg.width
    remaining = Counter(values)
    codes: list[SegmentCode] = []

    def add(kind_lo: int, kind_hi: int, covered: int, origin: str) -> None:
        kind = KIND_EXACT if kind_lo == kind_hi else KIND_RANGE
        codes.append(
            SegmentCode(
                id=f"{seg.label}{len(codes) + 1}",
                kind=kind,
                lo=kind_lo,
                hi=kind_hi,
                freq=covered / total,
                origin=origin,
            )
        )

    def left() -> int:
        return sum(remaining.values())

    # (a) unusually frequent exact values
    for v, c in find_frequency_outliers(values)[: params.top_k]:
        add(v, v, c, ORIGIN_OUTLIER)
        del remaining[v]

    # (b) dense ranges on the raw value line
    if left() > params.stop_fraction * total:
        points = sorted(remaining.elements())
        eps = max(1, space // params.value_eps_divisor)
        min_pts = max(
            params.value_min_pts_floor, ceil(params.value_min_pts_fraction * total)
        )
        clusters = dbscan(points, eps, min_pts)
        clusters.sort(key=lambda c: (-len(c), min(c)))
        for cl in clusters[: params.top_k]:
            lo, hi = min(cl), max(cl)
            add(lo, hi, len(cl), ORIGIN_DENSE_RANGE)
            for v in set(cl):
                del remaining[v]

    # (c) flat-ish mostly-continuous ranges on the leftover histogram
    if left() > params.stop_fraction * total:
        hist = sorted(remaining.items())
        eps_v = max(1, space // params.hist_value_gap_divisor)
        eps_c = params.hist_count_tolerance * statistics.median(
            c for _, c in hist
        )

        def box(p: tuple[int, int], q: tuple[int, int]) -> float:
            dv = abs(p[0] - q[0]) / eps_v
            dc = abs(p[1] - q[1]) / eps_c if eps_c > 0 else (
                0.0 if p[1] == q[1] else 2.0
            )
            return max(dv, dc)

        accepted = []
        for cl in dbscan(hist, 1.0, params.hist_min_pts, distance=box):
            vs = [v for v, _ in cl]
            cs = [c for _, c in cl]
            lo, hi = min(vs), max(vs)
            fill = len(vs) / (hi - lo + 1)
            mean = sum(cs) / len(cs)
            cv = statistics.pstdev(cs) / mean
            if fill >= params.hist_min_fill and cv <= params.hist_max_cv:
                accepted.append((lo, hi, sum(cs)))
        accepted.sort(key=lambda t: (-t[2], t[0]))
        for lo, hi, covered in accepted[: params.top_k]:
            add(lo, hi, covered, ORIGIN_UNIFORM_RANGE)
            for v in [v for v in remaining if lo <= v <= hi]:
                del remaining[v]

    # closing: everything left gets a code so training data always encodes
    leftover = left()
    if leftover:
        if leftover <= params.closing_exact_max:
            for v in sorted(remaining):
                add(v, v, remaining[v], ORIGIN_CLOSING)
        else:
            add(min(remaining), max(remaining), leftover, ORIGIN_CLOSING)

    return SegmentDictionary(segment=seg, codes=tuple(codes))


def mine_all(
    d: Dataset, segmentation: Segmentation, params: MiningParams = MiningParams()
) -> list[SegmentDictionary]:
    return [mine_segment(d, seg, params) for seg in segmentation]


def encode_address(
    nybbles: str, dictionaries: Sequence[SegmentDictionary]
) -> CodedAddress:
    """Rewrite one address as its per-segment code vector (first match wins)."""
    ids = []
    for dic in dictionaries:
        value = dic.segment.values_of(nybbles)
        ids.append(dic.match(value).id)
    return CodedAddress(tuple(ids))


def encode_dataset(
    d: Dataset, dictionaries: Sequence[SegmentDictionary]
) -> list[CodedAddress]:
    return [encode_address(a, dictionaries) for a in d.addresses]
