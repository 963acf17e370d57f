"""Threshold/hysteresis segmentation of an entropy profile.

Scanning positions left to right, a new segment starts wherever the
entropy of adjacent positions crosses one of a fixed set of levels by
more than a hysteresis margin. On top of that, full-mode segmentation
always forces a boundary after position 8 (the /32 registry allocation
unit) and after position 16 (the network/interface split), and treats
positions 1-8 as one atomic segment. Prefix mode keeps only the /32
boundary and ends the cover at position 16.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .entropy import EntropyProfile

DEFAULT_THRESHOLDS: tuple[float, ...] = (0.025, 0.1, 0.3, 0.5, 0.9)
DEFAULT_HYSTERESIS = 0.05

MODE_FULL = "full"
MODE_PREFIX = "prefix"
_MODE_WIDTH = {MODE_FULL: 32, MODE_PREFIX: 16}


def segment_label(index: int) -> str:
    """0 -> A, 1 -> B, ..., 25 -> Z, 26 -> AA, 27 -> AB ..."""
    if index < 26:
        return chr(ord("A") + index)
    return "A" + chr(ord("A") + index - 26)


@dataclass(frozen=True)
class Segment:
    """A contiguous run of nybble positions, 1-based and inclusive."""

    label: str
    start: int
    end: int

    def __post_init__(self) -> None:
        if not 1 <= self.start <= self.end <= 32:
            raise ValueError(f"bad segment bounds {self.start}..{self.end}")

    @property
    def width(self) -> int:
        return self.end - self.start + 1

    def values_of(self, nybbles: str) -> int:
        """Integer value of this segment within one nybble string."""
        return int(nybbles[self.start - 1 : self.end], 16)


@dataclass(frozen=True)
class Segmentation:
    """An ordered, exhaustive, non-overlapping cover of the profile width."""

    segments: tuple[Segment, ...]
    mode: str = MODE_FULL

    def __post_init__(self) -> None:
        width = _MODE_WIDTH[self.mode]
        pos = 1
        for seg in self.segments:
            if seg.start != pos:
                raise ValueError(f"segments not contiguous at position {pos}")
            pos = seg.end + 1
        if pos != width + 1:
            raise ValueError(f"segments cover 1..{pos - 1}, expected 1..{width}")

    @property
    def width(self) -> int:
        return _MODE_WIDTH[self.mode]

    def __iter__(self):
        return iter(self.segments)

    def __len__(self) -> int:
        return len(self.segments)

    def by_label(self, label: str) -> Segment:
        for seg in self.segments:
            if seg.label == label:
                return seg
        raise KeyError(label)


def boundary_between(
    prev_h: float,
    cur_h: float,
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
    hysteresis: float = DEFAULT_HYSTERESIS,
) -> bool:
    """Decide whether a segment boundary falls between two adjacent positions.

    True iff some threshold lies strictly between the two entropies (a
    strict crossing; touching a threshold exactly does not trigger) and
    the jump exceeds the hysteresis margin. The margin comparison carries
    1e-12 of slack so decimal-specified jumps (e.g. 0.49 -> 0.54 with a
    0.05 margin) behave as written despite binary floating point.
    """
    if abs(cur_h - prev_h) <= hysteresis + 1e-12:
        return False
    lo, hi = min(prev_h, cur_h), max(prev_h, cur_h)
    return any(lo < t < hi for t in thresholds)


def segment_profile(
    profile: EntropyProfile,
    mode: str = MODE_FULL,
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
    hysteresis: float = DEFAULT_HYSTERESIS,
    forced: bool = True,
) -> Segmentation:
    """Partition the profile's positions into entropy segments.

    With ``forced=True`` (the normal pipeline setting) the /32 and, in
    full mode, /64 boundaries are always present and positions 1-8 form
    one atomic segment regardless of interior crossings. ``forced=False``
    applies the threshold rule alone, which is useful for inspecting what
    the data itself suggests.
    """
    width = _MODE_WIDTH[mode]
    if profile.width != width:
        raise ValueError(
            f"profile has {profile.width} positions, mode {mode!r} needs {width}"
        )
    h = profile.entropies
    starts = {1}
    for i in range(2, width + 1):
        if boundary_between(h[i - 2], h[i - 1], thresholds, hysteresis):
            starts.add(i)
    if forced:
        starts.add(9)
        if mode == MODE_FULL:
            starts.add(17)
        starts -= set(range(2, 9))  # positions 1-8 stay one segment
    ordered = sorted(starts)
    segments = []
    for idx, start in enumerate(ordered):
        end = (ordered[idx + 1] - 1) if idx + 1 < len(ordered) else width
        segments.append(Segment(segment_label(idx), start, end))
    return Segmentation(tuple(segments), mode=mode)
