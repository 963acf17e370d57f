"""Candidate target generation from a trained model.

Sampling walks the segments in address order: evidence segments are
clamped, every free segment is drawn from its exact conditional
distribution given everything already fixed (so evidence placed on later
segments correctly biases earlier ones). Code vectors are then decoded
to concrete nybble strings, with range codes drawing uniformly from the
part of their interval not claimed by earlier codes so that re-encoding
a generated address always reproduces its code vector.
"""

from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Mapping, Sequence

import numpy as np

from .addrset import format_address, format_prefix
from .bn import BayesNet, conditional_distribution
from .mining import KIND_EXACT, CodedAddress, SegmentDictionary
from .segmentation import MODE_FULL, MODE_PREFIX

if TYPE_CHECKING:  # pragma: no cover
    from .modelio import AnalysisModel


class UnreachableCodeError(ValueError):
    """A range code fully shadowed by earlier codes cannot be decoded."""


@dataclass(frozen=True)
class GenerationRequest:
    """What to generate: ``n`` unique candidates, optionally conditioned."""

    n: int
    evidence: Mapping[str, str] = field(default_factory=dict)
    exclusions: frozenset[str] = frozenset()
    seed: int = 0
    max_attempts: int | None = None  # defaults to 100 * n

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.max_attempts is not None and self.max_attempts < self.n:
            raise ValueError("max_attempts must be >= n")

    @property
    def attempts_budget(self) -> int:
        return self.max_attempts if self.max_attempts is not None else 100 * self.n


@dataclass(frozen=True)
class GenerationResult:
    """Unique candidates (sorted), their log-probabilities, and bookkeeping."""

    addresses: tuple[str, ...]
    log_probs: tuple[float, ...]
    underrun: bool
    attempts: int

    def __len__(self) -> int:
        return len(self.addresses)


class _Sampler:
    """Reusable sampling state: cumulative CPT rows plus a conditional cache."""

    def __init__(self, net: BayesNet, evidence: Mapping[str, str] | None):
        self.net = net
        self.evidence = net.evidence_indices(evidence)
        self.max_evidence = max(self.evidence) if self.evidence else -1
        # cumulative rows for fast forward sampling: node -> flat row -> cdf
        self.cdfs = []
        for cpt in net.cpts:
            rows = cpt.reshape(-1, cpt.shape[-1])
            self.cdfs.append(np.cumsum(rows, axis=1))
        self.pdims = [
            [net.domain_size(p) for p in ps] for ps in net.structure.parents
        ]
        self._conditional_cache: dict[tuple, np.ndarray] = {}

    def _row_index(self, k: int, assignment: list[int]) -> int:
        flat = 0
        for p, pd in zip(self.net.structure.parents[k], self.pdims[k]):
            flat = flat * pd + assignment[p]
        return flat

    def draw(self, rng: random.Random) -> list[int]:
        assignment: list[int] = []
        for k in range(len(self.net.labels)):
            if k in self.evidence:
                assignment.append(self.evidence[k])
                continue
            if k > self.max_evidence:
                # no evidence downstream: the CPT row is the exact conditional
                cdf = self.cdfs[k][self._row_index(k, assignment)]
                assignment.append(
                    min(bisect_right(cdf, rng.random() * cdf[-1]), len(cdf) - 1)
                )
                continue
            key = (k, tuple(assignment))
            dist = self._conditional_cache.get(key)
            if dist is None:
                fixed = dict(self.evidence)
                fixed.update(enumerate(assignment))
                dist = np.cumsum(conditional_distribution(self.net, fixed, k))
                if len(self._conditional_cache) < 65536:
                    self._conditional_cache[key] = dist
            assignment.append(
                min(bisect_right(dist, rng.random() * dist[-1]), len(dist) - 1)
            )
        return assignment


def sample_coded_address(
    net: BayesNet, evidence: Mapping[str, str] | None, rng: random.Random
) -> CodedAddress:
    """Draw one code vector from the exact conditional given the evidence."""
    sampler = _Sampler(net, evidence)
    assignment = sampler.draw(rng)
    return CodedAddress(
        tuple(net.code_ids[k][i] for k, i in enumerate(assignment))
    )


def decode_coded_address(
    coded: CodedAddress,
    dictionaries: Sequence[SegmentDictionary],
    rng: random.Random,
) -> str:
    """Turn a code vector into a concrete nybble string.

    Exact codes emit their value; range codes draw uniformly from their
    interval minus anything claimed by earlier codes of the same segment
    (plain uniform over [lo, hi] whenever nothing overlaps).
    """
    parts = []
    for dic, code_id in zip(dictionaries, coded.ids):
        index = dic.code_index(code_id)
        code = dic.codes[index]
        if code.kind == KIND_EXACT:
            value = code.lo
        else:
            intervals = dic.decode_intervals(index)
            total = sum(hi - lo + 1 for lo, hi in intervals)
            if total == 0:
                raise UnreachableCodeError(
                    f"code {code.id} is fully shadowed by earlier codes"
                )
            pick = rng.randrange(total)
            for lo, hi in intervals:
                span = hi - lo + 1
                if pick < span:
                    value = lo + pick
                    break
                pick -= span
        parts.append(format(value, f"0{dic.segment.width}x"))
    return "".join(parts)


def generate_targets(model: "AnalysisModel", req: GenerationRequest) -> GenerationResult:
    """Sample-and-decode until ``req.n`` unique candidates or the attempt cap.

    Duplicates and exclusion-set members are discarded. Falling short is
    reported through ``underrun`` rather than raised: a model's support
    may simply be smaller than ``n``. Output is sorted by address so the
    result is independent of discovery order.
    """
    sampler = _Sampler(model.net, req.evidence)
    rng = random.Random(req.seed)
    found: dict[str, float] = {}
    attempts = 0
    budget = req.attempts_budget
    while len(found) < req.n and attempts < budget:
        attempts += 1
        assignment = sampler.draw(rng)
        coded = CodedAddress(
            tuple(model.net.code_ids[k][i] for k, i in enumerate(assignment))
        )
        address = decode_coded_address(coded, model.dictionaries, rng)
        if address in req.exclusions or address in found:
            continue
        found[address] = _log_joint_indices(model.net, assignment)
    ordered = sorted(found)
    return GenerationResult(
        addresses=tuple(ordered),
        log_probs=tuple(found[a] for a in ordered),
        underrun=len(found) < req.n,
        attempts=attempts,
    )


def _log_joint_indices(net: BayesNet, assignment: list[int]) -> float:
    total = 0.0
    for k, parents in enumerate(net.structure.parents):
        idx = tuple(assignment[p] for p in parents) + (assignment[k],)
        total += float(np.log(net.cpts[k][idx]))
    return total


def format_target(nybbles: str, mode: str = MODE_FULL) -> str:
    """Candidate line format: full colon form, or ``prefix::/64`` in prefix mode."""
    if mode == MODE_PREFIX:
        return format_prefix(nybbles)
    return format_address(nybbles)


def write_hitlist(
    result: GenerationResult,
    fh,
    mode: str = MODE_FULL,
    with_scores: bool = False,
) -> None:
    """Write one candidate per line, optionally with a log-probability column."""
    for address, logp in zip(result.addresses, result.log_probs):
        line = format_target(address, mode)
        if with_scores:
            line += f"\t{logp:.6f}"
        fh.write(line + "\n")
