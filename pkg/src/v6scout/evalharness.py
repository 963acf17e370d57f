"""Desk-scale evaluation: split, train, generate, count hits and new /64s.

The protocol mirrors how a hit list would be judged offline: train a
model on a sample of known-active addresses, generate candidates
(excluding the training set), then count how many candidates appear in
the held-out remainder and how many /64 prefixes among those hits were
never seen in training. Liveness probing is out of scope; the report
schema keeps optional fields so externally measured results can be
merged in.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .addrset import Dataset
from .hitlist import GenerationRequest, generate_targets
from .segmentation import MODE_PREFIX

MODE_ADDRESS = "address"
MODE_PREFIX64 = "prefix64"


@dataclass(frozen=True)
class EvalReport:
    """Outcome of one generate-and-check run."""

    train_size: int
    generated: int
    hits: int
    hit_rate: float
    new_64s: int
    underrun: bool
    mode: str = MODE_ADDRESS
    elapsed_s: float | None = None
    external: dict = field(default_factory=dict)  # e.g. ping/rdns counts

    def to_text(self) -> str:
        """Flat key-value block; excludes elapsed time so output is stable."""
        lines = [
            f"mode: {self.mode}",
            f"train_size: {self.train_size}",
            f"generated: {self.generated}",
            f"hits: {self.hits}",
            f"hit_rate: {self.hit_rate:.6f}",
            f"new_64s: {self.new_64s}",
            f"underrun: {str(self.underrun).lower()}",
        ]
        for key in sorted(self.external):
            lines.append(f"{key}: {self.external[key]}")
        return "\n".join(lines)

    def to_record(self) -> dict:
        record = {
            "mode": self.mode,
            "train_size": self.train_size,
            "generated": self.generated,
            "hits": self.hits,
            "hit_rate": self.hit_rate,
            "new_64s": self.new_64s,
            "underrun": self.underrun,
        }
        if self.elapsed_s is not None:
            record["elapsed_s"] = self.elapsed_s
        record.update(self.external)
        return record


def train_test_split(
    d: Dataset, train_k: int = 1000, seed: int = 0
) -> tuple[Dataset, Dataset]:
    """Uniform random disjoint split with exactly ``train_k`` training addresses."""
    if len(d) <= train_k:
        raise ValueError(
            f"dataset has {len(d)} addresses, need more than train_k={train_k}"
        )
    rng = random.Random(seed)
    indices = set(rng.sample(range(len(d)), train_k))
    train = tuple(a for i, a in enumerate(d.addresses) if i in indices)
    test = tuple(a for i, a in enumerate(d.addresses) if i not in indices)
    return (
        Dataset(train, width=d.width, label=f"{d.label}/train"),
        Dataset(test, width=d.width, label=f"{d.label}/test"),
    )


def evaluate_candidates(
    candidates: Sequence[str],
    train: Dataset,
    test: Dataset,
    mode: str = MODE_ADDRESS,
    underrun: bool = False,
) -> EvalReport:
    """Count test-set hits among deduplicated candidates.

    Address mode compares whole nybble strings; prefix mode compares the
    first 16 nybbles. ``new_64s`` counts distinct /64 prefixes among the
    hits that never occur in the training set.
    """
    if mode not in (MODE_ADDRESS, MODE_PREFIX64):
        raise ValueError(f"unknown evaluation mode {mode!r}")
    if mode == MODE_PREFIX64:
        test_keys = {a[:16] for a in test.addresses}
        hits = [c for c in candidates if c[:16] in test_keys]
    else:
        test_keys = set(test.addresses)
        hits = [c for c in candidates if c in test_keys]
    train_prefixes = {a[:16] for a in train.addresses}
    new_64s = {h[:16] for h in hits} - train_prefixes
    generated = len(candidates)
    return EvalReport(
        train_size=len(train),
        generated=generated,
        hits=len(hits),
        hit_rate=(len(hits) / generated) if generated else 0.0,
        new_64s=len(new_64s),
        underrun=underrun,
        mode=mode,
    )


def run_evaluation(
    dataset: Dataset,
    *,
    train_k: int = 1000,
    generate_n: int = 10_000,
    seed: int = 0,
    max_attempts: int | None = None,
    analysis_params=None,
    extra_tests: Iterable[Dataset] = (),
):
    """Full protocol on one dataset; returns (reports, model, generation).

    ``reports[0]`` is against the held-out split; any ``extra_tests``
    datasets (e.g. a later observation window) get one report each.
    """
    from .pipeline import AnalysisParams, analyze_dataset  # local import, no cycle

    params = analysis_params or AnalysisParams(seed=seed)
    started = time.monotonic()
    train, test = train_test_split(dataset, train_k=train_k, seed=seed)
    model = analyze_dataset(train, params=params)
    request = GenerationRequest(
        n=generate_n,
        exclusions=frozenset(train.addresses),
        seed=seed,
        max_attempts=max_attempts,
    )
    generation = generate_targets(model, request)
    mode = MODE_PREFIX64 if model.mode == MODE_PREFIX else MODE_ADDRESS
    elapsed = time.monotonic() - started
    reports = []
    for test_set in (test, *extra_tests):
        report = evaluate_candidates(
            generation.addresses, train, test_set, mode=mode,
            underrun=generation.underrun,
        )
        reports.append(replace(report, elapsed_s=elapsed))
    return reports, model, generation
