"""End-to-end analysis: dataset in, serializable model out."""

from __future__ import annotations

import json

from dataclasses import asdict, dataclass, field

from .addrset import Dataset, PREFIX_WIDTH
from .bn import fit_cpts, learn_structure
from .entropy import nybble_entropy_profile
from .mining import MiningParams, encode_dataset, mine_all
from .modelio import AnalysisModel
from .segmentation import (
    DEFAULT_HYSTERESIS,
    DEFAULT_THRESHOLDS,
    MODE_FULL,
    MODE_PREFIX,
    segment_profile,
)


@dataclass(frozen=True)
class AnalysisParams:
    """Every knob of the pipeline, recorded verbatim in model provenance."""

    thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS
    hysteresis: float = DEFAULT_HYSTERESIS
    mining: MiningParams = field(default_factory=MiningParams)
    alpha: float = 0.5
    max_parents: int = 2
    seed: int = 0


def analyze_dataset(
    dataset: Dataset,
    params: AnalysisParams = AnalysisParams(),
    extra_provenance: dict | None = None,
) -> AnalysisModel:
    """Run profile -> segmentation -> mining -> network on one dataset.

    The mode follows the dataset width: 16-nybble datasets produce a
    prefix-mode model whose candidates are /64 prefixes.
    """
    dataset.require_nonempty()
    mode = MODE_PREFIX if dataset.width == PREFIX_WIDTH else MODE_FULL
    profile = nybble_entropy_profile(dataset)
    segmentation = segment_profile(
        profile, mode=mode, thresholds=params.thresholds,
        hysteresis=params.hysteresis,
    )
    dictionaries = mine_all(dataset, segmentation, params.mining)
    coded = encode_dataset(dataset, dictionaries)
    structure = learn_structure(coded, dictionaries, params.max_parents)
    net = fit_cpts(coded, structure, dictionaries, params.alpha)
    provenance = {
        "dataset_label": dataset.label,
        "n_addresses": len(dataset),
        "params": asdict(params),
        # local conventions a reader of the archive should know about
        "acr_definition": "log16 ratio of distinct prefix counts",
        "mining_denominator": "original per-segment multiset size",
        "atomic_first_segment": True,
    }
    provenance.update(extra_provenance or {})
    # provenance is stored verbatim in the JSON archive; keep it JSON-native
    provenance = json.loads(json.dumps(provenance))
    return AnalysisModel(
        profile=profile,
        segmentation=segmentation,
        dictionaries=tuple(dictionaries),
        net=net,
        mode=mode,
        provenance=provenance,
    )
