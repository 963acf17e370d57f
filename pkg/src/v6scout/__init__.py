"""v6scout: structure discovery and scan-target generation for IPv6 address sets."""

from .addrset import (
    Anonymizer,
    AnonymizerCapacityError,
    AddressParseError,
    Dataset,
    DatasetError,
    format_address,
    format_prefix,
    load_dataset,
    parse_address,
    stratified_sample,
)
from .bn import (
    BayesNet,
    BnStructure,
    EvidenceError,
    InconsistentEvidenceError,
    fit_cpts,
    learn_structure,
    log_joint,
    posterior_marginals,
)
from .entropy import EntropyProfile, aggregate_count_ratios, nybble_entropy_profile
from .evalharness import (
    EvalReport,
    evaluate_candidates,
    run_evaluation,
    train_test_split,
)
from .hitlist import (
    GenerationRequest,
    GenerationResult,
    decode_coded_address,
    format_target,
    generate_targets,
    sample_coded_address,
    write_hitlist,
)
from .mining import (
    CodedAddress,
    MiningParams,
    OutOfDictionaryError,
    SegmentCode,
    SegmentDictionary,
    dbscan,
    encode_address,
    encode_dataset,
    find_frequency_outliers,
    mine_all,
    mine_segment,
)
from .modelio import (
    AnalysisModel,
    CorruptModelError,
    ModelConsistencyError,
    ModelFormatError,
    ModelVersionError,
    deserialize_model,
    model_document,
    serialize_model,
)
from .pipeline import AnalysisParams, analyze_dataset
from .segmentation import (
    DEFAULT_HYSTERESIS,
    DEFAULT_THRESHOLDS,
    Segment,
    Segmentation,
    boundary_between,
    segment_profile,
)

__version__ = "0.1.0"
