"""Versioned model archive: serialize and load the complete analysis.

The archive is a single JSON document (see docs/model-format.md for the
field-by-field schema). Every float travels as a decimal string with 17
significant digits, which round-trips IEEE-754 doubles exactly, and every
segment value as width-padded hex, so other-language consumers can parse
the archive without precision surprises. Loading is strict: unknown
fields are treated as a newer format and rejected, and cross-references
(dictionaries vs. segmentation, CPTs vs. code sets) are checked before a
model object is handed back.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from .bn import BayesNet, BnStructure
from .entropy import EntropyProfile
from .mining import KIND_EXACT, KIND_RANGE, SegmentCode, SegmentDictionary
from .segmentation import MODE_FULL, MODE_PREFIX, Segment, Segmentation

FORMAT_NAME = "v6scout-model"
FORMAT_VERSION = 1

_CODE_ORIGINS = {"outlier", "dense-range", "uniform-range", "closing"}


class ModelFormatError(ValueError):
    """Base class for everything that can go wrong loading an archive."""


class CorruptModelError(ModelFormatError):
    """Archive is not parseable as the expected document shape."""


class ModelVersionError(ModelFormatError):
    """Archive claims a format/version we do not understand."""


class ModelConsistencyError(ModelFormatError):
    """Archive parsed fine but its parts do not agree with each other."""


@dataclass(frozen=True)
class AnalysisModel:
    """Everything one analysis run produced, as a single immutable bundle."""

    profile: EntropyProfile
    segmentation: Segmentation
    dictionaries: tuple[SegmentDictionary, ...]
    net: BayesNet
    mode: str = MODE_FULL
    provenance: dict = field(default_factory=dict)
    version: int = FORMAT_VERSION

    def __post_init__(self) -> None:
        validate_model(self)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.segmentation)

    def dictionary(self, label: str) -> SegmentDictionary:
        for dic in self.dictionaries:
            if dic.segment.label == label:
                return dic
        raise KeyError(label)


def validate_model(m: AnalysisModel) -> None:
    if m.mode not in (MODE_FULL, MODE_PREFIX):
        raise ModelConsistencyError(f"unknown mode {m.mode!r}")
    if m.profile.width != m.segmentation.width:
        raise ModelConsistencyError("profile width does not match segmentation")
    seg_labels = [s.label for s in m.segmentation]
    dict_labels = [d.segment.label for d in m.dictionaries]
    if seg_labels != dict_labels:
        raise ModelConsistencyError(
            f"dictionaries {dict_labels} do not match segmentation {seg_labels}"
        )
    for seg, dic in zip(m.segmentation, m.dictionaries):
        if (seg.start, seg.end) != (dic.segment.start, dic.segment.end):
            raise ModelConsistencyError(f"segment bounds differ for {seg.label}")
    if tuple(m.net.labels) != tuple(seg_labels):
        raise ModelConsistencyError("network nodes do not match segmentation")
    for k, dic in enumerate(m.dictionaries):
        ids = tuple(c.id for c in dic.codes)
        if m.net.code_ids[k] != ids:
            raise ModelConsistencyError(
                f"network code space for {dic.segment.label} does not match dictionary"
            )
        expected_shape = tuple(
            len(m.dictionaries[p].codes) for p in m.net.structure.parents[k]
        ) + (len(ids),)
        if m.net.cpts[k].shape != expected_shape:
            raise ModelConsistencyError(
                f"CPT shape for {dic.segment.label} is {m.net.cpts[k].shape}, "
                f"expected {expected_shape}"
            )
        rows = m.net.cpts[k].reshape(-1, len(ids))
        if not np.allclose(rows.sum(axis=1), 1.0, atol=1e-9):
            raise ModelConsistencyError(
                f"CPT rows for {dic.segment.label} do not sum to 1"
            )


# ---------------------------------------------------------------------------
# Writing
# ---------------------------------------------------------------------------


def _fnum(x: float) -> str:
    return format(float(x), ".17g")


def _code_doc(code: SegmentCode, width: int) -> dict:
    doc = {
        "id": code.id,
        "kind": code.kind,
        "freq": _fnum(code.freq),
        "origin": code.origin,
        "display": code.display(width),
    }
    if code.kind == KIND_EXACT:
        doc["value"] = f"{code.lo:0{width}x}"
    else:
        doc["lo"] = f"{code.lo:0{width}x}"
        doc["hi"] = f"{code.hi:0{width}x}"
    return doc


def model_document(m: AnalysisModel) -> dict:
    """The archive as a plain dict (what the HTTP /model endpoint returns)."""
    nodes = []
    for k, label in enumerate(m.net.labels):
        parents = m.net.structure.parents[k]
        parent_labels = [m.net.labels[p] for p in parents]
        parent_ids = [m.net.code_ids[p] for p in parents]
        rows = []
        table = m.net.cpts[k].reshape(-1, len(m.net.code_ids[k]))
        for combo, row in zip(product(*parent_ids), table):
            rows.append({"given": list(combo), "p": [_fnum(p) for p in row]})
        nodes.append(
            {
                "label": label,
                "parents": parent_labels,
                "codes": list(m.net.code_ids[k]),
                "cpt": rows,
            }
        )
    return {
        "format": FORMAT_NAME,
        "version": m.version,
        "mode": m.mode,
        "provenance": m.provenance,
        "profile": {
            "n": m.profile.n,
            "entropies": [_fnum(h) for h in m.profile.entropies],
            "acr": [_fnum(a) for a in m.profile.acr],
            "total_entropy": _fnum(m.profile.total_entropy),
        },
        "segments": [
            {"label": s.label, "start": s.start, "end": s.end}
            for s in m.segmentation
        ],
        "dictionaries": [
            {
                "segment": d.segment.label,
                "codes": [_code_doc(c, d.segment.width) for c in d.codes],
            }
            for d in m.dictionaries
        ],
        "bn": {"alpha": _fnum(m.net.alpha), "nodes": nodes},
    }


def serialize_model(m: AnalysisModel) -> bytes:
    return (json.dumps(model_document(m), indent=1) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Reading
# ---------------------------------------------------------------------------


def _expect_keys(doc: dict, where: str, required: set[str], optional: set[str] = frozenset()) -> None:
    missing = required - doc.keys()
    if missing:
        raise CorruptModelError(f"{where}: missing fields {sorted(missing)}")
    unknown = doc.keys() - required - optional
    if unknown:
        raise ModelVersionError(
            f"{where}: unknown fields {sorted(unknown)} (newer format?)"
        )


def _parse_float(raw, where: str) -> float:
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise CorruptModelError(f"{where}: bad number {raw!r}") from None
    if not math.isfinite(value):
        raise CorruptModelError(f"{where}: non-finite number {raw!r}")
    return value


def _parse_hex(raw, where: str) -> int:
    if not isinstance(raw, str):
        raise CorruptModelError(f"{where}: expected hex string, got {raw!r}")
    try:
        return int(raw, 16)
    except ValueError:
        raise CorruptModelError(f"{where}: bad hex value {raw!r}") from None


def _load_code(doc: dict, where: str) -> SegmentCode:
    _expect_keys(
        doc, where, {"id", "kind", "freq", "origin", "display"},
        optional={"value", "lo", "hi"},
    )
    kind = doc["kind"]
    if kind == KIND_EXACT:
        lo = hi = _parse_hex(doc.get("value"), where)
    elif kind == KIND_RANGE:
        lo = _parse_hex(doc.get("lo"), where)
        hi = _parse_hex(doc.get("hi"), where)
    else:
        raise CorruptModelError(f"{where}: unknown code kind {kind!r}")
    if doc["origin"] not in _CODE_ORIGINS:
        raise CorruptModelError(f"{where}: unknown origin {doc['origin']!r}")
    try:
        return SegmentCode(
            id=doc["id"], kind=kind, lo=lo, hi=hi,
            freq=_parse_float(doc["freq"], where), origin=doc["origin"],
        )
    except ValueError as exc:
        raise ModelConsistencyError(f"{where}: {exc}") from None


def deserialize_model(data: bytes) -> AnalysisModel:
    """Parse and validate an archive produced by serialize_model."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptModelError(f"unreadable archive: {exc}") from None
    if not isinstance(doc, dict):
        raise CorruptModelError("archive root is not an object")
    _expect_keys(
        doc, "archive",
        {"format", "version", "mode", "provenance", "profile", "segments",
         "dictionaries", "bn"},
    )
    if doc["format"] != FORMAT_NAME:
        raise ModelVersionError(f"not a {FORMAT_NAME} archive: {doc['format']!r}")
    if doc["version"] != FORMAT_VERSION:
        raise ModelVersionError(
            f"format version {doc['version']!r} unsupported (have {FORMAT_VERSION})"
        )

    pdoc = doc["profile"]
    _expect_keys(pdoc, "profile", {"n", "entropies", "acr", "total_entropy"})
    profile = EntropyProfile(
        entropies=tuple(_parse_float(x, "profile.entropies") for x in pdoc["entropies"]),
        acr=tuple(_parse_float(x, "profile.acr") for x in pdoc["acr"]),
        total_entropy=_parse_float(pdoc["total_entropy"], "profile.total_entropy"),
        n=int(pdoc["n"]),
    )

    segments = []
    for sdoc in doc["segments"]:
        _expect_keys(sdoc, "segment", {"label", "start", "end"})
        segments.append(Segment(sdoc["label"], int(sdoc["start"]), int(sdoc["end"])))
    try:
        segmentation = Segmentation(tuple(segments), mode=doc["mode"])
    except (ValueError, KeyError) as exc:
        raise ModelConsistencyError(f"bad segmentation: {exc}") from None

    by_label = {s.label: s for s in segments}
    dictionaries = []
    for ddoc in doc["dictionaries"]:
        _expect_keys(ddoc, "dictionary", {"segment", "codes"})
        seg = by_label.get(ddoc["segment"])
        if seg is None:
            raise ModelConsistencyError(
                f"dictionary for unknown segment {ddoc['segment']!r}"
            )
        codes = tuple(
            _load_code(cdoc, f"dictionary {seg.label}") for cdoc in ddoc["codes"]
        )
        dictionaries.append(SegmentDictionary(segment=seg, codes=codes))

    net = _load_net(doc["bn"], dictionaries)
    try:
        return AnalysisModel(
            profile=profile,
            segmentation=segmentation,
            dictionaries=tuple(dictionaries),
            net=net,
            mode=doc["mode"],
            provenance=doc["provenance"],
            version=doc["version"],
        )
    except ModelFormatError:
        raise
    except ValueError as exc:
        raise ModelConsistencyError(str(exc)) from None


def _load_net(bdoc: dict, dictionaries: Sequence[SegmentDictionary]) -> BayesNet:
    _expect_keys(bdoc, "bn", {"alpha", "nodes"})
    labels = tuple(d.segment.label for d in dictionaries)
    index_of = {label: i for i, label in enumerate(labels)}
    code_ids = tuple(tuple(c.id for c in d.codes) for d in dictionaries)
    if len(bdoc["nodes"]) != len(labels):
        raise ModelConsistencyError("bn node count does not match segments")
    parents_all: list[tuple[int, ...]] = []
    cpts: list[np.ndarray] = []
    for k, ndoc in enumerate(bdoc["nodes"]):
        _expect_keys(ndoc, f"bn node {k}", {"label", "parents", "codes", "cpt"})
        if ndoc["label"] != labels[k]:
            raise ModelConsistencyError(
                f"bn node {k} is {ndoc['label']!r}, expected {labels[k]!r}"
            )
        if tuple(ndoc["codes"]) != code_ids[k]:
            raise ModelConsistencyError(
                f"bn node {labels[k]} code space does not match its dictionary"
            )
        try:
            parents = tuple(index_of[p] for p in ndoc["parents"])
        except KeyError as exc:
            raise ModelConsistencyError(
                f"bn node {labels[k]} references unknown parent {exc}"
            ) from None
        if any(p >= k for p in parents):
            raise ModelConsistencyError(
                f"bn node {labels[k]} has a non-earlier parent"
            )
        own = len(code_ids[k])
        expected_rows = list(product(*(code_ids[p] for p in parents))) or [()]
        rows_doc = ndoc["cpt"]
        if len(rows_doc) != len(expected_rows):
            raise ModelConsistencyError(
                f"bn node {labels[k]}: {len(rows_doc)} CPT rows, "
                f"expected {len(expected_rows)}"
            )
        table = np.empty((len(expected_rows), own), dtype=float)
        for r, (rdoc, combo) in enumerate(zip(rows_doc, expected_rows)):
            _expect_keys(rdoc, f"bn node {labels[k]} row {r}", {"given", "p"})
            if tuple(rdoc["given"]) != combo:
                raise ModelConsistencyError(
                    f"bn node {labels[k]} row {r}: parent combo "
                    f"{rdoc['given']!r} out of order or unknown"
                )
            if len(rdoc["p"]) != own:
                raise ModelConsistencyError(
                    f"bn node {labels[k]} row {r}: {len(rdoc['p'])} entries, "
                    f"expected {own}"
                )
            table[r] = [_parse_float(x, f"bn node {labels[k]} row {r}") for x in rdoc["p"]]
        shape = tuple(len(code_ids[p]) for p in parents) + (own,)
        cpts.append(table.reshape(shape))
        parents_all.append(parents)
    try:
        structure = BnStructure(labels=labels, parents=tuple(parents_all))
    except ValueError as exc:
        raise ModelConsistencyError(str(exc)) from None
    return BayesNet(
        structure=structure,
        code_ids=code_ids,
        cpts=tuple(cpts),
        alpha=_parse_float(bdoc["alpha"], "bn.alpha"),
    )
