"""Command-line interface: analyze, query, generate, eval, serve, anonymize."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .addrset import (
    AddressParseError,
    Anonymizer,
    AnonymizerCapacityError,
    DatasetError,
    FULL_WIDTH,
    PREFIX_WIDTH,
    format_address,
    load_dataset,
    parse_address,
    stratified_sample,
)
from .bn import EvidenceError, InconsistentEvidenceError, posterior_marginals
from .evalharness import run_evaluation
from .hitlist import GenerationRequest, generate_targets, write_hitlist
from .modelio import AnalysisModel, ModelFormatError, deserialize_model, serialize_model
from .pipeline import AnalysisParams, analyze_dataset


def _load_file_dataset(path: str, *, prefix_mode: bool, label: str | None = None):
    width = PREFIX_WIDTH if prefix_mode else FULL_WIDTH
    with open(path, "r", encoding="utf-8") as fh:
        return load_dataset(fh, label=label or Path(path).name, width=width)


def _load_model(path: str) -> AnalysisModel:
    return deserialize_model(Path(path).read_bytes())


def _parse_evidence(pairs: list[str], model: AnalysisModel) -> dict[str, str]:
    evidence = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise EvidenceError(
                f"bad --set {pair!r}, expected SEGMENT=CODE",
                valid=model.labels,
            )
        label, code = pair.split("=", 1)
        evidence[label] = code
    # validate now so errors carry the valid options
    model.net.evidence_indices(evidence)
    return evidence


def _cmd_analyze(args) -> int:
    dataset, stats = _load_file_dataset(args.file, prefix_mode=args.prefix_mode)
    provenance = {
        "load": {
            "lines_read": stats.lines_read,
            "duplicates": stats.duplicates,
            "rejected": stats.rejected,
        }
    }
    if args.sample_per_32 is not None:
        dataset = stratified_sample(dataset, 8, args.sample_per_32, seed=args.seed)
        provenance["sample_per_32"] = args.sample_per_32
    params = AnalysisParams(seed=args.seed)
    model = analyze_dataset(dataset, params=params, extra_provenance=provenance)
    payload = serialize_model(model)
    if args.out == "-":
        sys.stdout.buffer.write(payload)
    else:
        Path(args.out).write_bytes(payload)
        print(
            f"analyzed {len(dataset)} addresses -> {len(model.segmentation)} "
            f"segments, model written to {args.out}",
            file=sys.stderr,
        )
    return 0


def _cmd_query(args) -> int:
    model = _load_model(args.model)
    evidence = _parse_evidence(args.set, model)
    marginals = posterior_marginals(model.net, evidence)
    for dic in model.dictionaries:
        label = dic.segment.label
        print(f"segment {label} (positions {dic.segment.start}-{dic.segment.end}):")
        for code in dic.codes:
            p = marginals[label][code.id]
            mark = " *" if evidence.get(label) == code.id else ""
            print(
                f"  {code.id:>6}  {code.display(dic.segment.width):<34} "
                f"{p:.6f}{mark}"
            )
    return 0


def _cmd_generate(args) -> int:
    model = _load_model(args.model)
    evidence = _parse_evidence(args.set, model)
    exclusions: frozenset[str] = frozenset()
    if args.exclude:
        excl, _ = _load_file_dataset(
            args.exclude, prefix_mode=(model.mode == "prefix")
        )
        exclusions = frozenset(excl.addresses)
    request = GenerationRequest(
        n=args.n, evidence=evidence, exclusions=exclusions, seed=args.seed,
        max_attempts=args.max_attempts,
    )
    result = generate_targets(model, request)
    out = sys.stdout if args.out == "-" else open(args.out, "w", encoding="utf-8")
    try:
        write_hitlist(result, out, mode=model.mode, with_scores=args.scores)
    finally:
        if out is not sys.stdout:
            out.close()
    if result.underrun:
        print(
            f"underrun: produced {len(result)} of {args.n} requested "
            f"after {result.attempts} attempts",
            file=sys.stderr,
        )
    return 0


def _cmd_eval(args) -> int:
    dataset, _ = _load_file_dataset(args.file, prefix_mode=args.prefix_mode)
    reports, _, _ = run_evaluation(
        dataset,
        train_k=args.train_k,
        generate_n=args.generate,
        seed=args.seed,
        max_attempts=args.max_attempts,
    )
    if args.json:
        print(json.dumps([r.to_record() for r in reports], indent=1))
    else:
        print(reports[0].to_text())
        if reports[0].elapsed_s is not None:
            print(f"elapsed_s: {reports[0].elapsed_s:.2f}", file=sys.stderr)
    return 0


def _cmd_serve(args) -> int:
    from .service import serve_http  # deferred: pulls in fastapi/uvicorn

    source = Path(args.source)
    try:
        model = deserialize_model(source.read_bytes())
    except ModelFormatError:
        dataset, _ = _load_file_dataset(args.source, prefix_mode=args.prefix_mode)
        model = analyze_dataset(dataset, AnalysisParams(seed=args.seed))
    host, _, port = args.listen.rpartition(":")
    serve_http(
        model,
        host=host or "127.0.0.1",
        port=int(port),
        cors_origins=args.cors,
        generate_cap=args.generate_cap,
        ui_dir=args.ui,
    )
    return 0


def _cmd_anonymize(args) -> int:
    session = Anonymizer()
    with open(args.file, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            nyb = parse_address(line)
            out = session.anonymize(nyb, embedded_ipv4=args.embedded_ipv4)
            print(format_address(out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="v6scout",
        description="Discover structure in IPv6 address sets and generate scan targets.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="train a model from an address file")
    p.add_argument("file")
    p.add_argument("--prefix-mode", action="store_true",
                   help="analyze only the top 64 bits (/64 prefixes)")
    p.add_argument("--sample-per-32", type=int, metavar="K",
                   help="stratified-sample K addresses per /32 before analysis")
    p.add_argument("--out", default="-", help="model file ('-' = stdout)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("query", help="print per-segment code probabilities")
    p.add_argument("model")
    p.add_argument("--set", action="append", metavar="SEG=CODE",
                   help="clamp a segment to a code id (repeatable)")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("generate", help="generate candidate targets")
    p.add_argument("model")
    p.add_argument("-n", type=int, required=True, help="unique candidates wanted")
    p.add_argument("--set", action="append", metavar="SEG=CODE")
    p.add_argument("--exclude", help="file of addresses to never emit")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-attempts", type=int, default=None)
    p.add_argument("--scores", action="store_true",
                   help="append a log-probability column")
    p.add_argument("--out", default="-", help="output file ('-' = stdout)")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("eval", help="split/train/generate/score one dataset")
    p.add_argument("file")
    p.add_argument("--train-k", type=int, default=1000)
    p.add_argument("--generate", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-attempts", type=int, default=None)
    p.add_argument("--prefix-mode", action="store_true")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("serve", help="serve a model (or analyze a file) over HTTP")
    p.add_argument("source", help="model archive or address file")
    p.add_argument("--listen", default="127.0.0.1:8000", metavar="ADDR:PORT")
    p.add_argument("--prefix-mode", action="store_true",
                   help="used when analyzing a raw address file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cors", action="append", default=None,
                   help="allowed UI origin (repeatable; default *)")
    p.add_argument("--generate-cap", type=int, default=10_000)
    p.add_argument("--ui", default=None, help="directory of UI static files")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("anonymize", help="rewrite /32 prefixes onto 2001:db8::/32")
    p.add_argument("file")
    p.add_argument("--embedded-ipv4", action="store_true",
                   help="also rewrite the first byte of embedded IPv4 addresses")
    p.set_defaults(func=_cmd_anonymize)
    return parser


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EvidenceError as exc:
        valid = f" (valid: {', '.join(exc.valid)})" if exc.valid else ""
        print(f"v6scout: {exc}{valid}", file=sys.stderr)
        return 2
    except (
        AddressParseError,
        DatasetError,
        AnonymizerCapacityError,
        InconsistentEvidenceError,
        ModelFormatError,
        ValueError,
        OSError,
    ) as exc:
        print(f"v6scout: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    raise SystemExit(run_cli())


if __name__ == "__main__":
    main()
