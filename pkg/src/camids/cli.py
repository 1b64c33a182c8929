"""Command-line entry point: synth, extract, train, evaluate, classify.

Exit codes: 0 success, 2 usage or input error, 3 schema/model mismatch,
4 I/O failure.
"""

import argparse
import csv
import logging
import sys

import numpy as np

from . import __version__
from .dataset import (
    LABEL_MAP,
    Label,
    SplitConfig,
    concat,
    drop_non_numeric,
    load_csv_path,
    rows_to_matrix,
    split,
)
from .errors import (
    CamidsError,
    FormatError,
    SchemaError,
    SplitError,
    TruncatedCapture,
    UnlabeledData,
    UnsupportedFormat,
    UnsupportedLinkType,
    VersionError,
)
from .evaluate import evaluate
from .features import FEATURE_COLUMNS, extract_packets, write_features_csv
from .models import ModelArtifact, load_model_path, make_estimator, save_model_path
from .pcap_io import read_pcap, write_pcap
from .synth import ScenarioConfig, gen_mixed, generate, read_truth_csv, write_truth_csv

log = logging.getLogger("camids")

EXIT_OK, EXIT_USAGE, EXIT_SCHEMA, EXIT_IO = 0, 2, 3, 4

MODEL_ALIASES = {
    "rf": "random_forest",
    "ada": "adaboost",
    "logreg": "logreg",
    "gnb": "gnb",
    "perceptron": "perceptron",
}


class CliError(Exception):
    def __init__(self, message, code=EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _open_out(path, mode="w", **kw):
    try:
        return open(path, mode, **kw)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}", EXIT_USAGE) from None


def _csv_list(value):
    return [v.strip() for v in value.split(",") if v.strip()] if value else []


# ---------------------------------------------------------------- synth

def _scenario_arg(text):
    try:
        label, n, seed = text.split(":")
        return Label.parse(label), int(n), int(seed)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LABEL:PACKETS:SEED, got {text!r}") from None


def cmd_synth(args):
    overrides = {
        k: v
        for k, v in dict(
            target_ip=args.target_ip,
            target_port=args.target_port,
            attacker_ip=args.attacker_ip,
            mean_interarrival=args.mean_interarrival,
        ).items()
        if v is not None
    }
    if args.start_ts is not None:
        overrides["start_ts"] = args.start_ts
    if args.scenario:
        if args.label is not None:
            raise CliError("use either --label or --scenario, not both")
        cfgs = [ScenarioConfig(lab, n, seed, **overrides) for lab, n, seed in args.scenario]
        cap = gen_mixed(cfgs)
    else:
        if args.label is None or args.packets is None:
            raise CliError("--label and --packets are required without --scenario")
        try:
            cfg = ScenarioConfig(Label.parse(args.label), args.packets, args.seed, **overrides)
        except ValueError as exc:
            raise CliError(str(exc)) from None
        cap = generate(cfg)
    try:
        write_pcap(args.out, cap.packets, args.timestamp_unit)
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc.strerror}", EXIT_USAGE) from None
    if args.truth:
        with _open_out(args.truth, newline="") as fh:
            write_truth_csv(cap.truth, fh)
    print(f"wrote {len(cap.packets)} packets to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------- extract

def cmd_extract(args):
    if args.label and args.truth:
        raise CliError("--label and --truth are mutually exclusive")
    label = None
    if args.label:
        label = Label.parse(args.label).name
    truth = None
    if args.truth:
        with open(args.truth, newline="") as fh:
            truth = read_truth_csv(fh)
        if [i for i, _ in truth] != list(range(len(truth))):
            raise CliError("truth sidecar indices must be 0..n-1 in order")
    _, packets = read_pcap(args.pcap)
    if truth is not None:
        # materialise to compare lengths before writing anything
        packets = list(packets)
        if len(packets) != len(truth):
            raise CliError(
                f"truth sidecar has {len(truth)} rows but capture has {len(packets)} packets"
            )
        label = [lab.name for _, lab in truth]
    with _open_out(args.out, newline="") as fh:
        n = write_features_csv(extract_packets(packets), fh, label)
    print(f"wrote {n} feature rows to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------- train / evaluate

def _load_numeric(paths):
    parts = []
    for path in paths:
        try:
            parts.append(drop_non_numeric(load_csv_path(path)))
        except UnlabeledData as exc:
            raise CliError(f"{path}: {exc}") from None
    return concat(parts)


def _emit_report(report, fmt, path=None):
    text = report.format(fmt)
    sys.stdout.write(text)
    if path:
        with _open_out(path) as fh:
            fh.write(text)


def cmd_train(args):
    kind = MODEL_ALIASES.get(args.model)
    if kind is None:
        raise CliError(f"unknown model {args.model!r}; choose from {', '.join(MODEL_ALIASES)}")
    paths = _csv_list(args.data)
    if not paths:
        raise CliError("--data needs at least one CSV")
    ds = _load_numeric(paths)
    excluded = _csv_list(args.exclude_columns)
    unknown = [c for c in excluded if c not in ds.columns]
    if unknown:
        raise CliError(f"cannot exclude unknown column {unknown[0]!r}")
    ds = ds.without(excluded)
    train, test = split(ds, SplitConfig(args.split, args.split_seed))
    est = make_estimator(kind)
    if args.seed_override is not None:
        if "random_state" in est.get_params():
            est.set_params(random_state=args.seed_override)
        else:
            log.warning("%s has no seed; --seed-override ignored", kind)
    est.fit(train.X, train.y)
    artifact = ModelArtifact(
        est,
        ds.columns,
        dict(LABEL_MAP),
        meta={"excluded_columns": excluded, "split": args.split, "split_seed": args.split_seed},
    )
    save_model_path(artifact, args.out)
    if test.n_rows == 0:
        log.warning("held-out split is empty; no report")
        return EXIT_OK
    report = evaluate(test.y, est.predict(test.X), len(LABEL_MAP))
    _emit_report(report, args.report_format, args.report)
    return EXIT_OK


def _load_artifact(path):
    try:
        return load_model_path(path)
    except (FormatError, VersionError) as exc:
        raise CliError(f"{path}: {exc}", EXIT_SCHEMA) from None


def cmd_evaluate(args):
    artifact = _load_artifact(args.model)
    ds = _load_numeric([args.data])
    ds = ds.without(c for c in artifact.meta.get("excluded_columns", ()) if c in ds.columns)
    pred = artifact.predict(ds.X, ds.columns)
    if ds.n_rows == 0:
        raise CliError("no rows to evaluate")
    report = evaluate(ds.y, pred, len(LABEL_MAP))
    _emit_report(report, args.report_format, args.report)
    return EXIT_OK


# ---------------------------------------------------------------- classify

def cmd_classify(args):
    artifact = _load_artifact(args.model)
    unknown = [c for c in artifact.columns if c not in FEATURE_COLUMNS]
    if unknown:
        raise CliError(f"model expects column {unknown[0]!r} not produced by the extractor", EXIT_SCHEMA)
    _, packets = read_pcap(args.pcap)
    rows = list(extract_packets(packets))
    X = rows_to_matrix(rows, artifact.columns)
    pred = artifact.predict(X, artifact.columns) if rows else np.zeros(0, dtype=np.int64)
    names = artifact.label_map
    with _open_out(args.out, newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["packet_index", "predicted_label"])
        for i, code in enumerate(pred):
            writer.writerow([i, names[int(code)]])
    if args.summary:
        counts = np.bincount(pred, minlength=len(names)) if len(pred) else np.zeros(len(names), int)
        for code in sorted(names):
            print(f"{names[code]}: {int(counts[code])}")
        verdict = names[int(np.argmax(counts))] if len(pred) else "none"
        print(f"majority: {verdict}")
    return EXIT_OK


# ---------------------------------------------------------------- wiring

def build_parser():
    p = argparse.ArgumentParser(prog="camids", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="generate a labeled synthetic capture")
    s.add_argument("--label", choices=Label.names())
    s.add_argument("--packets", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--scenario", type=_scenario_arg, action="append",
                   help="LABEL:PACKETS:SEED; repeat to merge several scenarios")
    s.add_argument("--out", required=True)
    s.add_argument("--truth")
    s.add_argument("--target-ip")
    s.add_argument("--target-port", type=int)
    s.add_argument("--attacker-ip")
    s.add_argument("--mean-interarrival", type=float)
    s.add_argument("--start-ts", type=float)
    s.add_argument("--timestamp-unit", choices=["microsecond", "nanosecond"], default="microsecond")
    s.set_defaults(func=cmd_synth)

    e = sub.add_parser("extract", help="pcap -> per-packet feature CSV")
    e.add_argument("--pcap", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--label", choices=Label.names())
    e.add_argument("--truth")
    e.set_defaults(func=cmd_extract)

    t = sub.add_parser("train", help="train a model and report on the held-out split")
    t.add_argument("--data", required=True, help="comma-separated labeled CSVs")
    t.add_argument("--model", required=True)
    t.add_argument("--out", required=True)
    t.add_argument("--split", type=float, default=0.7)
    t.add_argument("--split-seed", type=int, default=0)
    t.add_argument("--seed-override", type=int)
    t.add_argument("--exclude-columns")
    t.add_argument("--report")
    t.add_argument("--report-format", choices=["table", "kv"], default="table")
    t.set_defaults(func=cmd_train)

    v = sub.add_parser("evaluate", help="score a model on labeled feature CSV")
    v.add_argument("--model", required=True)
    v.add_argument("--data", required=True)
    v.add_argument("--report")
    v.add_argument("--report-format", choices=["table", "kv"], default="table")
    v.set_defaults(func=cmd_evaluate)

    c = sub.add_parser("classify", help="per-packet verdicts for a capture")
    c.add_argument("--model", required=True)
    c.add_argument("--pcap", required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--summary", action="store_true")
    c.set_defaults(func=cmd_classify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="camids: %(levelname)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"camids {args.command}: {exc}", file=sys.stderr)
        return exc.code
    except SchemaError as exc:
        print(f"camids {args.command}: schema mismatch: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (UnsupportedFormat, UnsupportedLinkType, TruncatedCapture, FormatError,
            UnlabeledData, SplitError, ValueError) as exc:
        print(f"camids {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CamidsError as exc:
        print(f"camids {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"camids {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
