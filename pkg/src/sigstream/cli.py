"""Command-line front end.

Subcommands:

    sig        signature coefficients of one embedded stream
    synth      generate a synthetic two-group delay dataset
    featurize  signature feature table for a dataset
    run        full classification experiment with a text table + JSON report

Exit codes: 0 on success, 2 for unparseable input or bad configuration,
1 for runtime failures.  The ``SIGSTREAM_OUT_DIR`` environment variable, when
set, anchors every relative output path (and is created on demand).

Every artifact carries a manifest (config snapshot, seed, input digest, tool
version).  Reports embed the manifest directly; file outputs get a sidecar
``<name>.manifest.json`` that also records the wall-clock timestamp.  The
embedded copy omits the timestamp so identical runs stay byte-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path as FsPath

import numpy as np

from . import __version__
from .core import format_multi_index, signature
from .dataio import DataFormatError, read_records, read_stream, write_features, write_records
from .embeddings import EMBEDDING_KINDS, EmbeddingConfig, InvalidStreamError, embed_record
from .jsonutil import dumps, format_float
from .ml import CLASSIFIER_NAMES, ConfigError, CVConfig
from .pipeline import PipelineConfig, SynthConfig, apply_ingest_rules, featurize, run_experiment, synth_generate

__all__ = ["main"]

OUT_DIR_ENV = "SIGSTREAM_OUT_DIR"


class CliError(Exception):
    def __init__(self, message: str, code: int = 2):
        super().__init__(message)
        self.code = code


def _out_path(name: str | os.PathLike) -> FsPath:
    path = FsPath(name)
    base = os.environ.get(OUT_DIR_ENV)
    if base and not path.is_absolute():
        path = FsPath(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _digest(path: FsPath) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _manifest(command: str, seed: int, config: dict, input_path: FsPath | None) -> dict:
    body: dict = {
        "tool": "sigstream",
        "version": __version__,
        "command": command,
        "seed": seed,
        "config": config,
    }
    if input_path is not None:
        body["input"] = {"path": input_path.name, "sha256": _digest(input_path)}
    return body


def _write_sidecar(artifact: FsPath, manifest: dict) -> None:
    stamped = dict(manifest)
    stamped["created_utc"] = datetime.now(timezone.utc).isoformat()
    sidecar = artifact.with_name(artifact.name + ".manifest.json")
    sidecar.write_text(dumps(stamped), encoding="utf-8")


def _load_json_config(path: str, expected: dict[str, type]) -> dict:
    import json

    try:
        raw = json.loads(FsPath(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}")
    if not isinstance(raw, dict):
        raise CliError(f"{path}: top level must be an object")
    for key in raw:
        if key not in expected:
            raise CliError(
                f"{path}: unknown config key {key!r}; expected one of {sorted(expected)}"
            )
    return raw


def _embedding_from_args(args: argparse.Namespace) -> EmbeddingConfig:
    try:
        return EmbeddingConfig(
            kind=args.embedding, axis_steps=getattr(args, "axis_steps", False)
        )
    except InvalidStreamError as exc:
        raise CliError(str(exc))


# --------------------------------------------------------------------------
# sig


def _cmd_sig(args: argparse.Namespace) -> int:
    try:
        record = read_stream(args.input)
        embedding = _embedding_from_args(args)
        path = embed_record(record, embedding)
        sig = signature(path, args.depth)
    except (DataFormatError, InvalidStreamError, ValueError) as exc:
        raise CliError(str(exc))

    if args.json:
        body = {
            "schema_version": "1",
            "embedding": embedding.kind,
            "depth": args.depth,
            "dimension": sig.dimension,
            "path": [[float(x) for x in point] for point in path.points],
            "coefficients": {
                format_multi_index(index): value for index, value in sig.items()
            },
            "manifest": _manifest(
                "sig",
                seed=0,
                config={"depth": args.depth, "embedding": embedding.kind},
                input_path=FsPath(args.input),
            ),
        }
        text = dumps(body)
    else:
        lines = []
        if args.points:
            for point in path.points:
                lines.append("# point " + " ".join(format_float(float(x)) for x in point))
        for index, value in sig.items():
            lines.append(f"{format_multi_index(index)}\t{format_float(value)}")
        text = "\n".join(lines) + "\n"

    if args.out:
        _out_path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


# --------------------------------------------------------------------------
# synth


_SYNTH_KEYS = {
    "n0": int,
    "n1": int,
    "weeks": int,
    "delay_mean0": float,
    "delay_mean1": float,
    "dispersion": float,
    "missing_prob": float,
    "seed": int,
}


def _cmd_synth(args: argparse.Namespace) -> int:
    settings: dict = {}
    if args.config:
        settings.update(_load_json_config(args.config, _SYNTH_KEYS))
    for key in _SYNTH_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            settings[key] = flag
    try:
        config = SynthConfig(**settings)
        records = synth_generate(config)
    except (ConfigError, TypeError) as exc:
        raise CliError(f"synth config: {exc}")

    out = _out_path(args.out)
    write_records(records, out)
    _write_sidecar(out, _manifest("synth", config.seed, asdict(config), None))
    sys.stdout.write(
        f"wrote {len(records)} subjects x {config.weeks} weeks to {out}\n"
    )
    return 0


# --------------------------------------------------------------------------
# featurize


def _cmd_featurize(args: argparse.Namespace) -> int:
    records = _ingest(args.dataset)
    embedding = _embedding_from_args(args)
    try:
        matrix = featurize(records, args.depth, embedding, scale=not args.raw)
    except (InvalidStreamError, ValueError) as exc:
        raise CliError(str(exc), code=1)
    out = _out_path(args.out)
    write_features(matrix, out)
    _write_sidecar(
        out,
        _manifest(
            "featurize",
            seed=0,
            config={
                "depth": args.depth,
                "embedding": embedding.kind,
                "standardized": not args.raw,
            },
            input_path=FsPath(args.dataset),
        ),
    )
    sys.stdout.write(
        f"wrote {matrix.n_rows} x {matrix.n_columns} feature matrix to {out}\n"
    )
    return 0


# --------------------------------------------------------------------------
# run


_RUN_KEYS = {
    "depths": list,
    "seed": int,
    "classifiers": list,
    "embedding": dict,
    "cv": dict,
    "workers": int,
}

_CV_KEYS = {
    "outer_folds": int,
    "inner_folds": int,
    "seed": int,
    "smote_inside_folds": bool,
    "smote_k": int,
    "smote_adasyn": bool,
    "stratified": bool,
}

_EMBED_KEYS = {"kind": str, "time_augment": bool, "integer_time": bool, "axis_steps": bool}


def _pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    settings: dict = {}
    if args.config:
        settings.update(_load_json_config(args.config, _RUN_KEYS))
    if args.depths is not None:
        try:
            settings["depths"] = [int(d) for d in args.depths.split(",")]
        except ValueError:
            raise CliError(f"--depths: expected comma-separated integers, got {args.depths!r}")
    if args.classifiers is not None:
        settings["classifiers"] = args.classifiers.split(",")
    if args.seed is not None:
        settings["seed"] = args.seed
    if args.workers is not None:
        settings["workers"] = args.workers

    cv_settings = dict(settings.pop("cv", {}))
    for key in cv_settings:
        if key not in _CV_KEYS:
            raise CliError(f"config.cv: unknown key {key!r}; expected one of {sorted(_CV_KEYS)}")
    if args.folds is not None:
        cv_settings["outer_folds"] = args.folds
    if args.paper_mode:
        cv_settings["smote_inside_folds"] = False

    embed_settings = dict(settings.pop("embedding", {}))
    for key in embed_settings:
        if key not in _EMBED_KEYS:
            raise CliError(
                f"config.embedding: unknown key {key!r}; expected one of {sorted(_EMBED_KEYS)}"
            )
    if args.embedding is not None:
        embed_settings["kind"] = args.embedding
    if args.axis_steps:
        embed_settings["axis_steps"] = True

    try:
        return PipelineConfig(
            depths=tuple(settings.get("depths", (2, 3, 4))),
            embedding=EmbeddingConfig(**embed_settings),
            cv=CVConfig(**cv_settings),
            classifiers=tuple(settings.get("classifiers", CLASSIFIER_NAMES)),
            seed=int(settings.get("seed", 0)),
            workers=int(settings.get("workers", 1)),
        )
    except (ConfigError, InvalidStreamError, TypeError) as exc:
        raise CliError(f"run config: {exc}")


def _ingest(dataset: str):
    try:
        records = read_records(dataset)
    except (OSError, DataFormatError) as exc:
        raise CliError(str(exc))
    kept, excluded = apply_ingest_rules(records)
    for reason in excluded:
        sys.stderr.write(f"excluding {reason}\n")
    if not kept:
        raise CliError(f"{dataset}: no usable subjects after ingestion rules", code=1)
    return kept


def _cmd_run(args: argparse.Namespace) -> int:
    config = _pipeline_config(args)
    records = _ingest(args.dataset)
    try:
        report = run_experiment(records, config)
    except (ConfigError, InvalidStreamError) as exc:
        raise CliError(f"run failed: {exc}", code=1)

    manifest = _manifest(
        "run",
        seed=config.seed,
        config={
            "depths": list(config.depths),
            "embedding": {
                "kind": config.embedding.kind,
                "time_augment": config.embedding.time_augment,
                "integer_time": config.embedding.integer_time,
                "axis_steps": config.embedding.axis_steps,
            },
            "cv": {
                "outer_folds": config.cv.outer_folds,
                "inner_folds": config.cv.inner_folds,
                "stratified": config.cv.stratified,
                "smote_inside_folds": config.cv.smote_inside_folds,
                "smote_k": config.cv.smote_k,
                "smote_adasyn": config.cv.smote_adasyn,
            },
            "classifiers": list(config.classifiers),
            # workers deliberately omitted: execution resources must not
            # change (or appear to change) the scientific output
        },
        input_path=FsPath(args.dataset),
    )
    from dataclasses import replace

    report = replace(report, manifest=manifest)

    out = _out_path(args.out)
    out.write_text(report.to_json(), encoding="utf-8")
    _write_sidecar(out, manifest)
    sys.stdout.write(report.to_json() if args.json else report.to_text())
    sys.stdout.write(f"report written to {out}\n")
    return 0


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sigstream",
        description="Signature features for data streams, plus a classification pipeline.",
    )
    parser.add_argument("--version", action="version", version=f"sigstream {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sig = sub.add_parser("sig", help="signature coefficients of one stream")
    sig.add_argument("input", help="stream file (dataset CSV with one subject, or bare values)")
    sig.add_argument("--depth", type=int, default=2, help="truncation depth (default 2)")
    sig.add_argument(
        "--embedding",
        choices=EMBEDDING_KINDS,
        default="lead-lag",
        help="path construction (default lead-lag)",
    )
    sig.add_argument("--axis-steps", action="store_true", help="stairstep delay pipeline")
    sig.add_argument("--json", action="store_true", help="emit a single JSON object")
    sig.add_argument("--points", action="store_true", help="also print the embedded path points")
    sig.add_argument("--out", help="write to this file instead of stdout")
    sig.set_defaults(func=_cmd_sig)

    synth = sub.add_parser("synth", help="generate a synthetic delay dataset")
    synth.add_argument("--config", help="JSON file with generator settings")
    synth.add_argument("--seed", type=int, default=None)
    synth.add_argument("--n0", type=int, default=None, help="group-0 size")
    synth.add_argument("--n1", type=int, default=None, help="group-1 size")
    synth.add_argument("--weeks", type=int, default=None)
    synth.add_argument("--delay-mean0", dest="delay_mean0", type=float, default=None)
    synth.add_argument("--delay-mean1", dest="delay_mean1", type=float, default=None)
    synth.add_argument("--dispersion", type=float, default=None)
    synth.add_argument("--missing-prob", dest="missing_prob", type=float, default=None)
    synth.add_argument("--out", default="dataset.csv", help="dataset CSV path")
    synth.set_defaults(func=_cmd_synth)

    feat = sub.add_parser("featurize", help="signature feature table for a dataset")
    feat.add_argument("dataset", help="dataset CSV")
    feat.add_argument("--depth", type=int, default=2)
    feat.add_argument(
        "--embedding", choices=EMBEDDING_KINDS, default="delay-pipeline"
    )
    feat.add_argument("--axis-steps", action="store_true")
    feat.add_argument("--raw", action="store_true", help="skip standardization")
    feat.add_argument("--out", default="features.csv")
    feat.set_defaults(func=_cmd_featurize)

    run = sub.add_parser("run", help="full classification experiment")
    run.add_argument("dataset", help="dataset CSV")
    run.add_argument("--config", help="JSON file with pipeline settings")
    run.add_argument("--depths", default=None, help="comma-separated depths (default 2,3,4)")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--folds", type=int, default=None, help="outer folds (default 6)")
    run.add_argument(
        "--classifiers", default=None, help=f"comma-separated subset of {','.join(CLASSIFIER_NAMES)}"
    )
    run.add_argument("--embedding", choices=EMBEDDING_KINDS, default=None)
    run.add_argument("--axis-steps", action="store_true")
    run.add_argument(
        "--paper-mode",
        action="store_true",
        help="balance and standardize the whole matrix before CV instead of inside folds",
    )
    run.add_argument("--workers", type=int, default=None)
    run.add_argument("--json", action="store_true", help="print the JSON report instead of the table")
    run.add_argument("--out", default="report.json", help="JSON report path")
    run.set_defaults(func=_cmd_run)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code
    except Exception as exc:  # runtime failure, not a usage problem
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
