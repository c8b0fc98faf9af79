"""Command line: ``dqforge run``, ``dqforge profile`` and ``dqforge bench``.

Every tuning flag maps onto one :class:`~dqforge.pipeline.RunConfig` field,
and the resolved config is written into the report, so a report always
records the settings that produced it.

Exit codes: 0 on success, 2 when the run finished with warnings, 1 on error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict
from typing import Sequence

from . import __version__
from .bench import CapacityError, InjectionSpec, run_bench
from .pipeline import RunConfig, pre_quality, profile_summary, run_pipeline
from .report import SCHEMA, STAGES, _clean, build_report, dumps_report
from .table import TableError, load_table, write_table
from .typos import COUNT_RULES

EXIT_OK, EXIT_ERROR, EXIT_WARNINGS = 0, 1, 2

_DEFAULTS = RunConfig()


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _tokens(text: str) -> list[str]:
    # missing tokens keep empty entries: ",NA" means "" and "NA"
    return [t.strip() for t in text.split(",")]


def _delimiter(text: str) -> str:
    text = {"\\t": "\t", "tab": "\t"}.get(text, text)
    if len(text) != 1:
        raise argparse.ArgumentTypeError("delimiter must be a single character")
    return text


# (flag, RunConfig field, type, help)
_FLAGS = [
    ("--key-missing-threshold", "key_missing_threshold", float,
     "max missing rate for a key candidate"),
    ("--key-dup-threshold", "key_dup_threshold", float,
     "max projection duplicate rate accepted for a key"),
    ("--key-max-combo", "key_max_combo", int, "largest attribute combination searched"),
    ("--outlier-max-missing", "outlier_max_missing", float,
     "max missing rate for the outlier stage"),
    ("--outlier-min-unique", "outlier_min_unique", int,
     "min distinct values for the outlier stage"),
    ("--typo-max-missing", "typo_max_missing", float, "max missing rate for the typo stage"),
    ("--logic-max-missing", "logic_max_missing", float, "max missing rate for rule mining"),
    ("--logic-min-unique", "logic_min_unique", int, "min distinct values for rule mining"),
    ("--justified-missing-threshold", "justified_missing_threshold", float,
     "missing rate from which a column's blanks count as justified"),
    ("--alpha-s", "alpha_s", float, "skewness gate"),
    ("--alpha-k", "alpha_k", float, "kurtosis gate (raw, not excess)"),
    ("--beta1", "beta1", float, "lower Z bound"),
    ("--beta2", "beta2", float, "upper Z bound"),
    ("--gamma", "gamma", float, "widening factor for heavy-tailed columns"),
    ("--if-trees", "if_trees", int, "isolation trees"),
    ("--if-subsample", "if_subsample", int, "isolation subsample size"),
    ("--if-threshold", "if_threshold", float, "isolation score threshold"),
    ("--if-fit", "if_fit", str, "grow the forest on the 'tail' or on 'all' values"),
    ("--dls-threshold", "dls_threshold", float, "similarity threshold for typo grouping"),
    ("--gap-refs", "gap_refs", int, "reference sets for the gap statistic"),
    ("--cluster-count", "cluster_count", str,
     f"rule for the number of typo clusters: {', '.join(COUNT_RULES)}"),
    ("--dictionary", "dictionary", str, "newline-delimited list of valid words"),
    ("--min-support", "min_support", float, "Apriori minimum support"),
    ("--min-confidence", "min_confidence", float, "Apriori minimum confidence"),
    ("--max-itemset", "max_itemset", int, "largest itemset mined"),
    ("--logic-timeout", "logic_timeout", float, "seconds before rule mining is abandoned"),
    ("--threads", "threads", int, "worker threads for profiling"),
]


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("pipeline settings")
    for flag, dest, typ, help_ in _FLAGS:
        kw = {"choices": COUNT_RULES} if dest == "cluster_count" else {}
        if dest == "if_fit":
            kw = {"choices": ("tail", "all")}
        g.add_argument(flag, dest=dest, type=typ, default=None,
                       help=f"{help_} (default {getattr(_DEFAULTS, dest)})", **kw)
    g.add_argument("--beta", type=float, default=None,
                   help="set both Z bounds at once (default 3)")
    g.add_argument("--key-override", type=_csv_list, default=None, metavar="A,B",
                   help="use these attributes as the primary key, skipping discovery")
    g.add_argument("--include", action="append", default=[], metavar="STAGE:ATTR",
                   help="force an attribute into outlier, typo or logic processing")
    g.add_argument("--exclude", action="append", default=[], metavar="STAGE:ATTR",
                   help="keep an attribute out of outlier, typo or logic processing")
    g.add_argument("--disable", action="append", default=[], metavar="STAGE",
                   help=f"skip a stage ({', '.join(STAGES)}); repeatable or comma separated")
    g.add_argument("--seed", type=int, default=None,
                   help="master seed (default: $DQFORGE_SEED, else 0)")
    g.add_argument("--report-timings", action="store_true",
                   help="include stage timings in the report (breaks byte-identical reports)")


def _add_csv_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--delimiter", type=_delimiter, default=",", help="field delimiter")
    p.add_argument("--missing-tokens", type=_tokens, default=None, metavar="TOKENS",
                   help="comma-separated cell values read as missing (default ',NA,NaN,null')")


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("DQFORGE_SEED")
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise SystemExit(_fail(f"DQFORGE_SEED must be an integer, got {env!r}"))


def config_from_args(args) -> RunConfig:
    values = {}
    for _, dest, _, _ in _FLAGS:
        v = getattr(args, dest, None)
        if v is not None:
            values[dest] = v
    if getattr(args, "beta", None) is not None:
        values.setdefault("beta1", args.beta)
        values.setdefault("beta2", args.beta)
    if getattr(args, "key_override", None):
        values["key_override"] = args.key_override
    values["include"] = [d for item in args.include for d in _csv_list(item)]
    values["exclude"] = [d for item in args.exclude for d in _csv_list(item)]
    values["disable"] = [d for item in args.disable for d in _csv_list(item)]
    values["seed"] = _seed(args)
    values["report_timings"] = bool(args.report_timings)
    if hasattr(args, "delimiter"):
        values["delimiter"] = args.delimiter
    if getattr(args, "missing_tokens", None) is not None:
        values["missing_tokens"] = args.missing_tokens
    return RunConfig(**values)


def _fail(message: str) -> int:
    print(f"dqforge: error: {message}", file=sys.stderr)
    return EXIT_ERROR


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _read_input(path: str, config: RunConfig):
    if path == "-":
        return load_table(sys.stdin.buffer.read(), config.dialect())
    return load_table(path, config.dialect())


def _progress(quiet: bool):
    if quiet:
        return None

    def show(stage: str, info: dict) -> None:
        parts = [f"{info['seconds']:.2f}s"]
        if "findings" in info:
            parts.append(f"{info['findings']} findings")
        if info.get("key") is not None:
            parts.append("key " + ",".join(info["key"]))
        if info.get("failed"):
            parts.append("FAILED " + info["failed"])
        print(f"[dqforge] {stage}: " + ", ".join(parts), file=sys.stderr)
    return show


def cmd_run(args) -> int:
    try:
        config = config_from_args(args)
    except ValueError as exc:
        return _fail(str(exc))
    try:
        table = _read_input(args.input, config)
    except (OSError, TableError, UnicodeDecodeError) as exc:
        return _fail(f"cannot read {args.input}: {exc}")
    t0 = time.perf_counter()
    try:
        result = run_pipeline(table, config, progress=_progress(args.quiet))
    except (OSError, ValueError, KeyError) as exc:
        report = build_report([], [], plan=None, key=None, config=asdict(config),
                              input_shape=(table.n_rows, table.n_cols),
                              status="error", error=str(exc))
        if args.report:
            _write_text(args.report, dumps_report(report))
        return _fail(str(exc))
    if not args.quiet:
        print(f"[dqforge] total: {time.perf_counter() - t0:.2f}s, "
              f"{len(result.findings)} findings, {len(result.warnings)} warnings",
              file=sys.stderr)
    try:
        if args.report:
            _write_text(args.report, result.report_json())
        if args.output and result.exit_code != EXIT_ERROR:
            if args.output == "-":
                write_table(result.table, sys.stdout.buffer, config.dialect())
            else:
                write_table(result.table, args.output, config.dialect())
    except OSError as exc:
        return _fail(f"cannot write output: {exc}")
    if result.exit_code == EXIT_ERROR:
        print(f"dqforge: error: {result.report['error']}", file=sys.stderr)
    return result.exit_code


def cmd_profile(args) -> int:
    try:
        config = config_from_args(args)
        table = _read_input(args.input, config)
    except (OSError, TableError, UnicodeDecodeError) as exc:
        return _fail(f"cannot read {args.input}: {exc}")
    except ValueError as exc:
        return _fail(str(exc))
    try:
        pq = pre_quality(table, config)
    except (ValueError, KeyError) as exc:
        return _fail(str(exc))
    doc = {
        "schema": SCHEMA + "/profile",
        "version": __version__,
        **profile_summary(table, pq),
        "primary_key": pq.key.to_json() if pq.key else None,
        "plan": pq.plan.to_json(),
        "warnings": [w.to_json() for w in pq.warnings],
    }
    _write_text(args.report, json.dumps(_clean(doc), indent=2, ensure_ascii=False,
                                        allow_nan=False) + "\n")
    return EXIT_WARNINGS if pq.warnings else EXIT_OK


def cmd_bench(args) -> int:
    try:
        config = config_from_args(args)
    except ValueError as exc:
        return _fail(str(exc))
    seed = config.seed
    spec = None
    if args.spec:
        try:
            with open(args.spec, encoding="utf-8") as fh:
                data = json.load(fh)
            data.setdefault("seed", seed)
            spec = InjectionSpec.from_json(data)
        except (OSError, ValueError, TypeError) as exc:
            return _fail(f"bad injection spec {args.spec}: {exc}")
    if args.rows < 1:
        return _fail("--rows must be positive")
    try:
        result = run_bench(args.rows, spec, seed, config)
    except CapacityError as exc:
        return _fail(str(exc))
    _write_text(args.report, result.dumps())
    if not args.quiet:
        overall = result.metrics["overall"]
        print(f"[dqforge] bench: {args.rows} rows, {len(result.truth)} injected, "
              f"recall {overall['recall']:.3f}, precision {overall['precision']:.3f}, "
              f"baseline findings {result.baseline_findings}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dqforge", description="Explainable detection and correction of table defects.")
    parser.add_argument("--version", action="version", version=f"dqforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the full cleaning pipeline")
    run.add_argument("--input", required=True, help="input CSV ('-' for stdin)")
    run.add_argument("--output", help="corrected CSV ('-' for stdout)")
    run.add_argument("--report", help="JSON report ('-' for stdout)")
    run.add_argument("--quiet", action="store_true", help="no progress on stderr")
    _add_csv_flags(run)
    _add_config_flags(run)
    run.set_defaults(func=cmd_run)

    prof = sub.add_parser("profile", help="profile columns, find the key and plan stages")
    prof.add_argument("--input", required=True, help="input CSV ('-' for stdin)")
    prof.add_argument("--report", help="JSON output (default stdout)")
    _add_csv_flags(prof)
    _add_config_flags(prof)
    prof.set_defaults(func=cmd_profile)

    bench = sub.add_parser("bench", help="inject known errors into synthetic data and score")
    bench.add_argument("--rows", type=int, default=10_000, help="synthetic rows (default 10000)")
    bench.add_argument("--spec", help="JSON injection counts (default: scaled reference mix)")
    bench.add_argument("--report", help="JSON benchmark report (default stdout)")
    bench.add_argument("--quiet", action="store_true", help="no summary on stderr")
    _add_config_flags(bench)
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
