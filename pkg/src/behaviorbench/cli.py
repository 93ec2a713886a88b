"""Command line interface: sample, run, aggregate, report."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .dataset import dataset_stats, load_dataset, sample_sequences
from .errors import BenchError
from .runner import aggregate, emit_report, load_run_config, run_grid

logger = logging.getLogger(__name__)


def _cmd_sample(args: argparse.Namespace) -> int:
    recordings = load_dataset(args.manifest)
    sequences = [
        seq
        for recording in recordings
        for seq in sample_sequences(
            recording,
            stride_s=args.stride_s,
            history_s=args.history_s,
            horizon_s=args.horizon_s,
            include_intermediates=not args.no_intermediates,
        )
    ]
    stats = dataset_stats(sequences)
    print(f"recordings: {len(recordings)}")
    print(f"sequences: {stats.n_sequences}")
    print(f"fraction_changed: {stats.fraction_changed:.4f}")
    print(f"fraction_multilabel: {stats.fraction_multilabel:.4f}")
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        with out.open("w", encoding="utf-8") as fh:
            for seq in sequences:
                fh.write(json.dumps(seq.to_dict(), ensure_ascii=False) + "\n")
        print(f"wrote {len(sequences)} sequences to {out}")
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    spec = load_run_config(args.config)
    results = run_grid(spec, results_path=args.results, max_records=args.max_records)
    print(f"results: {results}")
    return 0


def _cmd_aggregate(args: argparse.Namespace) -> int:
    report = aggregate(args.results)
    payload = json.dumps(report.to_dict(), indent=2, ensure_ascii=False)
    if args.out:
        Path(args.out).write_text(payload + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(payload)
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    report = aggregate(args.results)
    csv_path = args.csv or str(Path(args.results).with_suffix(".report.csv"))
    md_path = args.md or str(Path(args.results).with_suffix(".report.md"))
    emit_report(report, csv_path=csv_path, markdown_path=md_path)
    print(f"wrote {csv_path}")
    print(f"wrote {md_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="behaviorbench",
        description="Benchmark multimodal chat models on human-interaction anticipation.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sample = sub.add_parser("sample", help="sample evaluation sequences and print stats")
    p_sample.add_argument("--manifest", required=True, help="dataset manifest (JSON/JSONL)")
    p_sample.add_argument("--stride-s", type=float, default=1.5, dest="stride_s")
    p_sample.add_argument("--history-s", type=float, default=2.0, dest="history_s")
    p_sample.add_argument("--horizon-s", type=float, default=3.0, dest="horizon_s")
    p_sample.add_argument("--no-intermediates", action="store_true")
    p_sample.add_argument("--out", help="write sampled sequences as JSONL")
    p_sample.set_defaults(func=_cmd_sample)

    p_run = sub.add_parser("run", help="run an experiment grid from a config file")
    p_run.add_argument("--config", required=True, help="run config (YAML or JSON)")
    p_run.add_argument("--results", help="override the results path from the config")
    p_run.add_argument("--max-records", type=int, default=None, dest="max_records",
                       help="cap on new records appended per grid cell")
    p_run.set_defaults(func=_cmd_run)

    p_agg = sub.add_parser("aggregate", help="aggregate a results file to JSON")
    p_agg.add_argument("--results", required=True)
    p_agg.add_argument("--out", help="write the aggregate JSON here instead of stdout")
    p_agg.set_defaults(func=_cmd_aggregate)

    p_rep = sub.add_parser("report", help="emit CSV and markdown tables from results")
    p_rep.add_argument("--results", required=True)
    p_rep.add_argument("--csv", help="CSV output path")
    p_rep.add_argument("--md", help="markdown output path")
    p_rep.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except BenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
