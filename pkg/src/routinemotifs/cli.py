"""Command-line front end for the motif-mining pipeline."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import __version__
from .analytics import (
    EditCosts,
    cluster_sequences,
    distance_matrix,
    transition_matrix,
)
from .events import normalize, parse_event_log, parse_timestamp
from .labeling import ALPHABET, FirstEditIndex, label_corpus, read_labels_jsonl, write_labels_jsonl
from .mining import count_motifs, default_support_filter, write_motifs_json
from .report import PipelineConfig, StageError, run_pipeline
from .sessions import (
    DEFAULT_GAP_SECONDS,
    gap_histogram,
    read_sessions_jsonl,
    sessionize_corpus,
    write_sessions_jsonl,
)
from .stats import marginals, significance_report, write_stats_json
from .summary import summarize_labels, write_summary_csv
from .wiki import FetchSpec, WikiClient, export_event_log

_DURATION_UNITS = {"s": 1, "m": 60, "h": 3600, "d": 86400}


def parse_duration(text: str) -> int:
    """Parse '600', '600s', '10m', '2h', or '1d' to seconds."""
    text = text.strip().lower()
    unit = 1
    if text and text[-1] in _DURATION_UNITS:
        unit = _DURATION_UNITS[text[-1]]
        text = text[:-1]
    try:
        return int(float(text) * unit)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad duration {text!r}") from exc


def _load_log(path: str, format: str):
    return normalize(parse_event_log(Path(path).read_text(encoding="utf-8"), format))


def cmd_sessionize(args) -> int:
    log = _load_log(args.infile, args.format)
    if args.gap_histogram:
        for gap, n in sorted(gap_histogram(log).items()):
            print(f"{gap}\t{n}")
        return 0
    vectors = sessionize_corpus(log, args.gap)
    write_sessions_jsonl(vectors, args.out)
    total = sum(len(v) for v in vectors)
    print(f"wrote {total} sessions across {len(vectors)} artifacts to {args.out}", file=sys.stderr)
    return 0


def cmd_label(args) -> int:
    vectors = read_sessions_jsonl(args.sessions)
    first_edits = FirstEditIndex.from_csv(args.first_edits) if args.first_edits else FirstEditIndex()
    seqs, histogram = label_corpus(vectors, first_edits)
    write_labels_jsonl(seqs, args.out)
    summary = ", ".join(f"{lab.value}={histogram.get(lab, 0)}" for lab in ALPHABET)
    print(f"labeled {len(seqs)} artifacts ({summary})", file=sys.stderr)
    return 0


def cmd_mine(args) -> int:
    seqs = read_labels_jsonl(args.labels)
    k_min, k_max = args.k
    mined = []
    for k in range(k_min, k_max + 1):
        counts = count_motifs(seqs, k)
        if args.apply_support:
            counts = default_support_filter(counts)
        mined.append(counts)
    write_motifs_json(mined, args.out)
    return 0


def cmd_stats(args) -> int:
    from .mining import read_motifs_json

    seqs = read_labels_jsonl(args.labels)
    marg = marginals(seqs)
    reports = []
    for counts in read_motifs_json(args.motifs):
        reports.append((
            counts.k,
            significance_report(
                counts, marg, alpha=args.alpha,
                m_mode=args.m_mode.replace("-", "_"),
                rounded_expected=args.rounded_expected,
            ),
        ))
    write_stats_json(reports, args.out, meta={"alpha": args.alpha, "m_mode": args.m_mode})
    return 0


def cmd_summary(args) -> int:
    vectors = read_sessions_jsonl(args.sessions)
    seqs = read_labels_jsonl(args.labels)
    summaries = summarize_labels(vectors, seqs)
    write_summary_csv(summaries, args.out, duration_unit=args.duration_unit)
    return 0


def cmd_analyze(args) -> int:
    seqs = read_labels_jsonl(args.labels)
    if args.what == "transitions":
        tm = transition_matrix(seqs)
        _write_matrix(args.out, [l.value for l in ALPHABET], tm.probabilities)
    else:
        costs = EditCosts(*args.costs)
        dm = distance_matrix(seqs, costs)
        ids = [s.artifact_id for s in seqs]
        if args.what == "distance":
            _write_matrix(args.out, ids, dm)
        else:
            assignment = cluster_sequences(dm, linkage=args.linkage, k=args.k)
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["artifact_id", "cluster"])
                for artifact_id, cluster in zip(ids, assignment):
                    writer.writerow([artifact_id, cluster])
    return 0


def _write_matrix(path, labels, matrix) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([""] + list(labels))
        for name, row in zip(labels, matrix):
            writer.writerow([name] + [f"{x:.6f}" for x in row])


def cmd_fetch(args) -> int:
    titles = [t.strip() for t in Path(args.titles).read_text(encoding="utf-8").splitlines() if t.strip()]
    spec = FetchSpec(
        titles=titles,
        cutoff=parse_timestamp(args.cutoff),
        api_endpoint=args.endpoint,
        rate_limit=args.rate_limit,
        cache_dir=Path(args.cache),
    )
    client = WikiClient(spec)
    by_title = {}
    failures = []
    for title in titles:
        try:
            by_title[title] = client.fetch_revisions(title)
        except Exception as exc:  # noqa: BLE001 - continue with remaining titles
            failures.append((title, str(exc)))
            print(f"skipping {title!r}: {exc}", file=sys.stderr)
    if args.first_edits_out:
        performers = sorted({r.performer_id for revs in by_title.values() for r in revs})
        index = FirstEditIndex()
        for pid in performers:
            ts = client.fetch_first_edit(pid)
            if ts is not None:
                index.first_edits[pid] = ts
        index.to_csv(args.first_edits_out)
    export_event_log(by_title, args.out)
    print(
        f"fetched {sum(len(r) for r in by_title.values())} revisions "
        f"({len(failures)} titles failed, {client.skipped_suppressed} revisions suppressed)",
        file=sys.stderr,
    )
    return 0 if by_title else 1


def cmd_run(args) -> int:
    if args.config:
        config = PipelineConfig.from_json(args.config)
    else:
        config = PipelineConfig(
            events_path=Path(args.infile),
            events_format=args.format,
            first_edits_path=Path(args.first_edits) if args.first_edits else None,
            out_dir=Path(args.out),
            gap_threshold=args.gap,
            k_min=args.k[0],
            k_max=args.k[1],
            alpha=args.alpha,
            m_mode=args.m_mode.replace("-", "_"),
        )
    try:
        bundle = run_pipeline(config)
    except StageError as exc:
        print(f"pipeline failed at stage {exc.stage!r}: {exc.cause}", file=sys.stderr)
        return 1
    print(json.dumps({"out_dir": str(bundle.out_dir), "files": bundle.files,
                      "bundle_sha256": bundle.hash()}))
    return 0


def _k_range(text: str) -> tuple[int, int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return int(lo), int(hi)
    k = int(text)
    return k, k


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="routinemotifs",
                                     description="Mine and test behavioral motifs in collaboration event logs")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sessionize", help="collapse events into editing sessions")
    p.add_argument("--gap", type=parse_duration, default=DEFAULT_GAP_SECONDS,
                   help="max same-performer inter-edit gap, e.g. 600s or 10m")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--out", default="sessions.jsonl")
    p.add_argument("--gap-histogram", action="store_true",
                   help="print the same-performer inter-edit gap histogram instead")
    p.set_defaults(func=cmd_sessionize)

    p = sub.add_parser("label", help="code sessions with recency labels")
    p.add_argument("--sessions", required=True)
    p.add_argument("--first-edits", help="CSV of performer_id,first_edit_timestamp")
    p.add_argument("--out", default="labels.jsonl")
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("mine", help="count k-gram motifs")
    p.add_argument("--k", type=_k_range, default=(2, 4), help="length or range, e.g. 2..4")
    p.add_argument("--labels", required=True)
    p.add_argument("--apply-support", action="store_true",
                   help="apply the default per-length support thresholds")
    p.add_argument("--out", default="motifs.json")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("stats", help="Z-test motif counts against the independence null")
    p.add_argument("--motifs", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--alpha", type=float, default=0.001)
    p.add_argument("--m-mode", choices=["alphabet-power", "tested-count"], default="alphabet-power")
    p.add_argument("--rounded-expected", action="store_true",
                   help="compatibility mode: whole-percent marginals in expected fractions")
    p.add_argument("--out", default="stats.json")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("summary", help="per-label descriptive statistics")
    p.add_argument("--sessions", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--duration-unit", choices=["hours", "minutes"], default="hours")
    p.add_argument("--out", default="label_summary.csv")
    p.set_defaults(func=cmd_summary)

    p = sub.add_parser("analyze", help="transition, distance, and cluster analyses")
    p.add_argument("what", choices=["transitions", "distance", "cluster"])
    p.add_argument("--labels", required=True)
    p.add_argument("--costs", type=lambda s: tuple(float(x) for x in s.split(",")),
                   default=(1.0, 1.0, 1.0), help="insert,delete,substitute")
    p.add_argument("--linkage", choices=["single", "complete", "average"], default="average")
    p.add_argument("--k", type=int, default=2, help="cluster count for the cluster analysis")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("fetch", help="fetch revision metadata from a MediaWiki API")
    p.add_argument("--titles", required=True, help="file with one article title per line")
    p.add_argument("--cutoff", required=True, help="inclusive upper timestamp bound, ISO-8601")
    p.add_argument("--cache", default="./cache")
    p.add_argument("--endpoint", default="https://en.wikipedia.org/w/api.php")
    p.add_argument("--rate-limit", type=float, default=2.0, help="requests per second")
    p.add_argument("--first-edits-out", help="also resolve first platform edits to this CSV")
    p.add_argument("--out", default="events.csv")
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("run", aliases=["report"],
                       help="run the full pipeline and render report tables")
    p.add_argument("--config", help="JSON config file; overrides the flags below")
    p.add_argument("--in", dest="infile")
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--first-edits")
    p.add_argument("--gap", type=parse_duration, default=DEFAULT_GAP_SECONDS)
    p.add_argument("--k", type=_k_range, default=(2, 4))
    p.add_argument("--alpha", type=float, default=0.001)
    p.add_argument("--m-mode", choices=["alphabet-power", "tested-count"], default="alphabet-power")
    p.add_argument("--out", default="report")
    p.set_defaults(func=cmd_run)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("run", "report") and not args.config and not args.infile:
        parser.error("run requires --config or --in")
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
