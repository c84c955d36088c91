"""Command-line entry point: ingest -> align -> preclassify -> serve -> report.

Every subcommand is deterministic given identical inputs.  Failures exit
with status 1 and a one-line diagnostic; usage errors exit with status 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .alignment import AlignmentResult, align_utterance, edit_stats
from .annotation import export_effective, open_session, read_labels, write_labels
from .classifier import batch_preclassify, read_meta, read_suggestions, write_suggestions
from .config import build_settings
from .corpus import Corpus, load_corpus, load_corpus_dir, save_corpus, tokenize
from .lexicon import (
    bundled_lexicon_path,
    bundled_suffixes_path,
    load_lexicon,
    load_suffix_tables,
)
from .metrics import (
    SystemReport,
    aggregate_rates,
    compare_systems,
    compute_rates,
    pooled_error_proportion,
    severity_rank,
    significance_threshold,
)
from .report import render
from .server import make_server, run_server


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sevasr",
        description="Severity-graded benchmarking of ASR transcription errors.",
    )
    parser.add_argument("--version", action="version", version=f"sevasr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load reference/hypothesis JSONL into a corpus directory")
    p.add_argument("--ref", required=True, help="reference JSONL path")
    p.add_argument("--hyp", nargs="+", default=[], help="hypothesis JSONL paths")
    p.add_argument("--out", required=True, help="corpus directory to write")
    p.add_argument("--config")

    p = sub.add_parser("align", help="align every (utterance, system) pair")
    p.add_argument("--corpus", help="corpus directory")
    p.add_argument("--out", required=True, help="alignments JSONL to write")
    p.add_argument("--split-threshold", type=float, dest="split_threshold")
    p.add_argument("--config")

    p = sub.add_parser("preclassify", help="rule-classify content-word errors")
    p.add_argument("--corpus", help="corpus directory")
    p.add_argument("--alignments", help="alignments JSONL")
    p.add_argument("--lexicon", help="lexicon TSV (default: bundled French lexicon)")
    p.add_argument("--suffixes", help="suffix table config (default: bundled)")
    p.add_argument("--out", required=True, help="suggestions JSONL to write")
    p.add_argument("--split-threshold", type=float, dest="split_threshold")
    p.add_argument("--lex-threshold", type=float, dest="lex_threshold")
    p.add_argument("--config")

    p = sub.add_parser("serve", help="run the adjudication HTTP API (and UI)")
    p.add_argument("--corpus", help="corpus directory")
    p.add_argument("--suggestions", help="suggestions JSONL")
    p.add_argument("--log", help="annotation log JSONL (created if missing)")
    p.add_argument("--port", type=int)
    p.add_argument("--host")
    p.add_argument("--ui-dir", dest="ui_dir", help="static UI directory to serve")
    p.add_argument("--config")

    p = sub.add_parser("report", help="render the severity benchmark table")
    p.add_argument("--labels", help="exported labels JSON (from /export or --labels-out)")
    p.add_argument("--suggestions", help="suggestions JSONL (with --log, exports in-process)")
    p.add_argument("--log", help="annotation log JSONL")
    p.add_argument("--labels-out", dest="labels_out", help="write the effective labels here")
    p.add_argument("--corpus", help="corpus directory (enables the WER column)")
    p.add_argument("--weight", type=float, help="fail-rate weight in the rank score")
    p.add_argument("--alpha", type=float, help="significance level")
    p.add_argument("--order", help="comma-separated explicit system order")
    p.add_argument("--threshold", type=float, help="override the significance threshold (pct points)")
    p.add_argument("--format", choices=("md", "csv", "json"), default="md")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--allow-partial", action="store_true", dest="allow_partial")
    p.add_argument("--config")

    p = sub.add_parser("wer", help="word error rate between two transcript files")
    p.add_argument("--ref", required=True, help="reference JSONL path")
    p.add_argument("--hyp", required=True, help="hypothesis JSONL path")
    p.add_argument("--config")
    return parser


def _read_alignments(path: str | Path) -> dict[tuple[str, str], AlignmentResult]:
    alignments: dict[tuple[str, str], AlignmentResult] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                key = (obj["utterance_id"], obj["system_id"])
                alignments[key] = AlignmentResult.from_dict(obj)
            except (json.JSONDecodeError, KeyError) as exc:
                raise ValueError(f"{path}:{lineno}: bad alignment line ({exc})") from exc
    return alignments


def _require(value: str | None, name: str) -> str:
    if not value:
        raise ValueError(f"missing required option --{name} (or config key '{name}')")
    return value


def cmd_ingest(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.ref, args.hyp)
    save_corpus(corpus, args.out)
    print(
        f"ingested {len(corpus.utterance_ids)} utterances, "
        f"{len(corpus.systems)} systems -> {args.out}"
    )
    return 0


def cmd_align(args: argparse.Namespace) -> int:
    settings = build_settings(
        args.config, corpus=args.corpus, split_threshold=args.split_threshold
    )
    corpus = load_corpus_dir(_require(settings.corpus, "corpus"))
    with open(args.out, "w", encoding="utf-8") as fh:
        n = 0
        for utt_id, sys_id in corpus.pairs():
            result = align_utterance(
                corpus.ref_tokens(utt_id),
                corpus.hyp_tokens(utt_id, sys_id),
                settings.split_threshold,
            )
            record = {"utterance_id": utt_id, "system_id": sys_id}
            record.update(result.to_dict())
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
            n += 1
    print(f"aligned {n} (utterance, system) pairs -> {args.out}")
    return 0


def cmd_preclassify(args: argparse.Namespace) -> int:
    settings = build_settings(
        args.config,
        corpus=args.corpus,
        alignments=args.alignments,
        lexicon=args.lexicon,
        suffixes=args.suffixes,
        split_threshold=args.split_threshold,
        lex_threshold=args.lex_threshold,
    )
    corpus = load_corpus_dir(_require(settings.corpus, "corpus"))
    alignments = _read_alignments(_require(settings.alignments, "alignments"))
    lexicon = load_lexicon(settings.lexicon or bundled_lexicon_path())
    tables = load_suffix_tables(settings.suffixes or bundled_suffixes_path())
    result = batch_preclassify(
        corpus,
        alignments,
        lexicon,
        tables,
        split_threshold=settings.split_threshold,
        lex_threshold=settings.lex_threshold,
    )
    write_suggestions(result, args.out)
    print(
        f"classified {len(result.suggestions)} candidates: "
        f"{result.decided_count} decided, {result.undecided_count} for adjudication "
        f"-> {args.out}"
    )
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    settings = build_settings(
        args.config,
        corpus=args.corpus,
        suggestions=args.suggestions,
        log=args.log,
        port=args.port,
        host=args.host,
        ui_dir=args.ui_dir,
    )
    corpus = load_corpus_dir(_require(settings.corpus, "corpus"))
    suggestions = read_suggestions(_require(settings.suggestions, "suggestions"))
    meta = read_meta(settings.suggestions)
    session = open_session(suggestions, _require(settings.log, "log"))
    server = make_server(
        session,
        corpus,
        system_stats=meta.get("systems", {}),
        ui_dir=settings.ui_dir,
        host=settings.host,
        port=settings.port,
    )
    host, port = server.server_address[0], server.server_address[1]
    print(f"serving adjudication API on http://{host}:{port}/ (Ctrl-C to stop)")
    run_server(server)
    return 0


def _corpus_wers(corpus: Corpus) -> tuple[dict[str, float], float]:
    """Per-system and overall WER (percent) across all aligned pairs."""
    per_system: dict[str, list[int]] = {}
    total_edits = total_words = 0
    for utt_id, sys_id in corpus.pairs():
        ref = corpus.ref_tokens(utt_id)
        hyp = corpus.hyp_tokens(utt_id, sys_id)
        edits = edit_stats(ref, hyp).total
        bucket = per_system.setdefault(sys_id, [0, 0])
        bucket[0] += edits
        bucket[1] += len(ref)
        total_edits += edits
        total_words += len(ref)
    wers = {
        sys_id: 100.0 * edits / words for sys_id, (edits, words) in per_system.items()
    }
    overall = 100.0 * total_edits / total_words if total_words else 0.0
    return wers, overall


def cmd_report(args: argparse.Namespace) -> int:
    settings = build_settings(
        args.config,
        corpus=args.corpus,
        suggestions=args.suggestions,
        log=args.log,
        labels=args.labels,
        weight=args.weight,
        alpha=args.alpha,
    )
    if settings.labels:
        labels_doc = read_labels(settings.labels)
    else:
        suggestions_path = _require(settings.suggestions, "suggestions")
        suggestions = read_suggestions(suggestions_path)
        meta = read_meta(suggestions_path)
        log_path = _require(settings.log, "log")
        labels_doc = export_effective(log_path, suggestions, meta.get("systems", {}))
    if args.labels_out:
        write_labels(labels_doc, args.labels_out)
    rates = compute_rates(labels_doc, allow_partial=args.allow_partial)
    if not rates:
        raise ValueError("no systems in the label document")

    wers: dict[str, float] = {}
    overall_wer: float | None = None
    if settings.corpus:
        corpus = load_corpus_dir(settings.corpus)
        wers, overall_wer = _corpus_wers(corpus)

    pending_by_system: dict[str, int] = {}
    for label in labels_doc.get("labels", ()):
        if label["status"] == "pending":
            pending_by_system[label["system_id"]] = (
                pending_by_system.get(label["system_id"], 0) + 1
            )
    reports = [
        SystemReport(
            system_id=sys_id,
            rates=r,
            wer=wers.get(sys_id),
            pending=pending_by_system.get(sys_id, 0),
        )
        for sys_id, r in sorted(rates.items())
    ]
    order = [s.strip() for s in args.order.split(",")] if args.order else None
    ranked = severity_rank(reports, weight=settings.weight, order=order)

    sizes = sorted(r.rates.total_content_words for r in reports)
    n1, n2 = sizes[0], sizes[1] if len(sizes) > 1 else sizes[0]
    p_pool = pooled_error_proportion(rates)
    computed_threshold = significance_threshold(n1, n2, p_pool, settings.alpha)
    threshold = args.threshold if args.threshold is not None else computed_threshold
    compare_systems(ranked, threshold)

    aggregate = None
    if len(reports) > 1:
        aggregate = SystemReport("Total", aggregate_rates(rates), wer=overall_wer)
    meta_info = {
        "ranking_weight": settings.weight,
        "significance_alpha": settings.alpha,
        "significance_n1": n1,
        "significance_n2": n2,
        "significance_p_pool": round(p_pool, 6),
        "significance_threshold_pct": round(threshold, 4),
        "significance_threshold_computed_pct": round(computed_threshold, 4),
        "significance_formula": "z(1-alpha/2) * sqrt(p(1-p)(1/n1+1/n2)) * 100",
    }
    pending_total = labels_doc.get("pending", 0)
    if pending_total:
        meta_info["pending_candidates"] = pending_total
    document = render(ranked, args.format, aggregate=aggregate, meta=meta_info)
    if args.out:
        Path(args.out).write_text(document, encoding="utf-8")
        print(f"wrote {args.format} report -> {args.out}")
        print(
            f"significance threshold: {threshold:.4f} pct points "
            f"(computed {computed_threshold:.4f}, alpha={settings.alpha}, "
            f"n1={n1}, n2={n2}, p={p_pool:.4f})"
        )
    else:
        print(document, end="")
    totals = labels_doc.get("category_totals")
    if totals:
        print(
            "category totals: "
            + ", ".join(f"{k}={totals[k]}" for k in ("Lex", "Gram", "Cotx", "Fail"))
        )
    if pending_total:
        print(f"pending candidates excluded from rates: {pending_total}", file=sys.stderr)
    return 0


def _read_transcript_file(path: str) -> dict[tuple[str, str], str]:
    """utterance/system -> text from a reference- or hypothesis-style JSONL."""
    out: dict[tuple[str, str], str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                text = obj.get("hypothesis", obj.get("reference"))
                if text is None or "utterance_id" not in obj:
                    raise KeyError("utterance_id/hypothesis")
                out[(obj["utterance_id"], obj.get("system_id", "hyp"))] = text
            except (json.JSONDecodeError, KeyError) as exc:
                raise ValueError(f"{path}:{lineno}: bad transcript line ({exc})") from exc
    return out


def cmd_wer(args: argparse.Namespace) -> int:
    refs = {
        utt_id: text for (utt_id, _), text in _read_transcript_file(args.ref).items()
    }
    hyps = _read_transcript_file(args.hyp)
    per_system: dict[str, list[int]] = {}
    for (utt_id, sys_id), text in sorted(hyps.items()):
        if utt_id not in refs:
            raise ValueError(f"hypothesis for unknown utterance {utt_id!r}")
        ref_tokens = tokenize(refs[utt_id])
        if not ref_tokens:
            raise ValueError(f"undefined rate: empty reference for {utt_id!r}")
        edits = edit_stats(ref_tokens, tokenize(text)).total
        bucket = per_system.setdefault(sys_id, [0, 0])
        bucket[0] += edits
        bucket[1] += len(ref_tokens)
    if not per_system:
        raise ValueError("hypothesis file is empty")
    if len(per_system) == 1:
        edits, words = next(iter(per_system.values()))
        print(f"{edits / words:.2f}")
    else:
        for sys_id, (edits, words) in sorted(per_system.items()):
            print(f"{sys_id}\t{edits / words:.2f}")
    return 0


_COMMANDS = {
    "ingest": cmd_ingest,
    "align": cmd_align,
    "preclassify": cmd_preclassify,
    "serve": cmd_serve,
    "report": cmd_report,
    "wer": cmd_wer,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"sevasr: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
