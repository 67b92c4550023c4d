"""Command-line interface.

Subcommands cover each pipeline stage plus the annotation service:
extract, filter, score, dedup, assemble-test, evaluate, agreement, stats,
serve and run. Exit codes: 0 success, 1 fatal error, 2 configuration error.
"""

import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from . import agreement as agreement_mod
from . import dedup as dedup_mod
from . import figures as figures_mod
from . import jsonl, metrics, pipeline
from .annotation import (
    AnnotationStore,
    Campaign,
    build_assignments,
    expected_score_count,
)
from .errors import ConfigError, DocmineError
from .extraction import (
    ExtractionSummary,
    iter_source_files,
    load_manifest,
    pair_from_record,
    pair_to_record,
    pairs_from_parsed,
    parse_file_safe,
)
from .filtering import RuleFilterConfig, ScoreFilterConfig, rule_filter, score_filter, scores_from_record


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None, help="Pipeline config JSON.")
@click.option("--seed", type=int, default=None, help="Random seed override.")
@click.option("--out", "out_dir", type=click.Path(), default=None, help="Output directory override.")
@click.option("--jobs", type=int, default=1, show_default=True, help="Worker processes for parsing.")
@click.pass_context
def cli(ctx, config_path, seed, out_dir, jobs):
    """Corpus construction and evaluation toolkit for explanatory docstrings."""
    ctx.obj = {"config_path": config_path, "seed": seed, "out_dir": out_dir, "jobs": max(1, jobs)}


def _load_pairs(path):
    return [pair_from_record(r) for r in jsonl.read_records(path)]


@cli.command()
@click.option("--manifest", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--min-stars", type=int, default=60, show_default=True)
@click.pass_context
def extract(ctx, manifest, out_path, min_stars):
    """Extract documented functions from the manifest's repositories."""
    manifest_map = load_manifest(manifest, min_stars=min_stars)
    files = list(iter_source_files(manifest_map, base_dir=Path(manifest).parent))
    summary = ExtractionSummary()
    jobs = ctx.obj["jobs"]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parsed = list(pool.map(parse_file_safe, files, chunksize=8))
    else:
        parsed = map(parse_file_safe, files)
    pairs = pairs_from_parsed(parsed, manifest_map, summary)
    jsonl.write_records(out_path, (pair_to_record(p) for p in pairs))
    click.echo(json.dumps(summary.as_dict(), sort_keys=True))


def _rule_config_options(fn):
    fn = click.option("--min-code-lines", type=int, default=6, show_default=True)(fn)
    fn = click.option("--max-code-lines", type=int, default=30, show_default=True)(fn)
    fn = click.option("--min-doc-lines", type=int, default=3, show_default=True,
                      help="Keep pairs with doc lines strictly above this.")(fn)
    fn = click.option("--min-complexity", type=int, default=3, show_default=True,
                      help="Keep pairs with complexity strictly above this.")(fn)
    return fn


def _dedup_config_options(fn):
    fn = click.option("--prefix", "prefix_chars", type=int, default=300, show_default=True)(fn)
    fn = click.option("--threshold", "relative_threshold", type=float, default=0.05, show_default=True)(fn)
    fn = click.option("--field", type=click.Choice(["code", "docstring", "both"]), default="both",
                      show_default=True)(fn)
    return fn


@cli.command("filter")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--rules", "use_rules", is_flag=True, help="Apply the rule-based filter.")
@click.option("--scores", "use_scores", is_flag=True, help="Apply the score-based filter.")
@_rule_config_options
@click.option("--step1-threshold", type=float, default=1.0, show_default=True)
@click.option("--step2-threshold", type=float, default=1.0, show_default=True)
@click.option("--heuristic", is_flag=True, help="Score with the built-in heuristic (default).")
@click.option("--endpoint", default=None, help="Score via this remote scorer URL.")
@click.option("--scores-file", type=click.Path(exists=True), default=None,
              help="Precomputed scores JSONL; skips scoring.")
def filter_cmd(in_path, out_path, use_rules, use_scores, min_code_lines, max_code_lines,
               min_doc_lines, min_complexity, step1_threshold, step2_threshold, heuristic,
               endpoint, scores_file):
    """Filter a pairs file by rules, scores, or both."""
    if not use_rules and not use_scores:
        raise click.UsageError("pass --rules, --scores, or both")
    pairs = _load_pairs(in_path)
    kept = pairs
    if use_rules:
        rule_cfg = RuleFilterConfig(min_code_lines, max_code_lines, min_doc_lines, min_complexity)
        kept = [p for p in kept if rule_filter(p, rule_cfg)]
    if use_scores:
        if heuristic and endpoint:
            raise click.UsageError("--heuristic and --endpoint are mutually exclusive")
        score_cfg = ScoreFilterConfig(step1_threshold, step2_threshold)
        if scores_file:
            by_id = {r["pair_id"]: scores_from_record(r) for r in jsonl.read_records(scores_file)}
            missing = [p.pair_id for p in kept if p.pair_id not in by_id]
            if missing:
                raise ConfigError(f"scores file lacks {len(missing)} pair ids (first: {missing[0]})")
            scores = [by_id[p.pair_id] for p in kept]
        else:
            scores = pipeline.compute_scores(kept, endpoint or "heuristic")
        kept = [p for p, s in zip(kept, scores) if score_filter(p, s, score_cfg)]
    jsonl.write_records(out_path, (pair_to_record(p) for p in kept))
    click.echo(json.dumps({"input": len(pairs), "kept": len(kept)}))


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--heuristic", is_flag=True, help="Score with the built-in heuristic (default).")
@click.option("--endpoint", default=None, help="Score via this remote scorer URL.")
@click.option("--batch-size", type=int, default=64, show_default=True)
def score(in_path, out_path, heuristic, endpoint, batch_size):
    """Compute quality scores for every pair in a file."""
    from .filtering import scores_to_record

    if heuristic and endpoint:
        raise click.UsageError("--heuristic and --endpoint are mutually exclusive")
    pairs = _load_pairs(in_path)
    scores = pipeline.compute_scores(pairs, endpoint or "heuristic", batch_size=batch_size)
    jsonl.write_records(out_path, (scores_to_record(p.pair_id, s) for p, s in zip(pairs, scores)))
    click.echo(json.dumps({"scored": len(pairs)}))


@cli.command()
@click.option("--candidates", required=True, type=click.Path(exists=True))
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@_dedup_config_options
def dedup(candidates, corpus, out_path, prefix_chars, relative_threshold, field):
    """Report near-duplicates of candidate pairs against a corpus."""
    cfg = dedup_mod.DedupConfig(prefix_chars, relative_threshold, field)
    candidate_pairs = _load_pairs(candidates)
    corpus_pairs = _load_pairs(corpus)
    indexes = dedup_mod.build_indexes(corpus_pairs, cfg)
    reports = list(dedup_mod.dedup_against_corpus(candidate_pairs, indexes, cfg))
    jsonl.write_records(out_path, (r.as_record() for r in reports))
    duplicates = sum(1 for r in reports if r.is_duplicate)
    click.echo(json.dumps({"candidates": len(reports), "duplicates": duplicates}))


@cli.command("assemble-test")
@click.option("--annotations", required=True, type=click.Path(exists=True),
              help="Annotation export (raw records or aggregated).")
@click.option("--pairs", "pairs_path", required=True, type=click.Path(exists=True),
              help="Pairs file the annotations refer to.")
@click.option("--corpus", required=True, type=click.Path(exists=True),
              help="Corpus to deduplicate the test set against.")
@click.option("--out", "out_path", required=True, type=click.Path())
@_dedup_config_options
def assemble_test(annotations, pairs_path, corpus, out_path, prefix_chars, relative_threshold, field):
    """Select high-quality annotated pairs and remove corpus duplicates."""
    cfg = dedup_mod.DedupConfig(prefix_chars, relative_threshold, field)
    annotation_rows = list(jsonl.read_records(annotations))
    pairs_by_id = {p.pair_id: p for p in _load_pairs(pairs_path)}
    corpus_pairs = _load_pairs(corpus)
    kept, summary = pipeline.assemble_test_set(annotation_rows, pairs_by_id, corpus_pairs, cfg)
    jsonl.write_records(out_path, (pair_to_record(p) for p in kept))
    click.echo(json.dumps(summary, sort_keys=True))


@cli.command()
@click.option("--pairs", "pairs_path", required=True, type=click.Path(exists=True))
@click.option("--candidates", required=True, type=click.Path(exists=True),
              help='JSONL rows {"pair_id", "candidate", "system"}.')
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--nl-embed-endpoint", default=None, help="HTTP provider for the NL cosine score.")
@click.option("--nl-embed-dim", type=int, default=None)
@click.option("--code-embed-endpoint", default=None, help="HTTP provider for the code cosine score.")
@click.option("--code-embed-dim", type=int, default=None)
@click.option("--figures", is_flag=True, help="Render aggregate bar charts as PNGs.")
def evaluate(pairs_path, candidates, out_dir, nl_embed_endpoint, nl_embed_dim,
             code_embed_endpoint, code_embed_dim, figures):
    """Score candidate docstrings against references with all metrics."""
    pairs = _load_pairs(pairs_path)
    rows = list(jsonl.read_records(candidates, required_fields=("pair_id", "candidate")))
    nl_provider = code_provider = None
    if nl_embed_endpoint:
        if not nl_embed_dim:
            raise ConfigError("--nl-embed-endpoint requires --nl-embed-dim")
        nl_provider = metrics.http_embedding_provider("nl", nl_embed_endpoint, nl_embed_dim)
    if code_embed_endpoint:
        if not code_embed_dim:
            raise ConfigError("--code-embed-endpoint requires --code-embed-dim")
        code_provider = metrics.http_embedding_provider("code", code_embed_endpoint, code_embed_dim)

    per_pair, aggregates = metrics.evaluate_corpus(pairs, rows, nl_provider, code_provider)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jsonl.write_records(out / "per_pair.jsonl", per_pair)
    jsonl.write_records(out / "aggregate.jsonl", aggregates)
    table_rows = metrics.aggregate_table_rows(aggregates)
    with open(out / "aggregate.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["system", *metrics.METRIC_FIELDS, "pairs", "excluded_empty"])
        for row in table_rows:
            writer.writerow(
                [row["system"]]
                + ["" if row[f] is None else f"{row[f]:.4f}" for f in metrics.METRIC_FIELDS]
                + [row["pairs"], row["excluded_empty"]]
            )
    if figures:
        figures_mod.render_metric_bars(table_rows, out)
    click.echo(json.dumps({"systems": len(aggregates), "rows": len(per_pair)}))


@cli.command("agreement")
@click.option("--metrics", "metrics_path", required=True, type=click.Path(exists=True),
              help="Per-pair metric reports JSONL.")
@click.option("--human", "human_path", required=True, type=click.Path(exists=True),
              help="Unblinded rating export JSONL.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--within-system", is_flag=True,
              help="Form pairs only within each system before pooling counts.")
@click.option("--signed-out", type=click.Path(), default=None,
              help="Also write the signed-tau diagnostic table as JSON.")
def agreement_cmd(metrics_path, human_path, out_path, within_system, signed_out):
    """Rank-agreement table between metric scores and human ratings."""
    metric_rows = list(jsonl.read_records(metrics_path))
    human_rows = [
        {**r, "example_id": r.get("example_id") or r.get("pair_id"),
         "system": r.get("system") or r.get("system_id", "default")}
        for r in jsonl.read_records(human_path)
    ]
    metric_rows = [
        {**r, "system": r.get("system") or r.get("system_id", "default")} for r in metric_rows
    ]
    table = agreement_mod.agreement_table(
        metric_rows, human_rows, metrics.METRIC_FIELDS, within_system=within_system
    )
    rows = agreement_mod.table_to_csv_rows(table, metrics.METRIC_FIELDS)
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        csv.writer(fh).writerows(rows)
    if signed_out:
        signed = agreement_mod.agreement_table(
            metric_rows, human_rows, metrics.METRIC_FIELDS, within_system=within_system, signed=True
        )
        payload = {
            metric: {
                aspect: (None if cell is None else cell.tau)
                for aspect, cell in aspects.items()
            }
            for metric, aspects in signed.items()
        }
        Path(signed_out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    click.echo(json.dumps({"metrics": len(metrics.METRIC_FIELDS), "out": str(out_path)}))


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--figures", is_flag=True, help="Render histogram PNGs alongside the CSV/JSON.")
def stats(in_path, out_dir, figures):
    """Histograms and counts for a pairs file or an annotation export."""
    result = pipeline.corpus_file_stats(in_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pipeline.write_stats_outputs(result, out)
    if figures:
        figures_mod.render_histograms(result.get("histograms", {}), out)
    click.echo(json.dumps({"records": result["records"], "out": str(out)}))


@cli.command()
@click.option("--pairs", "pairs_path", type=click.Path(exists=True), default=None,
              help="Pairs queue for the 3-step protocol.")
@click.option("--eval-pairs", type=click.Path(exists=True), default=None,
              help="Test-set pairs for the blind evaluation protocol.")
@click.option("--eval-candidates", type=click.Path(exists=True), default=None,
              help='Candidate rows {"pair_id", "candidate", "system"} for evaluation.')
@click.option("--annotators", required=True, help="Comma-separated annotator ids.")
@click.option("--log", "log_path", required=True, type=click.Path(), help="Append-only record log.")
@click.option("--overlap", type=int, default=1, show_default=True,
              help="Raters per evaluation example.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8321, show_default=True)
@click.option("--static-dir", type=click.Path(), default=None)
@click.pass_context
def serve(ctx, pairs_path, eval_pairs, eval_candidates, annotators, log_path, overlap,
          host, port, static_dir):
    """Run the annotation service (and UI, when built) over HTTP."""
    import uvicorn

    from .service import create_app

    campaign = build_campaign(
        pairs_path=pairs_path,
        eval_pairs_path=eval_pairs,
        eval_candidates_path=eval_candidates,
        annotators=[a.strip() for a in annotators.split(",") if a.strip()],
        log_path=log_path,
        seed=ctx.obj["seed"] or 0,
        overlap=overlap,
    )
    app = create_app(campaign, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


def build_campaign(pairs_path, eval_pairs_path, eval_candidates_path, annotators, log_path,
                   seed=0, overlap=1):
    if not annotators:
        raise ConfigError("at least one annotator id is required")
    pair_records = list(jsonl.read_records(pairs_path)) if pairs_path else []
    assignments = []
    eval_records = []
    if eval_pairs_path and eval_candidates_path:
        eval_records = list(jsonl.read_records(eval_pairs_path))
        examples = [(r["pair_id"], r["docstring"] or "") for r in eval_records]
        systems = {}
        for row in jsonl.read_records(eval_candidates_path, required_fields=("pair_id", "candidate", "system")):
            systems.setdefault(row["system"], {})[row["pair_id"]] = row["candidate"]
        assignments = build_assignments(examples, systems, annotators, seed, overlap=overlap)
        click.echo(json.dumps({
            "assignments": len(assignments),
            "expected_scores": expected_score_count(assignments),
        }))
    elif eval_pairs_path or eval_candidates_path:
        raise ConfigError("--eval-pairs and --eval-candidates must be given together")
    known = {r["pair_id"] for r in pair_records}
    for record in eval_records:
        if record["pair_id"] not in known:
            pair_records.append(record)
            known.add(record["pair_id"])
    store = AnnotationStore(log_path)
    return Campaign(store=store, annotators=annotators, pair_records=pair_records,
                    assignments=assignments)


@cli.command()
@click.option("--manifest", type=click.Path(exists=True), default=None)
@click.option("--scorer", default=None, help='"heuristic" or a scorer endpoint URL.')
@click.option("--min-stars", type=int, default=None)
@click.option("--dedup-corpus", type=click.Path(exists=True), default=None)
@click.option("--gzip", "use_gzip", is_flag=True, help="Compress stage outputs (.jsonl.gz).")
@click.option("--figures", is_flag=True, help="Render stage-count and histogram PNGs.")
@click.pass_context
def run(ctx, manifest, scorer, min_stars, dedup_corpus, use_gzip, figures):
    """Run the whole pipeline with a reproducible config."""
    config_path = ctx.obj["config_path"]
    if config_path:
        data = json.loads(Path(config_path).read_text())
        config = pipeline.PipelineConfig.from_dict(data)
    elif manifest:
        if not ctx.obj["out_dir"]:
            raise ConfigError("pass --out DIR (group option) or a --config file")
        config = pipeline.PipelineConfig(manifest=manifest, out_dir=ctx.obj["out_dir"])
    else:
        raise ConfigError("pass --config FILE or --manifest PATH")
    if ctx.obj["out_dir"]:
        config.out_dir = ctx.obj["out_dir"]
    if ctx.obj["seed"] is not None:
        config.seed = ctx.obj["seed"]
    if scorer:
        config.scorer = scorer
    if min_stars is not None:
        config.min_stars = min_stars
    if dedup_corpus:
        config.dedup_corpus = dedup_corpus
    if use_gzip:
        config.gzip = True

    stats_obj, report = pipeline.run_pipeline(config)
    if figures:
        out = Path(config.out_dir) / "figures"
        figures_mod.render_histograms(stats_obj.histograms, out)
        figures_mod.render_stage_counts(stats_obj.stage_counts, out)
    click.echo(json.dumps(report, sort_keys=True))


def main(argv=None):
    try:
        cli(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        sys.exit(2)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except click.exceptions.Abort:
        sys.exit(1)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    except DocmineError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
