"""End-to-end corpus pipeline: extract, filter, score, dedup, stats.

A run takes a manifest plus filter/scorer/dedup settings, writes one
JSON-lines artifact per stage into the output directory, and emits the
resolved configuration next to them so the run can be reproduced exactly.
Stage counts are monotone non-increasing from raw extraction through
deduplication; that is asserted on every run.
"""

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from . import dedup as dedup_mod
from . import jsonl
from .errors import ConfigError
from .extraction import (
    ExtractionSummary,
    extract_pairs,
    iter_source_files,
    load_manifest,
    pair_from_record,
    pair_to_record,
)
from .filtering import (
    RemoteScorerConfig,
    RuleFilterConfig,
    ScoreFilterConfig,
    heuristic_score,
    remote_score,
    rule_filter,
    score_filter,
    scores_to_record,
)

STAGE_FILES = {
    "raw": "raw_pairs.jsonl",
    "rule_filtered": "rule_filtered.jsonl",
    "scores": "scores.jsonl",
    "score_filtered": "score_filtered.jsonl",
    "dedup_reports": "dedup_reports.jsonl",
    "deduplicated": "deduplicated.jsonl",
}


@dataclass
class PipelineConfig:
    manifest: str
    out_dir: str
    min_stars: int = 60
    scorer: str = "heuristic"  # "heuristic" or an http(s) endpoint
    seed: int = 0
    gzip: bool = False
    rule: RuleFilterConfig = field(default_factory=RuleFilterConfig)
    score: ScoreFilterConfig = field(default_factory=ScoreFilterConfig)
    dedup: dedup_mod.DedupConfig = field(default_factory=dedup_mod.DedupConfig)
    dedup_corpus: str | None = None  # dedup against this corpus; None = within-run

    def stage_path(self, out, stage):
        name = STAGE_FILES[stage]
        return out / (name + ".gz" if self.gzip else name)

    def as_dict(self):
        return {
            "manifest": self.manifest,
            "out_dir": self.out_dir,
            "min_stars": self.min_stars,
            "scorer": self.scorer,
            "seed": self.seed,
            "gzip": self.gzip,
            "rule": dataclasses.asdict(self.rule),
            "score": dataclasses.asdict(self.score),
            "dedup": dataclasses.asdict(self.dedup),
            "dedup_corpus": self.dedup_corpus,
        }

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(
                manifest=data["manifest"],
                out_dir=data["out_dir"],
                min_stars=data.get("min_stars", 60),
                scorer=data.get("scorer", "heuristic"),
                seed=data.get("seed", 0),
                gzip=data.get("gzip", False),
                rule=RuleFilterConfig(**data.get("rule", {})),
                score=ScoreFilterConfig(**data.get("score", {})),
                dedup=dedup_mod.DedupConfig(**data.get("dedup", {})),
                dedup_corpus=data.get("dedup_corpus"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid pipeline config: {exc}") from exc


@dataclass
class CorpusStats:
    stage_counts: dict
    histograms: dict
    duplicate_count: int = 0

    def as_dict(self):
        return {
            "stage_counts": self.stage_counts,
            "histograms": self.histograms,
            "duplicate_count": self.duplicate_count,
        }


def _histogram(values):
    counts = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return {str(k): counts[k] for k in sorted(counts)}


def pair_histograms(pairs):
    return {
        "code_line_count": _histogram(p.unit.code_line_count for p in pairs),
        "complexity": _histogram(p.unit.complexity for p in pairs),
        "doc_line_count": _histogram(p.unit.doc_line_count for p in pairs),
    }


def compute_scores(pairs, scorer, batch_size=64):
    """Normalized QualityScores for each pair, via the heuristic or a remote
    endpoint."""
    if scorer == "heuristic":
        return [heuristic_score(p) for p in pairs]
    config = RemoteScorerConfig(endpoint=scorer, max_batch_size=batch_size)
    return remote_score(pairs, config)


def run_pipeline(config):
    """Execute extract -> rule filter -> score -> score filter -> dedup.

    Writes the stage artifacts, stats and the resolved config under
    config.out_dir, and returns (CorpusStats, report dict).
    """
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    manifest_path = Path(config.manifest)
    if not manifest_path.exists():
        raise ConfigError(f"manifest not found: {manifest_path}")
    manifest = load_manifest(manifest_path, min_stars=config.min_stars)

    summary = ExtractionSummary()
    files = iter_source_files(manifest, base_dir=manifest_path.parent)
    raw_pairs = list(extract_pairs(files, manifest, summary))
    jsonl.write_records(config.stage_path(out, "raw"), (pair_to_record(p) for p in raw_pairs))

    rule_kept = [p for p in raw_pairs if rule_filter(p, config.rule)]
    jsonl.write_records(config.stage_path(out, "rule_filtered"), (pair_to_record(p) for p in rule_kept))

    scores = compute_scores(rule_kept, config.scorer)
    jsonl.write_records(
        config.stage_path(out, "scores"),
        (scores_to_record(p.pair_id, s) for p, s in zip(rule_kept, scores)),
    )

    score_kept = [p for p, s in zip(rule_kept, scores) if score_filter(p, s, config.score)]
    jsonl.write_records(config.stage_path(out, "score_filtered"), (pair_to_record(p) for p in score_kept))

    if config.dedup_corpus:
        corpus_pairs = [pair_from_record(r) for r in jsonl.read_records(config.dedup_corpus)]
        indexes = dedup_mod.build_indexes(corpus_pairs, config.dedup)
        reports = list(dedup_mod.dedup_against_corpus(score_kept, indexes, config.dedup))
    else:
        reports = list(dedup_mod.self_dedup_reports(score_kept, config.dedup))
    jsonl.write_records(config.stage_path(out, "dedup_reports"), (r.as_record() for r in reports))

    deduplicated = [p for p, r in zip(score_kept, reports) if not r.is_duplicate]
    jsonl.write_records(config.stage_path(out, "deduplicated"), (pair_to_record(p) for p in deduplicated))

    stage_counts = {
        "raw": len(raw_pairs),
        "rule_filtered": len(rule_kept),
        "score_filtered": len(score_kept),
        "deduplicated": len(deduplicated),
    }
    ordered = [stage_counts[s] for s in ("raw", "rule_filtered", "score_filtered", "deduplicated")]
    if any(a < b for a, b in zip(ordered, ordered[1:])):
        raise AssertionError(f"stage counts must be non-increasing, got {stage_counts}")

    stats = CorpusStats(
        stage_counts=stage_counts,
        histograms=pair_histograms(raw_pairs),
        duplicate_count=sum(1 for r in reports if r.is_duplicate),
    )
    report = {
        "extraction": summary.as_dict(),
        "stage_counts": stage_counts,
        "duplicate_count": stats.duplicate_count,
    }

    (out / "run_config.json").write_text(json.dumps(config.as_dict(), indent=2, sort_keys=True) + "\n")
    (out / "run_report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    write_stats_outputs(stats.as_dict(), out)
    return stats, report


def write_stats_outputs(stats_dict, out_dir, basename="stats"):
    out_dir = Path(out_dir)
    (out_dir / f"{basename}.json").write_text(json.dumps(stats_dict, indent=2, sort_keys=True) + "\n")
    rows = [["table", "key", "value"]]
    for stage, count in stats_dict.get("stage_counts", {}).items():
        rows.append(["stage_counts", stage, str(count)])
    for name, histogram in stats_dict.get("histograms", {}).items():
        for bucket, count in histogram.items():
            rows.append([f"hist:{name}", str(bucket), str(count)])
    if "duplicate_count" in stats_dict:
        rows.append(["dedup", "duplicates", str(stats_dict["duplicate_count"])])
    csv_text = "\n".join(",".join(row) for row in rows) + "\n"
    (out_dir / f"{basename}.csv").write_text(csv_text)


# --- test-set assembly ------------------------------------------------------------

def assemble_test_set(annotation_rows, pairs_by_id, corpus_pairs, cfg):
    """Apply the high-quality selection rule, then drop near-duplicates.

    A pair qualifies when every step score that is present is >= 1; blank
    steps pass. Accepts raw annotation records (scores averaged per step
    across annotators) or aggregated rows carrying step*_mean fields.
    Returns (kept_pairs, summary dict).
    """
    means = _step_means(annotation_rows)
    qualified = []
    for pair_id in means:
        if pair_id not in pairs_by_id:
            continue
        values = means[pair_id]
        if all(v is None or v >= 1.0 for v in values.values()):
            qualified.append(pairs_by_id[pair_id])
    qualified.sort(key=lambda p: p.pair_id)

    indexes = dedup_mod.build_indexes(corpus_pairs, cfg)
    reports = list(dedup_mod.dedup_against_corpus(qualified, indexes, cfg))
    kept = [p for p, r in zip(qualified, reports) if not r.is_duplicate]
    summary = {
        "annotated_pairs": len(means),
        "qualified_by_scores": len(qualified),
        "duplicates_removed": len(qualified) - len(kept),
        "final": len(kept),
    }
    return kept, summary


def _step_means(annotation_rows):
    aggregated = {}
    raw = {}
    for row in annotation_rows:
        pair_id = row["pair_id"]
        if "step1_mean" in row:
            aggregated[pair_id] = {
                "step1": row.get("step1_mean"),
                "step2": row.get("step2_mean"),
                "step3": row.get("step3_mean"),
            }
        else:
            bucket = raw.setdefault(pair_id, {"step1": [], "step2": [], "step3": []})
            for step in ("step1", "step2", "step3"):
                if row.get(step) is not None:
                    bucket[step].append(row[step])
    for pair_id, bucket in raw.items():
        aggregated.setdefault(
            pair_id,
            {step: (sum(vs) / len(vs) if vs else None) for step, vs in bucket.items()},
        )
    return aggregated


# --- standalone corpus statistics ----------------------------------------------------

def corpus_file_stats(path):
    """Histograms for a pairs file or an annotation export.

    Pair files yield line/complexity/doc-length histograms; annotation
    exports yield step-score histograms with an explicit blank bucket.
    """
    records = list(jsonl.read_records(path))
    if not records:
        return {"records": 0, "histograms": {}}
    if "code_line_count" in records[0]:
        pairs = [pair_from_record(r) for r in records]
        return {"records": len(records), "histograms": pair_histograms(pairs)}
    if "step1" in records[0] or "step1_mean" in records[0]:
        histograms = {}
        for step in ("step1", "step2", "step3"):
            key = step if step in records[0] else f"{step}_mean"
            values = []
            blanks = 0
            for r in records:
                value = r.get(key)
                if value is None:
                    blanks += 1
                else:
                    values.append(value)
            histogram = _histogram(values)
            histogram["blank"] = blanks
            histograms[step] = histogram
        return {"records": len(records), "histograms": histograms}
    if "a1" in records[0]:
        histograms = {}
        for aspect in ("a1", "a2", "a3", "a4"):
            histograms[aspect] = _histogram(r[aspect] for r in records if aspect in r)
        return {"records": len(records), "histograms": histograms}
    return {"records": len(records), "histograms": {}}
