"""Acceptance suite: one test per release criterion, one PASS line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Every tolerance is pinned here; nothing is deferred to calibration.
"""

import random
import time
from pathlib import Path

import pytest

from docmine import jsonl
from docmine.agreement import ScoredExample, count_pair_classes, kendall_tau
from docmine.annotation import build_assignments, expected_score_count
from docmine.dedup import DedupConfig, build_indexes, dedup_against_corpus, levenshtein
from docmine.errors import DegenerateInput
from docmine.extraction import CodeDocPair, FunctionUnit, pair_from_record
from docmine.filtering import QualityScores, RuleFilterConfig, ScoreFilterConfig, rule_filter, score_filter
from docmine.metrics import CODE, NATURAL_LANGUAGE, bleu, cer, meteor, rouge, tokenize
from docmine.pipeline import PipelineConfig, STAGE_FILES, assemble_test_set, run_pipeline

from reference_impls import (
    bleu_ref,
    cer_ref,
    kendall_ref,
    kendall_tau_ref,
    levenshtein_matrix_ref,
    levenshtein_ref,
    levenshtein_to_many,
    meteor_ref,
    pad_targets,
    rouge1_ref,
    rougeL_ref,
)

MINI_CORPUS = Path(__file__).parent.parent / "data" / "mini_corpus"
TOLERANCE = 1e-9


def _report(name):
    print(f"\n[acceptance] {name}: PASS")


def _nl(tokens):
    return tokenize(" ".join(tokens), NATURAL_LANGUAGE)


def _random_token_cases(count, seed):
    rng = random.Random(seed)
    vocabulary = ["a", "b", "c", "d", "e", "ff", "gg", "hh", "value", "return"]
    cases = []
    for _ in range(count):
        cand = [rng.choice(vocabulary) for _ in range(rng.randint(1, 9))]
        ref = [rng.choice(vocabulary) for _ in range(rng.randint(1, 9))]
        cases.append((cand, ref))
    return cases


def test_metric_oracle_suite():
    """BLEU/ROUGE/METEOR/CER match the brute-force references on 200
    randomized cases within 1e-9, in under 10 seconds."""
    started = time.monotonic()
    for cand, ref in _random_token_cases(200, seed=20240):
        c, r = _nl(cand), _nl(ref)
        assert abs(bleu(c, r) - bleu_ref(cand, ref)) < TOLERANCE
        rouge1, rouge_l = rouge(c, r)
        assert abs(rouge1 - rouge1_ref(cand, ref)) < TOLERANCE
        assert abs(rouge_l - rougeL_ref(cand, ref)) < TOLERANCE
        assert abs(meteor(c, r) - meteor_ref(cand, ref)) < TOLERANCE
        code_tokens = cand[: max(1, len(cand) // 2)] + ref[: max(1, len(ref) // 2)]
        got = cer(tokenize(" ".join(code_tokens), CODE), c, r)
        want = cer_ref(code_tokens, cand, ref)
        if want is None:
            assert got is None
        else:
            assert abs(got - want) < TOLERANCE
    elapsed = time.monotonic() - started
    assert elapsed < 10.0, f"oracle suite took {elapsed:.1f}s"
    _report("metric oracle suite (200 cases, 1e-9, <10s)")


def test_derived_metric_fixtures_exact():
    rouge1, rouge_l = rouge(_nl(list("abcd")), _nl(list("acbd")))
    assert rouge_l == 0.75
    seq = _nl(["hello", "world"])
    assert meteor(seq, seq) == 0.9375
    code = tokenize("a b x", CODE)
    assert cer(code, _nl(["a", "q"]), _nl(["a", "b", "z"])) == 0.5
    assert levenshtein("kitten", "sitting") == 3
    _report("derived fixtures (ROUGE-L 0.75, METEOR 0.9375, CER 0.5, Levenshtein 3)")


def _examples(metric, human):
    return [
        ScoredExample(example_id=str(i), metric_score=m, human_score=h)
        for i, (m, h) in enumerate(zip(metric, human))
    ]


def test_kendall_tau_oracle_and_hand_cases():
    rng = random.Random(77)
    for _ in range(100):
        n = rng.randint(2, 12)
        metric = [rng.choice([0.0, 0.25, 0.5, 0.75, 1.0]) for _ in range(n)]
        human = [rng.randint(0, 4) for _ in range(n)]
        assert count_pair_classes(_examples(metric, human)) == kendall_ref(metric, human)
        expected = kendall_tau_ref(metric, human)
        if expected is None:
            with pytest.raises(DegenerateInput):
                kendall_tau(_examples(metric, human))
        else:
            result = kendall_tau(_examples(metric, human))
            assert result.tau == expected

    assert kendall_tau(_examples([1, 2, 3], [1, 2, 3])).tau == 1.0
    assert kendall_tau(_examples([1, 2, 3], [3, 2, 1])).tau == 1.0  # absolute value
    assert kendall_tau(_examples([1, 1, 2], [1, 2, 3])).tau == 2 / 3
    _report("adapted Kendall tau (100-case oracle equivalence + 3 hand cases)")


def _unit_pair(code_lines, doc_lines=5, complexity=4, has_branches=True):
    unit = FunctionUnit(
        qualified_name="f",
        signature="def f(x):",
        body_code="    return x",
        docstring="words " * doc_lines,
        start_line=1,
        end_line=max(1, code_lines),
        code_line_count=code_lines,
        doc_line_count=doc_lines,
        complexity=complexity,
        has_branch_blocks=has_branches,
    )
    return CodeDocPair(pair_id="p", repo_id="r", path="f.py", unit=unit)


def test_filter_fidelity(tmp_path):
    rule_cfg = RuleFilterConfig()
    for code_lines, keep in ((5, False), (6, True), (30, True), (31, False)):
        assert rule_filter(_unit_pair(code_lines), rule_cfg) is keep

    score_cfg = ScoreFilterConfig()
    pair = _unit_pair(10)
    at = QualityScores(step1=1.0, step2=1.0, scale="raw")
    above = QualityScores(step1=1.0 + 1e-9, step2=1.0 + 1e-9, scale="raw")
    assert not score_filter(pair, at, score_cfg)
    assert score_filter(pair, above, score_cfg)

    config = PipelineConfig(manifest=str(MINI_CORPUS / "manifest.jsonl"), out_dir=str(tmp_path))
    run_pipeline(config)
    rule_ids = {r["pair_id"] for r in jsonl.read_records(tmp_path / "rule_filtered.jsonl")}
    refined_ids = {r["pair_id"] for r in jsonl.read_records(tmp_path / "score_filtered.jsonl")}
    assert refined_ids <= rule_ids
    _report("filter fidelity (5/6/30/31 boundaries, strict >1.0, refined subset)")


def _synthetic_texts(seed):
    """10k-entry corpus plus candidates: random strings, seeded duplicates,
    single-edit near misses around the 5% bound, anagram stressers."""
    rng = random.Random(seed)
    alphabet = "abcdefghij"

    def rand_string(lo=12, hi=40):
        return "".join(rng.choice(alphabet) for _ in range(rng.randint(lo, hi)))

    corpus = [rand_string() for _ in range(9990)]
    corpus.extend(rand_string(200, 500) for _ in range(10))  # exercise prefix truncation

    candidates = [rand_string() for _ in range(150)]
    for _ in range(100):
        victim = rng.choice(corpus)
        kind = rng.randrange(4)
        if kind == 0:
            candidates.append(victim)  # exact copy
        elif kind == 1:
            pos = rng.randrange(len(victim))
            candidates.append(victim[:pos] + "Z" + victim[pos + 1 :])  # 1 substitution
        elif kind == 2:
            pos = rng.randrange(len(victim))
            candidates.append(victim[:pos] + victim[pos + 1 :])  # 1 deletion
        else:
            candidates.append("".join(rng.sample(victim, len(victim))))  # anagram stresser
    return corpus, candidates


def _text_pair(pair_id, text):
    unit = FunctionUnit(
        qualified_name=pair_id, signature=text, body_code="", docstring="",
        start_line=1, end_line=1, code_line_count=1, doc_line_count=0,
        complexity=1, has_branch_blocks=False,
    )
    return CodeDocPair(pair_id=pair_id, repo_id="r", path="s.py", unit=unit)


def _exhaustive_scanner(corpus, cfg):
    """Ground-truth scanner via the batched full-DP oracle: every pairwise
    distance is computed (no pruning), first entry under the bound wins.
    Targets are padded once, grouped by length so padding stays tight."""
    import numpy as np

    prefixes = [t[: cfg.prefix_chars] for t in corpus]
    lens_all = np.array([len(p) for p in prefixes], dtype=np.int64)
    buckets = {}
    for idx, prefix in enumerate(prefixes):
        buckets.setdefault(len(prefix) // 50, []).append(idx)
    groups = []
    for _, indices in sorted(buckets.items()):
        chars, lens = pad_targets([prefixes[i] for i in indices])
        groups.append((np.array(indices), chars, lens))

    def scan(candidate):
        prefix = candidate[: cfg.prefix_chars]
        distances = np.empty(len(prefixes), dtype=np.int64)
        for indices, chars, lens in groups:
            distances[indices] = levenshtein_to_many(prefix, chars, lens)
        bases = np.maximum(lens_all, len(prefix))
        mask = distances < cfg.relative_threshold * bases
        if not mask.any():
            return None
        idx = int(mask.argmax())
        return idx, int(distances[idx]), int(bases[idx])

    return scan


def test_dedup_oracle_and_scale():
    # guard the matrix oracle itself against the recursive reference
    rng = random.Random(5)
    for _ in range(200):
        q = "".join(rng.choice("abc") for _ in range(rng.randint(0, 10)))
        ts = ["".join(rng.choice("abc") for _ in range(rng.randint(0, 10))) for _ in range(4)]
        assert list(levenshtein_matrix_ref(q, ts)) == [levenshtein_ref(q, t) for t in ts]

    cfg = DedupConfig(prefix_chars=300, relative_threshold=0.05, field="code")
    corpus_texts, candidate_texts = _synthetic_texts(seed=99)
    corpus_pairs = [_text_pair(f"c{i}", t) for i, t in enumerate(corpus_texts)]
    indexes = build_indexes(corpus_pairs, cfg)

    # equality against the exhaustive scan on the 10k-pair corpus
    exhaustive = _exhaustive_scanner(corpus_texts, cfg)
    candidate_pairs = [_text_pair(f"x{i}", t) for i, t in enumerate(candidate_texts)]
    fast = list(dedup_against_corpus(candidate_pairs, indexes, cfg))
    mismatches = []
    for pair, text, report in zip(candidate_pairs, candidate_texts, fast):
        want = exhaustive(text)
        if want is None:
            if report.is_duplicate:
                mismatches.append((pair.pair_id, "fast found, exhaustive not"))
            continue
        idx, distance, base = want
        if (
            not report.is_duplicate
            or report.matched_corpus_id != f"c{idx}"
            or report.distance != distance
            or report.base_length != base
        ):
            mismatches.append((pair.pair_id, report, want))
    assert mismatches == []
    duplicates_found = sum(1 for r in fast if r.is_duplicate)
    assert duplicates_found >= 50  # the seeded copies/edits must actually register

    # production-path scale: 10k candidates vs the 10k corpus under 60s
    rng = random.Random(123)
    bulk_texts = candidate_texts + [
        "".join(rng.choice("abcdefghij") for _ in range(rng.randint(12, 40)))
        for _ in range(10_000 - len(candidate_texts))
    ]
    bulk_pairs = [_text_pair(f"b{i}", t) for i, t in enumerate(bulk_texts)]
    started = time.monotonic()
    bulk_reports = list(dedup_against_corpus(bulk_pairs, indexes, cfg))
    elapsed = time.monotonic() - started
    assert len(bulk_reports) == 10_000
    assert elapsed < 60.0, f"10k x 10k scan took {elapsed:.1f}s"
    _report(f"dedup oracle equivalence + 10k x 10k scan in {elapsed:.1f}s (<60s)")


def test_pipeline_determinism(tmp_path):
    outputs = []
    for name in ("a", "b"):
        config = PipelineConfig(
            manifest=str(MINI_CORPUS / "manifest.jsonl"), out_dir=str(tmp_path / name), seed=7
        )
        stats, report = run_pipeline(config)
        ordered = [report["stage_counts"][s]
                   for s in ("raw", "rule_filtered", "score_filtered", "deduplicated")]
        assert ordered == sorted(ordered, reverse=True)
        outputs.append({
            f: (tmp_path / name / f).read_bytes()
            for f in [*STAGE_FILES.values(), "stats.json", "stats.csv", "run_report.json"]
        })
    assert outputs[0] == outputs[1]
    _report("pipeline determinism (byte-identical runs, monotone stage counts)")


def test_assignment_arithmetic():
    examples = [(f"e{i:03d}", f"reference {i}") for i in range(180)]
    systems = {f"sys{k}": {e: f"cand {k}" for e, _ in examples} for k in range(8)}
    assignments = build_assignments(examples, systems, [f"annotator{j}" for j in range(10)], seed=1)
    assert expected_score_count(assignments) == 6480
    _report("blind-eval arithmetic (180 x (8 systems + reference) x 4 = 6480)")


def test_high_quality_selection_rule():
    def pair_of(pair_id, body):
        return pair_from_record({
            "pair_id": pair_id, "repo_id": "r", "path": "m.py", "qualified_name": pair_id,
            "signature": f"def {pair_id}(x):", "body_code": body, "docstring": f"doc for {pair_id}",
            "start_line": 1, "end_line": 2, "code_line_count": 2, "doc_line_count": 1,
            "complexity": 1, "has_branch_blocks": False, "repo_stars": 70,
        })

    keep_me = pair_of("keep_me", "    return x * 41")
    drop_me = pair_of("drop_me", "    return x * 42")
    dup_me = pair_of("dup_me", "    return x * 43")
    pairs = {p.pair_id: p for p in (keep_me, drop_me, dup_me)}
    rows = [
        {"pair_id": "keep_me", "step1": 1, "step2": None, "step3": 2},
        {"pair_id": "drop_me", "step1": 2, "step2": 0, "step3": 3},
        {"pair_id": "dup_me", "step1": 3, "step2": 3, "step3": None},
    ]
    corpus_twin = pair_from_record({
        "pair_id": "raw_corpus_twin", "repo_id": "q", "path": "other.py", "qualified_name": "dup_me",
        "signature": "def dup_me(x):", "body_code": "    return x * 43", "docstring": "doc for dup_me",
        "start_line": 9, "end_line": 10, "code_line_count": 2, "doc_line_count": 1,
        "complexity": 1, "has_branch_blocks": False, "repo_stars": 70,
    })
    kept, summary = assemble_test_set(rows, pairs, [corpus_twin], DedupConfig())
    assert [p.pair_id for p in kept] == ["keep_me"]
    assert summary["qualified_by_scores"] == 2  # keep_me and dup_me pass the score rule
    assert summary["duplicates_removed"] == 1
    _report("test-set rule ((1, blank, 2) kept, (2, 0, 3) dropped, duplicate removed)")
