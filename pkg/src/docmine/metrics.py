"""Automatic docstring-quality metrics.

Seven per-pair scores: sentence BLEU (1-4 grams with zero-precision
smoothing), ROUGE-1 and ROUGE-L F1, METEOR (exact + stemmed alignment),
common-entity recall against the code, and two embedding cosine scores
computed through pluggable providers (one natural-language model, one code
model). Corpus values are arithmetic means of per-pair values.
"""

import math
import re
import threading
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Sequence

import httpx
import numpy as np

from .errors import DocmineError, EmptyInput, MalformedResponse, ProviderError

CODE = "code"
NATURAL_LANGUAGE = "natural-language"

_TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)

# Fixed suffix-stripping stemmer used by METEOR's second alignment stage.
# Longest suffix first; a suffix is stripped only when at least three
# characters remain. This table is part of the metric definition.
_STEM_SUFFIXES = (
    "ements", "ement", "ations", "ation", "ings", "ing", "ers", "ies",
    "ied", "est", "ed", "er", "ly", "es", "s",
)

METEOR_ALPHA = 0.9
METEOR_BETA = 3.0
METEOR_GAMMA = 0.5
BLEU_MAX_ORDER = 4
BLEU_SMOOTHING_K = 5.0


@dataclass(frozen=True)
class TokenSequence:
    tokens: tuple
    origin: str


def tokenize(text, origin):
    """Whitespace split with punctuation separated into single-char tokens.

    Code keeps case; natural language is lowercased. Underscores stay inside
    identifiers. Blank input gives an empty sequence.
    """
    if origin not in (CODE, NATURAL_LANGUAGE):
        raise ValueError(f"unknown token origin {origin!r}")
    if origin == NATURAL_LANGUAGE:
        text = (text or "").lower()
    return TokenSequence(tokens=tuple(_TOKEN_RE.findall(text or "")), origin=origin)


def _require_tokens(*sequences):
    for seq in sequences:
        if not seq.tokens:
            raise EmptyInput("metric input has no tokens")


def stem(word):
    for suffix in _STEM_SUFFIXES:
        if word.endswith(suffix) and len(word) - len(suffix) >= 3:
            return word[: -len(suffix)]
    return word


def _ngram_counts(tokens, n):
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate, reference):
    """Sentence BLEU: geometric mean of modified 1-4 gram precisions times
    the brevity penalty.

    The i-th zero-count precision encountered (i starting at 1) is replaced
    by 1 / (2**i * (k / ln(len(candidate)))) with k=5, provided the candidate
    has more than one token; a zero precision that survives smoothing makes
    the score 0.
    """
    _require_tokens(candidate, reference)
    cand, ref = candidate.tokens, reference.tokens
    precisions = []
    for n in range(1, BLEU_MAX_ORDER + 1):
        cand_counts = _ngram_counts(cand, n)
        ref_counts = _ngram_counts(ref, n)
        clipped = sum(min(count, ref_counts[gram]) for gram, count in cand_counts.items())
        total = max(1, len(cand) - n + 1)
        precisions.append((clipped, total))
    values = []
    zeros = 0
    for clipped, total in precisions:
        if clipped == 0:
            if len(cand) > 1:
                zeros += 1
                values.append(1.0 / (2.0 ** zeros * (BLEU_SMOOTHING_K / math.log(len(cand)))))
            else:
                values.append(0.0)
        else:
            values.append(clipped / total)
    if any(v == 0.0 for v in values):
        return 0.0
    if len(cand) > len(ref):
        brevity = 1.0
    else:
        brevity = math.exp(1.0 - len(ref) / len(cand))
    return brevity * math.exp(sum(math.log(v) for v in values) / BLEU_MAX_ORDER)


def _f1(precision, recall):
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _lcs_length(a, b):
    if len(b) > len(a):
        a, b = b, a
    previous = [0] * (len(b) + 1)
    for x in a:
        current = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[-1]


def rouge(candidate, reference):
    """(ROUGE-1 F1, ROUGE-L F1) with clipped unigram counts and plain LCS."""
    _require_tokens(candidate, reference)
    cand, ref = candidate.tokens, reference.tokens
    cand_counts = Counter(cand)
    ref_counts = Counter(ref)
    matches = sum(min(count, ref_counts[tok]) for tok, count in cand_counts.items())
    rouge1 = _f1(matches / len(cand), matches / len(ref))
    lcs = _lcs_length(cand, ref)
    rouge_l = _f1(lcs / len(cand), lcs / len(ref))
    return rouge1, rouge_l


def _align(candidate, reference):
    """Two-stage greedy unigram alignment: exact surface forms first, then
    stems of the leftovers. Candidate tokens are walked left to right; each
    takes the leftmost unused reference token with an equal key."""
    matches = []
    cand_free = list(range(len(candidate)))
    ref_free = list(range(len(reference)))
    for key in (lambda w: w, stem):
        still_free = []
        for i in cand_free:
            target = key(candidate[i])
            hit = None
            for pos, j in enumerate(ref_free):
                if key(reference[j]) == target:
                    hit = pos
                    break
            if hit is None:
                still_free.append(i)
            else:
                matches.append((i, ref_free.pop(hit)))
        cand_free = still_free
    return sorted(matches)


def meteor(candidate, reference):
    """Alignment-based F-mean with a fragmentation penalty.

    F = P*R / (alpha*P + (1-alpha)*R); penalty = gamma * (chunks/matches)**beta;
    score = F * (1 - penalty). Zero matches score 0.
    """
    _require_tokens(candidate, reference)
    matches = _align(candidate.tokens, reference.tokens)
    m = len(matches)
    if m == 0:
        return 0.0
    precision = m / len(candidate.tokens)
    recall = m / len(reference.tokens)
    f_mean = precision * recall / (METEOR_ALPHA * precision + (1.0 - METEOR_ALPHA) * recall)
    chunks = 1
    for (ci, ri), (cj, rj) in zip(matches, matches[1:]):
        if cj != ci + 1 or rj != ri + 1:
            chunks += 1
    penalty = METEOR_GAMMA * (chunks / m) ** METEOR_BETA
    return f_mean * (1.0 - penalty)


def cer(code, candidate, reference):
    """Common-entity recall.

    Share of the unigrams common to code and reference that the candidate
    also produces: |code ∩ cand ∩ ref| / |code ∩ ref|, matched
    case-insensitively so identifiers meet their lowercased mentions.
    Returns None when code and reference share no unigrams.
    """
    code_set = {t.lower() for t in code.tokens}
    cand_set = {t.lower() for t in candidate.tokens}
    ref_set = {t.lower() for t in reference.tokens}
    denominator = code_set & ref_set
    if not denominator:
        return None
    return len(denominator & cand_set) / len(denominator)


# --- embedding-based scores ----------------------------------------------------

@dataclass
class EmbeddingProvider:
    name: str
    dimension: int
    embed: Callable[[Sequence[str]], list]


def embedding_score(candidate, reference, provider):
    """Cosine of the mean per-token embedding vectors of the two sides."""
    _require_tokens(candidate, reference)
    cand_vectors = _provider_vectors(provider, candidate.tokens)
    ref_vectors = _provider_vectors(provider, reference.tokens)
    cand_mean = np.asarray(cand_vectors, dtype=np.float64).mean(axis=0)
    ref_mean = np.asarray(ref_vectors, dtype=np.float64).mean(axis=0)
    denom = np.linalg.norm(cand_mean) * np.linalg.norm(ref_mean)
    if denom == 0.0:
        raise ProviderError(f"provider {provider.name!r} produced a zero mean vector")
    return float(np.dot(cand_mean, ref_mean) / denom)


def _provider_vectors(provider, tokens):
    try:
        vectors = provider.embed(list(tokens))
    except Exception as exc:
        if isinstance(exc, ProviderError):
            raise
        raise ProviderError(f"provider {provider.name!r} failed: {exc}") from exc
    if len(vectors) != len(tokens):
        raise ProviderError(
            f"provider {provider.name!r} returned {len(vectors)} vectors for {len(tokens)} tokens"
        )
    for v in vectors:
        if len(v) != provider.dimension:
            raise ProviderError(f"provider {provider.name!r} vector dimension != {provider.dimension}")
    return vectors


def http_embedding_provider(name, endpoint, dimension, timeout_seconds=30.0):
    """Provider backed by POST {endpoint}/embed with {"tokens": [...]}."""
    client = httpx.Client(timeout=timeout_seconds)
    url = endpoint.rstrip("/") + "/embed"

    def embed(tokens):
        try:
            response = client.post(url, json={"tokens": list(tokens)})
        except httpx.HTTPError as exc:
            raise ProviderError(f"embedding endpoint unreachable: {exc}") from exc
        if response.status_code != 200:
            raise MalformedResponse(f"embedding endpoint returned {response.status_code}")
        body = response.json()
        vectors = body.get("vectors") if isinstance(body, dict) else None
        if not isinstance(vectors, list):
            raise MalformedResponse("embedding response missing 'vectors'")
        return vectors

    return EmbeddingProvider(name=name, dimension=dimension, embed=embed)


def serializing_provider(provider):
    """Wrap a provider so concurrent callers take turns."""
    lock = threading.Lock()
    inner = provider.embed

    def embed(tokens):
        with lock:
            return inner(tokens)

    return EmbeddingProvider(name=provider.name, dimension=provider.dimension, embed=embed)


# --- corpus evaluation ----------------------------------------------------------

METRIC_FIELDS = (
    "rouge1_f",
    "rougeL_f",
    "bleu",
    "cer",
    "meteor",
    "bertscore_like",
    "codebertscore_like",
)

# Table-style display scaling: BLEU/METEOR and the embedding cosines are
# conventionally shown x100, ROUGE and CER as fractions.
DISPLAY_SCALE = {
    "rouge1_f": 1.0,
    "rougeL_f": 1.0,
    "bleu": 100.0,
    "cer": 1.0,
    "meteor": 100.0,
    "bertscore_like": 100.0,
    "codebertscore_like": 100.0,
}


def score_pair(code_text, candidate_text, reference_text, nl_provider=None, code_provider=None):
    """All seven metrics for one candidate/reference pair. Raises EmptyInput
    when either text tokenizes to nothing."""
    candidate = tokenize(candidate_text, NATURAL_LANGUAGE)
    reference = tokenize(reference_text, NATURAL_LANGUAGE)
    _require_tokens(candidate, reference)
    code_tokens = tokenize(code_text, CODE)
    rouge1, rouge_l = rouge(candidate, reference)
    report = {
        "rouge1_f": rouge1,
        "rougeL_f": rouge_l,
        "bleu": bleu(candidate, reference),
        "cer": cer(code_tokens, candidate, reference),
        "meteor": meteor(candidate, reference),
        "bertscore_like": None,
        "codebertscore_like": None,
    }
    if nl_provider is not None:
        report["bertscore_like"] = embedding_score(candidate, reference, nl_provider)
    if code_provider is not None:
        report["codebertscore_like"] = embedding_score(candidate, reference, code_provider)
    return report


def evaluate_corpus(pairs, candidate_rows, nl_provider=None, code_provider=None):
    """Per-pair metric reports plus one aggregate per system.

    ``pairs`` supplies references and code; ``candidate_rows`` are mappings
    with pair_id, candidate and system. Rows whose candidate or reference is
    empty are excluded from aggregation and counted per system.
    """
    by_id = {p.pair_id: p for p in pairs}
    per_pair = []
    sums = {}
    for row in candidate_rows:
        pair = by_id.get(row["pair_id"])
        if pair is None:
            raise DocmineError(f"candidate references unknown pair_id {row['pair_id']!r}")
        system = row.get("system", "default")
        bucket = sums.setdefault(
            system,
            {
                "totals": {f: 0.0 for f in METRIC_FIELDS},
                "counts": {f: 0 for f in METRIC_FIELDS},
                "pairs": 0,
                "excluded_empty": 0,
            },
        )
        try:
            scores = score_pair(
                pair.unit.code_text,
                row["candidate"],
                pair.unit.docstring or "",
                nl_provider=nl_provider,
                code_provider=code_provider,
            )
        except EmptyInput:
            bucket["excluded_empty"] += 1
            per_pair.append({"pair_id": pair.pair_id, "system": system, "empty_input": True,
                             **{f: None for f in METRIC_FIELDS}})
            continue
        bucket["pairs"] += 1
        for field in METRIC_FIELDS:
            value = scores[field]
            if value is not None:
                bucket["totals"][field] += value
                bucket["counts"][field] += 1
        per_pair.append({"pair_id": pair.pair_id, "system": system, "empty_input": False, **scores})

    aggregates = []
    for system in sorted(sums):
        bucket = sums[system]
        row = {"system": system, "pairs": bucket["pairs"], "excluded_empty": bucket["excluded_empty"]}
        for field in METRIC_FIELDS:
            count = bucket["counts"][field]
            row[field] = bucket["totals"][field] / count if count else None
            row[f"{field}_scored"] = count
        aggregates.append(row)
    return per_pair, aggregates


def aggregate_table_rows(aggregates):
    """Aggregate rows rescaled to the usual table conventions."""
    rows = []
    for agg in aggregates:
        row = {"system": agg["system"]}
        for field in METRIC_FIELDS:
            value = agg[field]
            row[field] = None if value is None else value * DISPLAY_SCALE[field]
        row["pairs"] = agg["pairs"]
        row["excluded_empty"] = agg["excluded_empty"]
        rows.append(row)
    return rows
