"""Near-duplicate detection via prefix-bounded Levenshtein distance.

Two texts are compared on their first ``prefix_chars`` characters; a
candidate is a duplicate of a target when the edit distance between the
prefixes is strictly below ``relative_threshold`` times the longer prefix.

Scanning a candidate against a large corpus uses two provably lossless
pre-filters before any DP runs: the length gap (distance >= |len(a)-len(b)|)
and a character-histogram bound (distance >= L1(hist_a, hist_b) / 2, since
one edit changes the histogram by at most two). Survivors get a banded DP
that computes the exact distance when it is below the duplicate bound.
"""

import math
from dataclasses import dataclass

import numpy as np

_SIG_BUCKETS = 64


@dataclass
class DedupConfig:
    prefix_chars: int = 300
    relative_threshold: float = 0.05
    field: str = "both"  # code | docstring | both

    def __post_init__(self):
        if self.prefix_chars < 1:
            raise ValueError("prefix_chars must be >= 1")
        if not 0.0 < self.relative_threshold < 1.0:
            raise ValueError("relative_threshold must lie strictly between 0 and 1")
        if self.field not in ("code", "docstring", "both"):
            raise ValueError("field must be one of code, docstring, both")


@dataclass
class DedupReport:
    candidate_id: str | None
    matched_corpus_id: str | None
    distance: int | None
    base_length: int | None
    is_duplicate: bool
    matched_field: str | None = None

    def as_record(self):
        return {
            "candidate_id": self.candidate_id,
            "matched_corpus_id": self.matched_corpus_id,
            "distance": self.distance,
            "base_length": self.base_length,
            "is_duplicate": self.is_duplicate,
            "matched_field": self.matched_field,
        }


def levenshtein(a, b):
    """Classic edit distance over Unicode scalar values."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(b) < len(a):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[-1]


def levenshtein_within(a, b, limit):
    """Exact distance when it is < limit, else None.

    Banded DP: cells with |i - j| >= limit cannot lie below the limit, so
    values are capped there; capping preserves every path whose true cost
    stays below the limit. Distances are integers, so a float limit is
    equivalent to the integer ceiling cap.
    """
    la, lb = len(a), len(b)
    if limit <= 0:
        return None
    if abs(la - lb) >= limit:
        return None
    if a == b:
        return 0
    cap = math.ceil(limit)
    previous = [min(j, cap) for j in range(lb + 1)]
    for i in range(1, la + 1):
        current = [cap] * (lb + 1)
        current[0] = min(i, cap)
        for j in range(max(1, i - cap), min(lb, i + cap) + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            value = min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost)
            current[j] = value if value < cap else cap
        previous = current
    distance = previous[lb]
    return distance if distance < limit else None


def is_duplicate(candidate, target, cfg, candidate_id=None, target_id=None):
    """Compare two texts under the prefix rule and report the verdict."""
    pa = candidate[: cfg.prefix_chars]
    pb = target[: cfg.prefix_chars]
    base = max(len(pa), len(pb))
    distance = levenshtein(pa, pb)
    duplicate = distance < cfg.relative_threshold * base
    return DedupReport(
        candidate_id=candidate_id,
        matched_corpus_id=target_id if duplicate else None,
        distance=distance,
        base_length=base,
        is_duplicate=duplicate,
    )


def _signature(prefix):
    codes = np.frombuffer(prefix.encode("utf-32-le"), dtype=np.uint32)
    return np.bincount(codes % _SIG_BUCKETS, minlength=_SIG_BUCKETS).astype(np.int32)


class CorpusIndex:
    """Immutable scan index over one text field of a corpus.

    Keeps prefixes, their lengths and character-histogram signatures; scans
    visit entries in insertion order so the first reported match is the same
    one an exhaustive scan would find.
    """

    def __init__(self, entries, prefix_chars):
        self.prefix_chars = prefix_chars
        self.ids = []
        self.prefixes = []
        sigs = []
        for entry_id, text in entries:
            prefix = text[:prefix_chars]
            self.ids.append(entry_id)
            self.prefixes.append(prefix)
            sigs.append(_signature(prefix))
        self.lengths = np.array([len(p) for p in self.prefixes], dtype=np.int64)
        self.sigs = (
            np.stack(sigs) if sigs else np.zeros((0, _SIG_BUCKETS), dtype=np.int32)
        )

    def __len__(self):
        return len(self.ids)

    def scan(self, candidate_text, relative_threshold, before=None):
        """First corpus entry the candidate duplicates, or None.

        Returns (corpus_id, distance, base_length). With ``before`` set,
        only entries at positions below it are considered, which lets a
        corpus be deduplicated against its own earlier entries.
        """
        if not self.ids:
            return None
        prefix = candidate_text[: self.prefix_chars]
        length = len(prefix)
        bases = np.maximum(self.lengths, length)
        bounds = relative_threshold * bases
        survivors = np.abs(self.lengths - length) < bounds
        if before is not None:
            survivors &= np.arange(len(self.ids)) < before
        if survivors.any():
            l1 = np.abs(self.sigs - _signature(prefix)).sum(axis=1)
            survivors &= (l1 / 2.0) < bounds
        for idx in np.flatnonzero(survivors):
            base = int(bases[idx])
            limit = relative_threshold * base
            distance = levenshtein_within(prefix, self.prefixes[idx], limit)
            if distance is not None:
                return self.ids[idx], distance, base
        return None


def build_indexes(corpus_pairs, cfg):
    """Per-field CorpusIndex map for the configured comparison fields."""
    fields = ("code", "docstring") if cfg.field == "both" else (cfg.field,)
    indexes = {}
    for field in fields:
        entries = []
        for pair in corpus_pairs:
            text = pair.unit.code_text if field == "code" else (pair.unit.docstring or "")
            entries.append((pair.pair_id, text))
        indexes[field] = CorpusIndex(entries, cfg.prefix_chars)
    return indexes


def dedup_against_corpus(candidates, indexes, cfg):
    """Yield one DedupReport per candidate pair.

    With field=both a candidate is a duplicate when either its code or its
    docstring matches some corpus entry; code is checked first.
    """
    fields = ("code", "docstring") if cfg.field == "both" else (cfg.field,)
    for pair in candidates:
        yield _scan_pair(pair, indexes, cfg, fields, before=None)


def self_dedup_reports(candidates, cfg):
    """Keep-first dedup of a pair stream against its own earlier entries."""
    candidates = list(candidates)
    indexes = build_indexes(candidates, cfg)
    fields = ("code", "docstring") if cfg.field == "both" else (cfg.field,)
    for position, pair in enumerate(candidates):
        yield _scan_pair(pair, indexes, cfg, fields, before=position)


def _scan_pair(pair, indexes, cfg, fields, before):
    for field in fields:
        text = pair.unit.code_text if field == "code" else (pair.unit.docstring or "")
        hit = indexes[field].scan(text, cfg.relative_threshold, before=before)
        if hit is not None:
            corpus_id, distance, base = hit
            return DedupReport(
                candidate_id=pair.pair_id,
                matched_corpus_id=corpus_id,
                distance=distance,
                base_length=base,
                is_duplicate=True,
                matched_field=field,
            )
    return DedupReport(
        candidate_id=pair.pair_id,
        matched_corpus_id=None,
        distance=None,
        base_length=None,
        is_duplicate=False,
    )
