"""Annotation campaign logic: records, validation, assignments, persistence.

Two protocols are served. The three-step protocol scores one code/docstring
pair on general adequacy (step 1, always applicable), branch-block coverage
(step 2, only for pairs with outer-level branch blocks) and coherence
(step 3, optional), each 0-3, with span links tying docstring text to code
lines. The blind evaluation protocol shows one function with every system's
candidate docstring plus the human-written one, identities hidden behind
shuffled labels, and collects four 0-4 aspect ratings per candidate.

Persistence is a single append-only JSON-lines log replayed on startup;
resubmissions append a fresh event and the latest record per key wins.
"""

import datetime as _dt
import random
import threading
from dataclasses import dataclass, field
from pathlib import Path

from . import jsonl
from .errors import NotAssigned, UnknownAnnotator, ValidationError

SCHEMA_VERSION = 1
PROTOCOL_ANNOTATE = "annotate3step"
PROTOCOL_EVAL = "eval4aspect"
REFERENCE_SYSTEM = "reference"
ASPECT_COUNT = 4


def _now_iso():
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


# --- record validation ----------------------------------------------------------

def _int_in_range(errors, payload, name, low, high, required, key=None):
    key = key or name
    value = payload.get(name)
    if value is None:
        if required:
            errors[key] = "required"
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        errors[key] = "must be an integer"
        return None
    if not low <= value <= high:
        errors[key] = f"must lie in {low}..{high}"
        return None
    return value


def validate_annotation(payload, pair_record):
    """Check a three-step submission against the pair it annotates.

    Returns the canonical record dict. pair_record is the stored JSON pair
    (code line bounds, docstring, branch flag).
    """
    errors = {}
    step1 = _int_in_range(errors, payload, "step1", 0, 3, required=True)
    step2 = _int_in_range(errors, payload, "step2", 0, 3, required=bool(pair_record["has_branch_blocks"]))
    step3 = _int_in_range(errors, payload, "step3", 0, 3, required=False)
    if step2 is not None and not pair_record["has_branch_blocks"]:
        errors["step2"] = "not applicable: pair has no outer-level branch blocks"

    code_text = pair_record["signature"] + ("\n" + pair_record["body_code"] if pair_record["body_code"] else "")
    code_lines = len(code_text.splitlines())
    doc_length = len(pair_record["docstring"] or "")
    span_links = payload.get("span_links") or []
    clean_links = []
    if not isinstance(span_links, list):
        errors["span_links"] = "must be a list"
    else:
        for i, link in enumerate(span_links):
            code_span = link.get("code_span") if isinstance(link, dict) else None
            doc_span = link.get("doc_span") if isinstance(link, dict) else None
            if (
                not isinstance(code_span, (list, tuple))
                or len(code_span) != 2
                or not all(isinstance(v, int) for v in code_span)
            ):
                errors[f"span_links[{i}].code_span"] = "must be [start_line, end_line]"
                continue
            if (
                not isinstance(doc_span, (list, tuple))
                or len(doc_span) != 2
                or not all(isinstance(v, int) for v in doc_span)
            ):
                errors[f"span_links[{i}].doc_span"] = "must be [char_start, char_end]"
                continue
            s, e = code_span
            if not (1 <= s <= e <= code_lines):
                errors[f"span_links[{i}].code_span"] = f"lines must satisfy 1 <= start <= end <= {code_lines}"
            cs, ce = doc_span
            if not (0 <= cs < ce <= doc_length):
                errors[f"span_links[{i}].doc_span"] = f"offsets must satisfy 0 <= start < end <= {doc_length}"
            clean_links.append({"code_span": [s, e], "doc_span": [cs, ce]})
    if errors:
        raise ValidationError(errors)
    return {
        "pair_id": pair_record["pair_id"],
        "annotator_id": payload["annotator_id"],
        "step1": step1,
        "step2": step2,
        "step3": step3,
        "span_links": clean_links,
        "timestamp": payload.get("timestamp") or _now_iso(),
        "schema_version": SCHEMA_VERSION,
    }


def validate_rating(payload, assignment):
    """Check a blind-evaluation submission covering one whole assignment.

    The payload rates every blinded label exactly once; aspect scores are
    0-4 integers. Returns one unblinded record per candidate.
    """
    errors = {}
    ratings = payload.get("ratings")
    if not isinstance(ratings, list):
        raise ValidationError({"ratings": "must be a list"})
    expected = {c.label for c in assignment.candidates}
    seen = {}
    for i, rating in enumerate(ratings):
        if not isinstance(rating, dict):
            errors[f"ratings[{i}]"] = "must be an object"
            continue
        label = rating.get("label")
        if label not in expected:
            errors[f"ratings[{i}].label"] = "unknown label"
            continue
        if label in seen:
            errors[f"ratings[{i}].label"] = "duplicate label"
            continue
        scores = {}
        for aspect in ("a1", "a2", "a3", "a4"):
            scores[aspect] = _int_in_range(
                errors, rating, aspect, 0, 4, required=True, key=f"ratings[{i}].{aspect}"
            )
        seen[label] = scores
    missing = expected - set(seen)
    if missing:
        errors["ratings"] = f"missing labels: {', '.join(sorted(missing))}"
    if errors:
        raise ValidationError(errors)

    by_label = {c.label: c for c in assignment.candidates}
    timestamp = payload.get("timestamp") or _now_iso()
    records = []
    for label in sorted(seen):
        scores = seen[label]
        overall = (scores["a1"] + scores["a2"] + scores["a3"] + scores["a4"]) / 4
        records.append(
            {
                "example_id": assignment.example_id,
                "system_id": by_label[label].system_id,
                "annotator_id": payload["annotator_id"],
                "a1": scores["a1"],
                "a2": scores["a2"],
                "a3": scores["a3"],
                "a4": scores["a4"],
                "overall": overall,
                "timestamp": timestamp,
                "schema_version": SCHEMA_VERSION,
            }
        )
    return records


# --- blind assignments ----------------------------------------------------------

@dataclass(frozen=True)
class BlindCandidate:
    label: str
    system_id: str
    text: str


@dataclass
class EvalAssignment:
    annotator_id: str
    example_id: str
    candidates: list

    @property
    def labels(self):
        return [c.label for c in self.candidates]


def _label_for(index):
    # A..Z, then A1, B1, ... for absurdly many systems
    letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if index < len(letters):
        return letters[index]
    return letters[index % len(letters)] + str(index // len(letters))


def build_assignments(examples, system_candidates, annotators, seed, overlap=1):
    """Blind, shuffled eval assignments, deterministic under the seed.

    examples: iterable of (example_id, reference_text); system_candidates:
    {system_id: {example_id: candidate_text}}. Every example goes to exactly
    one annotator (round-robin over a seeded annotator order) unless overlap
    asks for more raters per example. Candidates are every system's text
    plus the reference, shuffled per assignment, labelled by position.
    """
    examples = sorted(examples)
    annotators = sorted(set(annotators))
    systems = sorted(system_candidates)
    if not examples or not annotators:
        return []
    overlap = max(1, min(overlap, len(annotators)))
    rng = random.Random(seed)
    annotator_order = annotators[:]
    rng.shuffle(annotator_order)

    assignments = []
    for i, (example_id, reference_text) in enumerate(examples):
        entries = [(system, system_candidates[system].get(example_id, "")) for system in systems]
        entries.append((REFERENCE_SYSTEM, reference_text))
        for k in range(overlap):
            annotator = annotator_order[(i + k) % len(annotator_order)]
            shuffled = entries[:]
            rng.shuffle(shuffled)
            candidates = [
                BlindCandidate(label=_label_for(pos), system_id=system, text=text)
                for pos, (system, text) in enumerate(shuffled)
            ]
            assignments.append(
                EvalAssignment(annotator_id=annotator, example_id=example_id, candidates=candidates)
            )
    return assignments


def expected_score_count(assignments):
    return sum(len(a.candidates) * ASPECT_COUNT for a in assignments)


# --- append-only persistence ------------------------------------------------------

class AnnotationStore:
    """Durable record store over a single append-only JSON-lines log.

    Appends are serialized by a lock and flushed before they are
    acknowledged; the constructor replays the log so restarts lose nothing.
    The latest event per logical key wins (resubmission replaces).
    """

    def __init__(self, log_path):
        self._path = Path(log_path)
        self._lock = threading.Lock()
        self._revision = 0
        self._annotations = {}
        self._ratings = {}
        if self._path.exists():
            self._replay()

    def _replay(self):
        for event in jsonl.read_records(self._path):
            self._apply(event)
            self._revision = max(self._revision, event["revision"])

    def _apply(self, event):
        record = event["record"]
        if event["kind"] == "annotation":
            self._annotations[(record["pair_id"], record["annotator_id"])] = (event["revision"], record)
        else:
            key = (record["example_id"], record["system_id"], record["annotator_id"])
            self._ratings[key] = (event["revision"], record)

    def _append(self, kind, record):
        with self._lock:
            self._revision += 1
            event = {"revision": self._revision, "kind": kind, "record": record}
            self._path.parent.mkdir(parents=True, exist_ok=True)
            with open(self._path, "a", encoding="utf-8") as fh:
                fh.write(jsonl.dumps(event))
                fh.write("\n")
                fh.flush()
            self._apply(event)
            return self._revision

    def append_annotation(self, record):
        replaced = (record["pair_id"], record["annotator_id"]) in self._annotations
        return self._append("annotation", record), replaced

    def append_rating(self, record):
        key = (record["example_id"], record["system_id"], record["annotator_id"])
        replaced = key in self._ratings
        return self._append("rating", record), replaced

    def annotations(self):
        return [rec for _, rec in sorted(self._annotations.values(), key=lambda t: t[0])]

    def ratings(self):
        return [rec for _, rec in sorted(self._ratings.values(), key=lambda t: t[0])]

    def annotation_keys(self):
        return set(self._annotations)

    def rating_keys(self):
        return set(self._ratings)

    def compact(self):
        """Rewrite the log keeping only the latest event per key."""
        with self._lock:
            events = []
            for revision, record in sorted(self._annotations.values(), key=lambda t: t[0]):
                events.append({"revision": revision, "kind": "annotation", "record": record})
            for revision, record in sorted(self._ratings.values(), key=lambda t: t[0]):
                events.append({"revision": revision, "kind": "rating", "record": record})
            events.sort(key=lambda e: e["revision"])
            tmp = self._path.with_suffix(self._path.suffix + ".compact")
            with open(tmp, "w", encoding="utf-8") as fh:
                for event in events:
                    fh.write(jsonl.dumps(event))
                    fh.write("\n")
            tmp.replace(self._path)
            return len(events)


# --- campaign service --------------------------------------------------------------

@dataclass
class Campaign:
    """In-memory campaign state shared by the HTTP layer and the CLI."""

    store: AnnotationStore
    annotators: list
    pair_records: list = field(default_factory=list)  # three-step queue, in order
    assignments: list = field(default_factory=list)

    def __post_init__(self):
        self._pairs_by_id = {p["pair_id"]: p for p in self.pair_records}
        self._assignments_by_annotator = {}
        for assignment in self.assignments:
            self._assignments_by_annotator.setdefault(assignment.annotator_id, []).append(assignment)

    def _check_annotator(self, annotator_id):
        if annotator_id not in self.annotators:
            raise UnknownAnnotator(f"unknown annotator {annotator_id!r}")

    def pair_record(self, pair_id):
        return self._pairs_by_id.get(pair_id)

    # -- next / progress

    def next_item(self, annotator_id, protocol):
        self._check_annotator(annotator_id)
        if protocol == PROTOCOL_ANNOTATE:
            done_keys = self.store.annotation_keys()
            for index, record in enumerate(self.pair_records):
                if (record["pair_id"], annotator_id) not in done_keys:
                    return {"index": index, "total": len(self.pair_records), "pair": record}
            return None
        if protocol == PROTOCOL_EVAL:
            mine = self._assignments_by_annotator.get(annotator_id, [])
            for index, assignment in enumerate(mine):
                if not self._assignment_done(assignment):
                    return {"index": index, "total": len(mine), "assignment": assignment}
            return None
        raise ValueError(f"unknown protocol {protocol!r}")

    def _assignment_done(self, assignment):
        rated = self.store.rating_keys()
        return all(
            (assignment.example_id, c.system_id, assignment.annotator_id) in rated
            for c in assignment.candidates
        )

    def progress(self, annotator_id=None):
        annotators = [annotator_id] if annotator_id else self.annotators
        for annotator in annotators:
            self._check_annotator(annotator)
        out = {}
        annotated = self.store.annotation_keys()
        for annotator in annotators:
            done_pairs = sum(
                1 for record in self.pair_records if (record["pair_id"], annotator) in annotated
            )
            mine = self._assignments_by_annotator.get(annotator, [])
            done_evals = sum(1 for a in mine if self._assignment_done(a))
            out[annotator] = {
                PROTOCOL_ANNOTATE: {"done": done_pairs, "total": len(self.pair_records)},
                PROTOCOL_EVAL: {"done": done_evals, "total": len(mine)},
            }
        return out

    # -- submissions

    def submit_annotation(self, payload):
        annotator_id = payload.get("annotator_id", "")
        self._check_annotator(annotator_id)
        pair = self.pair_record(payload.get("pair_id", ""))
        if pair is None:
            raise NotAssigned(f"pair {payload.get('pair_id')!r} is not in this campaign")
        record = validate_annotation(payload, pair)
        revision, replaced = self.store.append_annotation(record)
        return {"ok": True, "revision": revision, "replaced": replaced}

    def submit_rating(self, payload):
        annotator_id = payload.get("annotator_id", "")
        self._check_annotator(annotator_id)
        example_id = payload.get("example_id", "")
        assignment = next(
            (
                a
                for a in self._assignments_by_annotator.get(annotator_id, [])
                if a.example_id == example_id
            ),
            None,
        )
        if assignment is None:
            raise NotAssigned(f"example {example_id!r} is not assigned to {annotator_id!r}")
        records = validate_rating(payload, assignment)
        revisions = []
        replaced_any = False
        for record in records:
            revision, replaced = self.store.append_rating(record)
            revisions.append(revision)
            replaced_any = replaced_any or replaced
        unblinded = {c.label: c.system_id for c in assignment.candidates}
        return {"ok": True, "revisions": revisions, "replaced": replaced_any, "systems": unblinded}

    # -- exports

    def export_records(self, protocol, aggregate=False):
        if protocol == PROTOCOL_ANNOTATE:
            if not aggregate:
                return list(self.store.annotations())
            return self._aggregate_annotations()
        if protocol == PROTOCOL_EVAL:
            return list(self.store.ratings())
        raise ValueError(f"unknown protocol {protocol!r}")

    def _aggregate_annotations(self):
        grouped = {}
        for record in self.store.annotations():
            grouped.setdefault(record["pair_id"], []).append(record)
        rows = []
        for record in self.pair_records:
            pair_id = record["pair_id"]
            if pair_id not in grouped:
                continue
            bucket = grouped[pair_id]
            row = {"pair_id": pair_id, "annotations": len(bucket)}
            for step in ("step1", "step2", "step3"):
                values = [r[step] for r in bucket if r[step] is not None]
                row[f"{step}_mean"] = sum(values) / len(values) if values else None
            rows.append(row)
        return rows
