"""Rule-based and score-based pair filtering.

The rule filter keeps pairs whose code line count falls in [min, max], whose
docstring is longer than the doc-line floor, and whose cyclomatic complexity
exceeds the complexity floor. The score filter keeps pairs whose step-1 and
step-2 quality scores strictly exceed their thresholds on the raw 0-3 scale;
pairs without outer-level branch blocks are exempt from the step-2 check.

Scores come either from a remote scorer over HTTP or from the deterministic
heuristic baseline below. The heuristic formula is documented in the README
and frozen by golden tests; it stands in for a learned scorer, nothing more.
"""

import ast
import re
import time
from dataclasses import dataclass

import httpx

from .errors import MalformedResponse, ScaleMismatch, ScorerUnavailable

RAW_SCALE = "raw"
NORMALIZED_SCALE = "normalized"

_WORD_RE = re.compile(r"\w+", re.UNICODE)


@dataclass
class RuleFilterConfig:
    min_code_lines: int = 6
    max_code_lines: int = 30
    min_doc_lines_exclusive: int = 3
    min_complexity_exclusive: int = 3

    def __post_init__(self):
        if self.min_code_lines > self.max_code_lines:
            raise ValueError("min_code_lines must be <= max_code_lines")
        for name in ("min_code_lines", "max_code_lines", "min_doc_lines_exclusive", "min_complexity_exclusive"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass
class ScoreFilterConfig:
    step1_threshold_raw: float = 1.0
    step2_threshold_raw: float = 1.0

    def __post_init__(self):
        for name in ("step1_threshold_raw", "step2_threshold_raw"):
            value = getattr(self, name)
            if not 0.0 <= value <= 3.0:
                raise ValueError(f"{name} must lie in [0, 3]")


@dataclass
class QualityScores:
    """Step 1-3 ratings, raw (0-3) or normalized (0-1).

    step1 is always present; step2 is blank for code without outer-level
    branch blocks; step3 is carried through but never used for filtering.
    """

    step1: float
    step2: float | None = None
    step3: float | None = None
    scale: str = RAW_SCALE

    def _bounds(self):
        return (0.0, 3.0) if self.scale == RAW_SCALE else (0.0, 1.0)

    def validate(self):
        if self.scale not in (RAW_SCALE, NORMALIZED_SCALE):
            raise ScaleMismatch(f"unknown scale marker {self.scale!r}")
        low, high = self._bounds()
        for name in ("step1", "step2", "step3"):
            value = getattr(self, name)
            if value is None:
                continue
            if not low <= value <= high:
                raise ScaleMismatch(f"{name}={value} outside [{low}, {high}] for scale {self.scale!r}")
        return self

    def to_raw(self):
        if self.scale == RAW_SCALE:
            return self
        self.validate()
        return QualityScores(
            step1=denormalize(self.step1),
            step2=None if self.step2 is None else denormalize(self.step2),
            step3=None if self.step3 is None else denormalize(self.step3),
            scale=RAW_SCALE,
        )

    def to_normalized(self):
        if self.scale == NORMALIZED_SCALE:
            return self
        self.validate()
        return QualityScores(
            step1=normalize(self.step1),
            step2=None if self.step2 is None else normalize(self.step2),
            step3=None if self.step3 is None else normalize(self.step3),
            scale=NORMALIZED_SCALE,
        )


def normalize(raw):
    return raw / 3.0


def denormalize(value):
    return value * 3.0


def rule_filter(pair, cfg):
    unit = pair.unit
    return (
        cfg.min_code_lines <= unit.code_line_count <= cfg.max_code_lines
        and unit.doc_line_count > cfg.min_doc_lines_exclusive
        and unit.complexity > cfg.min_complexity_exclusive
    )


def score_filter(pair, scores, cfg):
    """Keep iff raw step1 > threshold and step2 passes or is exempt.

    Comparisons are strict; a score exactly at the threshold rejects. A
    missing step2 passes vacuously only when the pair has no outer-level
    branch blocks.
    """
    raw = scores.to_raw().validate()
    if not raw.step1 > cfg.step1_threshold_raw:
        return False
    if raw.step2 is None:
        return not pair.unit.has_branch_blocks
    return raw.step2 > cfg.step2_threshold_raw


# --- heuristic baseline scorer ------------------------------------------------

# step1 = 0.5 * min(1, 3 * identifier-overlap) + 0.5 * min(1, doc_words / 40)
# step2 = branch-coverage fraction * min(1, doc_words / 20), blank when the
#         code has no outer-level branch blocks.
# Documented in README.md ("Heuristic scorer"); changing it breaks goldens.

def _words(text):
    return _WORD_RE.findall(text or "")


def heuristic_score(pair):
    unit = pair.unit
    doc_words = [w.lower() for w in _words(unit.docstring or "")]
    doc_set = set(doc_words)
    code_set = {w.lower() for w in _words(unit.code_text)}

    if not doc_words:
        step1 = 0.0
    else:
        overlap = len(doc_set & code_set) / len(code_set) if code_set else 0.0
        length_factor = min(1.0, len(doc_words) / 40.0)
        step1 = 0.5 * min(1.0, 3.0 * overlap) + 0.5 * length_factor

    if not unit.has_branch_blocks:
        step2 = None
    else:
        coverage = branch_coverage_fraction(unit, doc_set)
        step2 = coverage * min(1.0, len(doc_words) / 20.0)

    return QualityScores(step1=step1, step2=step2, scale=NORMALIZED_SCALE).validate()


def branch_coverage_fraction(unit, doc_word_set=None):
    """Fraction of outer-level branch blocks whose condition identifiers are
    mentioned in the docstring. Returns 0.0 when no block is mentioned."""
    if doc_word_set is None:
        doc_word_set = {w.lower() for w in _words(unit.docstring or "")}
    blocks = _outer_branch_identifiers(unit)
    if not blocks:
        return 0.0
    covered = sum(1 for idents in blocks if idents & doc_word_set)
    return covered / len(blocks)


def _outer_branch_identifiers(unit):
    """Identifier sets for each outer-level if/try block of the unit.

    For an if block: names appearing in its test expression. For a try
    block: the exception type names of its except clauses.
    """
    try:
        tree = ast.parse(_dedent_for_parse(unit.code_text))
    except SyntaxError:
        return []
    func = next(
        (n for n in ast.walk(tree) if isinstance(n, (ast.FunctionDef, ast.AsyncFunctionDef))),
        None,
    )
    if func is None:
        return []
    blocks = []
    for stmt in func.body:
        if isinstance(stmt, ast.If):
            blocks.append({n.id.lower() for n in ast.walk(stmt.test) if isinstance(n, ast.Name)})
        elif isinstance(stmt, ast.Try):
            names = set()
            for handler in stmt.handlers:
                if handler.type is not None:
                    names.update(
                        n.id.lower() for n in ast.walk(handler.type) if isinstance(n, ast.Name)
                    )
            blocks.append(names)
    return blocks


def _dedent_for_parse(code):
    lines = code.splitlines()
    indents = [len(ln) - len(ln.lstrip()) for ln in lines if ln.strip()]
    shift = min(indents) if indents else 0
    return "\n".join(ln[shift:] if len(ln) >= shift else ln for ln in lines)


# --- remote scorer client -----------------------------------------------------

@dataclass
class RemoteScorerConfig:
    endpoint: str
    max_batch_size: int = 64
    max_retries: int = 3
    backoff_seconds: float = 0.2
    timeout_seconds: float = 30.0


def remote_score(pairs, config, client=None, sleep=time.sleep):
    """Score a batch of pairs via HTTP POST {endpoint}/score.

    Returns one normalized QualityScores per input, in input order. Retries
    with exponential backoff; exhausting retries raises ScorerUnavailable,
    a schema-violating reply raises MalformedResponse. The whole batch
    aborts on error; pairs are never silently dropped.
    """
    pairs = list(pairs)
    if not pairs:
        return []
    if len(pairs) > config.max_batch_size:
        results = []
        for i in range(0, len(pairs), config.max_batch_size):
            results.extend(remote_score(pairs[i : i + config.max_batch_size], config, client, sleep))
        return results

    payload = {
        "pairs": [
            {"code": p.unit.code_text, "docstring": p.unit.docstring or ""} for p in pairs
        ]
    }
    owns_client = client is None
    if owns_client:
        client = httpx.Client(timeout=config.timeout_seconds)
    try:
        response = _post_with_retries(client, config, payload, sleep)
    finally:
        if owns_client:
            client.close()
    return _parse_score_response(response, len(pairs))


def _post_with_retries(client, config, payload, sleep):
    url = config.endpoint.rstrip("/") + "/score"
    last_error = None
    for attempt in range(config.max_retries + 1):
        if attempt:
            sleep(config.backoff_seconds * (2 ** (attempt - 1)))
        try:
            response = client.post(url, json=payload)
        except httpx.HTTPError as exc:
            last_error = exc
            continue
        if response.status_code >= 500:
            last_error = RuntimeError(f"server returned {response.status_code}")
            continue
        return response
    raise ScorerUnavailable(f"{url} unreachable after {config.max_retries + 1} attempts: {last_error}")


def _parse_score_response(response, expected):
    if response.status_code != 200:
        raise MalformedResponse(f"unexpected status {response.status_code}")
    try:
        body = response.json()
    except ValueError as exc:
        raise MalformedResponse("response is not JSON") from exc
    scores = body.get("scores") if isinstance(body, dict) else None
    if not isinstance(scores, list) or len(scores) != expected:
        raise MalformedResponse("response must carry one score object per input pair")
    results = []
    for i, item in enumerate(scores):
        if not isinstance(item, dict) or "step1" not in item:
            raise MalformedResponse(f"scores[{i}] missing step1")
        step1 = item["step1"]
        step2 = item.get("step2")
        for name, value in (("step1", step1), ("step2", step2)):
            if value is None:
                continue
            if not isinstance(value, (int, float)) or not 0.0 <= value <= 1.0:
                raise MalformedResponse(f"scores[{i}].{name} outside [0, 1]")
        results.append(QualityScores(step1=float(step1),
                                     step2=None if step2 is None else float(step2),
                                     scale=NORMALIZED_SCALE))
    return results


def scores_to_record(pair_id, scores):
    normalized = scores.to_normalized()
    return {
        "pair_id": pair_id,
        "step1": normalized.step1,
        "step2": normalized.step2,
        "step3": normalized.step3,
        "scale": NORMALIZED_SCALE,
    }


def scores_from_record(record):
    return QualityScores(
        step1=record["step1"],
        step2=record.get("step2"),
        step3=record.get("step3"),
        scale=record.get("scale", NORMALIZED_SCALE),
    )
