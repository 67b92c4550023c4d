"""Extract function/docstring pairs from Python source trees.

Parses files with the stdlib ``ast`` grammar, finds every function and method
definition (nested ones included), splits off the docstring, and computes the
structural features the downstream filters consume: non-blank code line
count, trimmed docstring line count, cyclomatic complexity, and whether the
body has outer-level branch blocks.

The grammar is pluggable in principle; this module is the Python grammar.
"""

import ast
import hashlib
from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError, SchemaError
from . import jsonl

PAIR_FIELDS = (
    "pair_id",
    "repo_id",
    "path",
    "qualified_name",
    "signature",
    "body_code",
    "docstring",
    "start_line",
    "end_line",
    "code_line_count",
    "doc_line_count",
    "complexity",
    "has_branch_blocks",
    "repo_stars",
)


@dataclass(frozen=True)
class SourceFile:
    """One source file: relative forward-slash path, owning repo, full text."""

    path: str
    repo_id: str
    content: str

    def __post_init__(self):
        if not self.path:
            raise ValueError("SourceFile.path must be non-empty")
        if "\\" in self.path:
            raise ValueError("SourceFile.path must use forward slashes")


@dataclass
class FunctionUnit:
    qualified_name: str
    signature: str
    body_code: str
    docstring: str | None
    start_line: int
    end_line: int
    code_line_count: int
    doc_line_count: int
    complexity: int
    has_branch_blocks: bool

    @property
    def code_text(self):
        """The unit's code as displayed: signature plus docstring-free body."""
        if self.body_code:
            return self.signature + "\n" + self.body_code
        return self.signature


@dataclass
class CodeDocPair:
    pair_id: str
    repo_id: str
    path: str
    unit: FunctionUnit
    repo_stars: int | None = None


@dataclass
class RepoEntry:
    repo_id: str
    stars: int
    license: str
    root: str


@dataclass
class ExtractionSummary:
    files_seen: int = 0
    files_failed: int = 0
    functions_seen: int = 0
    pairs_emitted: int = 0

    def as_dict(self):
        return {
            "files_seen": self.files_seen,
            "files_failed": self.files_failed,
            "functions_seen": self.functions_seen,
            "pairs_emitted": self.pairs_emitted,
        }


def trim_docstring(raw):
    """Normalize a raw docstring literal.

    Tabs are expanded to 8 spaces, the first line is stripped, the common
    leading indentation of the remaining lines is removed, and leading and
    trailing blank lines are dropped.
    """
    if not raw:
        return ""
    lines = raw.expandtabs(8).splitlines()
    indent = None
    for line in lines[1:]:
        stripped = line.lstrip()
        if stripped:
            width = len(line) - len(stripped)
            indent = width if indent is None else min(indent, width)
    trimmed = [lines[0].strip()]
    if indent is not None:
        trimmed.extend(line[indent:].rstrip() for line in lines[1:])
    else:
        trimmed.extend(line.rstrip() for line in lines[1:])
    while trimmed and not trimmed[0]:
        trimmed.pop(0)
    while trimmed and not trimmed[-1]:
        trimmed.pop()
    return "\n".join(trimmed)


# Decision points: if/elif (each ast.If), for, while, each except clause,
# each boolean operator, each ternary, each assert, and each comprehension
# for/if clause. else/finally/with contribute nothing. Nested function
# bodies are excluded; they are scored on their own.
def cyclomatic_complexity(func_node):
    count = 1

    def visit(node, is_root=False):
        nonlocal count
        if not is_root and isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            return
        if isinstance(node, (ast.If, ast.IfExp, ast.For, ast.AsyncFor, ast.While, ast.Assert)):
            count += 1
        elif isinstance(node, ast.BoolOp):
            count += len(node.values) - 1
        elif isinstance(node, ast.ExceptHandler):
            count += 1
        elif isinstance(node, ast.comprehension):
            count += 1 + len(node.ifs)
        for child in ast.iter_child_nodes(node):
            visit(child)

    visit(func_node, is_root=True)
    return count


def _has_branch_blocks(func_node):
    return any(isinstance(stmt, (ast.If, ast.Try)) for stmt in func_node.body)


def _docstring_expr(func_node):
    first = func_node.body[0]
    if (
        isinstance(first, ast.Expr)
        and isinstance(first.value, ast.Constant)
        and isinstance(first.value.value, str)
    ):
        return first
    return None


def _line_offsets(content):
    offsets = [0]
    for line in content.splitlines(keepends=True):
        offsets.append(offsets[-1] + len(line))
    return offsets


def _build_unit(func_node, qualified_name, content, lines, offsets):
    dec_lines = [d.lineno for d in func_node.decorator_list]
    start_line = min([func_node.lineno] + dec_lines)
    end_line = func_node.end_lineno

    first_stmt = func_node.body[0]
    body_row, body_col = first_stmt.lineno, first_stmt.col_offset
    func_start = offsets[start_line - 1]
    func_end = offsets[end_line - 1] + len(lines[end_line - 1])
    body_abs = offsets[body_row - 1] + body_col
    signature = content[func_start:body_abs].rstrip()

    line_prefix = lines[body_row - 1][:body_col]
    doc_expr = _docstring_expr(func_node)
    raw_doc = doc_expr.value.value if doc_expr is not None else None

    if doc_expr is None:
        body_code = content[body_abs:func_end]
        if not line_prefix.strip():
            # re-attach the first statement's indentation
            body_code = line_prefix + body_code
    else:
        doc_end_abs = offsets[doc_expr.end_lineno - 1] + doc_expr.end_col_offset
        rest = content[doc_end_abs:func_end]
        newline = rest.find("\n")
        if newline != -1 and not rest[:newline].strip():
            rest = rest[newline + 1 :]
        elif not rest.strip():
            rest = ""
        body_code = rest

    code_line_count = _count_code_lines(lines, start_line, end_line, doc_expr)
    docstring = trim_docstring(raw_doc) if raw_doc is not None else None
    doc_line_count = len(docstring.splitlines()) if docstring else 0

    return FunctionUnit(
        qualified_name=qualified_name,
        signature=signature,
        body_code=body_code,
        docstring=docstring,
        start_line=start_line,
        end_line=end_line,
        code_line_count=code_line_count,
        doc_line_count=doc_line_count,
        complexity=cyclomatic_complexity(func_node),
        has_branch_blocks=_has_branch_blocks(func_node),
    )


def _count_code_lines(lines, start_line, end_line, doc_expr):
    """Non-blank physical lines of the unit, docstring lines excluded."""
    count = sum(1 for ln in lines[start_line - 1 : end_line] if ln.strip())
    if doc_expr is None:
        return count
    d0, c0 = doc_expr.lineno, doc_expr.col_offset
    d1, c1 = doc_expr.end_lineno, doc_expr.end_col_offset
    for row in range(d0, d1 + 1):
        line = lines[row - 1]
        if not line.strip():
            continue
        kept = ""
        if row == d0:
            kept += line[:c0]
        if row == d1:
            kept += line[c1:]
        if not kept.strip():
            count -= 1
    return count


class _DefinitionCollector(ast.NodeVisitor):
    def __init__(self):
        self.scope = []
        self.found = []

    def visit_ClassDef(self, node):
        self.scope.append(node.name)
        self.generic_visit(node)
        self.scope.pop()

    def _handle_def(self, node):
        qualified = ".".join(self.scope + [node.name])
        self.found.append((node, qualified))
        self.scope.append(node.name)
        self.generic_visit(node)
        self.scope.pop()

    visit_FunctionDef = _handle_def
    visit_AsyncFunctionDef = _handle_def


def parse_functions(file):
    """Return one FunctionUnit per def/async def in the file, nested included.

    Raises ParseError when the grammar cannot produce a tree; callers doing
    corpus runs catch it, log, and move on.
    """
    try:
        tree = ast.parse(file.content)
    except (SyntaxError, ValueError) as exc:
        line = getattr(exc, "lineno", None) or 0
        raise ParseError(file.path, line, str(exc)) from exc

    collector = _DefinitionCollector()
    collector.visit(tree)
    lines = file.content.splitlines()
    offsets = _line_offsets(file.content)
    units = [
        _build_unit(node, qualified, file.content, lines, offsets)
        for node, qualified in collector.found
    ]
    units.sort(key=lambda u: (u.start_line, u.qualified_name))
    return units


def pair_id_for(repo_id, path, qualified_name, start_line):
    key = "\x1f".join((repo_id, path, qualified_name, str(start_line)))
    return hashlib.sha256(key.encode("utf-8")).hexdigest()[:16]


def parse_file_safe(file):
    """(file, units, error) triple; used directly and by worker pools."""
    try:
        return file, parse_functions(file), None
    except ParseError as exc:
        return file, [], str(exc)


def pairs_from_parsed(parsed, manifest, summary):
    """Turn (file, units, error) triples into CodeDocPairs, keeping tallies."""
    for file, units, error in parsed:
        summary.files_seen += 1
        if error is not None:
            summary.files_failed += 1
            continue
        summary.functions_seen += len(units)
        entry = manifest.get(file.repo_id)
        stars = entry.stars if entry is not None else None
        for unit in units:
            if not unit.docstring:
                continue
            summary.pairs_emitted += 1
            yield CodeDocPair(
                pair_id=pair_id_for(file.repo_id, file.path, unit.qualified_name, unit.start_line),
                repo_id=file.repo_id,
                path=file.path,
                unit=unit,
                repo_stars=stars,
            )


def extract_pairs(files, manifest, summary=None):
    """Yield a CodeDocPair for every documented function in the file stream.

    Files are expected in deterministic order (lexicographic path per repo);
    units within a file come out sorted by start line. Parse failures are
    tallied in the summary instead of aborting the run.
    """
    if summary is None:
        summary = ExtractionSummary()
    yield from pairs_from_parsed(map(parse_file_safe, files), manifest, summary)


def load_manifest(path, min_stars=60):
    """Read a repo manifest (JSON-lines) and drop repos at or below min_stars."""
    manifest = {}
    for line_number, record in enumerate(jsonl.read_records(path), start=1):
        for field in ("repo_id", "stars", "root"):
            if field not in record:
                raise SchemaError(path, line_number, f"manifest record missing '{field}'")
        if record["stars"] <= min_stars:
            continue
        manifest[record["repo_id"]] = RepoEntry(
            repo_id=record["repo_id"],
            stars=record["stars"],
            license=record.get("license", ""),
            root=record["root"],
        )
    return manifest


def iter_source_files(manifest, base_dir="."):
    """Walk manifest repo roots and yield SourceFiles in deterministic order.

    Repos are visited sorted by repo_id, files in lexicographic relative-path
    order. Invalid UTF-8 is decoded with replacement characters.
    """
    base = Path(base_dir)
    for repo_id in sorted(manifest):
        root = base / manifest[repo_id].root
        paths = sorted(p for p in root.rglob("*.py") if p.is_file())
        for p in paths:
            rel = p.relative_to(root).as_posix()
            content = p.read_bytes().decode("utf-8", errors="replace")
            yield SourceFile(path=rel, repo_id=repo_id, content=content)


def pair_to_record(pair):
    unit = pair.unit
    return {
        "pair_id": pair.pair_id,
        "repo_id": pair.repo_id,
        "path": pair.path,
        "qualified_name": unit.qualified_name,
        "signature": unit.signature,
        "body_code": unit.body_code,
        "docstring": unit.docstring,
        "start_line": unit.start_line,
        "end_line": unit.end_line,
        "code_line_count": unit.code_line_count,
        "doc_line_count": unit.doc_line_count,
        "complexity": unit.complexity,
        "has_branch_blocks": unit.has_branch_blocks,
        "repo_stars": pair.repo_stars,
    }


def pair_from_record(record):
    unit = FunctionUnit(
        qualified_name=record["qualified_name"],
        signature=record["signature"],
        body_code=record["body_code"],
        docstring=record["docstring"],
        start_line=record["start_line"],
        end_line=record["end_line"],
        code_line_count=record["code_line_count"],
        doc_line_count=record["doc_line_count"],
        complexity=record["complexity"],
        has_branch_blocks=record["has_branch_blocks"],
    )
    return CodeDocPair(
        pair_id=record["pair_id"],
        repo_id=record["repo_id"],
        path=record["path"],
        unit=unit,
        repo_stars=record.get("repo_stars"),
    )
