"""JSON-lines reading and writing with fixed field order.

All corpus artifacts are UTF-8 JSON-lines: one object per line, keys emitted
in a fixed order so that re-running a stage produces byte-identical files.
Lines starting with '#' are treated as comments and skipped on read.
"""

import gzip
import io
import json

from .errors import SchemaError


def dumps(obj):
    # insertion order of the dict is the published field order
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


class _CascadingWriter(io.TextIOWrapper):
    """TextIOWrapper over a gzip member that also closes the underlying file."""

    def __init__(self, gz, raw):
        super().__init__(gz, encoding="utf-8")
        self._raw_file = raw

    def close(self):
        try:
            super().close()
        finally:
            self._raw_file.close()


def open_text(path, mode="rt"):
    path = str(path)
    if path.endswith(".gz"):
        if "w" in mode:
            # mtime pinned to zero so compressed outputs stay byte-reproducible
            raw = open(path, "wb")
            gz = gzip.GzipFile(filename="", mode="wb", fileobj=raw, mtime=0)
            return _CascadingWriter(gz, raw)
        return gzip.open(path, mode, encoding="utf-8")
    return open(path, mode.rstrip("t") or "r", encoding="utf-8")


def write_records(path, records, header_comment=None):
    """Write records to a JSON-lines file; returns the number written."""
    count = 0
    with open_text(path, "wt") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        for record in records:
            fh.write(dumps(record))
            fh.write("\n")
            count += 1
    return count


def read_records(path, required_fields=None):
    """Yield parsed objects from a JSON-lines file.

    Raises SchemaError with the offending line number on malformed JSON or
    when a required field is missing.
    """
    with open_text(path, "rt") as fh:
        for line_number, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            try:
                obj = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise SchemaError(path, line_number, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise SchemaError(path, line_number, "expected a JSON object")
            if required_fields:
                missing = [f for f in required_fields if f not in obj]
                if missing:
                    raise SchemaError(path, line_number, f"missing fields: {', '.join(missing)}")
            yield obj
